#include "rocpost/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "rocpost/errors.hpp"
#include "rocpost/fmt.hpp"

namespace rocpost {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (raw.empty() || end != raw.c_str() + raw.size())
    throw InputError(where + ": bad number '" + raw + "'");
  return v;
}

long parse_long(const std::string& raw, const std::string& where) {
  char* end = nullptr;
  const long v = std::strtol(raw.c_str(), &end, 10);
  if (raw.empty() || end != raw.c_str() + raw.size())
    throw InputError(where + ": bad integer '" + raw + "'");
  return v;
}

bool parse_bool(const std::string& raw, const std::string& where) {
  if (raw == "0" || raw == "false") return false;
  if (raw == "1" || raw == "true") return true;
  throw InputError(where + ": bad flag '" + raw + "'");
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  cfg.constraints.clear();  // file lists its own; defaults only without file
  bool constraints_seen = false;
  cfg.synth.groups.clear();
  std::map<std::string, SynthGroup*> synth_groups;

  std::string section;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = t.substr(1, t.size() - 2);
      if (section != "io" && section != "split" && section != "run" &&
          section != "constraints" && section != "region" &&
          section != "construct" && section != "synth")
        throw InputError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InputError(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));

    if (section == "io") {
      if (key == "input") cfg.input = val;
      else if (key == "post_input") cfg.post_input = val;
      else if (key == "test_input") cfg.test_input = val;
      else if (key == "score_col") cfg.schema.score_col = val;
      else if (key == "group_col") cfg.schema.group_col = val;
      else if (key == "label_col") cfg.schema.label_col = val;
      else if (key == "out_dir") cfg.out_dir = val;
      else throw InputError(where + ": unknown key '" + key + "' in [io]");
    } else if (section == "split") {
      if (key == "train") cfg.split.train = parse_double(val, where);
      else if (key == "post") cfg.split.post = parse_double(val, where);
      else if (key == "test") cfg.split.test = parse_double(val, where);
      else throw InputError(where + ": unknown key '" + key + "' in [split]");
    } else if (section == "run") {
      if (key == "seed") {
        char* end = nullptr;
        cfg.seed = std::strtoull(val.c_str(), &end, 10);
        if (val.empty() || end != val.c_str() + val.size())
          throw InputError(where + ": bad seed '" + val + "'");
      } else if (key == "repeat") {
        cfg.repeat = static_cast<int>(parse_long(val, where));
        if (cfg.repeat < 1) throw InputError(where + ": repeat must be >= 1");
      } else if (key == "mechanism") {
        const auto m = mechanism_from_name(val);
        if (!m)
          throw InputError(where + ": unknown mechanism '" + val +
                           "' (want ad or lf)");
        cfg.construct.mechanism = *m;
      } else if (key == "diagnostics") {
        cfg.diagnostics = parse_bool(val, where);
      } else if (key == "lp_dump") {
        cfg.lp_dump = parse_bool(val, where);
      } else {
        throw InputError(where + ": unknown key '" + key + "' in [run]");
      }
    } else if (section == "constraints") {
      if (key == "active") {
        constraints_seen = true;
        std::stringstream ss(val);
        std::string item;
        while (std::getline(ss, item, ',')) {
          item = trim(item);
          if (item.empty()) continue;
          const auto colon = item.find(':');
          if (colon == std::string::npos)
            throw InputError(where + ": want metric:delta, got '" + item +
                             "'");
          const std::string mname = item.substr(0, colon);
          const auto metric = metric_from_name(mname);
          if (!metric || *metric == Metric::Custom)
            throw InputError(where + ": unknown metric '" + mname + "'");
          const double delta =
              parse_double(item.substr(colon + 1), where);
          if (delta < 0.0 || delta > 1.0)
            throw InputError(where + ": delta outside [0,1] for '" + mname +
                             "'");
          cfg.constraints.push_back({*metric, delta});
        }
      } else if (key == "epsilon") {
        cfg.epsilon = parse_double(val, where);
        if (cfg.epsilon <= 0.0)
          throw InputError(where + ": epsilon must be > 0");
      } else {
        throw InputError(where + ": unknown key '" + key +
                         "' in [constraints]");
      }
    } else if (section == "region") {
      if (key == "grid_single")
        cfg.region.grid_single = static_cast<int>(parse_long(val, where));
      else if (key == "grid_multi")
        cfg.region.grid_multi = static_cast<int>(parse_long(val, where));
      else if (key == "tau_alpha")
        cfg.region.tau_alpha = parse_double(val, where);
      else if (key == "alpha_cap")
        cfg.region.alpha_cap = parse_double(val, where);
      else
        throw InputError(where + ": unknown key '" + key + "' in [region]");
    } else if (section == "construct") {
      if (key == "snap_xi")
        cfg.construct.snap_xi = parse_double(val, where);
      else if (key == "coarse_points")
        cfg.construct.coarse_points = static_cast<int>(parse_long(val, where));
      else if (key == "golden_tol")
        cfg.construct.golden_tol = parse_double(val, where);
      else if (key == "golden_max_iter")
        cfg.construct.golden_max_iter =
            static_cast<int>(parse_long(val, where));
      else
        throw InputError(where + ": unknown key '" + key + "' in [construct]");
    } else if (section == "synth") {
      if (key == "cell") {
        // <group> <pos|neg> <count> <alpha> <beta>
        std::stringstream ss(val);
        std::string gname, cls;
        long count;
        double alpha, beta;
        if (!(ss >> gname >> cls >> count >> alpha >> beta) ||
            (cls != "pos" && cls != "neg"))
          throw InputError(where +
                           ": want 'cell = <group> pos|neg <count> <alpha> "
                           "<beta>'");
        auto it = synth_groups.find(gname);
        if (it == synth_groups.end()) {
          cfg.synth.groups.push_back({gname, {}, {}});
          it = synth_groups.emplace(gname, &cfg.synth.groups.back()).first;
          // pointers into the vector: reserve is not enough, re-map instead
          synth_groups.clear();
          for (auto& g : cfg.synth.groups) synth_groups[g.name] = &g;
          it = synth_groups.find(gname);
        }
        SynthCell cell{count, alpha, beta};
        (cls == "pos" ? it->second->pos : it->second->neg) = cell;
      } else {
        throw InputError(where + ": unknown key '" + key + "' in [synth]");
      }
    } else {
      throw InputError(where + ": key outside any section");
    }
  }
  if (!constraints_seen) {
    cfg.constraints = RunConfig().constraints;
  }

  if (cfg.split.train <= 0 || cfg.split.post <= 0 || cfg.split.test <= 0 ||
      std::fabs(cfg.split.train + cfg.split.post + cfg.split.test - 1.0) >
          1e-9)
    throw InputError(origin + ": split fractions must be positive and sum to 1");
  if (cfg.region.grid_single < 2 || cfg.region.grid_multi < 2)
    throw InputError(origin + ": centroid grids need at least 2 points");
  if (cfg.region.tau_alpha <= 0 || cfg.region.alpha_cap < 1)
    throw InputError(origin + ": bad guard parameters");
  if (cfg.construct.snap_xi <= 0 || cfg.construct.coarse_points < 2 ||
      cfg.construct.golden_tol <= 0 || cfg.construct.golden_max_iter < 1)
    throw InputError(origin + ": bad construction parameters");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_config(in, path);
}

void emit_config(std::ostream& out, const RunConfig& cfg) {
  out << "[io]\n";
  out << "input = " << cfg.input << "\n";
  out << "post_input = " << cfg.post_input << "\n";
  out << "test_input = " << cfg.test_input << "\n";
  out << "score_col = " << cfg.schema.score_col << "\n";
  out << "group_col = " << cfg.schema.group_col << "\n";
  out << "label_col = " << cfg.schema.label_col << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
  out << "[split]\n";
  out << "train = " << fmt_g17(cfg.split.train) << "\n";
  out << "post = " << fmt_g17(cfg.split.post) << "\n";
  out << "test = " << fmt_g17(cfg.split.test) << "\n";
  out << "[run]\n";
  out << "seed = " << cfg.seed << "\n";
  out << "repeat = " << cfg.repeat << "\n";
  out << "mechanism = " << mechanism_name(cfg.construct.mechanism) << "\n";
  out << "diagnostics = " << (cfg.diagnostics ? 1 : 0) << "\n";
  out << "lp_dump = " << (cfg.lp_dump ? 1 : 0) << "\n";
  out << "[constraints]\n";
  out << "active = ";
  for (std::size_t i = 0; i < cfg.constraints.size(); ++i) {
    if (i) out << ",";
    out << metric_name(cfg.constraints[i].metric) << ":"
        << fmt_g17(cfg.constraints[i].delta);
  }
  out << "\n";
  out << "epsilon = " << fmt_g17(cfg.epsilon) << "\n";
  out << "[region]\n";
  out << "grid_single = " << cfg.region.grid_single << "\n";
  out << "grid_multi = " << cfg.region.grid_multi << "\n";
  out << "tau_alpha = " << fmt_g17(cfg.region.tau_alpha) << "\n";
  out << "alpha_cap = " << fmt_g17(cfg.region.alpha_cap) << "\n";
  out << "[construct]\n";
  out << "snap_xi = " << fmt_g17(cfg.construct.snap_xi) << "\n";
  out << "coarse_points = " << cfg.construct.coarse_points << "\n";
  out << "golden_tol = " << fmt_g17(cfg.construct.golden_tol) << "\n";
  out << "golden_max_iter = " << cfg.construct.golden_max_iter << "\n";
  out << "[synth]\n";
  for (const auto& g : cfg.synth.groups) {
    out << "cell = " << g.name << " pos " << g.pos.count << " "
        << fmt_g17(g.pos.alpha) << " " << fmt_g17(g.pos.beta) << "\n";
    out << "cell = " << g.name << " neg " << g.neg.count << " "
        << fmt_g17(g.neg.alpha) << " " << fmt_g17(g.neg.beta) << "\n";
  }
}

std::string config_text(const RunConfig& cfg) {
  std::ostringstream ss;
  emit_config(ss, cfg);
  return ss.str();
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = config_text(cfg);
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::vector<ConstraintSpec> active_specs(const RunConfig& cfg,
                                         const GroupStats& stats) {
  if (cfg.constraints.empty())
    throw InputError("no active constraints configured");
  std::vector<ConstraintSpec> specs;
  for (const auto& ac : cfg.constraints)
    specs.push_back(builtin_spec(ac.metric, stats, ac.delta, cfg.epsilon));
  return specs;
}

}  // namespace rocpost
