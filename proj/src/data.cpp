#include "rocpost/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>

#include "rocpost/errors.hpp"
#include "rocpost/fmt.hpp"
#include "rocpost/rng.hpp"

namespace rocpost {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

Dataset parse_csv(std::istream& in, const CsvSchema& schema,
                  const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw InputError(origin + ": empty file");
  const auto header = split_fields(line);

  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (trim(header[i]) == name) return static_cast<int>(i);
    throw InputError(origin + ": missing column '" + name + "'");
  };
  const int ci_score = column(schema.score_col);
  const int ci_group = column(schema.group_col);
  const int ci_label = column(schema.label_col);

  Dataset data;
  std::map<std::string, int> group_ids;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    auto field = [&](int idx) -> const std::string& {
      if (idx >= static_cast<int>(fields.size()))
        throw InputError(origin + ":" + std::to_string(lineno) +
                         ": too few fields");
      return fields[idx];
    };

    ScoredSample s;
    {
      const std::string raw = trim(field(ci_score));
      char* end = nullptr;
      s.score = std::strtod(raw.c_str(), &end);
      if (raw.empty() || end != raw.c_str() + raw.size() ||
          !std::isfinite(s.score))
        throw InputError(origin + ":" + std::to_string(lineno) +
                         ": bad score '" + raw + "'");
    }
    {
      const std::string raw = trim(field(ci_label));
      if (raw == "0")
        s.label = 0;
      else if (raw == "1")
        s.label = 1;
      else
        throw InputError(origin + ":" + std::to_string(lineno) +
                         ": bad label '" + raw + "' (want 0 or 1)");
    }
    {
      const std::string raw = trim(field(ci_group));
      if (raw.empty())
        throw InputError(origin + ":" + std::to_string(lineno) +
                         ": empty group");
      auto it = group_ids.find(raw);
      if (it == group_ids.end()) {
        it = group_ids.emplace(raw, data.group_count()).first;
        data.group_names.push_back(raw);
      }
      s.group = it->second;
    }
    data.samples.push_back(s);
  }
  if (data.samples.empty()) throw InputError(origin + ": no data rows");
  return data;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_csv(in, schema, path);
}

void write_csv(const std::string& path, const Dataset& data,
               const CsvSchema& schema) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << schema.score_col << ',' << schema.group_col << ','
      << schema.label_col << '\n';
  for (const auto& s : data.samples) {
    out << fmt_g17(s.score) << ',' << data.group_names[s.group] << ','
        << s.label << '\n';
  }
  if (!out) throw InputError("write failed for '" + path + "'");
}

GroupStats compute_stats(const Dataset& data) {
  const int k = data.group_count();
  GroupStats st;
  st.n.assign(k, 0);
  st.n_pos.assign(k, 0);
  st.n_neg.assign(k, 0);
  for (const auto& s : data.samples) {
    ++st.n[s.group];
    (s.label ? st.n_pos : st.n_neg)[s.group]++;
  }
  st.prevalence.resize(k);
  st.proportion.resize(k);
  const double total = static_cast<double>(data.size());
  for (int a = 0; a < k; ++a) {
    if (st.n_pos[a] == 0 || st.n_neg[a] == 0)
      throw DegenerateGroupError("group '" + data.group_names[a] +
                                 "' lacks a positive or negative sample");
    st.prevalence[a] = static_cast<double>(st.n_pos[a]) / st.n[a];
    st.proportion[a] = st.n[a] / total;
  }
  return st;
}

SplitResult split(const Dataset& data, const SplitFractions& f,
                  std::uint64_t seed) {
  if (f.train <= 0 || f.post <= 0 || f.test <= 0)
    throw InputError("split fractions must be positive");
  if (std::fabs(f.train + f.post + f.test - 1.0) > 1e-9)
    throw InputError("split fractions must sum to 1");

  const std::size_t n = data.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  // Fisher-Yates with our own draws; std::shuffle is not portable-stable.
  Rng rng(seed, 0x73706c6974ULL);  // stream tag: "split"
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(idx[i - 1], idx[j]);
  }

  const auto n_train = static_cast<std::size_t>(std::llround(n * f.train));
  const auto n_train_post =
      static_cast<std::size_t>(std::llround(n * (f.train + f.post)));

  SplitResult out;
  out.train.group_names = data.group_names;
  out.post.group_names = data.group_names;
  out.test.group_names = data.group_names;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = data.samples[idx[i]];
    if (i < n_train)
      out.train.samples.push_back(s);
    else if (i < n_train_post)
      out.post.samples.push_back(s);
    else
      out.test.samples.push_back(s);
  }
  return out;
}

Dataset synth_generate(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.groups.empty()) throw InputError("synth spec has no groups");
  Dataset data;
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const auto& grp = spec.groups[g];
    data.group_names.push_back(grp.name.empty() ? std::to_string(g)
                                                : grp.name);
    if (grp.pos.count <= 0 || grp.neg.count <= 0)
      throw InputError("synth group '" + data.group_names.back() +
                       "' needs positive counts in both classes");
    // Distinct stream per (group, label) cell keeps cells independent.
    for (int label = 0; label <= 1; ++label) {
      const SynthCell& cell = label ? grp.pos : grp.neg;
      Rng rng(seed, (static_cast<std::uint64_t>(g) << 1) | label);
      if (cell.alpha <= 0 || cell.beta <= 0)
        throw InputError("beta shape parameters must be positive");
      for (long i = 0; i < cell.count; ++i) {
        ScoredSample s;
        s.score = rng.beta(cell.alpha, cell.beta);
        s.group = static_cast<int>(g);
        s.label = label;
        data.samples.push_back(s);
      }
    }
  }
  return data;
}

}  // namespace rocpost
