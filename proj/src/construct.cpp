#include "rocpost/construct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "rocpost/errors.hpp"
#include "rocpost/fmt.hpp"
#include "rocpost/rng.hpp"

namespace rocpost {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kClamp = 1e-9;

// Draw-round tags for the per-sample random streams.
constexpr std::uint64_t kStreamTheta = 1;
constexpr std::uint64_t kStreamMech = 2;
constexpr std::uint64_t kStreamLabel = 3;

std::optional<double> clamp01(double x) {
  if (x < 0.0) {
    if (x < -kClamp) return std::nullopt;
    return 0.0;
  }
  if (x > 1.0) {
    if (x > 1.0 + kClamp) return std::nullopt;
    return 1.0;
  }
  return x;
}

std::uint64_t stream(std::uint64_t tag, int group) {
  return (tag << 32) | static_cast<std::uint32_t>(group);
}

}  // namespace

std::string mechanism_name(Mechanism m) {
  return m == Mechanism::AntiDiagonal ? "ad" : "lf";
}

std::optional<Mechanism> mechanism_from_name(const std::string& name) {
  if (name == "ad") return Mechanism::AntiDiagonal;
  if (name == "lf") return Mechanism::LabelFlipping;
  return std::nullopt;
}

BasePoint edge_point(const GroupHull& hull, std::size_t edge, double theta) {
  if (edge + 1 >= hull.supports.size())
    throw InternalError("edge index out of range");
  const auto& a = hull.supports[edge];
  const auto& b = hull.supports[edge + 1];
  BasePoint out;
  out.fnr = (1.0 - theta) * a.fnr + theta * b.fnr;
  out.fpr = (1.0 - theta) * a.fpr + theta * b.fpr;
  out.s_plus = (1.0 - theta) * a.selection_rate + theta * b.selection_rate;
  return out;
}

std::optional<MechanismParams> anti_diagonal_params(const BasePoint& base,
                                                    double t_fnr,
                                                    double t_fpr) {
  const double sum0 = base.fnr + base.fpr;
  const double den = 1.0 - sum0;
  if (std::fabs(den) < 1e-12)
    throw DegenerateBaseError("base point sits on the chance line");
  const auto mix = clamp01((t_fnr + t_fpr - sum0) / den);
  if (!mix) return std::nullopt;
  MechanismParams out;
  out.variant = Mechanism::AntiDiagonal;
  out.mix = *mix;
  if (*mix == 0.0) {
    // The sum equation alone cannot certify attainment: any mix > 0 moves
    // fnr+fpr strictly toward 1, so a distinct target on the base's own
    // anti-diagonal level is unreachable.
    if (std::fabs(t_fnr - base.fnr) > kClamp ||
        std::fabs(t_fpr - base.fpr) > kClamp)
      return std::nullopt;
    out.p = 0.5;  // unused branch; fixed for reproducible serialization
    return out;
  }
  const auto p = clamp01((t_fpr - (1.0 - *mix) * base.fpr) / *mix);
  if (!p) return std::nullopt;
  out.p = *p;
  return out;
}

std::optional<MechanismParams> label_flipping_params(const BasePoint& base,
                                                     double t_fnr,
                                                     double t_fpr) {
  const double det = base.fpr + base.fnr - 1.0;
  if (std::fabs(det) < 1e-12)
    throw DegenerateBaseError("base point sits on the chance line");
  const auto p1 =
      clamp01((t_fpr * base.fnr - (1.0 - t_fnr) * (1.0 - base.fpr)) / det);
  const auto p0 =
      clamp01(((1.0 - t_fnr) * base.fpr - t_fpr * (1.0 - base.fnr)) / det);
  if (!p1 || !p0) return std::nullopt;
  MechanismParams out;
  out.variant = Mechanism::LabelFlipping;
  out.p1 = *p1;
  out.p0 = *p0;
  return out;
}

double expected_intervention(const BasePoint& base,
                             const MechanismParams& params) {
  if (params.variant == Mechanism::AntiDiagonal)
    return params.mix *
           (base.s_plus * (1.0 - params.p) + (1.0 - base.s_plus) * params.p);
  return base.s_plus * (1.0 - params.p1) + (1.0 - base.s_plus) * params.p0;
}

RatePoint recipe_rates(const GroupRecipe& r) {
  const double fnr0 = (1.0 - r.theta) * r.hi.fnr + r.theta * r.lo.fnr;
  const double fpr0 = (1.0 - r.theta) * r.hi.fpr + r.theta * r.lo.fpr;
  if (r.params.variant == Mechanism::AntiDiagonal) {
    const double fnr =
        (1.0 - r.params.mix) * fnr0 + r.params.mix * (1.0 - r.params.p);
    const double fpr = (1.0 - r.params.mix) * fpr0 + r.params.mix * r.params.p;
    return {1.0 - fnr, fpr};
  }
  const double tpr = (1.0 - fnr0) * r.params.p1 + fnr0 * r.params.p0;
  const double fpr = fpr0 * r.params.p1 + (1.0 - fpr0) * r.params.p0;
  return {tpr, fpr};
}

namespace {

std::optional<MechanismParams> params_for(Mechanism mech,
                                          const BasePoint& base, double t_fnr,
                                          double t_fpr) {
  try {
    return mech == Mechanism::AntiDiagonal
               ? anti_diagonal_params(base, t_fnr, t_fpr)
               : label_flipping_params(base, t_fnr, t_fpr);
  } catch (const DegenerateBaseError&) {
    return std::nullopt;  // unusable theta, not a caller error
  }
}

MechanismParams identity_params(Mechanism mech) {
  MechanismParams p;
  p.variant = mech;
  if (mech == Mechanism::AntiDiagonal) {
    p.mix = 0.0;
    p.p = 0.5;
  } else {
    p.p1 = 1.0;
    p.p0 = 0.0;
  }
  return p;
}

}  // namespace

GroupRecipe min_intervention(const GroupHull& hull, const RatePoint& target,
                             const ConstructConfig& cfg) {
  const double t_fnr = 1.0 - target.tpr;
  const double t_fpr = target.fpr;
  const double tol_fpr = cfg.snap_xi / hull.n_neg;
  const double tol_fnr = cfg.snap_xi / hull.n_pos;
  if (!hull_contains(hull, target, std::max(tol_fpr, tol_fnr)))
    throw ConstructionInfeasibleError("target rates outside the group hull");

  GroupRecipe out;
  out.group = hull.group;

  // Snap pass: scaled distance to each edge, minimized over theta. The
  // per-axis scaling makes "on the boundary" mean "within counting noise".
  double best_scaled = kInf;
  std::size_t best_edge = 0;
  double best_theta = 0.0;
  for (std::size_t e = 0; e + 1 < hull.supports.size(); ++e) {
    const auto& a = hull.supports[e];
    const auto& b = hull.supports[e + 1];
    const double dfpr0 = a.fpr - t_fpr, dfpr1 = b.fpr - t_fpr;
    const double dfnr0 = a.fnr - t_fnr, dfnr1 = b.fnr - t_fnr;
    // Candidates: zeros of each residual, their scaled crossings, endpoints.
    std::vector<double> cand{0.0, 1.0};
    auto add_root = [&cand](double r0, double r1) {
      const double d = r0 - r1;
      if (d != 0.0) cand.push_back(r0 / d);
    };
    add_root(dfpr0, dfpr1);
    add_root(dfnr0, dfnr1);
    add_root(dfpr0 / tol_fpr - dfnr0 / tol_fnr,
             dfpr1 / tol_fpr - dfnr1 / tol_fnr);
    add_root(dfpr0 / tol_fpr + dfnr0 / tol_fnr,
             dfpr1 / tol_fpr + dfnr1 / tol_fnr);
    for (double th : cand) {
      th = std::clamp(th, 0.0, 1.0);
      const double dfpr = (1.0 - th) * dfpr0 + th * dfpr1;
      const double dfnr = (1.0 - th) * dfnr0 + th * dfnr1;
      const double scaled =
          std::max(std::fabs(dfpr) / tol_fpr, std::fabs(dfnr) / tol_fnr);
      if (scaled < best_scaled) {
        best_scaled = scaled;
        best_edge = e;
        best_theta = th;
      }
    }
  }
  if (best_scaled <= 1.0) {
    out.hi = hull.supports[best_edge];
    out.lo = hull.supports[best_edge + 1];
    out.theta = best_theta;
    out.params = identity_params(cfg.mechanism);
    const BasePoint base = edge_point(hull, best_edge, best_theta);
    out.target_fnr = base.fnr;
    out.target_fpr = base.fpr;
    out.expected_intervention = 0.0;
    out.snapped = true;
    return out;
  }

  // Interior target: search every edge. Feasible theta form an interval per
  // edge, so coarse contiguous runs refined by golden section are exhaustive.
  double best_obj = kInf;
  bool found = false;
  MechanismParams best_params;
  for (std::size_t e = 0; e + 1 < hull.supports.size(); ++e) {
    const int n = cfg.coarse_points;
    std::vector<double> obj(n, kInf);
    for (int i = 0; i < n; ++i) {
      const double th = i / (n - 1.0);
      const BasePoint base = edge_point(hull, e, th);
      if (const auto par = params_for(cfg.mechanism, base, t_fnr, t_fpr))
        obj[i] = expected_intervention(base, *par);
    }

    auto consider = [&](double th) {
      const BasePoint base = edge_point(hull, e, th);
      const auto par = params_for(cfg.mechanism, base, t_fnr, t_fpr);
      const double val = par ? expected_intervention(base, *par) : kInf;
      if (val < best_obj) {
        best_obj = val;
        best_edge = e;
        best_theta = th;
        best_params = *par;
        found = true;
      }
      return val;
    };
    auto feasible_at = [&](double th) {
      return params_for(cfg.mechanism, edge_point(hull, e, th), t_fnr, t_fpr)
          .has_value();
    };

    int i = 0;
    while (i < n) {
      if (obj[i] == kInf) {
        ++i;
        continue;
      }
      int j = i;
      while (j + 1 < n && obj[j + 1] != kInf) ++j;  // run [i, j]
      for (int k = i; k <= j; ++k) {
        const bool left_ok = k == i || obj[k] <= obj[k - 1];
        const bool right_ok = k == j || obj[k] <= obj[k + 1];
        if (!left_ok || !right_ok) continue;
        double lo = (k > i ? (k - 1) : k) / (n - 1.0);
        double hi = (k < j ? (k + 1) : k) / (n - 1.0);
        // The minimum may sit at the feasibility boundary inside the cell
        // next to a run endpoint; feasible theta form an interval per edge,
        // so bisecting for the boundary is sound.
        if (k == i && i > 0) {
          double a = (i - 1) / (n - 1.0), b = lo;
          while (b - a > 0.1 * cfg.golden_tol)
            (feasible_at(0.5 * (a + b)) ? b : a) = 0.5 * (a + b);
          lo = b;
        }
        if (k == j && j + 1 < n) {
          double a = hi, b = (j + 1) / (n - 1.0);
          while (b - a > 0.1 * cfg.golden_tol)
            (feasible_at(0.5 * (a + b)) ? a : b) = 0.5 * (a + b);
          hi = a;
        }
        consider(lo);
        consider(hi);
        consider(k / (n - 1.0));
        // Golden section on the bracket; +inf never appears inside a run.
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo);
        double x2 = lo + gr * (hi - lo);
        double f1 = consider(x1);
        double f2 = consider(x2);
        for (int it = 0; it < cfg.golden_max_iter && hi - lo > cfg.golden_tol;
             ++it) {
          if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = consider(x1);
          } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = consider(x2);
          }
        }
      }
      i = j + 1;
    }
  }
  if (!found)
    throw ConstructionInfeasibleError(
        "no mechanism parameters reach the target rates");

  out.hi = hull.supports[best_edge];
  out.lo = hull.supports[best_edge + 1];
  out.theta = best_theta;
  out.params = best_params;
  const RatePoint attained = recipe_rates(out);
  out.target_fnr = 1.0 - attained.tpr;
  out.target_fpr = attained.fpr;
  const BasePoint base = edge_point(hull, best_edge, best_theta);
  out.expected_intervention = expected_intervention(base, best_params);
  out.snapped = false;
  return out;
}

Recipe build_recipe(const std::vector<GroupHull>& hulls,
                    const std::vector<RatePoint>& targets,
                    const std::vector<std::string>& group_names,
                    const ConstructConfig& cfg, std::uint64_t seed,
                    const std::string& config_hash) {
  if (hulls.size() != targets.size() || hulls.size() != group_names.size())
    throw InternalError("recipe: group count mismatch");
  Recipe recipe;
  recipe.seed = seed;
  recipe.config_hash = config_hash;
  recipe.requested = targets;
  for (std::size_t a = 0; a < hulls.size(); ++a) {
    GroupRecipe r = min_intervention(hulls[a], targets[a], cfg);
    r.group = static_cast<int>(a);
    r.group_name = group_names[a];
    recipe.groups.push_back(std::move(r));
  }
  return recipe;
}

Prediction predict_one(const GroupRecipe& r, std::uint64_t seed, double score,
                       std::uint64_t sample_index) {
  const double u_theta =
      Rng::uniform_at(seed, stream(kStreamTheta, r.group), sample_index);
  const HullSupport& rule = u_theta < r.theta ? r.lo : r.hi;
  const int base = rule.above_all ? 0 : (score >= rule.threshold ? 1 : 0);

  const double u_mech =
      Rng::uniform_at(seed, stream(kStreamMech, r.group), sample_index);
  Prediction out;
  out.base = base;
  if (r.params.variant == Mechanism::AntiDiagonal) {
    if (u_mech < r.params.mix) {
      const double u_label =
          Rng::uniform_at(seed, stream(kStreamLabel, r.group), sample_index);
      out.label = u_label < r.params.p ? 1 : 0;
    } else {
      out.label = base;
    }
  } else {
    const double keep = base ? r.params.p1 : r.params.p0;
    out.label = u_mech < keep ? 1 : 0;
  }
  return out;
}

std::vector<Prediction> predict(const Recipe& recipe, const Dataset& data) {
  std::vector<const GroupRecipe*> by_id(recipe.groups.size(), nullptr);
  for (const auto& g : recipe.groups) {
    if (g.group < 0 || g.group >= static_cast<int>(by_id.size()))
      throw InputError("recipe group ids are not dense");
    by_id[g.group] = &g;
  }
  std::vector<Prediction> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data.samples[i];
    if (s.group >= static_cast<int>(by_id.size()) || !by_id[s.group])
      throw InputError("sample group " + std::to_string(s.group) +
                       " missing from recipe");
    out.push_back(predict_one(*by_id[s.group], recipe.seed, s.score, i));
  }
  return out;
}

namespace {

void write_support(std::ostream& out, const std::string& prefix,
                   const HullSupport& s) {
  out << prefix << "_threshold = "
      << (s.above_all ? "above_all" : fmt_g17(s.threshold)) << "\n";
  out << prefix << "_fnr = " << fmt_g17(s.fnr) << "\n";
  out << prefix << "_fpr = " << fmt_g17(s.fpr) << "\n";
  out << prefix << "_selection = " << fmt_g17(s.selection_rate) << "\n";
}

}  // namespace

void write_recipe(std::ostream& out, const Recipe& recipe) {
  out << "rocpost-recipe v1\n";
  out << "seed = " << recipe.seed << "\n";
  out << "config_hash = " << recipe.config_hash << "\n";
  out << "groups = " << recipe.groups.size() << "\n";
  for (std::size_t a = 0; a < recipe.groups.size(); ++a) {
    const auto& g = recipe.groups[a];
    out << "[group " << g.group << "]\n";
    out << "name = " << g.group_name << "\n";
    out << "requested_tpr = " << fmt_g17(recipe.requested[a].tpr) << "\n";
    out << "requested_fpr = " << fmt_g17(recipe.requested[a].fpr) << "\n";
    write_support(out, "hi", g.hi);
    write_support(out, "lo", g.lo);
    out << "theta = " << fmt_g17(g.theta) << "\n";
    out << "mechanism = " << mechanism_name(g.params.variant) << "\n";
    if (g.params.variant == Mechanism::AntiDiagonal) {
      out << "mix = " << fmt_g17(g.params.mix) << "\n";
      out << "p = " << fmt_g17(g.params.p) << "\n";
    } else {
      out << "p1 = " << fmt_g17(g.params.p1) << "\n";
      out << "p0 = " << fmt_g17(g.params.p0) << "\n";
    }
    out << "target_fnr = " << fmt_g17(g.target_fnr) << "\n";
    out << "target_fpr = " << fmt_g17(g.target_fpr) << "\n";
    out << "expected_intervention = " << fmt_g17(g.expected_intervention)
        << "\n";
    out << "snapped = " << (g.snapped ? 1 : 0) << "\n";
  }
}

void save_recipe(const std::string& path, const Recipe& recipe) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_recipe(out, recipe);
  if (!out) throw InputError("write failed for '" + path + "'");
}

namespace {

struct KvReader {
  std::istream& in;
  std::string origin;
  long lineno = 0;
  std::string pending;
  bool has_pending = false;

  bool next_line(std::string& line) {
    if (has_pending) {
      line = pending;
      has_pending = false;
      return true;
    }
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  void push_back(const std::string& line) {
    pending = line;
    has_pending = true;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(origin + ":" + std::to_string(lineno) + ": " + msg);
  }

  std::string expect(const std::string& key) {
    std::string line;
    if (!next_line(line)) fail("missing '" + key + "'");
    const auto eq = line.find(" = ");
    if (eq == std::string::npos || line.substr(0, eq) != key)
      fail("expected '" + key + " = ...', got '" + line + "'");
    return line.substr(eq + 3);
  }

  double expect_num(const std::string& key) {
    const std::string raw = expect(key);
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (raw.empty() || end != raw.c_str() + raw.size())
      fail("bad number for '" + key + "'");
    return v;
  }
};

HullSupport read_support(KvReader& r, const std::string& prefix) {
  HullSupport s;
  const std::string th = r.expect(prefix + "_threshold");
  if (th == "above_all") {
    s.above_all = true;
  } else {
    char* end = nullptr;
    s.threshold = std::strtod(th.c_str(), &end);
    if (th.empty() || end != th.c_str() + th.size())
      r.fail("bad threshold '" + th + "'");
  }
  s.fnr = r.expect_num(prefix + "_fnr");
  s.fpr = r.expect_num(prefix + "_fpr");
  s.selection_rate = r.expect_num(prefix + "_selection");
  return s;
}

}  // namespace

Recipe read_recipe(std::istream& in, const std::string& origin) {
  KvReader r{in, origin, 0, {}};
  std::string line;
  if (!r.next_line(line) || line != "rocpost-recipe v1")
    throw InputError(origin + ": not a recipe file");
  Recipe recipe;
  {
    const std::string raw = r.expect("seed");
    char* end = nullptr;
    recipe.seed = std::strtoull(raw.c_str(), &end, 10);
    if (raw.empty() || end != raw.c_str() + raw.size()) r.fail("bad seed");
  }
  recipe.config_hash = r.expect("config_hash");
  const long n_groups = std::lround(r.expect_num("groups"));
  if (n_groups <= 0) r.fail("bad group count");
  for (long a = 0; a < n_groups; ++a) {
    if (!r.next_line(line) || line != "[group " + std::to_string(a) + "]")
      r.fail("expected [group " + std::to_string(a) + "]");
    GroupRecipe g;
    g.group = static_cast<int>(a);
    g.group_name = r.expect("name");
    RatePoint req;
    req.tpr = r.expect_num("requested_tpr");
    req.fpr = r.expect_num("requested_fpr");
    recipe.requested.push_back(req);
    g.hi = read_support(r, "hi");
    g.lo = read_support(r, "lo");
    g.theta = r.expect_num("theta");
    const std::string mech = r.expect("mechanism");
    const auto variant = mechanism_from_name(mech);
    if (!variant) r.fail("unknown mechanism '" + mech + "'");
    g.params.variant = *variant;
    if (*variant == Mechanism::AntiDiagonal) {
      g.params.mix = r.expect_num("mix");
      g.params.p = r.expect_num("p");
    } else {
      g.params.p1 = r.expect_num("p1");
      g.params.p0 = r.expect_num("p0");
    }
    g.target_fnr = r.expect_num("target_fnr");
    g.target_fpr = r.expect_num("target_fpr");
    g.expected_intervention = r.expect_num("expected_intervention");
    g.snapped = r.expect_num("snapped") != 0;
    recipe.groups.push_back(std::move(g));
  }
  return recipe;
}

Recipe load_recipe(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_recipe(in, path);
}

}  // namespace rocpost
