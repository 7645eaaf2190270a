#include "rocpost/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "rocpost/errors.hpp"

namespace rocpost {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<int> fractional_indices(const std::vector<ConstraintSpec>& specs) {
  std::vector<int> out;
  for (std::size_t k = 0; k < specs.size(); ++k)
    if (!specs[k].linear) out.push_back(static_cast<int>(k));
  return out;
}

// Baseline vertex per group: the hull support minimizing the group's loss.
std::vector<std::size_t> baseline_vertices(const std::vector<GroupHull>& hulls,
                                           const LossSpec& loss) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < hulls.size(); ++a) {
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < hulls[a].size(); ++j) {
      const auto& s = hulls[a].supports[j];
      const double val = dot3(loss.gamma[a], {s.tpr(), s.fpr});
      if (val < best_val) {
        best_val = val;
        best = j;
      }
    }
    out.push_back(best);
  }
  return out;
}

TargetRates baseline_target(const std::vector<GroupHull>& hulls,
                            const std::vector<ConstraintSpec>& specs,
                            const LossSpec& loss) {
  const auto vertices = baseline_vertices(hulls, loss);
  TargetRates t;
  for (std::size_t a = 0; a < hulls.size(); ++a) {
    const auto& s = hulls[a].supports[vertices[a]];
    t.rho.push_back({s.tpr(), s.fpr});
    std::vector<double> lam(hulls[a].size(), 0.0);
    lam[vertices[a]] = 1.0;
    t.lambda.push_back(std::move(lam));
  }
  t.objective = loss_value(loss, t.rho);
  for (const auto& spec : specs) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t a = 0; a < hulls.size(); ++a) {
      if (!spec.linear && dot3(spec.v[a], t.rho[a]) < spec.epsilon) continue;
      const double g = dot3(spec.u[a], t.rho[a]) /
                       (spec.linear ? 1.0 : dot3(spec.v[a], t.rho[a]));
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    t.q.push_back(lo <= hi ? 0.5 * (lo + hi) : kNan);
  }
  return t;
}

std::vector<ConstraintSpec> scaled_specs(
    const std::vector<ConstraintSpec>& specs, double alpha) {
  std::vector<ConstraintSpec> out = specs;
  // Internal copies only; deltas may exceed 1 and just go slack.
  for (auto& s : out) s.delta *= alpha;
  return out;
}

}  // namespace

CentroidGrid make_centroid_grid(const std::vector<ConstraintSpec>& specs,
                                const RegionConfig& config) {
  const auto frac = fractional_indices(specs);
  const int points = frac.size() == 1 ? config.grid_single : config.grid_multi;
  if (points < 1) throw InputError("centroid grid needs at least one point");
  CentroidGrid grid;
  for (int k : frac) {
    const double lo = specs[k].delta / 2.0;
    const double hi = 1.0 - specs[k].delta / 2.0;
    std::vector<double> axis;
    if (hi <= lo || points == 1) {
      axis.push_back(hi <= lo ? 0.5 : 0.5 * (lo + hi));
    } else {
      for (int i = 0; i < points; ++i)
        axis.push_back(lo + (hi - lo) * i / (points - 1.0));
    }
    grid.axes.push_back(std::move(axis));
  }
  return grid;
}

LpProblem build_inner_lp(const std::vector<GroupHull>& hulls,
                         const std::vector<ConstraintSpec>& specs,
                         const LossSpec& loss,
                         const std::vector<double>& q_lf,
                         InnerLpLayout* layout_out) {
  const std::size_t groups = hulls.size();
  if (loss.gamma.size() != groups)
    throw InternalError("inner lp: loss group count mismatch");
  const auto frac = fractional_indices(specs);
  if (q_lf.size() != frac.size())
    throw InternalError("inner lp: centroid count mismatch");

  InnerLpLayout layout;
  layout.q_var.assign(specs.size(), -1);
  std::size_t nv = 0;
  for (const auto& h : hulls) {
    layout.lambda_offset.push_back(nv);
    nv += h.size();
  }
  for (std::size_t k = 0; k < specs.size(); ++k)
    if (specs[k].linear) layout.q_var[k] = static_cast<int>(nv++);

  LpProblem p;
  p.c.assign(nv, 0.0);
  p.lower.assign(nv, 0.0);
  p.upper.assign(nv, std::numeric_limits<double>::infinity());

  for (std::size_t a = 0; a < groups; ++a) {
    for (std::size_t j = 0; j < hulls[a].size(); ++j) {
      const auto& s = hulls[a].supports[j];
      p.c[layout.lambda_offset[a] + j] = dot3(loss.gamma[a], {s.tpr(), s.fpr});
    }
    std::vector<double> row(nv, 0.0);
    for (std::size_t j = 0; j < hulls[a].size(); ++j)
      row[layout.lambda_offset[a] + j] = 1.0;
    p.a_eq.push_back(std::move(row));
    p.b_eq.push_back(1.0);
  }

  bool any_frac = false;
  double fpr_floor = 0.0;
  std::size_t next_q = 0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& spec = specs[k];
    if (spec.u.size() != groups || spec.v.size() != groups)
      throw InternalError("inner lp: constraint group count mismatch");
    if (spec.linear) {
      const int qv = layout.q_var[k];
      // Data-derived finite box for the free centroid; never binds.
      double qlo = std::numeric_limits<double>::infinity(), qhi = -qlo;
      for (std::size_t a = 0; a < groups; ++a)
        for (const auto& s : hulls[a].supports) {
          const double g = dot3(spec.u[a], {s.tpr(), s.fpr});
          qlo = std::min(qlo, g);
          qhi = std::max(qhi, g);
        }
      p.lower[qv] = qlo - spec.delta / 2.0 - 1.0;
      p.upper[qv] = qhi + spec.delta / 2.0 + 1.0;
      for (std::size_t a = 0; a < groups; ++a) {
        std::vector<double> up(nv, 0.0), down(nv, 0.0);
        for (std::size_t j = 0; j < hulls[a].size(); ++j) {
          const auto& s = hulls[a].supports[j];
          const double g = dot3(spec.u[a], {s.tpr(), s.fpr});
          up[layout.lambda_offset[a] + j] = g;
          down[layout.lambda_offset[a] + j] = -g;
        }
        up[qv] = -1.0;
        down[qv] = 1.0;
        p.a_ub.push_back(std::move(up));
        p.b_ub.push_back(spec.delta / 2.0);
        p.a_ub.push_back(std::move(down));
        p.b_ub.push_back(spec.delta / 2.0);
      }
    } else {
      any_frac = true;
      fpr_floor = fpr_floor == 0.0 ? spec.epsilon
                                   : std::min(fpr_floor, spec.epsilon);
      const double q = q_lf[next_q++];
      for (std::size_t a = 0; a < groups; ++a) {
        // At fixed q the two-sided band is linear in rho:
        //   <u - (q + d/2) v, rho> <= 0  and  <(q - d/2) v - u, rho> <= 0,
        // plus the denominator floor <v, rho> >= epsilon.
        std::vector<double> up(nv, 0.0), down(nv, 0.0), den(nv, 0.0);
        for (std::size_t j = 0; j < hulls[a].size(); ++j) {
          const auto& s = hulls[a].supports[j];
          const RatePoint r{s.tpr(), s.fpr};
          const double un = dot3(spec.u[a], r);
          const double vn = dot3(spec.v[a], r);
          up[layout.lambda_offset[a] + j] = un - (q + spec.delta / 2.0) * vn;
          down[layout.lambda_offset[a] + j] = (q - spec.delta / 2.0) * vn - un;
          den[layout.lambda_offset[a] + j] = -vn;
        }
        p.a_ub.push_back(std::move(up));
        p.b_ub.push_back(0.0);
        p.a_ub.push_back(std::move(down));
        p.b_ub.push_back(0.0);
        p.a_ub.push_back(std::move(den));
        p.b_ub.push_back(-spec.epsilon);
      }
    }
  }

  if (any_frac) {
    // Keep every group off the zero-FPR face so fractional denominators
    // stay usable regardless of which metric they mix.
    for (std::size_t a = 0; a < groups; ++a) {
      std::vector<double> row(nv, 0.0);
      for (std::size_t j = 0; j < hulls[a].size(); ++j)
        row[layout.lambda_offset[a] + j] = -hulls[a].supports[j].fpr;
      p.a_ub.push_back(std::move(row));
      p.b_ub.push_back(-fpr_floor);
    }
  }

  if (layout_out) *layout_out = layout;
  return p;
}

std::optional<TargetRates> region_search(
    const std::vector<GroupHull>& hulls,
    const std::vector<ConstraintSpec>& specs, const LossSpec& loss,
    const CentroidGrid& grid, RegionTrace* trace) {
  const auto frac = fractional_indices(specs);
  if (grid.axes.size() != frac.size())
    throw InternalError("region: grid axis count mismatch");

  std::vector<std::size_t> idx(grid.axes.size(), 0);
  std::vector<double> q_lf(grid.axes.size(), 0.0);
  std::optional<TargetRates> best;

  for (;;) {
    for (std::size_t i = 0; i < idx.size(); ++i) q_lf[i] = grid.axes[i][idx[i]];

    InnerLpLayout layout;
    const LpProblem p = build_inner_lp(hulls, specs, loss, q_lf, &layout);
    if (trace && trace->lp_dump) p.dump(*trace->lp_dump);
    const LpSolution sol = lp_solve(p);
    if (trace)
      trace->probes.push_back({q_lf, sol.status, sol.objective});

    if (sol.status == LpStatus::Optimal &&
        (!best || sol.objective < best->objective)) {
      TargetRates t;
      for (std::size_t a = 0; a < hulls.size(); ++a) {
        std::vector<double> lam(
            sol.x.begin() + layout.lambda_offset[a],
            sol.x.begin() + layout.lambda_offset[a] + hulls[a].size());
        double sum = 0.0;
        for (double& w : lam) {
          if (w < 0.0 && w > -1e-12) w = 0.0;  // basic-solution dust
          sum += w;
        }
        if (std::fabs(sum - 1.0) > 1e-9)
          throw InternalError("region: mixture weights drifted off simplex");
        RatePoint r{0.0, 0.0};
        for (std::size_t j = 0; j < lam.size(); ++j) {
          lam[j] /= sum;
          r.tpr += lam[j] * hulls[a].supports[j].tpr();
          r.fpr += lam[j] * hulls[a].supports[j].fpr;
        }
        if (!hull_contains(hulls[a], r, 1e-8))
          throw InternalError("region: target escaped the hull");
        t.rho.push_back(r);
        t.lambda.push_back(std::move(lam));
      }
      t.q.assign(specs.size(), kNan);
      std::size_t fi = 0;
      for (std::size_t k = 0; k < specs.size(); ++k)
        t.q[k] = specs[k].linear ? sol.x[layout.q_var[k]] : q_lf[fi++];
      t.objective = sol.objective;
      best = std::move(t);
    }

    // Lexicographic increment, first axis slowest.
    std::size_t i = idx.size();
    while (i > 0) {
      --i;
      if (++idx[i] < grid.axes[i].size()) break;
      idx[i] = 0;
      if (i == 0) return best;
    }
    if (idx.empty()) return best;
  }
}

GuardResult feasibility_guard(const std::vector<GroupHull>& hulls,
                              const std::vector<ConstraintSpec>& specs,
                              const LossSpec& loss, const RegionConfig& config,
                              RegionTrace* trace) {
  GuardResult res;
  const CentroidGrid grid = make_centroid_grid(specs, config);

  const TargetRates base = baseline_target(hulls, specs, loss);
  res.baseline_gaps.assign(specs.size(), kNan);
  res.alpha_hi = 1.0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& spec = specs[k];
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    int defined = 0;
    for (std::size_t a = 0; a < hulls.size(); ++a) {
      double g;
      if (spec.linear) {
        g = dot3(spec.u[a], base.rho[a]);
      } else {
        const double den = dot3(spec.v[a], base.rho[a]);
        if (den < spec.epsilon) continue;
        g = dot3(spec.u[a], base.rho[a]) / den;
      }
      lo = std::min(lo, g);
      hi = std::max(hi, g);
      ++defined;
    }
    if (defined < 2) {
      res.alpha_hi = std::max(res.alpha_hi, config.alpha_cap);
      continue;
    }
    const double gap = hi - lo;
    res.baseline_gaps[k] = gap;
    if (gap <= spec.delta) continue;
    if (spec.delta <= 0.0)
      res.alpha_hi = std::max(res.alpha_hi, config.alpha_cap);
    else
      res.alpha_hi = std::max(res.alpha_hi, gap / spec.delta);
  }

  if (auto nominal = region_search(hulls, specs, loss, grid, trace)) {
    res.alpha = 1.0;
    res.triggered = false;
    res.target = std::move(*nominal);
    return res;
  }

  res.triggered = true;
  TargetRates cached;
  if (auto top = region_search(hulls, scaled_specs(specs, res.alpha_hi), loss,
                               grid, trace)) {
    cached = std::move(*top);
  } else {
    // Grid discreteness can miss even the fully expanded band; the
    // per-group loss minimizers satisfy it by construction of alpha_hi.
    cached = base;
  }

  double lo = 1.0, hi = res.alpha_hi;
  while (hi - lo > config.tau_alpha) {
    const double mid = 0.5 * (lo + hi);
    if (auto sol = region_search(hulls, scaled_specs(specs, mid), loss, grid,
                                 trace)) {
      hi = mid;
      cached = std::move(*sol);
    } else {
      lo = mid;
    }
  }
  res.alpha = hi;
  res.target = std::move(cached);
  return res;
}

}  // namespace rocpost
