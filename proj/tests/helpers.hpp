#pragma once

// Shared fixtures and brute-force reference implementations. Everything
// here is test-side only and favors obviousness over speed.

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "rocpost/constraints.hpp"
#include "rocpost/data.hpp"
#include "rocpost/linprog.hpp"
#include "rocpost/rng.hpp"
#include "rocpost/roc.hpp"

namespace testutil {

using namespace rocpost;

inline Dataset make_dataset(
    const std::vector<std::tuple<double, int, int>>& rows, int groups = 0) {
  Dataset d;
  for (const auto& [score, group, label] : rows) {
    d.samples.push_back({score, group, label});
    groups = std::max(groups, group + 1);
  }
  for (int g = 0; g < groups; ++g) d.group_names.push_back(std::string(1, char('A' + g)));
  return d;
}

// Hull straight from rate points; (fnr, fpr) pairs must run from (1,0) to
// (0,1) with increasing fpr and be strictly concave in ROC space.
// Thresholds fake a score scale consistent with the ordering.
inline GroupHull make_hull(const std::vector<std::pair<double, double>>& fnr_fpr,
                           double prevalence = 0.5, double proportion = 1.0,
                           long n_pos = 1000, long n_neg = 1000, int group = 0) {
  GroupHull h;
  h.group = group;
  h.n = n_pos + n_neg;
  h.n_pos = n_pos;
  h.n_neg = n_neg;
  h.prevalence = prevalence;
  h.proportion = proportion;
  for (std::size_t i = 0; i < fnr_fpr.size(); ++i) {
    HullSupport s;
    s.above_all = (i == 0);
    s.threshold = 1.0 - static_cast<double>(i) / fnr_fpr.size();
    s.fnr = fnr_fpr[i].first;
    s.fpr = fnr_fpr[i].second;
    s.selection_rate =
        prevalence * (1.0 - s.fnr) + (1.0 - prevalence) * s.fpr;
    h.supports.push_back(s);
  }
  return h;
}

// Quadratic-time gift wrapping from (0,0): repeatedly jump to the point
// making the steepest turn (farthest on ties). Rank points are totally
// ordered componentwise, so "not dominated by cur" means "later rank".
inline std::vector<RatePoint> slow_upper_hull(const std::vector<RatePoint>& pts) {
  std::vector<RatePoint> hull;
  RatePoint cur = pts.front();
  hull.push_back(cur);
  while (cur.fpr < 1.0 || cur.tpr < 1.0) {
    bool have = false;
    RatePoint best{};
    for (const auto& p : pts) {
      if (p.fpr <= cur.fpr && p.tpr <= cur.tpr) continue;
      if (!have) {
        best = p;
        have = true;
        continue;
      }
      const double cross = (best.fpr - cur.fpr) * (p.tpr - cur.tpr) -
                           (best.tpr - cur.tpr) * (p.fpr - cur.fpr);
      if (cross > 1e-15 ||
          (cross > -1e-15 && p.fpr + p.tpr > best.fpr + best.tpr))
        best = p;
    }
    cur = best;
    hull.push_back(cur);
  }
  return hull;
}

// Exhaustive reference for small LPs: every basic solution (each subset of
// active constraints of full rank), feasibility-checked against the whole
// system. Assumes finite bounds so any nonempty feasible set has a vertex.
struct VertexOracle {
  enum class Status { Optimal, Infeasible };
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

inline VertexOracle enumerate_lp(const LpProblem& p, double tol = 1e-7) {
  const std::size_t n = p.num_vars();
  struct Plane {
    std::vector<double> a;
    double b;
    bool required;  // equality rows
  };
  std::vector<Plane> planes;
  for (std::size_t i = 0; i < p.a_eq.size(); ++i)
    planes.push_back({p.a_eq[i], p.b_eq[i], true});
  for (std::size_t i = 0; i < p.a_ub.size(); ++i)
    planes.push_back({p.a_ub[i], p.b_ub[i], false});
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(n, 0.0);
    row[j] = 1.0;
    planes.push_back({row, p.lower[j], false});
    if (std::isfinite(p.upper[j])) planes.push_back({row, p.upper[j], false});
  }

  VertexOracle out;
  const std::size_t m = planes.size();
  std::vector<std::size_t> pick;

  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < p.a_ub.size(); ++i) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += p.a_ub[i][j] * x[j];
      if (lhs > p.b_ub[i] + tol) return false;
    }
    for (std::size_t i = 0; i < p.a_eq.size(); ++i) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += p.a_eq[i][j] * x[j];
      if (std::fabs(lhs - p.b_eq[i]) > tol) return false;
    }
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] < p.lower[j] - tol || x[j] > p.upper[j] + tol) return false;
    return true;
  };

  auto try_subset = [&]() {
    // Solve the n x n active system by Gaussian elimination.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < n; ++j) a[r][j] = planes[pick[r]].a[j];
      a[r][n] = planes[pick[r]].b;
    }
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
      if (std::fabs(a[piv][col]) < 1e-10) return;  // rank-deficient pick
      std::swap(a[col], a[piv]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = a[r][col] / a[col][col];
        if (f == 0.0) continue;
        for (std::size_t j = col; j <= n; ++j) a[r][j] -= f * a[col][j];
      }
    }
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = a[j][n] / a[j][j];
    if (!feasible(x)) return;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += p.c[j] * x[j];
    if (out.status == VertexOracle::Status::Infeasible ||
        obj < out.objective) {
      out.status = VertexOracle::Status::Optimal;
      out.objective = obj;
      out.x = x;
    }
  };

  // Choose n planes including every equality row.
  std::vector<std::size_t> optional_planes;
  for (std::size_t i = 0; i < m; ++i)
    if (!planes[i].required) optional_planes.push_back(i);
  const std::size_t need = n - p.a_eq.size();
  if (p.a_eq.size() > n) return out;

  std::vector<std::size_t> comb(need);
  auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    if (depth == need) {
      pick.clear();
      for (std::size_t i = 0; i < p.a_eq.size(); ++i) pick.push_back(i);
      for (std::size_t i = 0; i < need; ++i) pick.push_back(comb[i]);
      try_subset();
      return;
    }
    for (std::size_t i = start; i < optional_planes.size(); ++i) {
      comb[depth] = optional_planes[i];
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return out;
}

}  // namespace testutil
