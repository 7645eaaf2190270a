#include "rocpost/linprog.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "rocpost/errors.hpp"
#include "rocpost/fmt.hpp"

namespace rocpost {

namespace {

constexpr double kFeasTol = 1e-8;
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;
constexpr long kMaxPivots = 200000;

void check_shape(const LpProblem& p) {
  const std::size_t n = p.num_vars();
  if (p.lower.size() != n || p.upper.size() != n)
    throw InternalError("lp: bounds size mismatch");
  if (p.a_ub.size() != p.b_ub.size() || p.a_eq.size() != p.b_eq.size())
    throw InternalError("lp: row/rhs count mismatch");
  for (const auto& row : p.a_ub)
    if (row.size() != n) throw InternalError("lp: a_ub row width mismatch");
  for (const auto& row : p.a_eq)
    if (row.size() != n) throw InternalError("lp: a_eq row width mismatch");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(p.lower[j]))
      throw InternalError("lp: lower bounds must be finite");
    if (p.upper[j] < p.lower[j]) throw InternalError("lp: empty bound box");
  }
}

}  // namespace

void LpProblem::dump(std::ostream& out) const {
  auto num = [](double v) { return fmt_g17(v); };
  out << "lp vars=" << num_vars() << " ub_rows=" << a_ub.size()
      << " eq_rows=" << a_eq.size() << "\n";
  out << "min:";
  for (double v : c) out << ' ' << num(v);
  out << "\n";
  for (std::size_t i = 0; i < a_ub.size(); ++i) {
    out << "ub:";
    for (double v : a_ub[i]) out << ' ' << num(v);
    out << " <= " << num(b_ub[i]) << "\n";
  }
  for (std::size_t i = 0; i < a_eq.size(); ++i) {
    out << "eq:";
    for (double v : a_eq[i]) out << ' ' << num(v);
    out << " == " << num(b_eq[i]) << "\n";
  }
  out << "lo:";
  for (double v : lower) out << ' ' << num(v);
  out << "\nhi:";
  for (double v : upper) out << ' ' << num(v);
  out << "\n";
}

LpSolution lp_solve(const LpProblem& p) {
  check_shape(p);
  const std::size_t n = p.num_vars();

  // Shift to y = x - lower >= 0 and collect rows as  a.y (<=|=) rhs.
  struct Row {
    std::vector<double> a;
    double rhs;
    bool eq;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < p.a_ub.size(); ++i) {
    Row r{p.a_ub[i], p.b_ub[i], false};
    for (std::size_t j = 0; j < n; ++j) r.rhs -= r.a[j] * p.lower[j];
    rows.push_back(std::move(r));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(p.upper[j])) {
      Row r{std::vector<double>(n, 0.0), p.upper[j] - p.lower[j], false};
      r.a[j] = 1.0;
      rows.push_back(std::move(r));
    }
  }
  for (std::size_t i = 0; i < p.a_eq.size(); ++i) {
    Row r{p.a_eq[i], p.b_eq[i], true};
    for (std::size_t j = 0; j < n; ++j) r.rhs -= r.a[j] * p.lower[j];
    rows.push_back(std::move(r));
  }

  const std::size_t m = rows.size();
  const std::size_t n_slack = [&] {
    std::size_t k = 0;
    for (const auto& r : rows)
      if (!r.eq) ++k;
    return k;
  }();

  // Column layout: [y(0..n) | slack | artificial | rhs]. One artificial per
  // row that cannot seed the basis with a +1 slack.
  std::vector<std::vector<double>> t;   // tableau
  std::vector<std::size_t> basis(m);    // column basic in each row
  std::size_t width = n + n_slack;      // artificials appended below
  std::vector<int> slack_of_row(m, -1);
  {
    std::size_t s = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (!rows[i].eq) slack_of_row[i] = static_cast<int>(n + s++);
  }
  std::size_t n_art = 0;
  std::vector<int> art_of_row(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    const bool neg = rows[i].rhs < 0;
    if (rows[i].eq || neg) art_of_row[i] = static_cast<int>(width + n_art++);
  }
  const std::size_t total = width + n_art;

  t.assign(m, std::vector<double>(total + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = rows[i].rhs < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = sign * rows[i].a[j];
    if (slack_of_row[i] >= 0) t[i][slack_of_row[i]] = sign;
    t[i][total] = sign * rows[i].rhs;
    if (art_of_row[i] >= 0) {
      t[i][art_of_row[i]] = 1.0;
      basis[i] = static_cast<std::size_t>(art_of_row[i]);
    } else {
      basis[i] = static_cast<std::size_t>(slack_of_row[i]);
    }
  }

  std::vector<double> cost(total + 1, 0.0);
  auto reduce_cost_row = [&] {
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = cost[basis[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= total; ++j) cost[j] -= cb * t[i][j];
    }
  };

  long pivots = 0;
  auto run_simplex = [&](std::size_t enter_limit) -> bool {
    // Returns false if unbounded. enter_limit caps eligible entering cols.
    for (;;) {
      std::size_t enter = total;
      for (std::size_t j = 0; j < enter_limit; ++j) {
        if (cost[j] < -kCostTol) {
          enter = j;
          break;  // Bland: first eligible index
        }
      }
      if (enter == total) return true;

      std::size_t leave = m;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] > kPivotTol) {
          const double ratio = t[i][total] / t[i][enter];
          if (ratio < best_ratio ||
              (ratio == best_ratio && leave < m && basis[i] < basis[leave])) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return false;

      const double pv = t[leave][enter];
      for (std::size_t j = 0; j <= total; ++j) t[leave][j] /= pv;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == leave) continue;
        const double f = t[i][enter];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j <= total; ++j) t[i][j] -= f * t[leave][j];
      }
      {
        const double f = cost[enter];
        if (f != 0.0)
          for (std::size_t j = 0; j <= total; ++j)
            cost[j] -= f * t[leave][j];
      }
      basis[leave] = enter;
      if (++pivots > kMaxPivots)
        throw InternalError("lp: pivot limit exceeded");
    }
  };

  LpSolution sol;

  if (n_art > 0) {
    for (std::size_t j = width; j < total; ++j) cost[j] = 1.0;
    reduce_cost_row();
    if (!run_simplex(width))  // artificials never re-enter
      throw InternalError("lp: phase-1 objective unbounded");
    if (-cost[total] > kFeasTol) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Pivot lingering artificials out where the row has real columns left;
    // rows without any are redundant and stay parked at zero.
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < width) continue;
      for (std::size_t j = 0; j < width; ++j) {
        if (std::fabs(t[i][j]) > kPivotTol) {
          const double pv = t[i][j];
          for (std::size_t jj = 0; jj <= total; ++jj) t[i][jj] /= pv;
          for (std::size_t ii = 0; ii < m; ++ii) {
            if (ii == i) continue;
            const double f = t[ii][j];
            if (f == 0.0) continue;
            for (std::size_t jj = 0; jj <= total; ++jj)
              t[ii][jj] -= f * t[i][jj];
          }
          basis[i] = j;
          break;
        }
      }
    }
  }

  std::fill(cost.begin(), cost.end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = p.c[j];
  reduce_cost_row();
  if (!run_simplex(width)) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  std::vector<double> y(total, 0.0);
  for (std::size_t i = 0; i < m; ++i) y[basis[i]] = t[i][total];
  sol.status = LpStatus::Optimal;
  sol.x.resize(n);
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sol.x[j] = y[j] + p.lower[j];
    sol.objective += p.c[j] * sol.x[j];
  }
  return sol;
}

}  // namespace rocpost
