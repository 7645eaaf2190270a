#pragma once

#include <iosfwd>
#include <vector>

namespace rocpost {

// min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lower <= x <= upper.
// Lower bounds must be finite; upper bounds may be +infinity.
struct LpProblem {
  std::vector<double> c;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_vars() const { return c.size(); }
  void dump(std::ostream& out) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

// Dense two-phase primal simplex. Bland's rule everywhere (lowest eligible
// index enters; min-ratio ties leave by lowest basic index), so identical
// inputs take identical pivot paths. Feasibility tolerance 1e-8, reduced
// cost tolerance 1e-9.
LpSolution lp_solve(const LpProblem& p);

}  // namespace rocpost
