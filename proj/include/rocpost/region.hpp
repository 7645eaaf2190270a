#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "rocpost/constraints.hpp"
#include "rocpost/linprog.hpp"
#include "rocpost/roc.hpp"

namespace rocpost {

struct RegionConfig {
  int grid_single = 1000;   // centroid points with exactly one fractional axis
  int grid_multi = 100;     // per axis with two or more
  double tau_alpha = 0.01;  // guard bisection width
  double alpha_cap = 100.0; // expansion ceiling when baseline gaps are undefined
};

// One centroid axis per fractional constraint, in declaration order.
struct CentroidGrid {
  std::vector<std::vector<double>> axes;

  std::size_t point_count() const {
    std::size_t n = 1;
    for (const auto& ax : axes) n *= ax.size();
    return n;
  }
};

// Optimal operating characteristics: one rate point per group expressed as
// hull-support mixture weights, plus the centroid per active constraint.
struct TargetRates {
  std::vector<RatePoint> rho;               // per group
  std::vector<std::vector<double>> lambda;  // per group, per support
  std::vector<double> q;                    // per constraint (may be NaN)
  double objective = 0.0;
};

struct RegionProbe {
  std::vector<double> q;  // fixed fractional centroids at this grid point
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
};

struct RegionTrace {
  std::vector<RegionProbe> probes;
  std::ostream* lp_dump = nullptr;  // plain-text LP instances when set
  std::string lp_text;              // collected dump, filled by the pipeline
};

struct GuardResult {
  double alpha = 1.0;       // smallest certified feasible expansion
  bool triggered = false;   // nominal deltas were infeasible
  double alpha_hi = 1.0;    // initial upper bound of the bracket
  std::vector<double> baseline_gaps;  // per constraint; NaN when undefined
  TargetRates target;
};

// Variable layout of the inner LP: per-group mixture weights first, then one
// free centroid per linear constraint.
struct InnerLpLayout {
  std::vector<std::size_t> lambda_offset;  // per group
  std::vector<int> q_var;  // per constraint: variable index, -1 if fixed
};

// Centroid axes over the admissible interval [delta/2, 1 - delta/2] of each
// fractional constraint.
CentroidGrid make_centroid_grid(const std::vector<ConstraintSpec>& specs,
                                const RegionConfig& config);

// LP over mixture weights at fixed fractional centroids q_lf (declaration
// order). Linear-constraint centroids stay free variables; fractional bands
// are linearized at q; denominators are floored at epsilon, and a shared
// FPR floor applies whenever a fractional constraint is active.
LpProblem build_inner_lp(const std::vector<GroupHull>& hulls,
                         const std::vector<ConstraintSpec>& specs,
                         const LossSpec& loss,
                         const std::vector<double>& q_lf,
                         InnerLpLayout* layout = nullptr);

// Exhaustive scan of the centroid grid in lexicographic order; best LP value
// wins, earliest grid point on ties. Empty optional = infeasible everywhere.
std::optional<TargetRates> region_search(
    const std::vector<GroupHull>& hulls,
    const std::vector<ConstraintSpec>& specs, const LossSpec& loss,
    const CentroidGrid& grid, RegionTrace* trace = nullptr);

// Minimal uniform tolerance expansion making the problem feasible. Runs the
// nominal search first; on failure bisects alpha in [1, alpha_hi] to width
// tau_alpha, reusing the nominal centroid grid, and returns the cached
// solution of the smallest feasible iterate (baseline vertices as the last
// resort). Never fails.
GuardResult feasibility_guard(const std::vector<GroupHull>& hulls,
                              const std::vector<ConstraintSpec>& specs,
                              const LossSpec& loss,
                              const RegionConfig& config,
                              RegionTrace* trace = nullptr);

}  // namespace rocpost
