#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rocpost/construct.hpp"
#include "rocpost/data.hpp"
#include "rocpost/region.hpp"

namespace rocpost {

struct ConfusionCounts {
  long tp = 0, fp = 0, tn = 0, fn = 0;

  long n() const { return tp + fp + tn + fn; }
};

// Per-group metric values from sampled predictions; entries go absent when
// their denominator is empty (e.g. no predicted positives for precision).
struct MetricReport {
  std::string name;
  std::vector<std::optional<double>> per_group;
  std::optional<double> gap;  // max-min over defined groups, needs >= 2
};

struct EvalReport {
  std::vector<std::string> group_names;
  std::vector<ConfusionCounts> counts;
  double accuracy = 0.0;
  std::vector<MetricReport> metrics;  // dp, eopp, peq, pp, forp
  double intervention_expected = 0.0; // closed form on this dataset
  double intervention_sampled = 0.0;  // fraction of labels actually changed
  double alpha = 1.0;                 // guard expansion used upstream
  bool guard_triggered = false;
};

// One randomized prediction pass with the recipe's seed; all reported
// quantities are recomputed from the resulting counts. Groups are matched
// to recipe entries by name.
EvalReport evaluate_recipe(const Recipe& recipe, const Dataset& data);

struct OracleResult {
  GuardResult guard;
  double accuracy = 0.0;  // implied by the optimal rates on this dataset
};

// Best constrained operating characteristics computable on the evaluation
// data itself: the in-sample skyline a deployed recipe is compared against.
OracleResult oracle_rates(const Dataset& data,
                          const std::vector<ConstraintSpec>& specs,
                          const RegionConfig& config);

void write_report(std::ostream& out, const EvalReport& report);
void save_report(const std::string& path, const EvalReport& report);

struct AggregateReport {
  long runs = 0;
  // mean/sd pairs, sd with n-1 normalization (0 for a single run)
  double accuracy_mean = 0.0, accuracy_sd = 0.0;
  std::vector<std::string> metric_names;
  std::vector<std::optional<double>> gap_mean, gap_sd;  // absent if ever undefined
  double interv_expected_mean = 0.0, interv_expected_sd = 0.0;
  double interv_sampled_mean = 0.0, interv_sampled_sd = 0.0;
  double alpha_mean = 0.0, alpha_sd = 0.0;
};

AggregateReport aggregate(const std::vector<EvalReport>& reports);
void write_aggregate(std::ostream& out, const AggregateReport& agg);

}  // namespace rocpost
