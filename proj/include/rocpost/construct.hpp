#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rocpost/data.hpp"
#include "rocpost/roc.hpp"

namespace rocpost {

enum class Mechanism { AntiDiagonal, LabelFlipping };

std::string mechanism_name(Mechanism m);  // "ad" / "lf"
std::optional<Mechanism> mechanism_from_name(const std::string& name);

// Post-hoc randomization on top of a base thresholding rule.
//   AntiDiagonal: with prob mix replace the base label by Bernoulli(p).
//   LabelFlipping: emit 1 with prob p1 when base=1, with prob p0 when base=0.
struct MechanismParams {
  Mechanism variant = Mechanism::AntiDiagonal;
  double mix = 0.0;
  double p = 0.5;
  double p1 = 1.0;
  double p0 = 0.0;
};

// Operating point of the theta-mixture of two adjacent threshold rules.
struct BasePoint {
  double fnr = 1.0;
  double fpr = 0.0;
  double s_plus = 0.0;  // base selection rate within the group
};

struct ConstructConfig {
  Mechanism mechanism = Mechanism::AntiDiagonal;
  double snap_xi = 0.75;    // boundary snap tolerance scale, in 1/n units
  int coarse_points = 101;  // theta grid per edge before refinement
  double golden_tol = 1e-5;
  int golden_max_iter = 40;
};

// Group plan: which hull edge to randomize on and how. `hi` is the
// higher-threshold support of the edge (possibly the predict-nothing rule),
// `lo` the lower; theta is the probability of applying lo's rule.
struct GroupRecipe {
  int group = 0;
  std::string group_name;
  HullSupport hi;
  HullSupport lo;
  double theta = 0.0;
  MechanismParams params;
  double target_fnr = 1.0;  // attained expected rates
  double target_fpr = 0.0;
  double expected_intervention = 0.0;
  bool snapped = false;
};

struct Recipe {
  std::vector<GroupRecipe> groups;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<RatePoint> requested;  // targets handed in, (tpr,fpr) per group
};

// Rates of the theta-mixture along edge (h, h+1): theta=0 gives support h.
BasePoint edge_point(const GroupHull& hull, std::size_t edge, double theta);

// Closed-form parameters reaching (t_fnr, t_fpr) from the base point, or
// nullopt when they fall outside [0,1] (beyond a 1e-9 clamp). Throws
// DegenerateBaseError when the base lies on the chance line.
std::optional<MechanismParams> anti_diagonal_params(const BasePoint& base,
                                                    double t_fnr,
                                                    double t_fpr);
std::optional<MechanismParams> label_flipping_params(const BasePoint& base,
                                                     double t_fnr,
                                                     double t_fpr);

// Probability that the final label differs from the base label.
double expected_intervention(const BasePoint& base,
                             const MechanismParams& params);

// Expected (fnr, fpr) of a group plan, recomputed from its stored pieces.
RatePoint recipe_rates(const GroupRecipe& r);

// Cheapest randomization attaining the target: snaps to the hull boundary
// within per-axis tolerances xi/n_neg, xi/n_pos (zero intervention), else
// scans every edge with a coarse theta grid refined by golden section.
// Throws ConstructionInfeasibleError if no parameters reach the target.
GroupRecipe min_intervention(const GroupHull& hull, const RatePoint& target,
                             const ConstructConfig& cfg);

Recipe build_recipe(const std::vector<GroupHull>& hulls,
                    const std::vector<RatePoint>& targets,
                    const std::vector<std::string>& group_names,
                    const ConstructConfig& cfg, std::uint64_t seed,
                    const std::string& config_hash);

struct Prediction {
  int base = 0;
  int label = 0;  // after randomization
};

// Deterministic randomized prediction: draws are keyed by (recipe seed,
// group, sample index), so results are independent of evaluation order and
// batch size.
Prediction predict_one(const GroupRecipe& r, std::uint64_t seed, double score,
                       std::uint64_t sample_index);

// Predicts data[i] with sample_index i. Sample groups must be mapped to
// recipe entries by name beforehand (see eval helpers) or coincide by id.
std::vector<Prediction> predict(const Recipe& recipe, const Dataset& data);

void write_recipe(std::ostream& out, const Recipe& recipe);
void save_recipe(const std::string& path, const Recipe& recipe);
Recipe read_recipe(std::istream& in, const std::string& origin);
Recipe load_recipe(const std::string& path);

}  // namespace rocpost
