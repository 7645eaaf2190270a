#pragma once

#include "rocpost/config.hpp"
#include "rocpost/eval.hpp"

namespace rocpost {

struct RunArtifacts {
  std::vector<GroupHull> hulls;  // fitted on the post-processing slice
  GuardResult guard;
  Recipe recipe;
  EvalReport report;
  RegionTrace trace;  // probes filled when cfg.diagnostics is set
};

// Full pass for one seed: acquire data (split or pre-split), fit hulls,
// search the constrained region behind the feasibility guard, build the
// cheapest recipe for the optimal rates, evaluate it on the test slice.
RunArtifacts run_pipeline(const RunConfig& cfg, std::uint64_t seed);

// Post/test slices per the config (seed drives the random split).
void acquire_data(const RunConfig& cfg, std::uint64_t seed, Dataset* post,
                  Dataset* test);

}  // namespace rocpost
