#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rocpost/constraints.hpp"
#include "rocpost/construct.hpp"
#include "rocpost/data.hpp"
#include "rocpost/region.hpp"

namespace rocpost {

struct ActiveConstraint {
  Metric metric = Metric::DemographicParity;
  double delta = 0.05;
};

// Everything a run needs, with working defaults. Either `input` is split
// three ways, or post_input/test_input name pre-split files.
struct RunConfig {
  std::string input;
  std::string post_input;
  std::string test_input;
  CsvSchema schema;
  std::string out_dir = "out";

  SplitFractions split;
  std::uint64_t seed = 0;
  int repeat = 1;

  std::vector<ActiveConstraint> constraints = {
      {Metric::DemographicParity, 0.05},
      {Metric::EqualOpportunity, 0.05},
      {Metric::PredictiveEquality, 0.05},
      {Metric::PredictiveParity, 0.05},
  };
  double epsilon = 1e-7;

  RegionConfig region;
  ConstructConfig construct;
  bool diagnostics = false;  // write centroid-grid probe CSV
  bool lp_dump = false;      // write LP instances as plain text

  SynthSpec synth;
};

RunConfig parse_config(std::istream& in, const std::string& origin);
RunConfig load_config(const std::string& path);

// Canonical form: fixed section and key order, shortest number spelling.
// emit(parse(emit(c))) == emit(c) byte for byte.
void emit_config(std::ostream& out, const RunConfig& cfg);
std::string config_text(const RunConfig& cfg);

// FNV-1a over the canonical text; stamped into recipes for provenance.
std::string config_hash(const RunConfig& cfg);

// Instantiated constraint list for the given stats.
std::vector<ConstraintSpec> active_specs(const RunConfig& cfg,
                                         const GroupStats& stats);

}  // namespace rocpost
