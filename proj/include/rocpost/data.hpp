#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rocpost {

struct ScoredSample {
  double score;  // finite, any real; typically a probability in [0,1]
  int group;     // dense id in [0, group_count)
  int label;     // 0 or 1
};

// Scored, group-annotated samples. Group ids are dense re-indexed labels;
// group_names maps them back to the raw CSV values (first-appearance order).
struct Dataset {
  std::vector<ScoredSample> samples;
  std::vector<std::string> group_names;

  int group_count() const { return static_cast<int>(group_names.size()); }
  std::size_t size() const { return samples.size(); }
};

// Per-group counts and the derived plug-in quantities.
struct GroupStats {
  std::vector<long> n;        // n_a
  std::vector<long> n_pos;    // n_{a,1}
  std::vector<long> n_neg;    // n_{a,0}
  std::vector<double> prevalence;  // pi_a = n_pos/n, in (0,1)
  std::vector<double> proportion;  // p_a = n_a/total, sums to 1

  int group_count() const { return static_cast<int>(n.size()); }
};

struct CsvSchema {
  std::string score_col = "score";
  std::string group_col = "group";
  std::string label_col = "label";
};

struct SplitFractions {
  double train = 0.30;
  double post = 0.35;
  double test = 0.35;
};

struct SplitResult {
  Dataset train;
  Dataset post;
  Dataset test;
};

// One (group, label) cell of the synthetic generator: `count` scores drawn
// from Beta(alpha, beta).
struct SynthCell {
  long count = 0;
  double alpha = 2.0;
  double beta = 2.0;
};

struct SynthGroup {
  std::string name;
  SynthCell pos;
  SynthCell neg;
};

struct SynthSpec {
  std::vector<SynthGroup> groups;
};

// Parses a headered CSV of scored samples. Group values may be arbitrary
// strings; they are re-indexed densely. Errors carry 1-based line numbers.
Dataset load_csv(const std::string& path, const CsvSchema& schema);
Dataset parse_csv(std::istream& in, const CsvSchema& schema,
                  const std::string& origin);

void write_csv(const std::string& path, const Dataset& data,
               const CsvSchema& schema);

// Counts per group; throws DegenerateGroupError if any group lacks a
// positive or a negative (prevalence must land in the open interval).
GroupStats compute_stats(const Dataset& data);

// Seeded uniform three-way split. Fractions must be positive and sum to 1
// within 1e-9. Sizes are llround(n*f) cumulatively, remainder to test.
SplitResult split(const Dataset& data, const SplitFractions& fractions,
                  std::uint64_t seed);

// Seeded synthetic dataset; identical seed and spec give identical samples.
Dataset synth_generate(const SynthSpec& spec, std::uint64_t seed);

}  // namespace rocpost
