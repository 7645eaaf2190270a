#include "rocpost/pipeline.hpp"

#include <sstream>

#include "rocpost/errors.hpp"

namespace rocpost {

void acquire_data(const RunConfig& cfg, std::uint64_t seed, Dataset* post,
                  Dataset* test) {
  if (!cfg.post_input.empty() || !cfg.test_input.empty()) {
    if (cfg.post_input.empty() || cfg.test_input.empty())
      throw InputError("pre-split mode needs both post_input and test_input");
    *post = load_csv(cfg.post_input, cfg.schema);
    *test = load_csv(cfg.test_input, cfg.schema);
    return;
  }
  if (cfg.input.empty())
    throw InputError("no input configured (set input or post/test_input)");
  const Dataset all = load_csv(cfg.input, cfg.schema);
  SplitResult parts = split(all, cfg.split, seed);
  *post = std::move(parts.post);
  *test = std::move(parts.test);
}

RunArtifacts run_pipeline(const RunConfig& cfg, std::uint64_t seed) {
  RunArtifacts art;
  Dataset post, test;
  acquire_data(cfg, seed, &post, &test);

  const GroupStats stats = compute_stats(post);
  art.hulls = build_hulls(post);
  const auto specs = active_specs(cfg, stats);
  const LossSpec loss = misclassification_loss(stats);

  RegionTrace* trace = cfg.diagnostics || cfg.lp_dump ? &art.trace : nullptr;
  std::ostringstream lp_text;
  if (cfg.lp_dump) art.trace.lp_dump = &lp_text;
  art.guard = feasibility_guard(art.hulls, specs, loss, cfg.region, trace);
  if (cfg.lp_dump) {
    art.trace.lp_text = lp_text.str();
    art.trace.lp_dump = nullptr;
  }

  art.recipe = build_recipe(art.hulls, art.guard.target.rho, post.group_names,
                            cfg.construct, seed, config_hash(cfg));
  art.report = evaluate_recipe(art.recipe, test);
  art.report.alpha = art.guard.alpha;
  art.report.guard_triggered = art.guard.triggered;
  return art;
}

}  // namespace rocpost
