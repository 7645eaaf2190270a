#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rocpost/config.hpp"
#include "rocpost/errors.hpp"
#include "rocpost/eval.hpp"
#include "rocpost/fmt.hpp"
#include "rocpost/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rocpost;

namespace {

// Exit codes: 0 ok, 2 input error, 3 construction infeasible, 4 internal.
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInternal = 4;

struct CommonOpts {
  std::string config;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string input;
  std::string score_col, group_col, label_col;
  std::string mechanism;
  int repeat = 0;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* repeat_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_repeat) {
  cmd->add_option("--config", o.config, "config file (defaults apply if absent)");
  o.seed_opt = cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--input", o.input, "scored CSV (overrides config)");
  cmd->add_option("--score-col", o.score_col, "score column name");
  cmd->add_option("--group-col", o.group_col, "group column name");
  cmd->add_option("--label-col", o.label_col, "label column name");
  cmd->add_option("--mechanism", o.mechanism,
                  "randomization mechanism: ad or lf");
  if (with_repeat)
    o.repeat_opt =
        cmd->add_option("--repeat", o.repeat, "number of seeds to run");
}

RunConfig make_config(const CommonOpts& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed_opt && o.seed_opt->count()) cfg.seed = o.seed;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.input.empty()) {
    cfg.input = o.input;
    cfg.post_input.clear();
    cfg.test_input.clear();
  }
  if (!o.score_col.empty()) cfg.schema.score_col = o.score_col;
  if (!o.group_col.empty()) cfg.schema.group_col = o.group_col;
  if (!o.label_col.empty()) cfg.schema.label_col = o.label_col;
  if (!o.mechanism.empty()) {
    const auto m = mechanism_from_name(o.mechanism);
    if (!m) throw InputError("unknown mechanism '" + o.mechanism + "'");
    cfg.construct.mechanism = *m;
  }
  if (o.repeat_opt && o.repeat_opt->count()) {
    if (o.repeat < 1) throw InputError("--repeat must be >= 1");
    cfg.repeat = o.repeat;
  }
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

void write_trace_csv(const fs::path& path, const RegionTrace& trace) {
  auto out = open_out(path);
  out << "point,status,objective,q\n";
  for (std::size_t i = 0; i < trace.probes.size(); ++i) {
    const auto& p = trace.probes[i];
    out << i << ','
        << (p.status == LpStatus::Optimal
                ? "optimal"
                : (p.status == LpStatus::Infeasible ? "infeasible"
                                                    : "unbounded"))
        << ',' << (p.status == LpStatus::Optimal ? fmt_g17(p.objective) : "")
        << ',';
    for (std::size_t k = 0; k < p.q.size(); ++k)
      out << (k ? ";" : "") << fmt_g17(p.q[k]);
    out << '\n';
  }
}

int cmd_run(const CommonOpts& o) {
  RunConfig cfg = make_config(o);
  fs::create_directories(cfg.out_dir);
  {
    auto out = open_out(fs::path(cfg.out_dir) / "config_effective.txt");
    emit_config(out, cfg);
  }
  std::vector<EvalReport> reports;
  for (int r = 0; r < cfg.repeat; ++r) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(r);
    const RunArtifacts art = run_pipeline(cfg, seed);
    const std::string tag = std::to_string(seed);
    save_recipe((fs::path(cfg.out_dir) / ("recipe_" + tag + ".txt")).string(),
                art.recipe);
    save_report((fs::path(cfg.out_dir) / ("report_" + tag + ".txt")).string(),
                art.report);
    if (cfg.diagnostics)
      write_trace_csv(fs::path(cfg.out_dir) / ("region_" + tag + ".csv"),
                      art.trace);
    if (cfg.lp_dump) {
      auto out = open_out(fs::path(cfg.out_dir) / ("lp_" + tag + ".txt"));
      out << art.trace.lp_text;
    }
    std::cout << "seed " << seed << ": accuracy "
              << fmt_g17(art.report.accuracy) << ", alpha "
              << fmt_g17(art.guard.alpha)
              << (art.guard.triggered ? " (guard triggered)" : "") << "\n";
    reports.push_back(art.report);
  }
  if (reports.size() > 1) {
    const AggregateReport agg = aggregate(reports);
    auto out = open_out(fs::path(cfg.out_dir) / "aggregate.txt");
    write_aggregate(out, agg);
    write_aggregate(std::cout, agg);
  }
  return 0;
}

int cmd_hull(const CommonOpts& o) {
  RunConfig cfg = make_config(o);
  if (cfg.input.empty()) throw InputError("hull needs --input (or config)");
  const Dataset data = load_csv(cfg.input, cfg.schema);
  const auto hulls = build_hulls(data);
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / "hulls.csv";
  auto out = open_out(path);
  out << "group,threshold,tpr,fpr,selection_rate\n";
  for (const auto& h : hulls)
    for (const auto& s : h.supports)
      out << data.group_names[h.group] << ','
          << (s.above_all ? "inf" : fmt_g17(s.threshold)) << ','
          << fmt_g17(s.tpr()) << ',' << fmt_g17(s.fpr) << ','
          << fmt_g17(s.selection_rate) << '\n';
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_oracle(const CommonOpts& o) {
  RunConfig cfg = make_config(o);
  fs::create_directories(cfg.out_dir);
  std::vector<double> accs;
  for (int r = 0; r < cfg.repeat; ++r) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(r);
    Dataset post, test;
    acquire_data(cfg, seed, &post, &test);
    const GroupStats stats = compute_stats(test);
    const auto specs = active_specs(cfg, stats);
    const OracleResult res = oracle_rates(test, specs, cfg.region);
    accs.push_back(res.accuracy);
    auto out = open_out(fs::path(cfg.out_dir) /
                        ("oracle_" + std::to_string(seed) + ".txt"));
    out << "rocpost-oracle v1\n";
    out << "accuracy = " << fmt_g17(res.accuracy) << "\n";
    out << "alpha = " << fmt_g17(res.guard.alpha) << "\n";
    out << "guard_triggered = " << (res.guard.triggered ? 1 : 0) << "\n";
    for (std::size_t a = 0; a < res.guard.target.rho.size(); ++a) {
      out << "tpr_" << test.group_names[a] << " = "
          << fmt_g17(res.guard.target.rho[a].tpr) << "\n";
      out << "fpr_" << test.group_names[a] << " = "
          << fmt_g17(res.guard.target.rho[a].fpr) << "\n";
    }
    std::cout << "seed " << seed << ": oracle accuracy "
              << fmt_g17(res.accuracy) << "\n";
  }
  if (accs.size() > 1) {
    double mean = 0.0;
    for (double v : accs) mean += v;
    mean /= accs.size();
    double ss = 0.0;
    for (double v : accs) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (accs.size() - 1));
    auto out = open_out(fs::path(cfg.out_dir) / "oracle_aggregate.txt");
    out << "rocpost-oracle-aggregate v1\n";
    out << "runs = " << accs.size() << "\n";
    out << "accuracy_mean = " << fmt_g17(mean) << "\n";
    out << "accuracy_sd = " << fmt_g17(sd) << "\n";
    std::cout << "oracle accuracy " << fmt_g17(mean) << " +- " << fmt_g17(sd)
              << "\n";
  }
  return 0;
}

int cmd_synth(const CommonOpts& o) {
  RunConfig cfg = make_config(o);
  if (cfg.synth.groups.empty())
    throw InputError("config has no [synth] cells");
  const Dataset data = synth_generate(cfg.synth, cfg.seed);
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / "synth.csv";
  write_csv(path.string(), data, cfg.schema);
  std::cout << "wrote " << path.string() << " (" << data.size()
            << " samples)\n";
  return 0;
}

int cmd_eval_recipe(const CommonOpts& o, const std::string& recipe_path) {
  RunConfig cfg = make_config(o);
  if (cfg.input.empty())
    throw InputError("eval-recipe needs --input (or config)");
  const Recipe recipe = load_recipe(recipe_path);
  const Dataset data = load_csv(cfg.input, cfg.schema);
  const EvalReport report = evaluate_recipe(recipe, data);
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / "eval_report.txt";
  {
    auto out = open_out(path);
    write_report(out, report);
  }
  write_report(std::cout, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-fair post-processing on empirical ROC hulls"};
  app.require_subcommand(1);

  CommonOpts run_o, hull_o, oracle_o, synth_o, eval_o;
  std::string recipe_path;

  auto* run = app.add_subcommand("run", "split, fit, construct, evaluate");
  add_common(run, run_o, true);
  auto* hull = app.add_subcommand("hull", "export ROC hull vertices as CSV");
  add_common(hull, hull_o, false);
  auto* oracle = app.add_subcommand(
      "oracle", "best constrained rates on the evaluation slice");
  add_common(oracle, oracle_o, true);
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  add_common(synth, synth_o, false);
  auto* evalr = app.add_subcommand("eval-recipe",
                                   "apply a saved recipe to a dataset");
  add_common(evalr, eval_o, false);
  evalr->add_option("--recipe", recipe_path, "recipe file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (run->parsed()) return cmd_run(run_o);
    if (hull->parsed()) return cmd_hull(hull_o);
    if (oracle->parsed()) return cmd_oracle(oracle_o);
    if (synth->parsed()) return cmd_synth(synth_o);
    if (evalr->parsed()) return cmd_eval_recipe(eval_o, recipe_path);
  } catch (const ConstructionInfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInput;
}
