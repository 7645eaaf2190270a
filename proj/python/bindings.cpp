#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rocpost/config.hpp"
#include "rocpost/errors.hpp"
#include "rocpost/eval.hpp"
#include "rocpost/pipeline.hpp"

namespace py = pybind11;
using namespace rocpost;

namespace {

ConstraintSpec make_builtin(const std::string& name, const GroupStats& stats,
                            double delta, double epsilon) {
  const auto m = metric_from_name(name);
  if (!m) throw InputError("unknown metric: " + name);
  return builtin_spec(*m, stats, delta, epsilon);
}

std::string report_text(const EvalReport& report) {
  std::ostringstream ss;
  write_report(ss, report);
  return ss.str();
}

std::string recipe_text(const Recipe& recipe) {
  std::ostringstream ss;
  write_recipe(ss, recipe);
  return ss.str();
}

Recipe recipe_from_text(const std::string& text) {
  std::istringstream ss(text);
  return read_recipe(ss, "<string>");
}

}  // namespace

PYBIND11_MODULE(_rocpost, m) {
  m.doc() = "ROC-hull fairness post-processing core";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ConstructionInfeasibleError>(
      m, "ConstructionInfeasibleError", PyExc_RuntimeError);

  py::class_<ScoredSample>(m, "ScoredSample")
      .def(py::init<double, int, int>(), py::arg("score"), py::arg("group"),
           py::arg("label"))
      .def_readwrite("score", &ScoredSample::score)
      .def_readwrite("group", &ScoredSample::group)
      .def_readwrite("label", &ScoredSample::label)
      .def("__repr__", [](const ScoredSample& s) {
        std::ostringstream ss;
        ss << "ScoredSample(score=" << s.score << ", group=" << s.group
           << ", label=" << s.label << ")";
        return ss.str();
      });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def_readwrite("samples", &Dataset::samples)
      .def_readwrite("group_names", &Dataset::group_names)
      .def("__len__", &Dataset::size)
      .def_property_readonly("group_count", &Dataset::group_count);

  py::class_<GroupStats>(m, "GroupStats")
      .def_readonly("n", &GroupStats::n)
      .def_readonly("n_pos", &GroupStats::n_pos)
      .def_readonly("n_neg", &GroupStats::n_neg)
      .def_readonly("prevalence", &GroupStats::prevalence)
      .def_readonly("proportion", &GroupStats::proportion);

  py::class_<SplitResult>(m, "SplitResult")
      .def_readonly("train", &SplitResult::train)
      .def_readonly("post", &SplitResult::post)
      .def_readonly("test", &SplitResult::test);

  py::class_<RatePoint>(m, "RatePoint")
      .def(py::init<>())
      .def(py::init([](double tpr, double fpr) {
             RatePoint r;
             r.tpr = tpr;
             r.fpr = fpr;
             return r;
           }),
           py::arg("tpr"), py::arg("fpr"))
      .def_readwrite("tpr", &RatePoint::tpr)
      .def_readwrite("fpr", &RatePoint::fpr)
      .def("__repr__", [](const RatePoint& r) {
        std::ostringstream ss;
        ss << "RatePoint(tpr=" << r.tpr << ", fpr=" << r.fpr << ")";
        return ss.str();
      });

  py::class_<HullSupport>(m, "HullSupport")
      .def_readonly("above_all", &HullSupport::above_all)
      .def_readonly("threshold", &HullSupport::threshold)
      .def_readonly("fnr", &HullSupport::fnr)
      .def_readonly("fpr", &HullSupport::fpr)
      .def_readonly("selection_rate", &HullSupport::selection_rate)
      .def_property_readonly("tpr", &HullSupport::tpr);

  py::class_<GroupHull>(m, "GroupHull")
      .def_readonly("group", &GroupHull::group)
      .def_readonly("supports", &GroupHull::supports)
      .def_readonly("n", &GroupHull::n)
      .def_readonly("n_pos", &GroupHull::n_pos)
      .def_readonly("n_neg", &GroupHull::n_neg)
      .def_readonly("prevalence", &GroupHull::prevalence)
      .def_readonly("proportion", &GroupHull::proportion);

  py::class_<ConstraintSpec>(m, "ConstraintSpec")
      .def_readonly("name", &ConstraintSpec::name)
      .def_readonly("linear", &ConstraintSpec::linear)
      .def_readwrite("delta", &ConstraintSpec::delta)
      .def_readwrite("epsilon", &ConstraintSpec::epsilon)
      .def_readonly("u", &ConstraintSpec::u)
      .def_readonly("v", &ConstraintSpec::v);

  py::class_<LossSpec>(m, "LossSpec").def_readonly("gamma", &LossSpec::gamma);

  py::class_<RegionConfig>(m, "RegionConfig")
      .def(py::init<>())
      .def_readwrite("grid_single", &RegionConfig::grid_single)
      .def_readwrite("grid_multi", &RegionConfig::grid_multi)
      .def_readwrite("tau_alpha", &RegionConfig::tau_alpha)
      .def_readwrite("alpha_cap", &RegionConfig::alpha_cap);

  py::class_<TargetRates>(m, "TargetRates")
      .def_readonly("rho", &TargetRates::rho)
      .def_readonly("lambda_", &TargetRates::lambda)
      .def_readonly("q", &TargetRates::q)
      .def_readonly("objective", &TargetRates::objective);

  py::class_<GuardResult>(m, "GuardResult")
      .def_readonly("alpha", &GuardResult::alpha)
      .def_readonly("triggered", &GuardResult::triggered)
      .def_readonly("alpha_hi", &GuardResult::alpha_hi)
      .def_readonly("baseline_gaps", &GuardResult::baseline_gaps)
      .def_readonly("target", &GuardResult::target);

  py::class_<ConstructConfig>(m, "ConstructConfig")
      .def(py::init<>())
      .def_readwrite("snap_xi", &ConstructConfig::snap_xi)
      .def_readwrite("coarse_points", &ConstructConfig::coarse_points)
      .def_readwrite("golden_tol", &ConstructConfig::golden_tol)
      .def_readwrite("golden_max_iter", &ConstructConfig::golden_max_iter);

  py::class_<MechanismParams>(m, "MechanismParams")
      .def_readonly("mix", &MechanismParams::mix)
      .def_readonly("p", &MechanismParams::p)
      .def_readonly("p1", &MechanismParams::p1)
      .def_readonly("p0", &MechanismParams::p0);

  py::class_<GroupRecipe>(m, "GroupRecipe")
      .def_readonly("group", &GroupRecipe::group)
      .def_readonly("group_name", &GroupRecipe::group_name)
      .def_readonly("hi", &GroupRecipe::hi)
      .def_readonly("lo", &GroupRecipe::lo)
      .def_readonly("theta", &GroupRecipe::theta)
      .def_readonly("params", &GroupRecipe::params)
      .def_readonly("target_fnr", &GroupRecipe::target_fnr)
      .def_readonly("target_fpr", &GroupRecipe::target_fpr)
      .def_readonly("expected_intervention", &GroupRecipe::expected_intervention)
      .def_readonly("snapped", &GroupRecipe::snapped);

  py::class_<Recipe>(m, "Recipe")
      .def_readonly("groups", &Recipe::groups)
      .def_readonly("seed", &Recipe::seed)
      .def_readonly("config_hash", &Recipe::config_hash)
      .def("text", &recipe_text);

  py::class_<ConfusionCounts>(m, "ConfusionCounts")
      .def_readonly("tp", &ConfusionCounts::tp)
      .def_readonly("fp", &ConfusionCounts::fp)
      .def_readonly("tn", &ConfusionCounts::tn)
      .def_readonly("fn", &ConfusionCounts::fn);

  py::class_<MetricReport>(m, "MetricReport")
      .def_readonly("name", &MetricReport::name)
      .def_readonly("per_group", &MetricReport::per_group)
      .def_readonly("gap", &MetricReport::gap);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("group_names", &EvalReport::group_names)
      .def_readonly("counts", &EvalReport::counts)
      .def_readonly("accuracy", &EvalReport::accuracy)
      .def_readonly("metrics", &EvalReport::metrics)
      .def_readonly("intervention_expected", &EvalReport::intervention_expected)
      .def_readonly("intervention_sampled", &EvalReport::intervention_sampled)
      .def_readonly("alpha", &EvalReport::alpha)
      .def_readonly("guard_triggered", &EvalReport::guard_triggered)
      .def("text", &report_text);

  py::class_<SynthCell>(m, "SynthCell")
      .def(py::init<>())
      .def_readwrite("count", &SynthCell::count)
      .def_readwrite("alpha", &SynthCell::alpha)
      .def_readwrite("beta", &SynthCell::beta);

  py::class_<SynthGroup>(m, "SynthGroup")
      .def(py::init<>())
      .def_readwrite("name", &SynthGroup::name)
      .def_readwrite("pos", &SynthGroup::pos)
      .def_readwrite("neg", &SynthGroup::neg);

  py::class_<SynthSpec>(m, "SynthSpec")
      .def(py::init<>())
      .def_readwrite("groups", &SynthSpec::groups);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("input", &RunConfig::input)
      .def_readwrite("post_input", &RunConfig::post_input)
      .def_readwrite("test_input", &RunConfig::test_input)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("repeat", &RunConfig::repeat)
      .def_readwrite("epsilon", &RunConfig::epsilon)
      .def_readwrite("region", &RunConfig::region)
      .def_readwrite("construct", &RunConfig::construct)
      .def_readwrite("synth", &RunConfig::synth);

  py::class_<RunArtifacts>(m, "RunArtifacts")
      .def_readonly("hulls", &RunArtifacts::hulls)
      .def_readonly("guard", &RunArtifacts::guard)
      .def_readonly("recipe", &RunArtifacts::recipe)
      .def_readonly("report", &RunArtifacts::report);

  m.def(
      "load_csv",
      [](const std::string& path, const std::string& score_col,
         const std::string& group_col, const std::string& label_col) {
        CsvSchema schema;
        schema.score_col = score_col;
        schema.group_col = group_col;
        schema.label_col = label_col;
        return load_csv(path, schema);
      },
      py::arg("path"), py::arg("score_col") = "score",
      py::arg("group_col") = "group", py::arg("label_col") = "label");

  m.def(
      "split",
      [](const Dataset& data, double train, double post, double test,
         std::uint64_t seed) {
        SplitFractions f;
        f.train = train;
        f.post = post;
        f.test = test;
        return split(data, f, seed);
      },
      py::arg("data"), py::arg("train") = 0.30, py::arg("post") = 0.35,
      py::arg("test") = 0.35, py::arg("seed") = 0);

  m.def("synth_generate", &synth_generate, py::arg("spec"), py::arg("seed"));
  m.def("compute_stats", &compute_stats, py::arg("data"));
  m.def("build_hulls", &build_hulls, py::arg("data"));
  m.def("builtin_spec", &make_builtin, py::arg("name"), py::arg("stats"),
        py::arg("delta") = 0.05, py::arg("epsilon") = 1e-7);
  m.def("misclassification_loss", &misclassification_loss, py::arg("stats"));
  m.def(
      "feasibility_guard",
      [](const std::vector<GroupHull>& hulls,
         const std::vector<ConstraintSpec>& specs, const LossSpec& loss,
         const RegionConfig& config) {
        return feasibility_guard(hulls, specs, loss, config);
      },
      py::arg("hulls"), py::arg("specs"), py::arg("loss"),
      py::arg("config") = RegionConfig{});
  m.def(
      "build_recipe",
      [](const std::vector<GroupHull>& hulls,
         const std::vector<RatePoint>& targets,
         const std::vector<std::string>& names, const ConstructConfig& cfg,
         std::uint64_t seed, const std::string& config_hash) {
        return build_recipe(hulls, targets, names, cfg, seed, config_hash);
      },
      py::arg("hulls"), py::arg("targets"), py::arg("names"),
      py::arg("config") = ConstructConfig{}, py::arg("seed") = 0,
      py::arg("config_hash") = "");
  m.def(
      "predict",
      [](const Recipe& recipe, const Dataset& data) {
        std::vector<int> labels;
        labels.reserve(data.size());
        for (const Prediction& p : predict(recipe, data))
          labels.push_back(p.label);
        return labels;
      },
      py::arg("recipe"), py::arg("data"));
  m.def("evaluate_recipe", &evaluate_recipe, py::arg("recipe"),
        py::arg("data"));
  m.def("run_pipeline", &run_pipeline, py::arg("config"), py::arg("seed"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("config_hash", &config_hash, py::arg("config"));
  m.def("save_recipe", &save_recipe, py::arg("path"), py::arg("recipe"));
  m.def("load_recipe", &load_recipe, py::arg("path"));
  m.def("recipe_from_text", &recipe_from_text, py::arg("text"));
}
