#include "rocpost/eval.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "rocpost/errors.hpp"
#include "rocpost/fmt.hpp"

namespace rocpost {

namespace {

std::optional<double> ratio(long num, long den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / den;
}

MetricReport gap_of(std::string name,
                    std::vector<std::optional<double>> values) {
  MetricReport rep;
  rep.name = std::move(name);
  rep.per_group = std::move(values);
  double lo = 0.0, hi = 0.0;
  int defined = 0;
  for (const auto& v : rep.per_group) {
    if (!v) continue;
    if (defined == 0) {
      lo = hi = *v;
    } else {
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
    ++defined;
  }
  if (defined >= 2) rep.gap = hi - lo;
  return rep;
}

}  // namespace

EvalReport evaluate_recipe(const Recipe& recipe, const Dataset& data) {
  // Match dataset groups to recipe entries by name; dense ids may differ
  // between the fitting and evaluation files.
  std::map<std::string, const GroupRecipe*> by_name;
  for (const auto& g : recipe.groups) by_name[g.group_name] = &g;
  std::vector<const GroupRecipe*> plan(data.group_count(), nullptr);
  for (int a = 0; a < data.group_count(); ++a) {
    const auto it = by_name.find(data.group_names[a]);
    if (it == by_name.end())
      throw InputError("group '" + data.group_names[a] +
                       "' has no recipe entry");
    plan[a] = it->second;
  }

  EvalReport rep;
  rep.group_names = data.group_names;
  rep.counts.assign(data.group_count(), {});
  long flips = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data.samples[i];
    const Prediction pred = predict_one(*plan[s.group], recipe.seed, s.score, i);
    auto& c = rep.counts[s.group];
    if (pred.label && s.label) ++c.tp;
    if (pred.label && !s.label) ++c.fp;
    if (!pred.label && s.label) ++c.fn;
    if (!pred.label && !s.label) ++c.tn;
    if (pred.label != pred.base) ++flips;
  }

  long correct = 0;
  for (const auto& c : rep.counts) correct += c.tp + c.tn;
  rep.accuracy = static_cast<double>(correct) / data.size();
  rep.intervention_sampled = static_cast<double>(flips) / data.size();

  // Closed-form flip probability on this dataset: base selection rates per
  // group follow from the two thresholds, everything else from the recipe.
  double expected = 0.0;
  for (int a = 0; a < data.group_count(); ++a) {
    const auto& g = *plan[a];
    long n_a = 0, sel_hi = 0, sel_lo = 0;
    for (const auto& s : data.samples) {
      if (s.group != a) continue;
      ++n_a;
      if (!g.hi.above_all && s.score >= g.hi.threshold) ++sel_hi;
      if (!g.lo.above_all && s.score >= g.lo.threshold) ++sel_lo;
    }
    BasePoint base;
    base.s_plus = ((1.0 - g.theta) * sel_hi + g.theta * sel_lo) / n_a;
    base.fnr = (1.0 - g.theta) * g.hi.fnr + g.theta * g.lo.fnr;
    base.fpr = (1.0 - g.theta) * g.hi.fpr + g.theta * g.lo.fpr;
    expected += (static_cast<double>(n_a) / data.size()) *
                expected_intervention(base, g.params);
  }
  rep.intervention_expected = expected;

  std::vector<std::optional<double>> dp, eopp, peq, pp, forp;
  for (const auto& c : rep.counts) {
    dp.push_back(ratio(c.tp + c.fp, c.n()));
    eopp.push_back(ratio(c.tp, c.tp + c.fn));
    peq.push_back(ratio(c.fp, c.fp + c.tn));
    pp.push_back(ratio(c.tp, c.tp + c.fp));
    forp.push_back(ratio(c.fn, c.fn + c.tn));
  }
  rep.metrics.push_back(gap_of("dp", std::move(dp)));
  rep.metrics.push_back(gap_of("eopp", std::move(eopp)));
  rep.metrics.push_back(gap_of("peq", std::move(peq)));
  rep.metrics.push_back(gap_of("pp", std::move(pp)));
  rep.metrics.push_back(gap_of("forp", std::move(forp)));
  return rep;
}

OracleResult oracle_rates(const Dataset& data,
                          const std::vector<ConstraintSpec>& specs,
                          const RegionConfig& config) {
  const auto hulls = build_hulls(data);
  const GroupStats stats = compute_stats(data);
  const LossSpec loss = misclassification_loss(stats);
  OracleResult out;
  out.guard = feasibility_guard(hulls, specs, loss, config);
  out.accuracy = 1.0 - out.guard.target.objective;
  return out;
}

namespace {

std::string opt_str(const std::optional<double>& v) {
  return v ? fmt_g17(*v) : "undefined";
}

}  // namespace

void write_report(std::ostream& out, const EvalReport& rep) {
  out << "rocpost-report v1\n";
  out << "groups = " << rep.group_names.size() << "\n";
  out << "accuracy = " << fmt_g17(rep.accuracy) << "\n";
  out << "intervention_expected = " << fmt_g17(rep.intervention_expected)
      << "\n";
  out << "intervention_sampled = " << fmt_g17(rep.intervention_sampled)
      << "\n";
  out << "alpha = " << fmt_g17(rep.alpha) << "\n";
  out << "guard_triggered = " << (rep.guard_triggered ? 1 : 0) << "\n";
  for (const auto& m : rep.metrics) {
    out << "gap_" << m.name << " = " << opt_str(m.gap) << "\n";
    for (std::size_t a = 0; a < m.per_group.size(); ++a)
      out << m.name << "_" << rep.group_names[a] << " = "
          << opt_str(m.per_group[a]) << "\n";
  }
  for (std::size_t a = 0; a < rep.counts.size(); ++a) {
    const auto& c = rep.counts[a];
    out << "counts_" << rep.group_names[a] << " = " << c.tp << "," << c.fp
        << "," << c.tn << "," << c.fn << "\n";
  }

  // Summary table, one row; columns follow the usual benchmark layout.
  out << "\n";
  out << "column   ";
  out << "acc";
  for (const auto& m : rep.metrics) out << " gap_" << m.name;
  out << " interv\n";
  char buf[64];
  auto short_num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  out << "recipe   " << short_num(rep.accuracy);
  for (const auto& m : rep.metrics)
    out << " " << (m.gap ? short_num(*m.gap) : "undef");
  out << " " << short_num(rep.intervention_sampled) << "\n";
}

void save_report(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_report(out, report);
  if (!out) throw InputError("write failed for '" + path + "'");
}

AggregateReport aggregate(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw InternalError("aggregate of zero reports");
  AggregateReport agg;
  agg.runs = static_cast<long>(reports.size());

  auto mean_sd = [&](auto getter, double& mean, double& sd) {
    double sum = 0.0;
    for (const auto& r : reports) sum += getter(r);
    mean = sum / reports.size();
    double ss = 0.0;
    for (const auto& r : reports) {
      const double d = getter(r) - mean;
      ss += d * d;
    }
    sd = reports.size() > 1 ? std::sqrt(ss / (reports.size() - 1)) : 0.0;
  };

  mean_sd([](const EvalReport& r) { return r.accuracy; }, agg.accuracy_mean,
          agg.accuracy_sd);
  mean_sd([](const EvalReport& r) { return r.intervention_expected; },
          agg.interv_expected_mean, agg.interv_expected_sd);
  mean_sd([](const EvalReport& r) { return r.intervention_sampled; },
          agg.interv_sampled_mean, agg.interv_sampled_sd);
  mean_sd([](const EvalReport& r) { return r.alpha; }, agg.alpha_mean,
          agg.alpha_sd);

  const std::size_t n_metrics = reports.front().metrics.size();
  for (std::size_t m = 0; m < n_metrics; ++m) {
    agg.metric_names.push_back(reports.front().metrics[m].name);
    bool all_defined = true;
    for (const auto& r : reports)
      if (!r.metrics[m].gap) all_defined = false;
    if (!all_defined) {
      agg.gap_mean.push_back(std::nullopt);
      agg.gap_sd.push_back(std::nullopt);
      continue;
    }
    double mean = 0.0, sd = 0.0;
    mean_sd([m](const EvalReport& r) { return *r.metrics[m].gap; }, mean, sd);
    agg.gap_mean.push_back(mean);
    agg.gap_sd.push_back(sd);
  }
  return agg;
}

void write_aggregate(std::ostream& out, const AggregateReport& agg) {
  out << "rocpost-aggregate v1\n";
  out << "runs = " << agg.runs << "\n";
  auto pair_line = [&out](const std::string& key, double mean, double sd) {
    out << key << "_mean = " << fmt_g17(mean) << "\n";
    out << key << "_sd = " << fmt_g17(sd) << "\n";
  };
  pair_line("accuracy", agg.accuracy_mean, agg.accuracy_sd);
  for (std::size_t m = 0; m < agg.metric_names.size(); ++m) {
    const std::string key = "gap_" + agg.metric_names[m];
    if (agg.gap_mean[m]) {
      pair_line(key, *agg.gap_mean[m], *agg.gap_sd[m]);
    } else {
      out << key << "_mean = undefined\n" << key << "_sd = undefined\n";
    }
  }
  pair_line("intervention_expected", agg.interv_expected_mean,
            agg.interv_expected_sd);
  pair_line("intervention_sampled", agg.interv_sampled_mean,
            agg.interv_sampled_sd);
  pair_line("alpha", agg.alpha_mean, agg.alpha_sd);

  out << "\ncolumn    acc";
  for (const auto& name : agg.metric_names) out << " gap_" << name;
  out << " interv\n";
  char buf[64];
  auto cell = [&buf](double mean, double sd) {
    std::snprintf(buf, sizeof buf, "%.3f+-%.3f", mean, sd);
    return std::string(buf);
  };
  out << "mean+-sd  " << cell(agg.accuracy_mean, agg.accuracy_sd);
  for (std::size_t m = 0; m < agg.metric_names.size(); ++m)
    out << " "
        << (agg.gap_mean[m] ? cell(*agg.gap_mean[m], *agg.gap_sd[m])
                            : "undef");
  out << " " << cell(agg.interv_sampled_mean, agg.interv_sampled_sd) << "\n";
}

}  // namespace rocpost
