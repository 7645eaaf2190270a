#include "rocpost/roc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "rocpost/errors.hpp"

namespace rocpost {

namespace {

// Group rows as (score, original index), sorted score desc, index asc.
std::vector<std::pair<double, std::size_t>> sorted_rows(const Dataset& data,
                                                        int group) {
  std::vector<std::pair<double, std::size_t>> rows;
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    if (data.samples[i].group == group) rows.emplace_back(data.samples[i].score, i);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  return rows;
}

}  // namespace

std::vector<RatePoint> empirical_roc(const Dataset& data, int group) {
  const auto rows = sorted_rows(data, group);
  long n_pos = 0, n_neg = 0;
  for (const auto& r : rows)
    (data.samples[r.second].label ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0)
    throw DegenerateGroupError("group " + std::to_string(group) +
                               " lacks a positive or negative sample");

  std::vector<RatePoint> points;
  points.reserve(rows.size() + 1);
  points.push_back({0.0, 0.0});
  long tp = 0, fp = 0;
  for (const auto& r : rows) {
    (data.samples[r.second].label ? tp : fp)++;
    points.push_back({static_cast<double>(tp) / n_pos,
                      static_cast<double>(fp) / n_neg});
  }
  return points;
}

GroupHull build_hull(const Dataset& data, int group) {
  const auto rows = sorted_rows(data, group);
  long n_pos = 0, n_neg = 0;
  for (const auto& r : rows)
    (data.samples[r.second].label ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0)
    throw DegenerateGroupError("group " + std::to_string(group) +
                               " lacks a positive or negative sample");
  const long n = static_cast<long>(rows.size());

  // Threshold-realizable rank points: rank 0 plus ranks where the next
  // score strictly drops (cuts inside a tie block are not `score >= t`).
  struct RankPoint {
    long tp, fp, rank;  // integer counts; exact hull arithmetic
  };
  std::vector<RankPoint> pts;
  pts.push_back({0, 0, 0});
  long tp = 0, fp = 0;
  for (long j = 0; j < n; ++j) {
    (data.samples[rows[j].second].label ? tp : fp)++;
    if (j + 1 == n || rows[j].first > rows[j + 1].first)
      pts.push_back({tp, fp, j + 1});
  }

  // Monotone chain, upper-left envelope in (fp, tp). Counts stay exact in
  // int64; cross products fit comfortably for n below ~3e9.
  std::vector<RankPoint> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      const std::int64_t cross =
          static_cast<std::int64_t>(b.fp - a.fp) * (p.tp - a.tp) -
          static_cast<std::int64_t>(b.tp - a.tp) * (p.fp - a.fp);
      if (cross >= 0)
        hull.pop_back();  // b on or below chord a-p: not a vertex
      else
        break;
    }
    hull.push_back(p);
  }

  GroupHull out;
  out.group = group;
  out.n = n;
  out.n_pos = n_pos;
  out.n_neg = n_neg;
  out.prevalence = static_cast<double>(n_pos) / n;
  out.proportion = 1.0;
  for (const auto& p : hull) {
    HullSupport s;
    s.above_all = (p.rank == 0);
    s.threshold = s.above_all ? 0.0 : rows[p.rank - 1].first;
    s.fnr = static_cast<double>(n_pos - p.tp) / n_pos;
    s.fpr = static_cast<double>(p.fp) / n_neg;
    s.selection_rate = static_cast<double>(p.rank) / n;
    out.supports.push_back(s);
  }
  return out;
}

std::vector<GroupHull> build_hulls(const Dataset& data) {
  const GroupStats stats = compute_stats(data);
  std::vector<GroupHull> hulls;
  for (int a = 0; a < data.group_count(); ++a) {
    GroupHull h = build_hull(data, a);
    h.proportion = stats.proportion[a];
    hulls.push_back(std::move(h));
  }
  return hulls;
}

bool hull_contains(const GroupHull& hull, const RatePoint& point, double tol) {
  if (hull.supports.size() < 2) throw InternalError("hull without supports");
  if (point.fpr < -tol || point.fpr > 1.0 + tol || point.tpr < -tol ||
      point.tpr > 1.0 + tol)
    return false;
  // Clockwise polygon in (fpr, tpr): up the hull, back along the chord.
  std::vector<RatePoint> poly;
  for (const auto& s : hull.supports) poly.push_back({s.tpr(), s.fpr});
  poly.push_back({0.0, 0.0});  // chord end; first vertex is (0,0) already

  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const double ex = poly[i + 1].fpr - poly[i].fpr;
    const double ey = poly[i + 1].tpr - poly[i].tpr;
    const double len = std::hypot(ex, ey);
    if (len == 0.0) continue;
    // Positive cross = point left of the directed edge = outside.
    const double cross = ex * (point.tpr - poly[i].tpr) -
                         ey * (point.fpr - poly[i].fpr);
    if (cross > tol * len) return false;
  }
  return true;
}

}  // namespace rocpost
