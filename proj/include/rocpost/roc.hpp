#pragma once

#include <vector>

#include "rocpost/data.hpp"

namespace rocpost {

struct RatePoint {
  double tpr = 0.0;
  double fpr = 0.0;
};

// One vertex of a group's ROC upper hull, realizable as `score >= threshold`
// (or the predict-nothing rule when above_all is set).
struct HullSupport {
  bool above_all = false;
  double threshold = 0.0;  // meaningful iff !above_all
  double fnr = 1.0;
  double fpr = 0.0;
  double selection_rate = 0.0;  // fraction of the group predicted positive

  double tpr() const { return 1.0 - fnr; }
};

// Upper convex hull of a group's empirical ROC, with the group's stats
// slice. Supports are ordered by decreasing threshold (increasing FPR),
// starting at (tpr,fpr)=(0,0) and ending at (1,1).
struct GroupHull {
  int group = 0;
  std::vector<HullSupport> supports;
  long n = 0;
  long n_pos = 0;
  long n_neg = 0;
  double prevalence = 0.0;  // pi_a
  double proportion = 1.0;  // p_a

  std::size_t size() const { return supports.size(); }
};

// All n_a+1 rank points (tpr_j, fpr_j) of the group's empirical ROC, in
// rank order. Ties broken by (score desc, row index asc).
std::vector<RatePoint> empirical_roc(const Dataset& data, int group);

// Upper hull over the threshold-realizable rank points. Throws
// DegenerateGroupError when the group lacks a positive or a negative.
GroupHull build_hull(const Dataset& data, int group);

// Hulls for every group, with stats attached.
std::vector<GroupHull> build_hulls(const Dataset& data);

// Membership in the polygon spanned by the hull supports and the chord
// back from (1,1) to (0,0), within `tol` of perpendicular distance.
bool hull_contains(const GroupHull& hull, const RatePoint& point, double tol);

}  // namespace rocpost
