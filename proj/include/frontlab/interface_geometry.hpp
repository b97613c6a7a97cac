#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "frontlab/field.hpp"

namespace frontlab {

using Point2 = Eigen::Vector2d;
using Polyline = std::vector<Point2>;

/// Level set {u = level} at one time. 1D points carry x in the first
/// coordinate and 0 in the second. In 2D, `segments` joins pairs of points
/// (indices into `points`), one or two per marching-squares cell.
struct InterfaceSet {
  double t = 0.0;
  double level = 0.5;
  int dim = 2;
  std::vector<Point2> points;
  std::vector<std::array<int, 2>> segments;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

/// 1D: linear interpolation at every sign change of u - level.
/// 2D: marching squares with linear edge interpolation; crossing points are
/// shared between neighbouring cells and saddles are resolved by the cell
/// average. Nodes with u >= level count as "above".
InterfaceSet extract_level_set(const ScalarField& u, double level = 0.5);

/// Same points moved by `shift`.
InterfaceSet translated(const InterfaceSet& s, const Point2& shift);

/// Points inside the closed box [lo, hi]; segments with both ends inside.
InterfaceSet clipped(const InterfaceSet& s, const Point2& lo, const Point2& hi);
/// Points where `inside` holds; segments with both ends kept.
InterfaceSet clipped(const InterfaceSet& s, const std::function<bool(const Point2&)>& inside);

/// Bucket grid over segments (points are degenerate segments) answering
/// exact nearest-distance queries.
class SegmentIndex {
 public:
  SegmentIndex() = default;
  explicit SegmentIndex(std::vector<std::array<Point2, 2>> segments);
  static SegmentIndex of_points(const std::vector<Point2>& points);
  static SegmentIndex of_polylines(const std::vector<Polyline>& lines);

  bool empty() const { return segs_.empty(); }
  /// Squared distance from p to the nearest segment.
  double nearest_sq(const Point2& p) const;
  double nearest(const Point2& p) const;

 private:
  std::vector<std::array<Point2, 2>> segs_;
  Point2 lo_ = Point2::Zero();
  double cell_ = 1.0;
  long nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> buckets_;
};

/// Squared distance from p to the segment [a, b].
double segment_distance_sq(const Point2& p, const Point2& a, const Point2& b);

enum class DistanceKind { inf, tilde, hausdorff };

std::string to_string(DistanceKind kind);
DistanceKind parse_distance_kind(const std::string& name);

/// d(A,B) = inf over pairs.
double dist_inf(const InterfaceSet& a, const InterfaceSet& b);
/// sup over x in A of d(x, B).
double directed_sup(const InterfaceSet& a, const InterfaceSet& b);
/// min of the two directed sups.
double dist_tilde(const InterfaceSet& a, const InterfaceSet& b);
/// max of the two directed sups.
double dist_hausdorff(const InterfaceSet& a, const InterfaceSet& b);
double distance(const InterfaceSet& a, const InterfaceSet& b, DistanceKind kind);

struct SpeedEstimate {
  double gamma_hat = 0.0;
  DistanceKind kind = DistanceKind::inf;
  double t_min = 0.0, t_max = 0.0;
  double fit_residual = 0.0;
  double intercept = 0.0;
  std::vector<double> tau;       // all anchored pairs
  std::vector<double> distance;  // D(tau), same order
};

/// Slope of D(τ) = distance(Γ_a, Γ_{a+τ}) against τ over pairs anchored in
/// the first third of the window, fitted on the largest half of τ with an
/// intercept. fit_residual = max |D - fit| / τ over the fitted pairs.
/// Needs at least 5 interfaces spanning at least 10 time units.
SpeedEstimate mean_speed(const std::vector<InterfaceSet>& interfaces, DistanceKind kind);

struct Planarity {
  Point2 e = Point2(1.0, 0.0);  // unit normal, pointing away from u > level
  double xi = 0.0;              // Γ ≈ {x · e = xi}
  double residual = 0.0;        // max |x · e - xi|
};

/// Total least squares line through the points. When `u` is given, e is
/// oriented so that most nodes with u > level satisfy x · e < xi.
Planarity planarity(const InterfaceSet& s, const ScalarField* u = nullptr);

/// Chains the marching-squares segments into polylines (closed loops repeat
/// their first point). 1D sets give one single-point line per point.
std::vector<Polyline> chain_polylines(const InterfaceSet& s);

/// Douglas-Peucker simplification.
Polyline simplify_polyline(const Polyline& line, double tol);

/// Number of straight pieces of the simplified polylines (summed).
int count_pieces(const InterfaceSet& s, double tol);

/// Reference interface Γ_t given as polylines (single points allowed).
struct ReferenceInterface {
  double t = 0.0;
  std::vector<Polyline> lines;
};

/// Ω± side of a node: +1 for Ω⁺, -1 for Ω⁻, 0 to skip.
using SideRule = std::function<int(const ScalarField&, Eigen::Index, Eigen::Index)>;

/// Default rule: sign of u - 1/2.
int side_by_half(const ScalarField& u, Eigen::Index i, Eigen::Index j);

struct TransitionTable {
  std::vector<double> eps;
  std::vector<double> M;  // +inf when no node beyond M is left to certify
  double max_node_distance = 0.0;
};

/// For each ε: smallest M such that, over all snapshots, Ω⁺ nodes at distance
/// > M from the reference satisfy u >= 1 - ε and Ω⁻ nodes satisfy u <= ε.
/// Each snapshot uses the reference whose time is closest to it.
TransitionTable verify_transition(const std::vector<ScalarField>& history,
                                  const std::vector<ReferenceInterface>& refs, const std::vector<double>& eps_grid,
                                  const SideRule& side = side_by_half);

}  // namespace frontlab
