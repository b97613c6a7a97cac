#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "frontlab/errors.hpp"

namespace frontlab {

/// Node coordinates of a uniform 1D/2D grid: node (i, j) sits at
/// origin + h * (i, j). In 1D, n2 == 1 and the second coordinate is unused.
struct Grid {
  int dim = 1;
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 1;
  double h = 1.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();

  static Grid line(Eigen::Index n, double h, double x_min) { return {1, n, 1, h, {x_min, 0.0}}; }
  static Grid plane(Eigen::Index n1, Eigen::Index n2, double h, double x1_min, double x2_min) {
    return {2, n1, n2, h, {x1_min, x2_min}};
  }
  /// Square-ish grid covering [x1_min, x1_max] x [x2_min, x2_max].
  static Grid covering(double x1_min, double x1_max, double x2_min, double x2_max, double h) {
    return plane(static_cast<Eigen::Index>(std::llround((x1_max - x1_min) / h)) + 1,
                 static_cast<Eigen::Index>(std::llround((x2_max - x2_min) / h)) + 1, h, x1_min, x2_min);
  }

  double x1(Eigen::Index i) const { return origin[0] + h * static_cast<double>(i); }
  double x2(Eigen::Index j) const { return origin[1] + h * static_cast<double>(j); }
  double x1_max() const { return x1(n1 - 1); }
  double x2_max() const { return x2(n2 - 1); }
  Eigen::Index size() const { return n1 * n2; }

  bool same_as(const Grid& o) const {
    return dim == o.dim && n1 == o.n1 && n2 == o.n2 && h == o.h && origin == o.origin;
  }
};

/// A scalar field on a Grid at time t. values(i, j), column-major, so x1 is
/// the fastest index and a "row" is a fixed j.
template <typename Scalar>
struct GridField {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Grid grid;
  double t = 0.0;
  Array values;

  GridField() = default;
  explicit GridField(const Grid& g, double time = 0.0, Scalar fill = Scalar(0))
      : grid(g), t(time), values(Array::Constant(g.n1, g.n2, fill)) {}

  template <typename Fn>
  static GridField sample(const Grid& g, double time, Fn&& fn) {
    GridField out(g, time);
    for (Eigen::Index j = 0; j < g.n2; ++j)
      for (Eigen::Index i = 0; i < g.n1; ++i) out.values(i, j) = static_cast<Scalar>(fn(g.x1(i), g.x2(j)));
    return out;
  }

  Scalar& operator()(Eigen::Index i, Eigen::Index j = 0) { return values(i, j); }
  Scalar operator()(Eigen::Index i, Eigen::Index j = 0) const { return values(i, j); }

  Scalar min() const { return values.minCoeff(); }
  Scalar max() const { return values.maxCoeff(); }
};

using ScalarField = GridField<double>;

/// Catmull-Rom bicubic (cubic in 1D) interpolation at a point; clamps the
/// stencil at the grid boundary. Returns `outside` when the point lies off
/// the grid.
template <typename Scalar>
Scalar sample_cubic(const GridField<Scalar>& u, double x1, double x2, Scalar outside) {
  const Grid& g = u.grid;
  const double s1 = (x1 - g.origin[0]) / g.h;
  const double s2 = g.dim == 2 ? (x2 - g.origin[1]) / g.h : 0.0;
  if (s1 < 0.0 || s1 > static_cast<double>(g.n1 - 1)) return outside;
  if (g.dim == 2 && (s2 < 0.0 || s2 > static_cast<double>(g.n2 - 1))) return outside;
  auto weights = [](double f) {
    const double f2 = f * f, f3 = f2 * f;
    return std::array<double, 4>{-0.5 * f3 + f2 - 0.5 * f, 1.5 * f3 - 2.5 * f2 + 1.0, -1.5 * f3 + 2.0 * f2 + 0.5 * f,
                                 0.5 * f3 - 0.5 * f2};
  };
  const Eigen::Index i0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(s1), g.n1 - 2);
  const auto w1 = weights(s1 - static_cast<double>(i0));
  auto clamp_i = [&](Eigen::Index i) { return std::clamp<Eigen::Index>(i, 0, g.n1 - 1); };
  if (g.dim == 1) {
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) acc += w1[a] * u.values(clamp_i(i0 - 1 + a), 0);
    return static_cast<Scalar>(acc);
  }
  const Eigen::Index j0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(s2), g.n2 - 2);
  const auto w2 = weights(s2 - static_cast<double>(j0));
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    const Eigen::Index j = std::clamp<Eigen::Index>(j0 - 1 + b, 0, g.n2 - 1);
    double row = 0.0;
    for (int a = 0; a < 4; ++a) row += w1[a] * u.values(clamp_i(i0 - 1 + a), j);
    acc += w2[b] * row;
  }
  return static_cast<Scalar>(acc);
}

/// Largest nodewise |a - b| on identical grids.
template <typename Scalar>
Scalar sup_distance(const GridField<Scalar>& a, const GridField<Scalar>& b) {
  if (!a.grid.same_as(b.grid)) throw DomainError("sup_distance: grids differ");
  return (a.values - b.values).abs().maxCoeff();
}

/// Self-describing little-endian snapshot: "FLAB1", uint32 dim, uint64 n per
/// axis, f64 h, f64 origin per axis, f64 t, then f64 nodes with x1 fastest.
void write_snapshot(const ScalarField& u, const std::filesystem::path& path);
ScalarField read_snapshot(const std::filesystem::path& path);

/// CSV "x,u" for 1D fields (and "x1,x2,u" for 2D).
void write_csv(const ScalarField& u, const std::filesystem::path& path);

}  // namespace frontlab
