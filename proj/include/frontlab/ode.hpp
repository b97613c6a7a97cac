#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "frontlab/errors.hpp"

namespace frontlab {

struct OdeOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  double h_init = 1e-3;
  double h_max = 0.1;
  std::size_t max_steps = 2'000'000;
};

/// One accepted step: time, state and state derivative (for Hermite output).
template <typename Scalar, int N>
struct OdePoint {
  Scalar t;
  Eigen::Matrix<Scalar, N, 1> y;
  Eigen::Matrix<Scalar, N, 1> dy;
};

template <typename Scalar, int N>
Eigen::Matrix<Scalar, N, 1> hermite(const OdePoint<Scalar, N>& a, const OdePoint<Scalar, N>& b, Scalar t) {
  const Scalar h = b.t - a.t;
  const Scalar s = (t - a.t) / h;
  const Scalar s2 = s * s, s3 = s2 * s;
  const Scalar h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const Scalar h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * a.y + h10 * h * a.dy + h01 * b.y + h11 * h * b.dy;
}

/// Dormand-Prince 5(4) with PI-free step control. Integrates from t0 toward
/// t_end (either direction) and calls `stop(prev, cur)` after every accepted
/// step; integration ends when it returns true. Returns all accepted points.
template <typename Scalar, int N, typename Rhs, typename Stop>
std::vector<OdePoint<Scalar, N>> integrate_dopri(Rhs&& rhs, Scalar t0, const Eigen::Matrix<Scalar, N, 1>& y0,
                                                 Scalar t_end, const OdeOptions& opt, Stop&& stop) {
  using Vec = Eigen::Matrix<Scalar, N, 1>;
  static constexpr Scalar c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr Scalar a21 = 1.0 / 5;
  static constexpr Scalar a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr Scalar a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr Scalar a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr Scalar a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr Scalar b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr Scalar e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const Scalar dir = t_end >= t0 ? Scalar(1) : Scalar(-1);
  std::vector<OdePoint<Scalar, N>> out;
  Vec y = y0;
  Scalar t = t0;
  Vec k1 = rhs(t, y);
  out.push_back({t, y, k1});
  Scalar h = std::min<Scalar>(opt.h_init, std::abs(t_end - t0));
  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    if (dir * (t_end - t) <= 0) return out;
    h = std::min(h, std::abs(t_end - t));
    const Scalar hs = dir * h;
    const Vec k2 = rhs(t + c2 * hs, y + hs * (a21 * k1));
    const Vec k3 = rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    const Vec k4 = rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = rhs(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = rhs(t + hs, y_new);
    const Vec err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    Scalar err_norm = 0;
    for (int i = 0; i < y.size(); ++i) {
      const Scalar sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err_norm = std::max(err_norm, std::abs(err[i]) / sc);
    }
    if (!std::isfinite(err_norm)) throw NumericalError("ODE integration produced a non-finite state");
    if (err_norm <= 1) {
      t += hs;
      y = y_new;
      k1 = k7;
      out.push_back({t, y, k1});
      if (stop(out[out.size() - 2], out.back())) return out;
    }
    const Scalar factor = err_norm == 0 ? Scalar(5) : std::clamp<Scalar>(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
    h = std::min<Scalar>(h * factor, opt.h_max);
    if (h < 1e-14) throw NumericalError("ODE step size underflow");
  }
  throw NumericalError("ODE integration exceeded the step budget");
}

}  // namespace frontlab
