#include "frontlab/wave_profile.hpp"

#include <algorithm>
#include <cmath>

#include "frontlab/errors.hpp"
#include "frontlab/ode.hpp"

namespace frontlab {

namespace {

using State = Eigen::Vector2d;
using Point = OdePoint<double, 2>;

constexpr double kShootHorizon = 400.0;

OdeOptions shooting_ode_options() {
  OdeOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-15;
  o.h_init = 1e-3;
  o.h_max = 0.05;
  return o;
}

auto profile_rhs(const Nonlinearity& f, double c) {
  return [&f, c](double, const State& y) -> State { return State(y[1], -c * y[1] - f.eval(y[0])); };
}

// Time in [a.t, b.t] where component 0 of the Hermite interpolant hits level.
double locate_level(const Point& a, const Point& b, double level) {
  double lo = a.t, hi = b.t;
  const bool rising_at_hi = b.y[0] > a.y[0];
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = hermite(a, b, mid)[0];
    if ((v < level) == rising_at_hi) lo = mid; else hi = mid;
    if (lo == mid && hi == mid) break;
  }
  return 0.5 * (lo + hi);
}

// Evaluates a trajectory (points sorted by ascending t) at time t.
State sample_path(const std::vector<Point>& path, double t) {
  auto it = std::upper_bound(path.begin(), path.end(), t, [](double v, const Point& p) { return v < p.t; });
  if (it == path.begin()) return path.front().y;
  if (it == path.end()) return path.back().y;
  return hermite(*(it - 1), *it, t);
}

}  // namespace

DecayRates decay_rates(const Nonlinearity& f, double c) {
  const double f0 = f.fprime0(), f1 = f.fprime1();
  if (!(f0 < 0.0 && f1 < 0.0)) throw DomainError("decay_rates requires f'(0) < 0 and f'(1) < 0");
  return {0.5 * (c + std::sqrt(c * c - 4.0 * f0)), 0.5 * (-c + std::sqrt(c * c - 4.0 * f1))};
}

ProfileSolution::ProfileSolution(double speed, double lambda, double mu, double window, double dxi,
                                 std::vector<double> phi, std::vector<double> dphi)
    : speed_(speed), lambda_(lambda), mu_(mu), window_(window), dxi_(dxi), phi_(std::move(phi)),
      dphi_(std::move(dphi)) {}

double ProfileSolution::operator()(double xi) const {
  if (phi_.empty()) throw DomainError("empty profile");
  if (xi <= -window_) return 1.0 - (1.0 - phi_.front()) * std::exp(mu_ * (xi + window_));
  if (xi >= window_) return phi_.back() * std::exp(-lambda_ * (xi - window_));
  const double s = (xi + window_) / dxi_;
  std::size_t k = std::min(static_cast<std::size_t>(s), phi_.size() - 2);
  const double u = s - static_cast<double>(k);
  const double y0 = phi_[k], y1 = phi_[k + 1];
  const double secant = (y1 - y0) / dxi_;
  double d0 = dphi_[k], d1 = dphi_[k + 1];
  // Fritsch-Carlson limiter keeps each cell monotone.
  if (secant == 0.0) {
    d0 = d1 = 0.0;
  } else {
    double a = d0 / secant, b = d1 / secant;
    if (a < 0.0) a = 0.0;
    if (b < 0.0) b = 0.0;
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      a *= tau;
      b *= tau;
    }
    d0 = a * secant;
    d1 = b * secant;
  }
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * dxi_ * d0 + (-2 * u3 + 3 * u2) * y1 +
         (u3 - u2) * dxi_ * d1;
}

double ProfileSolution::derivative(double xi) const {
  if (xi <= -window_) return -(1.0 - phi_.front()) * mu_ * std::exp(mu_ * (xi + window_));
  if (xi >= window_) return -lambda_ * phi_.back() * std::exp(-lambda_ * (xi - window_));
  const double s = (xi + window_) / dxi_;
  std::size_t k = std::min(static_cast<std::size_t>(s), phi_.size() - 2);
  const double u = s - static_cast<double>(k);
  return (1.0 - u) * dphi_[k] + u * dphi_[k + 1];
}

double ProfileSolution::inverse(double level) const {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("profile inverse: level must lie in (0,1)");
  if (level >= phi_.front()) return -window_ + std::log((1.0 - level) / (1.0 - phi_.front())) / mu_;
  if (level <= phi_.back()) return window_ - std::log(level / phi_.back()) / lambda_;
  // phi_ is decreasing
  auto it = std::lower_bound(phi_.begin(), phi_.end(), level, [](double a, double b) { return a > b; });
  std::size_t k = static_cast<std::size_t>(it - phi_.begin());
  double lo = xi(k - 1), hi = xi(k);
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) > level) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

int classify_trial_speed(const Nonlinearity& f, double c, double launch_offset) {
  const double m_plus = 0.5 * (-c + std::sqrt(c * c - 4.0 * f.fprime1()));
  const State y0(1.0 - launch_offset, -launch_offset * m_plus);
  int verdict = +1;
  integrate_dopri<double, 2>(profile_rhs(f, c), 0.0, y0, kShootHorizon, shooting_ode_options(),
                             [&](const Point&, const Point& cur) {
                               if (cur.y[0] <= 0.0) {
                                 verdict = -1;
                                 return true;
                               }
                               if (cur.y[1] >= 0.0 || cur.y[0] >= 1.0) {
                                 verdict = +1;
                                 return true;
                               }
                               return false;
                             });
  return verdict;
}

ProfileSolution solve_profile(const Nonlinearity& f, double tol, const ShootingOptions& opt) {
  if (!(tol > 0.0)) throw DomainError("solve_profile: tol must be positive");
  const NonlinearityReport rep = analyze(f);
  if (!rep.is_bistable)
    throw DomainError("solve_profile: f is not bistable (use subfront_speeds for multistable f)");

  const double c_max = 2.0 * std::sqrt(f.max_abs_deriv());
  double lo = -c_max, hi = c_max;
  if (classify_trial_speed(f, lo, opt.launch_offset) != -1 || classify_trial_speed(f, hi, opt.launch_offset) != +1)
    throw NumericalError("no connection found");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (classify_trial_speed(f, mid, opt.launch_offset) < 0) lo = mid; else hi = mid;
  }
  const double c = 0.5 * (lo + hi);
  const DecayRates rates = decay_rates(f, c);
  const double eps = opt.launch_offset;
  // sampled by Hermite interpolation between steps, so keep steps at the sample spacing
  OdeOptions sampling = shooting_ode_options();
  sampling.h_max = std::min(sampling.h_max, opt.sample_spacing);

  // Forward piece from the unstable manifold of (1,0) down to φ = 1/2.
  auto forward = integrate_dopri<double, 2>(
      profile_rhs(f, c), 0.0, State(1.0 - eps, -eps * rates.mu), kShootHorizon, sampling,
      [](const Point&, const Point& cur) { return cur.y[0] <= 0.5 || cur.y[1] >= 0.0; });
  if (forward.back().y[0] > 0.5) throw NumericalError("no connection found (forward piece stalled)");
  const double xi_a = locate_level(forward[forward.size() - 2], forward.back(), 0.5);

  // Backward piece from the stable manifold of (0,0) up to φ = 1/2.
  auto backward = integrate_dopri<double, 2>(
      profile_rhs(f, c), 0.0, State(eps, -eps * rates.lambda), -kShootHorizon, sampling,
      [](const Point&, const Point& cur) { return cur.y[0] >= 0.5 || cur.y[1] >= 0.0; });
  if (backward.back().y[0] < 0.5) throw NumericalError("no connection found (backward piece stalled)");
  const double xi_b = locate_level(backward[backward.size() - 2], backward.back(), 0.5);
  std::reverse(backward.begin(), backward.end());

  const double xi_left = -xi_a;   // launch point of the forward piece
  const double xi_right = -xi_b;  // launch point of the backward piece
  const double a = eps * std::exp(-rates.mu * xi_left);
  const double b = eps * std::exp(rates.lambda * xi_right);

  const double dxi = opt.sample_spacing;
  double window = std::max({std::log(a / opt.tail_floor) / rates.mu, std::log(b / opt.tail_floor) / rates.lambda,
                            -xi_left, xi_right});
  window = std::ceil(window / dxi) * dxi;
  const std::size_t n = static_cast<std::size_t>(std::llround(2.0 * window / dxi)) + 1;
  std::vector<double> phi(n), dphi(n);
  const std::size_t center = n / 2;
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = -window + static_cast<double>(k) * dxi;
    if (k == center) {
      phi[k] = 0.5;
      dphi[k] = 0.5 * (sample_path(forward, xi_a)[1] + sample_path(backward, xi_b)[1]);
    } else if (xi < xi_left) {
      phi[k] = 1.0 - a * std::exp(rates.mu * xi);
      dphi[k] = -a * rates.mu * std::exp(rates.mu * xi);
    } else if (xi < 0.0) {
      const State s = sample_path(forward, xi + xi_a);
      phi[k] = s[0];
      dphi[k] = s[1];
    } else if (xi <= xi_right) {
      const State s = sample_path(backward, xi + xi_b);
      phi[k] = s[0];
      dphi[k] = s[1];
    } else {
      phi[k] = b * std::exp(-rates.lambda * xi);
      dphi[k] = -rates.lambda * phi[k];
    }
  }
  return ProfileSolution(c, rates.lambda, rates.mu, window, dxi, std::move(phi), std::move(dphi));
}

double ode_flow(const Nonlinearity& f, double theta0, double t) {
  if (!(theta0 > 0.0 && theta0 < 1.0)) throw DomainError("ode_flow: initial value must lie in (0,1)");
  if (t < 0.0) throw DomainError("ode_flow: t must be nonnegative");
  if (t == 0.0) return theta0;
  using V1 = Eigen::Matrix<double, 1, 1>;
  OdeOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-16;
  o.h_max = 0.5;
  auto path = integrate_dopri<double, 1>([&f](double, const V1& y) { return V1(f(y[0])); }, 0.0, V1(theta0), t,
                                         o, [](const auto&, const auto&) { return false; });
  return path.back().y[0];
}

Nonlinearity restrict_to(const Nonlinearity& f, double a, double b) {
  if (!(b > a)) throw DomainError("restrict_to: need a < b");
  const double w = b - a;
  auto g = [f, a, w](double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return f.eval(a + w * s) / w;
  };
  auto dg = [f, a, w](double s) { return f.deriv(a + w * s); };
  return Nonlinearity::custom(g, dg, f.label() + " on [" + std::to_string(a) + "," + std::to_string(b) + "]");
}

SubFrontLadder subfront_speeds(const Nonlinearity& f, double tol) {
  std::vector<double> stable;
  for (double z : f.zeros())
    if (f.deriv(z) < 0.0) stable.push_back(z);
  if (stable.size() < 2) throw DomainError("subfront_speeds: need at least two stable zeros");
  SubFrontLadder ladder;
  for (std::size_t k = 0; k + 1 < stable.size(); ++k) {
    const Nonlinearity g = restrict_to(f, stable[k], stable[k + 1]);
    ladder.fronts.push_back({stable[k], stable[k + 1], solve_profile(g, tol).speed()});
  }
  ladder.single_front_possible = true;
  for (std::size_t k = 0; k + 1 < ladder.fronts.size(); ++k)
    if (!(ladder.fronts[k].speed < ladder.fronts[k + 1].speed)) ladder.single_front_possible = false;
  return ladder;
}

}  // namespace frontlab
