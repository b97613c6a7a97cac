#pragma once

#include <vector>

#include "frontlab/nonlinearity.hpp"

namespace frontlab {

struct DecayRates {
  double lambda;  // φ ~ b e^{-λξ} as ξ -> +∞
  double mu;      // 1 - φ ~ a e^{μξ} as ξ -> -∞
};

/// Closed-form tail rates of a front with speed c:
/// λ = (c + sqrt(c² - 4f'(0)))/2 and μ = (-c + sqrt(c² - 4f'(1)))/2.
DecayRates decay_rates(const Nonlinearity& f, double c);

/// Planar front (c_f, φ_f) with φ_f(-∞)=1, φ_f(+∞)=0, φ_f(0)=1/2.
///
/// Samples live on a uniform grid over [-X, X] together with φ'; outside the
/// window the profile continues with the exponential tails 1 - a e^{μξ} and
/// b e^{-λξ}, matched to the boundary samples.
class ProfileSolution {
 public:
  ProfileSolution() = default;
  ProfileSolution(double speed, double lambda, double mu, double window, double dxi, std::vector<double> phi,
                  std::vector<double> dphi);

  double speed() const { return speed_; }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  double window() const { return window_; }
  double spacing() const { return dxi_; }
  std::size_t size() const { return phi_.size(); }
  double xi(std::size_t k) const { return -window_ + static_cast<double>(k) * dxi_; }
  const std::vector<double>& phi() const { return phi_; }
  const std::vector<double>& dphi() const { return dphi_; }

  /// Monotone cubic Hermite inside the window, analytic tails outside.
  double operator()(double xi) const;
  double derivative(double xi) const;
  /// ξ with φ(ξ) = level, level in (0,1).
  double inverse(double level) const;

 private:
  double speed_ = 0.0;
  double lambda_ = 1.0;
  double mu_ = 1.0;
  double window_ = 0.0;
  double dxi_ = 1.0;
  std::vector<double> phi_;
  std::vector<double> dphi_;
};

inline double eval_profile(const ProfileSolution& p, double xi) { return p(xi); }

struct ShootingOptions {
  double launch_offset = 1e-6;
  double sample_spacing = 0.01;
  double tail_floor = 1e-9;
};

/// Shooting on (φ, φ') from the unstable manifold of (1,0); the speed is
/// bisected to width `tol` on [-c_max, c_max], c_max = 2 sqrt(max|f'|).
/// Throws DomainError for non-bistable f, NumericalError("no connection
/// found") when the bracket does not straddle a connection.
ProfileSolution solve_profile(const Nonlinearity& f, double tol = 1e-10, const ShootingOptions& opt = {});

/// Trajectory class for a trial speed: -1 when φ reaches 0 while
/// decreasing (speed too small), +1 when φ' turns to 0 inside (0,1) or the
/// orbit stalls (speed too large).
int classify_trial_speed(const Nonlinearity& f, double c, double launch_offset = 1e-6);

/// ϱ(t) for ϱ' = f(ϱ), ϱ(0) = theta0.
double ode_flow(const Nonlinearity& f, double theta0, double t);

struct SubFront {
  double lower;  // stable zero ahead of the front
  double upper;  // stable zero behind the front
  double speed;
};

struct SubFrontLadder {
  std::vector<SubFront> fronts;  // bottom to top
  /// A single 0-1 front exists only if the speeds increase strictly from
  /// the bottom interval to the top one.
  bool single_front_possible = false;
};

/// Speeds of the bistable sub-fronts between consecutive stable zeros.
SubFrontLadder subfront_speeds(const Nonlinearity& f, double tol = 1e-10);

/// f restricted to [a,b] and rescaled to [0,1]: g(w) = f(a + (b-a)w)/(b-a).
/// Fronts of g have the same speed as the corresponding fronts of f.
Nonlinearity restrict_to(const Nonlinearity& f, double a, double b);

}  // namespace frontlab
