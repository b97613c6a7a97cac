#include <cmath>

#include <doctest.h>

#include "frontlab/errors.hpp"
#include "frontlab/wave_profile.hpp"

using namespace frontlab;

namespace {

// the explicit cubic wave: φ(ξ) = 1/(1+e^{ξ/√2}), c = (1-2θ)/√2
double cubic_wave(double xi) { return 1.0 / (1.0 + std::exp(xi / std::sqrt(2.0))); }
double cubic_speed(double theta) { return (1.0 - 2.0 * theta) / std::sqrt(2.0); }

const ProfileSolution& p03() {
  static const ProfileSolution p = solve_profile(Nonlinearity::cubic(0.3), 1e-10);
  return p;
}

}  // namespace

TEST_CASE("cubic speeds against the explicit wave") {
  CHECK(std::abs(p03().speed() - 0.2828427) <= 1e-6);
  CHECK(std::abs(p03().speed() - cubic_speed(0.3)) <= 1e-8);
  const auto p5 = solve_profile(Nonlinearity::cubic(0.5), 1e-10);
  CHECK(std::abs(p5.speed()) <= 1e-8);
  const auto p7 = solve_profile(Nonlinearity::cubic(0.7), 1e-10);
  CHECK(std::abs(p7.speed() + 0.2828427) <= 1e-6);
}

TEST_CASE("explicit wave satisfies the profile equation") {
  // independent check of the oracle itself, by differences
  const double th = 0.3, c = cubic_speed(th), d = 1e-3;
  for (double xi = -10; xi <= 10; xi += 0.5) {
    const double u = cubic_wave(xi);
    const double u1 = (cubic_wave(xi + d) - cubic_wave(xi - d)) / (2 * d);
    const double u2 = (cubic_wave(xi + d) - 2 * u + cubic_wave(xi - d)) / (d * d);
    CHECK(std::abs(u2 + c * u1 + u * (1 - u) * (u - th)) < 1e-6);
  }
}

TEST_CASE("profile shape, normalisation and tails") {
  const auto& p = p03();
  CHECK(std::abs(p(0.0) - 0.5) <= 1e-8);
  const double far = p(10 * p.window());
  CHECK(far > 0.0);
  CHECK(far < 1e-8);
  CHECK(p(-10 * p.window()) <= 1.0);
  CHECK(p(-p.window() - 1.0) < 1.0);
  CHECK(std::abs(p(std::sqrt(2.0) * std::log(3.0)) - 0.25) <= 2e-4);

  double err = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) err = std::max(err, std::abs(p.phi()[k] - cubic_wave(p.xi(k))));
  CHECK(err <= 1e-5);

  for (std::size_t k = 1; k < p.size(); ++k) REQUIRE(p.phi()[k] < p.phi()[k - 1]);
  const double X = p.window();
  CHECK(1.0 - p(-X) <= std::exp(-p.mu() * X * 0.9));
  CHECK(p(X) <= std::exp(-p.lambda() * X * 0.9));
  for (double xi = -3 * X; xi < 3 * X; xi += 0.37) {
    CHECK(p(xi) > 0.0);
    CHECK(p(xi) <= 1.0);  // 1 - a e^{μξ} rounds to 1 far out
    CHECK(p(xi + 0.37) <= p(xi));
  }
  CHECK(p.inverse(0.25) == doctest::Approx(std::sqrt(2.0) * std::log(3.0)).epsilon(1e-4));
}

TEST_CASE("second-order residual of the sampled profile") {
  const auto& p = p03();
  const auto f = Nonlinearity::cubic(0.3);
  const double d = p.spacing();
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    const double a = p.phi()[k - 1], b = p.phi()[k], e = p.phi()[k + 1];
    worst = std::max(worst, std::abs((a - 2 * b + e) / (d * d) + p.speed() * (e - a) / (2 * d) + f.eval(b)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("decay rates") {
  const auto f = Nonlinearity::cubic(0.3);
  const auto r = decay_rates(f, 0.2828427);
  CHECK(r.lambda == doctest::Approx(0.7071068).epsilon(1e-6));
  CHECK(r.mu == doctest::Approx(0.7071068).epsilon(1e-6));
  const auto q = Nonlinearity::quintic(0.2, 0.8, 8.0);
  const auto r0 = decay_rates(q, 0.0);
  CHECK(r0.lambda == doctest::Approx(std::sqrt(-q.fprime0())));
  CHECK(r0.mu == doctest::Approx(std::sqrt(-q.fprime1())));
}

TEST_CASE("ode flow") {
  const auto f = Nonlinearity::cubic(0.3);
  CHECK(ode_flow(f, 0.3, 17.0) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(std::abs(ode_flow(f, 0.9, 50.0) - 1.0) <= 1e-6);
  CHECK(std::abs(ode_flow(f, 0.1, 50.0)) <= 1e-6);
  const double mid = ode_flow(f, 0.6, 3.0);
  CHECK(mid > 0.6);
  CHECK(mid < 1.0);
}

TEST_CASE("speed is antisymmetric and decreasing in theta") {
  double prev = 1e9;
  for (int k = 1; k <= 9; ++k) {
    const double th = k / 10.0;
    const double c = solve_profile(Nonlinearity::cubic(th), 1e-9).speed();
    CHECK(c < prev);
    prev = c;
    if (k < 5) {
      const double c2 = solve_profile(Nonlinearity::cubic(1 - th), 1e-9).speed();
      CHECK(std::abs(c + c2) <= 2e-9);
    }
  }
}

TEST_CASE("shooting classification brackets the speed") {
  const auto f = Nonlinearity::cubic(0.3);
  CHECK(classify_trial_speed(f, 0.1) == -1);
  CHECK(classify_trial_speed(f, 0.5) == 1);
}

TEST_CASE("non-bistable terms are rejected") {
  CHECK_THROWS_AS(solve_profile(Nonlinearity::quintic(0.2, 0.8, 8.0)), DomainError);
}

TEST_CASE("sub-front ladder") {
  const auto one = subfront_speeds(Nonlinearity::cubic(0.3));
  REQUIRE(one.fronts.size() == 1);
  CHECK(one.fronts[0].speed == doctest::Approx(cubic_speed(0.3)).epsilon(1e-7));

  const auto two = subfront_speeds(Nonlinearity::quintic(0.2, 0.8, 8.0));
  REQUIRE(two.fronts.size() == 2);
  CHECK(two.fronts[0].lower == 0.0);
  CHECK(two.fronts[0].upper == doctest::Approx(0.5));
  CHECK(two.fronts[1].upper == 1.0);

  // f(1-s) = -f(s) when θ1 + θ2 = 1
  const auto sym = subfront_speeds(Nonlinearity::quintic(0.25, 0.75, 5.0));
  REQUIRE(sym.fronts.size() == 2);
  CHECK(std::abs(sym.fronts[0].speed + sym.fronts[1].speed) <= 1e-8);

  const auto terrace = subfront_speeds(Nonlinearity::quintic(0.1, 0.9, 8.0));
  REQUIRE(terrace.fronts.size() == 2);
  CHECK(terrace.fronts[0].speed > terrace.fronts[1].speed);
  CHECK_FALSE(terrace.single_front_possible);
}
