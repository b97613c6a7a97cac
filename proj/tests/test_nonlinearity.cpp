#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "frontlab/errors.hpp"
#include "frontlab/nonlinearity.hpp"

using namespace frontlab;

namespace {

// ascending coefficients of prod (s - r_k), multiplied out by hand
std::vector<double> expand(const std::vector<double>& roots, double lead) {
  std::vector<double> c{lead};
  for (double r : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = next;
  }
  return c;
}

double poly_at(const std::vector<double>& c, double s) {
  double acc = 0.0, p = 1.0;
  for (double a : c) {
    acc += a * p;
    p *= s;
  }
  return acc;
}

}  // namespace

TEST_CASE("cubic: values, integral and endpoint slopes") {
  const auto f = Nonlinearity::cubic(0.3);
  CHECK(f.eval(0.5) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(f.eval(0.0) == 0.0);
  CHECK(f.eval(1.0) == 0.0);
  CHECK(f.eval(0.3) == 0.0);
  // ∫ s(1-s)(s-θ) = 1/12 - θ/6
  CHECK(f.integral01() == doctest::Approx(0.4 / 12).epsilon(1e-12));
  CHECK(integrate([&](double s) { return f.eval(s); }, 0, 1) == doctest::Approx(0.4 / 12).epsilon(1e-12));
  CHECK(f.fprime0() == doctest::Approx(-0.3));
  CHECK(f.fprime1() == doctest::Approx(-0.7));
  CHECK(std::abs(Nonlinearity::cubic(0.5).integral01()) < 1e-15);

  const auto z = f.zeros();
  REQUIRE(z.size() == 3);
  CHECK(z[0] == 0.0);
  CHECK(z[1] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(z[2] == 1.0);
  CHECK(f.theta_minus() == doctest::Approx(0.3));
  CHECK(f.theta_plus() == doctest::Approx(0.3));
  for (double s = 0.01; s < 0.3; s += 0.01) CHECK(f.eval(s) < 0);
  for (double s = 0.31; s < 1.0; s += 0.01) CHECK(f.eval(s) > 0);
}

TEST_CASE("cubic rejects theta outside (0,1)") {
  CHECK_THROWS_AS(Nonlinearity::cubic(0.0), DomainError);
  CHECK_THROWS_AS(Nonlinearity::cubic(1.2), DomainError);
  CHECK_THROWS_AS(Nonlinearity::cubic(-0.1), DomainError);
}

TEST_CASE("quintic: value against a brute-force expansion") {
  const auto f = Nonlinearity::quintic(0.2, 0.8, 8.0);
  const auto c = expand({0.0, 0.2, 0.5, 0.8, 1.0}, -8.0);
  CHECK(poly_at(c, 0.1) == doctest::Approx(-0.02016).epsilon(1e-12));
  CHECK(f.eval(0.1) == doctest::Approx(-0.02016).epsilon(1e-12));
  for (double s = 0; s <= 1.0; s += 0.05) CHECK(f.eval(s) == doctest::Approx(poly_at(c, s)).epsilon(1e-12));
  CHECK(f.eval(0.5) == 0.0);
  CHECK(f.theta_minus() == doctest::Approx(0.2));
  CHECK(f.theta_plus() == doctest::Approx(0.8));
  CHECK(f.fprime0() == doctest::Approx(-8.0 * 0.2 * 0.5 * 0.8));
  CHECK_THROWS_AS(Nonlinearity::quintic(0.6, 0.8, 8.0), DomainError);
  CHECK_THROWS_AS(Nonlinearity::quintic(0.2, 0.4, 8.0), DomainError);
  CHECK_THROWS_AS(Nonlinearity::quintic(0.2, 0.8, 0.0), DomainError);
}

TEST_CASE("analyze flags") {
  const auto rc = analyze(Nonlinearity::cubic(0.3));
  CHECK(rc.is_bistable);
  CHECK(rc.is_hypothesis_f);

  const auto rq = analyze(Nonlinearity::quintic(0.2, 0.8, 8.0));
  CHECK_FALSE(rq.is_bistable);
  CHECK(rq.is_hypothesis_f);
  CHECK(rq.zeros.size() == 5);

  const auto mono = Nonlinearity::custom([](double s) { return s * (1 - s); });
  const auto rm = analyze(mono);
  CHECK_FALSE(rm.is_hypothesis_f);
  CHECK(rm.fprime0 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("derivative matches a centered difference") {
  for (const auto& f : {Nonlinearity::cubic(0.3), Nonlinearity::quintic(0.2, 0.8, 8.0)}) {
    const double d = 1e-5;
    for (int k = 0; k <= 100; ++k) {
      const double s = k / 100.0;
      const double fd = (f.eval(s + d) - f.eval(s - d)) / (2 * d);
      CHECK(std::abs(f.deriv(s) - fd) <= 1e-6);
    }
  }
}

TEST_CASE("sign of the integral follows 1 - 2 theta") {
  for (int k = 1; k <= 9; ++k) {
    const double th = k / 10.0;
    const double I = Nonlinearity::cubic(th).integral01();
    if (k == 5) CHECK(std::abs(I) < 1e-15);
    else CHECK((I > 0) == (1 - 2 * th > 0));
  }
}

TEST_CASE("analyze recovers theta for random cubics") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.02, 0.98);
  for (int k = 0; k < 50; ++k) {
    const double th = U(rng);
    const auto r = analyze(Nonlinearity::cubic(th));
    REQUIRE(r.zeros.size() == 3);
    CHECK(std::abs(r.theta_minus - th) <= 1e-10);
    CHECK(std::abs(r.zeros[1] - th) <= 1e-10);
  }
}

TEST_CASE("quintic sign pattern at interval midpoints") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lo(0.02, 0.48), hi(0.52, 0.98), kk(0.5, 20.0);
  for (int k = 0; k < 50; ++k) {
    const double a = lo(rng), b = hi(rng);
    const auto f = Nonlinearity::quintic(a, b, kk(rng));
    CHECK(f.eval(a / 2) < 0);
    CHECK(f.eval((a + 0.5) / 2) > 0);
    CHECK(f.eval((0.5 + b) / 2) < 0);
    CHECK(f.eval((b + 1) / 2) > 0);
  }
}

TEST_CASE("parse and spec_string round trip") {
  const auto f = Nonlinearity::parse("quintic(0.2, 0.8, 8.0)");
  CHECK(f.kind() == Nonlinearity::Kind::quintic);
  const auto g = Nonlinearity::parse(f.spec_string());
  CHECK(g.params() == f.params());
  CHECK(Nonlinearity::parse(" cubic( 0.3 ) ").eval(0.5) == doctest::Approx(0.05));
  CHECK_THROWS(Nonlinearity::parse("cubic(0.3"));
  CHECK_THROWS(Nonlinearity::parse("sine(1)"));
  CHECK_THROWS_AS(Nonlinearity::parse("cubic(1.5)"), DomainError);
}

TEST_CASE("clamped call preserves equilibria") {
  const auto f = Nonlinearity::cubic(0.3);
  CHECK(f(-1e-3) == 0.0);
  CHECK(f(1.0 + 1e-3) == 0.0);
}
