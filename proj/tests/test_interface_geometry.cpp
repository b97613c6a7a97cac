#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "frontlab/errors.hpp"
#include "frontlab/interface_geometry.hpp"
#include "frontlab/wave_profile.hpp"

using namespace frontlab;

namespace {

InterfaceSet points(std::initializer_list<Point2> pts, double t = 0.0) {
  InterfaceSet s;
  s.t = t;
  s.points.assign(pts.begin(), pts.end());
  return s;
}

// horizontal line x2 = y sampled on [-L, L]
InterfaceSet line_set(double y, double L, double step, double t = 0.0) {
  InterfaceSet s;
  s.t = t;
  for (double x = -L; x <= L + 1e-12; x += step) s.points.emplace_back(x, y);
  return s;
}

double brute_inf(const InterfaceSet& a, const InterfaceSet& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a.points)
    for (const auto& q : b.points) best = std::min(best, (p - q).norm());
  return best;
}

double brute_sup(const InterfaceSet& a, const InterfaceSet& b) {
  double worst = 0.0;
  for (const auto& p : a.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b.points) best = std::min(best, (p - q).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

InterfaceSet random_set(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-20, 20);
  std::uniform_int_distribution<int> N(1, 40);
  InterfaceSet s;
  const int n = N(rng);
  for (int k = 0; k < n; ++k) s.points.emplace_back(U(rng), U(rng));
  return s;
}

}  // namespace

TEST_CASE("1D level set of a shifted profile") {
  const auto p = solve_profile(Nonlinearity::cubic(0.3));
  const double h = 0.05;
  const auto g = Grid::line(801, h, -20.0);
  const auto u = ScalarField::sample(g, 0.0, [&](double x, double) { return p(x - 2.0); });
  const auto s = extract_level_set(u, 0.5);
  REQUIRE(s.size() == 1);
  CHECK(std::abs(s.points[0][0] - 2.0) <= h * h);
}

TEST_CASE("2D level set of a linear field is exact") {
  const auto g = Grid::plane(41, 37, 0.25, -5.0, -4.3);
  const auto u = ScalarField::sample(g, 0.0, [](double, double x2) { return 0.5 - 0.1 * x2; });
  const auto s = extract_level_set(u, 0.5);
  REQUIRE_FALSE(s.empty());
  for (const auto& q : s.points) CHECK(std::abs(q[1]) <= 1e-12);
  CHECK(s.size() == 41);
}

TEST_CASE("three-interface step data") {
  const auto g = Grid::line(101, 0.1, -5.0);
  const auto u = ScalarField::sample(g, 0.0, [](double x, double) {
    return (x < -2.02 || (x > 0.53 && x < 3.07)) ? 0.9 : 0.1;
  });
  const auto s = extract_level_set(u, 0.5);
  REQUIRE(s.size() == 3);
  CHECK(s.points[0][0] == doctest::Approx(-2.05));
  CHECK(s.points[1][0] == doctest::Approx(0.55));
  CHECK(s.points[2][0] == doctest::Approx(3.05));
  CHECK(extract_level_set(ScalarField(g, 0.0, 0.2), 0.5).empty());
  CHECK_THROWS_AS(extract_level_set(u, 1.0), DomainError);
}

TEST_CASE("distance examples") {
  CHECK(dist_inf(points({{0, 0}}), points({{3, 4}})) == doctest::Approx(5.0));
  const auto A = points({{0, 0}, {10, 0}}), B = points({{0, 1}});
  CHECK(dist_inf(A, A) == 0.0);
  CHECK(dist_inf(A, B) == doctest::Approx(1.0));
  CHECK(dist_tilde(A, B) == doctest::Approx(1.0));
  CHECK(dist_hausdorff(A, B) == doctest::Approx(std::sqrt(101.0)));
  CHECK(dist_tilde(A, A) == 0.0);
  CHECK(dist_hausdorff(A, A) == 0.0);
  CHECK_THROWS_AS(dist_inf(A, InterfaceSet{}), DomainError);

  const double h = 0.1;
  const auto L0 = line_set(0.0, 10, h), L2 = line_set(2.0, 10, h);
  for (auto k : {DistanceKind::inf, DistanceKind::tilde, DistanceKind::hausdorff})
    CHECK(std::abs(distance(L0, L2, k) - 2.0) <= h);
  CHECK(parse_distance_kind("tilde") == DistanceKind::tilde);
  CHECK_THROWS_AS(parse_distance_kind("l2"), DomainError);
}

TEST_CASE("distance chain and brute force on random sets") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto a = random_set(rng), b = random_set(rng);
    const double d = dist_inf(a, b), dt = dist_tilde(a, b), dh = dist_hausdorff(a, b);
    CHECK(d <= dt);
    CHECK(dt <= dh);
    CHECK(d == dist_inf(b, a));
    CHECK(dt == dist_tilde(b, a));
    CHECK(dh == dist_hausdorff(b, a));
    if (k < 50) {
      CHECK(d == brute_inf(a, b));
      CHECK(dh == std::max(brute_sup(a, b), brute_sup(b, a)));
      CHECK(dt == std::min(brute_sup(a, b), brute_sup(b, a)));
    }
  }
}

TEST_CASE("mean speed of synthetic motion") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> S(0.05, 2.0), A(0.0, 2 * M_PI);
  for (int k = 0; k < 20; ++k) {
    const double v = S(rng), ang = A(rng);
    const Point2 e(std::cos(ang), std::sin(ang)), tang(-e[1], e[0]);
    std::vector<InterfaceSet> seq;
    for (int n = 0; n <= 30; ++n) {
      InterfaceSet s;
      s.t = n;
      // long straight segment moving along its normal
      for (int m = -200; m <= 200; ++m) s.points.push_back(0.5 * m * tang + v * n * e);
      seq.push_back(s);
    }
    for (auto kind : {DistanceKind::inf, DistanceKind::tilde}) {
      const auto est = mean_speed(seq, kind);
      CHECK(std::abs(est.gamma_hat - v) <= 1e-12 * std::max(1.0, v));
      CHECK(est.fit_residual <= 1e-12);
    }
  }

  std::vector<InterfaceSet> still;
  for (int n = 0; n < 8; ++n) still.push_back(line_set(1.0, 5, 0.5, 2.0 * n));
  CHECK(mean_speed(still, DistanceKind::hausdorff).gamma_hat == doctest::Approx(0.0));

  std::vector<InterfaceSet> planar;
  for (int n = 0; n <= 20; ++n) planar.push_back(line_set(0.2828 * n, 10, 0.1, n));
  CHECK(mean_speed(planar, DistanceKind::inf).gamma_hat == doctest::Approx(0.2828).epsilon(1e-12));
  CHECK_THROWS_AS(mean_speed({still.begin(), still.begin() + 4}, DistanceKind::inf), DomainError);
  CHECK_THROWS_AS(mean_speed({planar.begin(), planar.begin() + 6}, DistanceKind::inf), DomainError);
}

TEST_CASE("planarity") {
  InterfaceSet s;
  for (double x = -5; x <= 5; x += 0.5) s.points.emplace_back(x, 0.3 * x + 1.0);
  CHECK(planarity(s).residual < 1e-10);

  // V with half-angle α to the vertical, arms over |x1| <= W
  const double alpha = M_PI / 3, W = 10.0;
  InterfaceSet v;
  for (double x = -W; x <= W + 1e-9; x += 0.05) v.points.emplace_back(x, std::abs(x) / std::tan(alpha));
  CHECK(planarity(v).residual >= W / std::tan(alpha) / 4);

  InterfaceSet one;
  one.dim = 1;
  one.points.emplace_back(3.5, 0.0);
  const auto p1 = planarity(one);
  CHECK(std::abs(p1.e[0]) == 1.0);
  CHECK(p1.xi * p1.e[0] == doctest::Approx(3.5));
  CHECK(p1.residual == 0.0);

  // orientation: u > 1/2 below the line x2 = 0
  const auto g = Grid::plane(21, 21, 0.5, -5, -5);
  const auto u = ScalarField::sample(g, 0.0, [](double, double x2) { return 0.5 - 0.05 * x2; });
  const auto pl = planarity(extract_level_set(u), &u);
  CHECK(pl.e[1] == doctest::Approx(1.0));
}

TEST_CASE("polyline pieces") {
  InterfaceSet s;
  // flat middle with two oblique arms
  std::vector<Point2> pts;
  for (double x = -20; x < -5; x += 0.25) pts.emplace_back(x, -(x + 5) * 1.7);
  for (double x = -5; x < 5; x += 0.25) pts.emplace_back(x, 0.0);
  for (double x = 5; x <= 20; x += 0.25) pts.emplace_back(x, (x - 5) * 1.7);
  s.points = pts;
  for (int k = 0; k + 1 < static_cast<int>(pts.size()); ++k) s.segments.push_back({k, k + 1});
  CHECK(count_pieces(s, 0.5) == 3);
  const auto lines = chain_polylines(s);
  REQUIRE(lines.size() == 1);
  CHECK(simplify_polyline(lines[0], 0.5).size() == 4);
}

TEST_CASE("transition table for a planar front") {
  const auto p = solve_profile(Nonlinearity::cubic(0.3));
  const auto g = Grid::plane(21, 241, 0.25, -2.5, -30.0);
  std::vector<ScalarField> hist;
  std::vector<ReferenceInterface> refs;
  for (int n = 0; n < 3; ++n) {
    const double y = 0.5 * n;
    hist.push_back(ScalarField::sample(g, n, [&](double, double x2) { return p(x2 - y); }));
    refs.push_back({static_cast<double>(n), {Polyline{Point2(-10, y), Point2(10, y)}}});
  }
  const auto tab = verify_transition(hist, refs, {0.05, 0.5});
  const double expect = std::max(p.inverse(0.05), -p.inverse(0.95));
  CHECK(std::abs(tab.M[0] - expect) <= g.h);
  CHECK(tab.M[1] == doctest::Approx(0.0).epsilon(1e-12));
}
