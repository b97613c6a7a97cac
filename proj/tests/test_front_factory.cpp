#include <cmath>
#include <numbers>

#include <doctest.h>

#include "frontlab/errors.hpp"
#include "frontlab/experiments.hpp"
#include "frontlab/front_factory.hpp"

using namespace frontlab;

namespace {

constexpr double kPi3 = std::numbers::pi / 3;

const Nonlinearity& f03() {
  static const Nonlinearity f = Nonlinearity::cubic(0.3);
  return f;
}

const ProfileSolution& p03() {
  static const ProfileSolution p = solve_profile(f03());
  return p;
}

const ConicalFront& cone() { return cached_conical_front(f03(), kPi3, 0.5, 161, 4000.0); }

double slope_of(const std::vector<Point2>& pts) {
  std::vector<double> x, y;
  for (const auto& p : pts) {
    x.push_back(p[0]);
    y.push_back(p[1]);
  }
  return fit_slope(x, y);
}

}  // namespace

TEST_CASE("planar field") {
  const auto g = Grid::plane(41, 41, 0.25, -5, -5);
  const auto u = planar_field(p03(), {0, 1}, 0.0, g);
  for (const auto& q : extract_level_set(u).points) CHECK(std::abs(q[1]) <= 1e-6);
  const auto v = planar_field(p03(), {1, 0}, 0.0, g);
  CHECK((u.values == v.values.transpose()).all());
  CHECK_THROWS_AS(planar_field(p03(), {1, 1}, 0.0, g), DomainError);
}

TEST_CASE("step and ball data") {
  const auto g = Grid::line(201, 0.1, -10.0);
  const auto lo = step_field(0.9, StepVariant::lower, g);
  CHECK(lo(50) == 0.9);   // y = -5
  CHECK(lo(150) == 0.0);  // y = +5
  const auto up = step_field(0.1, StepVariant::upper, g);
  CHECK(up(150) == 0.1);
  CHECK(up(50) == 1.0);
  CHECK_THROWS_AS(step_field(1.0, StepVariant::lower, g), DomainError);

  const auto g2 = Grid::plane(81, 81, 0.5, -20, -20);
  const auto v = ball_field(0.9, 0.0, 10.0, g2);
  CHECK(v(50, 40) == 0.9);  // |x| = 5
  CHECK(v(70, 40) == 0.0);  // |x| = 15
  const auto w = ball_field(0.1, 1.0, 30.0, Grid::plane(161, 161, 0.5, -40, -40));
  CHECK(w(80, 80) == 0.1);
  CHECK_THROWS_AS(ball_field(0.9, 0.0, 0.9, g2), DomainError);
}

TEST_CASE("conical front invariants") {
  const auto& cf = cone();
  CHECK(cf.speed == doctest::Approx(0.32660).epsilon(1e-4));
  CHECK(cf.speed == doctest::Approx(p03().speed() / std::sin(kPi3)).epsilon(1e-12));
  CHECK(cf.last_change < 1e-6);

  const auto& u = cf.field;
  const auto& g = u.grid;
  // even in x1
  CHECK((u.values - u.values.colwise().reverse()).abs().maxCoeff() <= 1e-12);

  // outer band against the planar asymptote
  const Eigen::Index band = g.n1 / 10;
  double far = 0.0;
  for (Eigen::Index j = 0; j < g.n2; ++j)
    for (Eigen::Index i = 0; i < g.n1; ++i) {
      const bool outer = i < band || i >= g.n1 - band || j < band || j >= g.n2 - band;
      if (outer) far = std::max(far, std::abs(u(i, j) - cf.asymptote(g.x1(i), g.x2(j))));
    }
  CHECK(far <= 5e-3);

  // steady in the moving frame
  const double dt = 0.01;
  auto moved = u;
  moved.t = -dt;
  auto later = u;
  later.t = dt;
  const auto r = pde_residual(moved, u, later, f03(), cf.speed);
  double worst = 0.0;
  for (Eigen::Index j = 1; j + 1 < g.n2; ++j)
    for (Eigen::Index i = 1; i + 1 < g.n1; ++i) worst = std::max(worst, std::abs(r(i, j)));
  CHECK(worst <= 1e-3);

  // decreasing in x2 across the front
  for (Eigen::Index j = 1; j + 1 < g.n2; ++j)
    for (Eigen::Index i = 0; i < g.n1; ++i)
      if (std::abs(u(i, j) - 0.5) < 0.4) REQUIRE(u(i, j + 1) < u(i, j));
}

TEST_CASE("conical front edge slope") {
  const auto& cf = cached_conical_front(f03(), kPi3, 0.5, 241, 4000.0);
  CHECK(std::abs(cf.edge_slope() - 1 / std::tan(kPi3)) <= 0.05 / std::tan(kPi3));
}

TEST_CASE("conical fronts approach the planar front as alpha grows") {
  double prev = 1e9;
  for (double a : {1.1, 1.3, 1.5}) {
    const auto& cf = cached_conical_front(f03(), a, 0.5, 81, 4000.0);
    const auto flat = planar_field(p03(), {0, 1}, 0.0, cf.field.grid);
    const double d = sup_distance(cf.field, flat);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("rotated subsolution") {
  {
    const auto& cf = cone();
    const auto g = Grid::plane(121, 121, 0.5, -30, -30);
    const auto v = rotated_v(cf, 0.0, g);
    CHECK(rotated_value(cf, 0.0, 0.0, -200.0) == doctest::Approx(1.0).epsilon(1e-9));
    double rise = -1.0;
    for (Eigen::Index j = 0; j < g.n2; ++j)
      for (Eigen::Index i = 0; i + 1 < g.n1; ++i) rise = std::max(rise, v(i + 1, j) - v(i, j));
    CHECK(rise <= 1e-6);
  }
  // the right arm flattens out
  const auto& cf = cached_conical_front(f03(), kPi3, 0.5, 241, 4000.0);
  const auto v = rotated_v(cf, 0.0, Grid::plane(201, 121, 0.5, -50, -30));
  std::vector<Point2> right;
  for (const auto& q : extract_level_set(v).points)
    if (q[0] > 25) right.push_back(q);
  REQUIRE(right.size() > 10);
  CHECK(std::abs(slope_of(right)) <= 0.05);
}

TEST_CASE("reference interfaces") {
  const double cf = 0.2828;
  const auto at0 = reference_polyline(0.0, kPi3, cf, 10.0);
  int at_origin = 0;
  for (const auto& q : at0) at_origin += q.norm() < 1e-12;
  CHECK(at_origin >= 1);
  CHECK(reference_interfaces(0.0, kPi3, cf).size() > 0);
  CHECK(dist_inf(reference_interfaces(0.0, kPi3, cf), InterfaceSet{0, 0.5, 2, {Point2(0, 0)}, {}}) <= 1e-12);

  // t = -10: corners (∓1.6330, -2.8284), horizontal middle
  const auto neg = reference_polyline(-10.0, kPi3, cf, 20.0);
  int corners = 0;
  for (const auto& q : neg) {
    if ((q - Point2(-1.6330, -2.8284)).norm() < 1e-3) ++corners;
    if ((q - Point2(1.6330, -2.8284)).norm() < 1e-3) ++corners;
  }
  CHECK(corners == 2);

  // t = +10: apex (0, 5.6569), arms of slope √3
  const auto pos = reference_polyline(10.0, kPi3, cf, 20.0);
  bool apex = false;
  for (const auto& q : pos) apex = apex || (q - Point2(0, 5.656)).norm() < 1e-3;
  CHECK(apex);
  for (const auto& q : pos) CHECK(q[1] == doctest::Approx(std::sqrt(3.0) * std::abs(q[0]) + cf * 10 / 0.5).epsilon(1e-9));
  CHECK_THROWS_AS(reference_interfaces(1.0, 0.5, cf), DomainError);
}

TEST_CASE("supersolution assembly") {
  const auto& cf = cone();
  // v̄ = 1 where the correction saturates, and v̄ -> v̲ as t -> -∞
  CHECK(supersolution_value(cf, 1.0, 0.1, -5.0, 0.0, -40.0) == 1.0);
  const double far = std::abs(supersolution_value(cf, 1.0, 0.1, -300.0, -5.0, -85.0) -
                              rotated_value(cf, -300.0, -5.0, -85.0));
  CHECK(far < 1e-6);
  CHECK_THROWS_AS(check_supersolution(cf, f03(), 1.0, 0.1, 5.0, 0.5, 0.05), DomainError);
}

TEST_CASE("non-standard run is even and increasing in time") {
  const auto& cf = cone();
  NonstandardOptions o;
  o.half_width = 20;
  o.height = 50;
  o.h = 0.5;
  const auto run = build_nonstandard(f03(), cf, 40.0, -30.0, o);
  REQUIRE(run.snapshots.size() >= 3);
  CHECK(run.snapshots.front().t == doctest::Approx(-40.0));
  CHECK(run.snapshots.back().t == doctest::Approx(-30.0));
  for (const auto& s : run.snapshots) CHECK((s.values - s.values.colwise().reverse()).abs().maxCoeff() <= 1e-12);
  double worst = 0.0;
  for (std::size_t k = 1; k < run.snapshots.size(); ++k) {
    const auto& a = run.snapshots[k - 1];
    const auto& b = run.snapshots[k];
    const Eigen::Index dj = static_cast<Eigen::Index>(std::llround((b.grid.origin[1] - a.grid.origin[1]) / a.grid.h));
    for (Eigen::Index j = 0; j < b.grid.n2; ++j) {
      const Eigen::Index ja = j + dj;
      if (ja < 0 || ja >= a.grid.n2) continue;
      for (Eigen::Index i = 0; i < b.grid.n1; ++i) worst = std::min(worst, b(i, j) - a(i, ja));
    }
  }
  CHECK(worst >= -1e-10);
  CHECK(run.refs.size() == run.snapshots.size());
  CHECK_THROWS_AS(build_nonstandard(f03(), cf, 40.0, 0.0, [] {
                    NonstandardOptions b;
                    b.recenter_every = 3.0;
                    return b;
                  }()),
                  DomainError);
}
