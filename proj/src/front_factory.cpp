#include "frontlab/front_factory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "frontlab/errors.hpp"

namespace frontlab {

using Eigen::Index;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// x2 of the topmost 1/2-crossing in column i, NaN if none.
double column_crossing(const ScalarField& u, Index i) {
  const Grid& g = u.grid;
  for (Index j = g.n2 - 1; j > 0; --j) {
    const double a = u.values(i, j - 1), b = u.values(i, j);
    if (a >= 0.5 && b < 0.5) return g.x2(j - 1) + g.h * (a - 0.5) / (a - b);
  }
  return kNaN;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

ScalarField planar_field(const ProfileSolution& p, const Point2& e, double xi, const Grid& g) {
  if (std::abs(e.norm() - 1.0) > 1e-12) throw DomainError("planar_field: direction must be a unit vector");
  if (g.dim == 1) return ScalarField::sample(g, 0.0, [&](double x, double) { return p(e[0] * x + xi); });
  return ScalarField::sample(g, 0.0, [&](double x1, double x2) { return p(e[0] * x1 + e[1] * x2 + xi); });
}

ScalarField step_field(double theta, StepVariant variant, const Grid& g) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("step_field: level must lie in (0,1)");
  const long i0 = std::lround(-g.origin[0] / g.h);
  const double left = variant == StepVariant::lower ? theta : 1.0;
  const double right = variant == StepVariant::lower ? 0.0 : theta;
  ScalarField u(g);
  for (Index j = 0; j < g.n2; ++j)
    for (Index i = 0; i < g.n1; ++i) u.values(i, j) = i <= i0 ? left : right;
  return u;
}

ScalarField ball_field(double inside, double outside, double R, const Grid& g) {
  if (!(R > 2.0 * g.h)) throw DomainError("ball_field: R must exceed two grid spacings");
  return ScalarField::sample(g, 0.0, [&](double x1, double x2) {
    const double r2 = x1 * x1 + (g.dim == 2 ? x2 * x2 : 0.0);
    return r2 < R * R ? inside : outside;
  });
}

double ConicalFront::asymptote(double x1, double x2) const {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  return std::max(planar(x1 * ca + x2 * sa), planar(-x1 * ca + x2 * sa));
}

double ConicalFront::operator()(double x1, double x2) const {
  const double v = sample_cubic(field, x1, x2, kNaN);
  return std::isnan(v) ? asymptote(x1, x2) : v;
}

double ConicalFront::edge_slope() const {
  std::vector<Point2> right;
  for (const auto& p : psi)
    if (p[0] > 0.0) right.push_back(p);
  if (right.size() < 4) throw NumericalError("edge_slope: too few level-set columns");
  const double x_far = right.back()[0];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : right) {
    if (p[0] < 0.75 * x_far || p[0] > 0.95 * x_far) continue;
    sx += p[0];
    sy += p[1];
    sxx += p[0] * p[0];
    sxy += p[0] * p[1];
    ++n;
  }
  if (n < 2) throw NumericalError("edge_slope: too few level-set columns");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Grid conical_grid(Index n, double h) {
  const double span = h * static_cast<double>(n - 1);
  return Grid::plane(n, n, h, -0.5 * span, -std::round(span / 3.0 / h) * h);
}

ConicalFront conical_front(const Nonlinearity& f, const ProfileSolution& p, double alpha, const Grid& g,
                           double relax_time, const ConicalOptions& opt) {
  if (!(alpha > 0.0 && alpha < std::numbers::pi / 2))
    throw DomainError("conical_front: alpha must lie in (0, pi/2)");
  if (!(p.speed() > 0.0)) throw DomainError("conical_front: needs c_f > 0");
  if (g.dim != 2) throw DomainError("conical_front: needs a 2D grid");
  ConicalFront cf;
  cf.alpha = alpha;
  cf.speed = p.speed() / std::sin(alpha);
  cf.planar = p;
  ScalarField u = ScalarField::sample(g, 0.0, [&](double x1, double x2) { return cf.asymptote(x1, x2); });

  EvolveOptions o;
  o.drift = cf.speed;
  o.drift_scheme = DriftScheme::central;
  o.dt = opt.dt > 0.0 ? opt.dt : cfl_limit(g, f, cf.speed);
  o.threads = opt.threads;
  const BoundaryPolicy bc = BoundaryPolicy::all(EdgePolicy::profile());
  double change = std::numeric_limits<double>::infinity();
  while (u.t < relax_time) {
    o.t_end = u.t + 1.0;
    ScalarField next;
    evolve_observe(u, f, bc, o, [&](const ScalarField& s) { next = s; });
    change = sup_distance(u, next);
    u = std::move(next);
    if (change < opt.tol) break;
  }
  cf.relaxed_for = u.t;
  cf.last_change = change;
  if (!(change < opt.tol)) {
    std::ostringstream os;
    os << "conical front did not relax within t = " << relax_time << " (last change " << change << ")";
    throw NumericalError(os.str());
  }
  u.t = 0.0;
  cf.field = std::move(u);
  for (Index i = 0; i < g.n1; ++i) {
    const double x2 = column_crossing(cf.field, i);
    if (!std::isnan(x2)) cf.psi.emplace_back(g.x1(i), x2);
  }
  return cf;
}

double rotated_value(const ConicalFront& cf, double t, double x1, double x2) {
  const double sa = std::sin(cf.alpha), ca = std::cos(cf.alpha);
  return cf(x1 * sa - x2 * ca, x1 * ca + x2 * sa - cf.speed * t);
}

ScalarField rotated_v(const ConicalFront& cf, double t, const Grid& g) {
  return ScalarField::sample(g, t, [&](double x1, double x2) { return rotated_value(cf, t, x1, x2); });
}

double planar_envelope(const ProfileSolution& p, double alpha, double t, double x1, double x2) {
  const double cft = p.speed() * t;
  return std::max(p(-std::abs(x1) * std::sin(2 * alpha) - x2 * std::cos(2 * alpha) - cft), p(x2 - cft));
}

Polyline reference_polyline(double t, double alpha, double cf, double extent) {
  const double c = cf / std::sin(alpha);
  const double c2 = std::abs(std::cos(2 * alpha)), s2 = std::sin(2 * alpha);
  if (t <= 0.0) {
    const Point2 pl(c * t * std::cos(alpha), cf * t), pr(-c * t * std::cos(alpha), cf * t);
    Polyline line{pl + extent * Point2(-c2, s2), pl};
    if (pr != pl) line.push_back(pr);
    line.push_back(pr + extent * Point2(c2, s2));
    return line;
  }
  const Point2 apex(0.0, cf * t / c2);
  return {apex + extent * Point2(-c2, s2), apex, apex + extent * Point2(c2, s2)};
}

InterfaceSet reference_interfaces(double t, double alpha, double cf, double extent, double spacing) {
  if (!(alpha > std::numbers::pi / 4 && alpha < std::numbers::pi / 2))
    throw DomainError("reference_interfaces: alpha must lie in (pi/4, pi/2)");
  if (!(cf > 0.0)) throw DomainError("reference_interfaces: needs c_f > 0");
  if (!(spacing > 0.0)) throw DomainError("reference_interfaces: spacing must be positive");
  const Polyline line = reference_polyline(t, alpha, cf, extent);
  InterfaceSet out;
  out.t = t;
  out.dim = 2;
  out.points.push_back(line.front());
  for (std::size_t k = 0; k + 1 < line.size(); ++k) {
    const Point2 a = line[k], b = line[k + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / spacing)));
    for (int q = 1; q <= pieces; ++q) {
      out.points.push_back(a + (b - a) * (static_cast<double>(q) / pieces));
      const int id = static_cast<int>(out.points.size()) - 1;
      out.segments.push_back({id - 1, id});
    }
  }
  return out;
}

double supersolution_value(const ConicalFront& cf, double sigma, double delta, double t, double x1, double x2) {
  const double shifted = t + sigma * std::exp(delta * t);
  return std::min(rotated_value(cf, shifted, x1, x2) + delta * std::exp(delta * (x1 + t)), 1.0);
}

SupersolutionReport check_supersolution(const ConicalFront& cf, const Nonlinearity& f, double sigma, double delta,
                                        double T, double h, double dt, const SupersolutionWindow& w) {
  if (!(sigma > 0.0 && delta > 0.0)) throw DomainError("check_supersolution: sigma and delta must be positive");
  if (!(T < 0.0)) throw DomainError("check_supersolution: T must be negative");
  if (!(h > 0.0 && dt > 0.0)) throw DomainError("check_supersolution: h and dt must be positive");
  SupersolutionReport rep;
  rep.sigma = sigma;
  rep.delta = delta;
  rep.T = T;
  rep.h = h;
  rep.dt = dt;
  rep.tol = 10.0 * (h * h + dt);
  rep.min_interior = std::numeric_limits<double>::infinity();
  rep.min_boundary = std::numeric_limits<double>::infinity();
  const double cfs = cf.planar.speed();
  const Index n1 = static_cast<Index>(std::llround(-w.x1_min / h)) + 1;
  const Index n2 = static_cast<Index>(std::llround((w.below + w.above) / h)) + 1;
  const double x1_min = -h * static_cast<double>(n1 - 1);
  const double inv_h2 = 1.0 / (h * h);

  const long levels = std::max(0L, static_cast<long>(std::floor((T - w.t_start) / w.sample_every + 1e-9)));
  for (long k = 0; k <= levels; ++k) {
    const double t = std::min(w.t_start + static_cast<double>(k) * w.sample_every, T);
    const Grid g = Grid::plane(n1, n2, h, x1_min, cfs * t - w.below);
    auto vbar = [&](double tt) {
      return ScalarField::sample(g, tt, [&](double x1, double x2) {
        return supersolution_value(cf, sigma, delta, tt, x1, x2);
      });
    };
    const ScalarField vm = vbar(t - dt), v = vbar(t), vp = vbar(t + dt);
    for (Index j = 1; j + 1 < n2; ++j) {
      for (Index i = 1; i + 1 < n1; ++i) {
        const double c = v.values(i, j);
        if (!(c < 1.0)) continue;
        const double lap =
            ((v.values(i - 1, j) + v.values(i + 1, j)) + (v.values(i, j - 1) + v.values(i, j + 1)) - 4.0 * c) *
            inv_h2;
        const double N = (vp.values(i, j) - vm.values(i, j)) / (2.0 * dt) - lap - f.eval(c);
        if (N < rep.min_interior) {
          rep.min_interior = N;
          rep.argmin_interior = Point2(g.x1(i), g.x2(j));
          rep.t_interior = t;
        }
      }
      const Index b = n1 - 1;
      if (v.values(b, j) < 1.0) {
        const double d = (3.0 * v.values(b, j) - 4.0 * v.values(b - 1, j) + v.values(b - 2, j)) / (2.0 * h);
        if (d < rep.min_boundary) {
          rep.min_boundary = d;
          rep.argmin_boundary = Point2(g.x1(b), g.x2(j));
          rep.t_boundary = t;
        }
      }
    }
  }
  rep.pass = rep.min_interior >= -rep.tol && rep.min_boundary >= -rep.tol;
  return rep;
}

NonstandardRun build_nonstandard(const Nonlinearity& f, const ConicalFront& cf, double n_start, double t_end,
                                 const NonstandardOptions& opt) {
  const double alpha = cf.alpha;
  if (!(alpha > std::numbers::pi / 4 && alpha < std::numbers::pi / 2))
    throw DomainError("build_nonstandard: alpha must lie in (pi/4, pi/2), got " + std::to_string(alpha));
  const ProfileSolution& p = cf.planar;
  const double cfs = p.speed();
  if (!(cfs > 0.0)) throw DomainError("build_nonstandard: needs c_f > 0");
  if (!(n_start > 0.0 && t_end > -n_start)) throw DomainError("build_nonstandard: need n > 0 and t_end > -n");
  // the kink P^l_{-n} must sit well inside the left half-plane
  const double kink = n_start * cf.speed * std::cos(alpha);
  if (kink < 5.0)
    throw DomainError("build_nonstandard: n too small, the kink of the initial datum is only " +
                      std::to_string(kink) + " units from x1 = 0 (need 5)");
  const double rel = opt.recenter_every / opt.snapshot_every;
  if (std::abs(rel - std::round(rel)) > 1e-9)
    throw DomainError("build_nonstandard: recenter_every must be a multiple of snapshot_every");

  const double h = opt.h;
  const Index n1 = 2 * static_cast<Index>(std::llround(opt.half_width / h)) + 1;
  const Index n2 = static_cast<Index>(std::llround(opt.height / h)) + 1;
  const double x1_min = -h * static_cast<double>(n1 - 1) / 2.0;
  const double extent = 4.0 * std::max(opt.half_width, opt.height);
  const double t0 = -n_start;

  // initial window: centred on the reference set restricted to |x1| <= W
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  {
    const InterfaceSet ref = reference_interfaces(t0, alpha, cfs, extent, h);
    for (const auto& q : ref.points)
      if (std::abs(q[0]) <= opt.half_width) {
        lo = std::min(lo, q[1]);
        hi = std::max(hi, q[1]);
      }
  }
  double origin2 = std::round((0.5 * (lo + hi) - 0.5 * opt.height) / h) * h;
  Grid g = Grid::plane(n1, n2, h, x1_min, origin2);
  ScalarField u = ScalarField::sample(g, t0, [&](double x1, double x2) {
    return rotated_value(cf, t0, -std::abs(x1), x2);
  });

  // both pieces are subsolutions increasing in t, so the edges never pull u down
  auto trace = [&cf, &p, alpha](double t, double x1, double x2) {
    return std::max(planar_envelope(p, alpha, t, x1, x2), rotated_value(cf, t, -std::abs(x1), x2));
  };
  // the bottom row sits in the u ~ 1 region, where the envelope is a poor
  // trace; it is frozen at its own values instead, segment by segment
  BoundaryPolicy bc = BoundaryPolicy::all(EdgePolicy::profile(trace));
  bc.set(Edge::bottom, EdgePolicy::profile());
  EvolveOptions o;
  o.dt = opt.dt > 0.0 ? opt.dt : cfl_limit(g, f);
  o.snapshot_every = opt.snapshot_every;
  o.threads = opt.threads;

  NonstandardRun run;
  run.alpha = alpha;
  run.n_start = n_start;
  run.cf = cfs;
  double shift = 0.0;
  auto record = [&](const ScalarField& s) {
    run.snapshots.push_back(s);
    run.shifts.push_back(shift);
    run.refs.push_back({s.t, {reference_polyline(s.t, alpha, cfs, extent)}});
  };

  bool first = true;
  while (u.t < t_end - 1e-9) {
    o.t_end = std::min(u.t + opt.recenter_every, t_end);
    ScalarField last;
    evolve_observe(u, f, bc, o, [&](const ScalarField& s) {
      if (!first && s.t == u.t) return;
      first = false;
      record(s);
      last = s;
    });
    u = std::move(last);

    // overflow check and recentring on the median of the 1/2-level set
    const InterfaceSet level = extract_level_set(u, 0.5);
    if (level.empty()) throw NumericalError("build_nonstandard: the 1/2-level set left the window");
    std::vector<double> heights;
    heights.reserve(level.size());
    const double margin = 10.0 * h;
    for (const auto& q : level.points) {
      if (q[1] < u.grid.origin[1] + margin || q[1] > u.grid.x2_max() - margin) {
        std::ostringstream os;
        os << "build_nonstandard: window overflow at t = " << u.t << ", interface point (" << q[0] << ", " << q[1]
           << ") within 10 cells of a horizontal edge";
        throw NumericalError(os.str());
      }
      heights.push_back(q[1]);
    }
    const double centre = u.grid.origin[1] + 0.5 * opt.height;
    const long rows = std::lround((median(heights) - centre) / h);
    if (rows != 0 && u.t < t_end - 1e-9) {
      Grid moved = u.grid;
      moved.origin[1] += static_cast<double>(rows) * h;
      ScalarField next(moved, u.t);
      for (Index j = 0; j < n2; ++j) {
        const Index src = j + rows;
        for (Index i = 0; i < n1; ++i)
          next.values(i, j) = (src >= 0 && src < n2) ? u.values(i, src) : trace(u.t, moved.x1(i), moved.x2(j));
      }
      u = std::move(next);
      shift += static_cast<double>(rows) * h;
    }
  }
  return run;
}

}  // namespace frontlab
