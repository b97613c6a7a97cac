#include "frontlab/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "frontlab/errors.hpp"

#ifndef FRONTLAB_VERSION
#define FRONTLAB_VERSION "0.0.0"
#endif

namespace frontlab {

namespace fs = std::filesystem;
using Eigen::Index;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

std::string fmt(double x, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

// --- presets ---------------------------------------------------------------

struct Preset {
  std::string f;
  std::map<std::string, ConfigValue> smoke, full;
};

const std::map<std::string, Preset>& presets() {
  using V = std::vector<double>;
  static const std::map<std::string, Preset> p = {
      {"exp_profile", {"cubic(0.3)", {{"tol", 1e-10}}, {{"tol", 1e-12}}}},
      {"exp_front_speed",
       {"cubic(0.3)",
        {{"h", 0.1}, {"t_begin", 10.0}, {"t_end", 50.0}, {"half_width", 40.0}, {"snapshot_every", 0.5}},
        {{"h", 0.05}, {"t_begin", 10.0}, {"t_end", 50.0}, {"half_width", 40.0}, {"snapshot_every", 0.5}}}},
      {"exp_fife_mcleod",
       {"cubic(0.3)",
        {{"h", 0.1}, {"theta_step", 0.9}, {"x_min", -40.0}, {"x_max", 60.0}, {"t_end", 60.0}, {"t_monotone", 10.0},
         {"tol", 0.02}, {"snapshot_every", 1.0}},
        {{"h", 0.05}, {"theta_step", 0.9}, {"x_min", -40.0}, {"x_max", 60.0}, {"t_end", 60.0}, {"t_monotone", 10.0},
         {"tol", 0.02}, {"snapshot_every", 1.0}}}},
      {"exp_spreading",
       {"cubic(0.3)",
        {{"h", 0.5}, {"R", 12.0}, {"level", 0.9}, {"eps", 0.08}, {"half_width", 80.0}, {"t_end", 150.0},
         {"snapshot_every", 1.0}},
        {{"h", 0.25}, {"R", 12.0}, {"level", 0.9}, {"eps", 0.08}, {"half_width", 80.0}, {"t_end", 150.0},
         {"snapshot_every", 1.0}}}},
      {"exp_spreading_upper",
       {"cubic(0.3)",
        {{"h", 0.5}, {"R", 60.0}, {"level", 0.1}, {"eps", 0.08}, {"half_width", 80.0}, {"snapshot_every", 1.0}},
        {{"h", 0.25}, {"R", 60.0}, {"level", 0.1}, {"eps", 0.08}, {"half_width", 80.0}, {"snapshot_every", 1.0}}}},
      {"exp_mean_speed",
       {"cubic(0.3)",
        {{"alpha", kPi / 3}, {"n", 384.0}, {"h", 0.5}, {"relax_time", 4000.0},
         {"clip_L", 88.0}, {"t_end", 300.0}, {"snapshot_every", 6.0}, {"kind", std::string("all")}},
        {{"alpha", kPi / 3}, {"n", 768.0}, {"h", 0.5}, {"relax_time", 4000.0},
         {"clip_L", 170.0}, {"t_end", 600.0}, {"snapshot_every", 10.0}, {"kind", std::string("all")}}}},
      {"exp_nonstandard",
       {"cubic(0.3)",
        {{"alpha", kPi / 3}, {"n", 60.0}, {"t_end", 120.0}, {"h", 0.5}, {"half_width", 40.0}, {"height", 100.0},
         {"snapshot_every", 2.5}, {"recenter_every", 5.0}, {"cone_n", 241.0}, {"cone_h", 0.5},
         {"tilde_n", 241.0}, {"relax_time", 4000.0}, {"eps", 0.05}, {"sigma", 2.0}, {"delta", 0.01},
         {"T_super", -160.0}, {"sandwich_n", 240.0}, {"sandwich_width", 60.0}, {"doubling", 0.0}},
        {{"alpha", kPi / 3}, {"n", 60.0}, {"t_end", 120.0}, {"h", 0.25}, {"half_width", 40.0}, {"height", 100.0},
         {"snapshot_every", 2.5}, {"recenter_every", 5.0}, {"cone_n", 481.0}, {"cone_h", 0.25},
         {"tilde_n", 481.0}, {"relax_time", 4000.0}, {"eps", 0.05}, {"sigma", 2.0}, {"delta", 0.01},
         {"T_super", -160.0}, {"sandwich_n", 240.0}, {"sandwich_width", 60.0}, {"doubling", 1.0}}}},
      {"exp_supersolution",
       {"cubic(0.3)",
        {{"alpha", kPi / 3}, {"sigma", V{1, 2, 4}}, {"delta", V{0.05, 0.1, 0.2}}, {"T", V{-20, -40}},
         {"cone_n", 241.0}, {"cone_h", 0.5}, {"relax_time", 4000.0}, {"t_start", -40.0},
         {"T_sweep", V{-40, -80, -160}}, {"sweep_delta", 0.01}},
        {{"alpha", kPi / 3}, {"sigma", V{1, 2, 4}}, {"delta", V{0.05, 0.1, 0.2}}, {"T", V{-20, -40}},
         {"cone_n", 481.0}, {"cone_h", 0.25}, {"relax_time", 4000.0}, {"t_start", -40.0},
         {"T_sweep", V{-40, -80, -120, -160, -240, -320}}, {"sweep_delta", 0.01}}}},
      {"exp_terrace",
       {"quintic(0.1, 0.9, 8)",
        {{"h", 0.2}, {"theta_step", 0.05}, {"levels", V{0.25, 0.75}}, {"t_end", 100.0}, {"t_fit", 30.0},
         {"snapshot_every", 1.0}},
        {{"h", 0.1}, {"theta_step", 0.05}, {"levels", V{0.25, 0.75}}, {"t_end", 200.0}, {"t_fit", 50.0},
         {"snapshot_every", 1.0}}}},
      {"exp_planar_liouville",
       {"cubic(0.3)",
        {{"h", 0.5}, {"amplitude", 2.0}, {"wavelength", 20.0}, {"half_width", 40.0}, {"t_end", 60.0},
         {"snapshot_every", 2.0}},
        {{"h", 0.25}, {"amplitude", 2.0}, {"wavelength", 20.0}, {"half_width", 40.0}, {"t_end", 120.0},
         {"snapshot_every", 2.0}}}},
      {"exp_metastable",
       {"cubic(0.5)",
        {{"h", 0.2}, {"plateau", 10.0}, {"half_width", 40.0}, {"t_end", 100.0}, {"snapshot_every", 2.0}},
        {{"h", 0.1}, {"plateau", 10.0}, {"half_width", 40.0}, {"t_end", 200.0}, {"snapshot_every", 2.0}}}},
  };
  return p;
}

// --- run context -----------------------------------------------------------

struct Run {
  const ExperimentConfig& cfg;
  ExperimentReport& rep;
  Nonlinearity f;
  fs::path out;

  double num(const std::string& k) const { return cfg.number(k); }
  double num(const std::string& k, double fallback) const { return cfg.number(k, fallback); }
  bool write_files() const { return !out.empty(); }
  bool write_snapshots() const { return write_files() && cfg.number("write_snapshots", 0.0) > 0.0; }

  void measure(const std::string& k, double v) { rep.measured.emplace_back(k, v); }
  void verdict(const std::string& id, bool pass, const std::string& detail) {
    rep.verdicts.push_back({id, pass, detail});
  }
  Table& table(const std::string& name, std::vector<std::string> cols) {
    rep.tables.push_back({name, std::move(cols), {}});
    return rep.tables.back();
  }
  void snapshot(const ScalarField& u, const std::string& stem) const {
    if (!write_snapshots()) return;
    fs::create_directories(out / "snapshots");
    write_snapshot(u, out / "snapshots" / (stem + ".flab"));
  }
};

std::string within(double value, double target, double rel) {
  return fmt(value) + " vs " + fmt(target) + " (rel. err " + fmt(std::abs(value - target) / std::abs(target), 3) +
         ", allowed " + fmt(rel, 3) + ")";
}
bool rel_ok(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

double first_crossing(const ScalarField& u, double level) {
  const auto s = extract_level_set(u, level);
  return s.empty() ? kNaN : s.points.front()[0];
}

// topmost crossing of the column nearest x1 (2D), linear in x2
double column_top_crossing(const ScalarField& u, double x1, double level) {
  const Grid& g = u.grid;
  const Index i = std::clamp<Index>(std::lround((x1 - g.origin[0]) / g.h), 0, g.n1 - 1);
  for (Index j = g.n2 - 1; j > 0; --j) {
    const double a = u.values(i, j - 1), b = u.values(i, j);
    if (a >= level && b < level) return g.x2(j - 1) + g.h * (a - level) / (a - b);
  }
  return kNaN;
}

EvolveOptions options_for(const Grid& g, const Nonlinearity& f, double t_end, double snap, double dt_cfg,
                          double drift = 0.0) {
  EvolveOptions o;
  o.dt = dt_cfg > 0.0 ? dt_cfg : cfl_limit(g, f, drift);
  o.t_end = t_end;
  o.snapshot_every = snap;
  o.drift = drift;
  return o;
}

// --- experiments -----------------------------------------------------------

void exp_profile(Run& r) {
  const auto rep = analyze(r.f);
  r.measure("integral01", rep.integral01);
  if (!rep.is_bistable) {
    const auto ladder = subfront_speeds(r.f, r.num("tol"));
    auto& t = r.table("ladder", {"lower", "upper", "speed"});
    for (const auto& s : ladder.fronts) t.rows.push_back({s.lower, s.upper, s.speed});
    r.measure("single_front_possible", ladder.single_front_possible ? 1.0 : 0.0);
    r.verdict("ladder", !ladder.fronts.empty(), std::to_string(ladder.fronts.size()) + " sub-fronts computed");
    return;
  }
  const auto p = solve_profile(r.f, r.num("tol"));
  const double c = p.speed();
  r.measure("c_f", c);
  r.measure("lambda", p.lambda());
  r.measure("mu", p.mu());

  const double I = rep.integral01;
  const bool sign_ok = std::abs(I) < 1e-12 ? std::abs(c) < 1e-6 : (c > 0) == (I > 0);
  r.verdict("speed_sign", sign_ok, "c_f = " + fmt(c) + ", integral of f = " + fmt(I));

  // φ'' + c φ' + f(φ) by centred differences on the stored samples
  const auto& phi = p.phi();
  const double d = p.spacing();
  double resid = 0.0;
  for (std::size_t k = 1; k + 1 < phi.size(); ++k) {
    const double r2 = (phi[k + 1] - 2 * phi[k] + phi[k - 1]) / (d * d) + c * (phi[k + 1] - phi[k - 1]) / (2 * d) +
                      r.f.eval(phi[k]);
    resid = std::max(resid, std::abs(r2));
  }
  r.measure("ode_residual", resid);
  r.verdict("ode_residual", resid <= 1e-6, "sup |phi'' + c phi' + f(phi)| = " + fmt(resid, 3) + " <= 1e-6");

  if (r.f.kind() == Nonlinearity::Kind::cubic) {
    const double theta = r.f.params()[0];
    const double exact = (1 - 2 * theta) / std::sqrt(2.0);
    r.measure("c_exact", exact);
    r.verdict("speed_exact", std::abs(c - exact) <= 1e-4,
              "|c_f - (1-2 theta)/sqrt 2| = " + fmt(std::abs(c - exact), 3) + " <= 1e-4");
    double err = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k)
      err = std::max(err, std::abs(phi[k] - 1.0 / (1.0 + std::exp(p.xi(k) / std::sqrt(2.0)))));
    for (double xi = -3 * p.window(); xi <= 3 * p.window(); xi += 0.37)
      err = std::max(err, std::abs(p(xi) - 1.0 / (1.0 + std::exp(xi / std::sqrt(2.0)))));
    r.measure("shape_error", err);
    r.verdict("shape_exact", err <= 1e-5, "sup |phi - 1/(1+e^{xi/sqrt 2})| = " + fmt(err, 3) + " <= 1e-5");
  }
  auto& t = r.table("profile", {"xi", "phi", "dphi"});
  const std::size_t stride = std::max<std::size_t>(1, phi.size() / 2000);
  for (std::size_t k = 0; k < phi.size(); k += stride) t.rows.push_back({p.xi(k), phi[k], p.dphi()[k]});
}

// level-1/2 speed of a 1D planar front on [-W, W]
double planar_speed_1d(const Nonlinearity& f, const ProfileSolution& p, double h, double W, double t0, double t1,
                       double snap, Table* track) {
  const Grid g = Grid::line(static_cast<Index>(std::llround(2 * W / h)) + 1, h, -W);
  const ScalarField u0 = planar_field(p, Point2(1, 0), W / 2, g);
  BoundaryPolicy bc;
  bc.set(Edge::left, EdgePolicy::farfield(1.0)).set(Edge::right, EdgePolicy::farfield(0.0));
  std::vector<double> ts, xs;
  evolve_observe(u0, f, bc, options_for(g, f, t1, snap, 0.0), [&](const ScalarField& u) {
    if (u.t < t0 - 1e-9) return;
    const double x = first_crossing(u, 0.5);
    ts.push_back(u.t);
    xs.push_back(x);
    if (track) track->rows.push_back({h, u.t, x});
  });
  return fit_slope(ts, xs);
}

void exp_front_speed(Run& r) {
  const auto p = solve_profile(r.f);
  const double cf = p.speed();
  const double h = r.num("h"), W = r.num("half_width");
  const double t0 = r.num("t_begin"), t1 = r.num("t_end"), snap = r.num("snapshot_every");
  if (cf * (t1 + 1) > W / 2 - 5) throw DomainError("exp_front_speed: half_width too small for t_end");
  auto& track = r.table("position", {"h", "t", "x_half"});
  const double s1 = planar_speed_1d(r.f, p, h, W, t0, t1, snap, &track);
  const double s2 = planar_speed_1d(r.f, p, h / 2, W, t0, t1, snap, &track);
  const double e1 = std::abs(s1 - cf) / cf, e2 = std::abs(s2 - cf) / cf;
  r.measure("c_f", cf);
  r.measure("speed_h", s1);
  r.measure("speed_h2", s2);
  r.measure("error_ratio", e1 / e2);
  r.verdict("speed", e1 <= 0.01, "h = " + fmt(h) + ": " + within(s1, cf, 0.01));
  r.verdict("refinement", e1 / e2 >= 3.0,
            "error " + fmt(e1, 3) + " -> " + fmt(e2, 3) + " on halving h, ratio " + fmt(e1 / e2, 3) + " >= 3");
  auto& t = r.table("speed", {"h", "speed", "rel_error"});
  t.rows.push_back({h, s1, e1});
  t.rows.push_back({h / 2, s2, e2});
}

void exp_fife_mcleod(Run& r) {
  const auto p = solve_profile(r.f);
  const double h = r.num("h"), x0 = r.num("x_min"), x1 = r.num("x_max");
  const Grid g = Grid::line(static_cast<Index>(std::llround((x1 - x0) / h)) + 1, h, x0);
  const ScalarField u0 = step_field(r.num("theta_step"), StepVariant::lower, g);
  const double t_mono = r.num("t_monotone");
  auto& t = r.table("distance", {"t", "distance", "shift"});
  ScalarField last;
  evolve_observe(u0, r.f, BoundaryPolicy::all(EdgePolicy::neumann()),
                 options_for(g, r.f, r.num("t_end"), r.num("snapshot_every"), r.num("dt", 0.0)),
                 [&](const ScalarField& u) {
                   if (u.t <= 0.0) return;  // the step itself has no crossing to anchor on
                   const auto [s, d] = profile_distance_1d(u, p);
                   t.rows.push_back({u.t, d, s});
                   last = u;
                 });
  double worst_rise = -kInf;
  for (std::size_t k = 1; k < t.rows.size(); ++k)
    if (t.rows[k - 1][0] >= t_mono - 1e-9) worst_rise = std::max(worst_rise, t.rows[k][1] - t.rows[k - 1][1]);
  const double d_end = t.rows.back()[1];
  r.measure("distance_end", d_end);
  r.measure("max_increase_after_t_monotone", worst_rise);
  r.verdict("converged", d_end <= r.num("tol"),
            "distance at t = " + fmt(t.rows.back()[0]) + ": " + fmt(d_end, 4) + " <= " + fmt(r.num("tol")));
  // once D sits on its O(h²) floor the lattice phase makes it jitter by ~1e-8
  r.verdict("monotone", worst_rise <= 1e-6,
            "largest increase of the distance after t = " + fmt(t_mono) + ": " + fmt(worst_rise, 3) +
                " <= 1e-6 (floor jitter, final distance " + fmt(d_end, 3) + ")");
  if (r.write_files()) write_csv(last, r.out / "final.csv");
}

// quadrant run of a radial Cauchy problem; counts nodes of |x| <= radius(t)
// that violate `bad`
struct SpreadResult {
  double t_eps = kNaN;
  long final_violations = 0;
  double edge_max = 0.0;
};

// `below`: a violation is u < level (else u > level)
SpreadResult spread_quadrant(Run& r, double inside, double outside, double level, bool below, double t_end,
                             const std::function<double(double)>& radius) {
  const double h = r.num("h"), W = r.num("half_width"), R = r.num("R");
  const Index n = static_cast<Index>(std::llround(W / h)) + 1;
  const Grid g = Grid::plane(n, n, h, 0.0, 0.0);
  const ScalarField u0 = ball_field(inside, outside, R, g);
  BoundaryPolicy bc;
  bc.set(Edge::left, EdgePolicy::neumann()).set(Edge::bottom, EdgePolicy::neumann());
  bc.set(Edge::right, EdgePolicy::farfield(outside)).set(Edge::top, EdgePolicy::farfield(outside));
  auto& t = r.table("violations", {"t", "radius", "violating_nodes", below ? "min_u" : "max_u"});
  SpreadResult out;
  double last_bad_t = -kInf;
  ScalarField last;
  evolve_observe(u0, r.f, bc, options_for(g, r.f, t_end, r.num("snapshot_every"), r.num("dt", 0.0)),
                 [&](const ScalarField& u) {
                   const double rad = radius(u.t);
                   long count = 0;
                   double extreme = below ? kInf : -kInf;
                   for (Index j = 0; j < n; ++j)
                     for (Index i = 0; i < n; ++i) {
                       const double x = g.x1(i), y = g.x2(j);
                       if (x * x + y * y > rad * rad) continue;
                       const double v = u.values(i, j);
                       extreme = below ? std::min(extreme, v) : std::max(extreme, v);
                       if (below ? v < level : v > level) ++count;
                     }
                   t.rows.push_back({u.t, rad, static_cast<double>(count), extreme});
                   if (count > 0) last_bad_t = u.t;
                   out.final_violations = count;
                   last = u;
                 });
  // first snapshot after the last violating one
  out.t_eps = 0.0;
  for (const auto& row : t.rows)
    if (row[0] > last_bad_t) {
      out.t_eps = row[0];
      break;
    }
  if (out.final_violations > 0) out.t_eps = kInf;
  for (Index k = 0; k < n; ++k)
    out.edge_max = std::max({out.edge_max, std::abs(last.values(n - 1, k) - outside),
                             std::abs(last.values(k, n - 1) - outside)});
  r.snapshot(last, "final");
  return out;
}

void exp_spreading(Run& r) {
  const auto p = solve_profile(r.f);
  const double cf = p.speed(), eps = r.num("eps"), beta = r.num("level"), t_end = r.num("t_end");
  if (!(eps <= cf)) throw DomainError("exp_spreading: need 0 < eps <= c_f = " + fmt(cf));
  const auto res = spread_quadrant(r, beta, 0.0, beta, true, t_end, [&](double t) { return (cf - eps) * t; });
  if (res.edge_max > 0.01) throw NumericalError("exp_spreading: the front reached the outer edge; enlarge half_width");
  r.measure("c_f", cf);
  r.measure("T_eps", res.t_eps);
  r.measure("final_violations", static_cast<double>(res.final_violations));
  r.verdict("spreading", std::isfinite(res.t_eps) && res.t_eps <= t_end / 2,
            "u >= " + fmt(beta) + " on |x| <= (c_f - eps) t for all snapshots t in [T_eps, " + fmt(t_end) +
                "] with T_eps = " + fmt(res.t_eps) + " <= t_end/2; violating nodes after T_eps: 0");
}

void exp_spreading_upper(Run& r) {
  const auto p = solve_profile(r.f);
  const double cf = p.speed(), eps = r.num("eps"), a = r.num("level"), R = r.num("R");
  const double t_max = R / (cf + eps);
  const double t_end = std::min(r.num("t_end", t_max), t_max);
  const auto res =
      spread_quadrant(r, a, 1.0, a, false, t_end, [&](double t) { return std::max(0.0, R - (cf + eps) * t); });
  r.measure("c_f", cf);
  r.measure("t_end", t_end);
  r.measure("T_eps", res.t_eps);
  r.measure("final_violations", static_cast<double>(res.final_violations));
  r.verdict("retraction", std::isfinite(res.t_eps) && res.t_eps <= t_end / 2,
            "u <= " + fmt(a) + " on |x| <= R - (c_f + eps) t for all snapshots t in [T_eps, " + fmt(t_end) +
                "] with T_eps = " + fmt(res.t_eps) + " <= t_end/2; violating nodes after T_eps: 0");
}

void exp_mean_speed(Run& r) {
  const auto p = solve_profile(r.f);
  const double cf = p.speed(), alpha = r.num("alpha"), h = r.num("h");
  const auto& cone = cached_conical_front(r.f, alpha, h, static_cast<Index>(r.num("n")), r.num("relax_time"));
  const double c = cone.speed, L = r.num("clip_L");
  r.measure("c_f", cf);
  r.measure("c", c);
  r.measure("edge_slope", cone.edge_slope());
  r.verdict("edge_slope", rel_ok(cone.edge_slope(), 1 / std::tan(alpha), 0.05),
            "psi slope at the edge " + within(cone.edge_slope(), 1 / std::tan(alpha), 0.05));

  EvolveOptions o = options_for(cone.field.grid, r.f, r.num("t_end"), r.num("snapshot_every"), r.num("dt", 0.0), c);
  o.drift_scheme = DriftScheme::central;
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  std::vector<InterfaceSet> ifs;
  ScalarField last;
  evolve_observe(cone.field, r.f, BoundaryPolicy::all(EdgePolicy::profile()), o, [&](const ScalarField& u) {
    auto s = translated(extract_level_set(u, 0.5), Point2(0, c * u.t));
    ifs.push_back(clipped(s, [&](const Point2& q) { return std::abs(q[0]) * sa + q[1] * ca <= L; }));
    last = u;
  });
  r.snapshot(cone.field, "cone");
  r.snapshot(last, "final");

  const std::string kind = r.cfg.text("kind", "all");
  for (auto k : {DistanceKind::inf, DistanceKind::tilde, DistanceKind::hausdorff}) {
    if (kind != "all" && parse_distance_kind(kind) != k) continue;
    const auto e = mean_speed(ifs, k);
    const std::string name = to_string(k);
    r.measure("gamma_" + name, e.gamma_hat);
    r.measure("fit_residual_" + name, e.fit_residual);
    const double target = k == DistanceKind::hausdorff ? c : cf;
    r.verdict("speed_" + name, rel_ok(e.gamma_hat, target, 0.05),
              "mean_speed(" + name + ") " + within(e.gamma_hat, target, 0.05));
    auto& t = r.table("distance_" + name, {"tau", "distance"});
    for (std::size_t i = 0; i < e.tau.size(); ++i) t.rows.push_back({e.tau[i], e.distance[i]});
  }
}

// apex (x1 = 0) ordinate of each snapshot, for the late speed fit
double apex_speed(const NonstandardRun& run, double t_from) {
  std::vector<double> ts, ys;
  for (const auto& s : run.snapshots)
    if (s.t >= t_from - 1e-9) {
      const double y = column_top_crossing(s, 0.0, 0.5);
      if (std::isfinite(y)) {
        ts.push_back(s.t);
        ys.push_back(y);
      }
    }
  return fit_slope(ts, ys);
}

// min over vertical shifts of sup |u - φ̃(x1, x2 - s)|
std::pair<double, double> tilde_distance(const ScalarField& u, const ConicalFront& tilde) {
  const Grid& g = u.grid;
  auto sup = [&](double s) {
    double m = 0.0;
    for (Index j = 0; j < g.n2; ++j)
      for (Index i = 0; i < g.n1; ++i) m = std::max(m, std::abs(u.values(i, j) - tilde(g.x1(i), g.x2(j) - s)));
    return m;
  };
  const double apex_u = column_top_crossing(u, 0.0, 0.5);
  const double apex_t = column_top_crossing(tilde.field, 0.0, 0.5);
  const double s0 = apex_u - apex_t;
  return minimize_scan(sup, s0 - 3.0, s0 + 3.0, 25);
}

// min over all snapshots of u - max(three planar fronts)
double lower_bound_gap(const NonstandardRun& run, const ProfileSolution& p) {
  double worst = 0.0;
  for (const auto& b : run.snapshots) {
    const Grid& g = b.grid;
    for (Index j = 0; j < g.n2; ++j)
      for (Index i = 0; i < g.n1; ++i)
        worst = std::min(worst, b.values(i, j) - planar_envelope(p, run.alpha, b.t, g.x1(i), g.x2(j)));
  }
  return worst;
}

void exp_nonstandard(Run& r) {
  const auto p = solve_profile(r.f);
  const double cf = p.speed(), alpha = r.num("alpha"), n = r.num("n"), t_end = r.num("t_end");
  const double cone_h = r.num("cone_h");
  const auto& cone = cached_conical_front(r.f, alpha, cone_h, static_cast<Index>(r.num("cone_n")),
                                          r.num("relax_time"));
  NonstandardOptions opt;
  opt.half_width = r.num("half_width");
  opt.height = r.num("height");
  opt.h = r.num("h");
  opt.dt = r.num("dt", 0.0);
  opt.snapshot_every = r.num("snapshot_every");
  opt.recenter_every = r.num("recenter_every");
  const auto run = build_nonstandard(r.f, cone, n, t_end, opt);
  const double h = opt.h;
  r.measure("c_f", cf);
  r.measure("snapshots", static_cast<double>(run.snapshots.size()));

  std::vector<InterfaceSet> ifs;
  for (const auto& s : run.snapshots) ifs.push_back(extract_level_set(s, 0.5));

  // kink structure at t = -n against the reference, clipped to the window
  {
    const auto& g = run.snapshots.front().grid;
    const auto ref = clipped(reference_interfaces(-n, alpha, cf), Point2(g.origin[0], g.origin[1]),
                             Point2(g.x1_max(), g.x2_max()));
    const double d = dist_tilde(ifs.front(), ref);
    r.measure("initial_ref_distance", d);
    r.verdict("initial_reference", d <= 3.0, "d~(Gamma(-n), reference) = " + fmt(d, 4) + " <= 3");
  }

  // (a)
  std::vector<double> eps_grid = {0.2, 0.1, 0.05, 0.01};
  const double eps = r.num("eps");
  if (std::find(eps_grid.begin(), eps_grid.end(), eps) == eps_grid.end()) eps_grid.push_back(eps);
  const auto tt = verify_transition(run.snapshots, run.refs, eps_grid);
  auto& mt = r.table("transition", {"eps", "M"});
  double M_eps = kInf;
  for (std::size_t k = 0; k < tt.eps.size(); ++k) {
    mt.rows.push_back({tt.eps[k], tt.M[k]});
    if (tt.eps[k] == eps) M_eps = tt.M[k];
  }
  r.measure("M_eps", M_eps);
  r.measure("max_node_distance", tt.max_node_distance);
  r.verdict("a_transition", std::isfinite(M_eps),
            "M(" + fmt(eps) + ") = " + fmt(M_eps, 4) + " finite, largest node distance " +
                fmt(tt.max_node_distance, 4));

  // (b)
  const auto ms = mean_speed(ifs, DistanceKind::inf);
  r.measure("gamma_inf", ms.gamma_hat);
  r.verdict("b_mean_speed", rel_ok(ms.gamma_hat, cf, 0.07), "mean_speed(inf) " + within(ms.gamma_hat, cf, 0.07));
  auto& dt = r.table("distance_inf", {"tau", "distance"});
  for (std::size_t i = 0; i < ms.tau.size(); ++i) dt.rows.push_back({ms.tau[i], ms.distance[i]});

  // (c)
  const double c_tilde = cf / std::abs(std::cos(2 * alpha));
  const double vs = apex_speed(run, t_end / 2);
  const auto& tilde = cached_conical_front(r.f, 2 * alpha - kPi / 2, cone_h, static_cast<Index>(r.num("tilde_n")),
                                           r.num("relax_time"));
  const auto [shift, d_tilde] = tilde_distance(run.snapshots.back(), tilde);
  r.measure("apex_speed", vs);
  r.measure("c_tilde", c_tilde);
  r.measure("tilde_distance", d_tilde);
  r.measure("tilde_shift", shift);
  r.verdict("c_long_time", rel_ok(vs, c_tilde, 0.05) && d_tilde < 0.03,
            "apex speed over t >= " + fmt(t_end / 2) + " " + within(vs, c_tilde, 0.05) +
                "; min over shifts sup |u - phi~| at t = " + fmt(t_end) + ": " + fmt(d_tilde, 3) + " < 0.03");

  // (d)
  const int p0 = count_pieces(ifs.front(), 2 * h), p1 = count_pieces(ifs.back(), 2 * h);
  r.measure("pieces_start", p0);
  r.measure("pieces_end", p1);
  r.verdict("d_non_rigidity", p0 == 3 && p1 == 2,
            "pieces at tolerance 2h: " + std::to_string(p0) + " at t = " + fmt(-n) + " (want 3), " +
                std::to_string(p1) + " at t = " + fmt(t_end) + " (want 2)");

  // (e), on rows shared by consecutive windows, and the planar lower bound
  double worst_mono = 0.0;
  const double worst_lower = lower_bound_gap(run, p);
  for (std::size_t k = 1; k < run.snapshots.size(); ++k) {
    const auto& a = run.snapshots[k - 1];
    const auto& b = run.snapshots[k];
    const Index dj = std::lround((b.grid.origin[1] - a.grid.origin[1]) / h);
    for (Index j = 0; j < b.grid.n2; ++j) {
      const Index ja = j + dj;
      if (ja < 0 || ja >= a.grid.n2) continue;
      for (Index i = 0; i < b.grid.n1; ++i) worst_mono = std::min(worst_mono, b.values(i, j) - a.values(i, ja));
    }
  }
  r.measure("worst_time_decrease", worst_mono);
  r.verdict("e_monotone", worst_mono >= -1e-10,
            "largest decrease between consecutive snapshots " + fmt(worst_mono, 3) + " >= -1e-10");
  r.measure("worst_planar_bound", worst_lower);
  std::string lower_detail = "min of u - max(three planar fronts) = " + fmt(worst_lower, 3) + " >= -1e-3";
  if (r.num("doubling") > 0.0) {
    // same run on the coarser grid: the gap is the O(h²) lag of the grid fronts
    const auto& cone2 = cached_conical_front(r.f, alpha, 2 * cone_h,
                                             (static_cast<Index>(r.num("cone_n")) - 1) / 2 + 1, r.num("relax_time"));
    NonstandardOptions opt2 = opt;
    opt2.h = 2 * h;
    opt2.dt = 0.0;
    const double coarse = lower_bound_gap(build_nonstandard(r.f, cone2, n, t_end, opt2), p);
    r.measure("worst_planar_bound_2h", coarse);
    lower_detail += "; at 2h it is " + fmt(coarse, 3) + " (ratio " + fmt(coarse / worst_lower, 3) + ")";
  }
  r.verdict("lower_planar_bound", worst_lower >= -1e-3, lower_detail);

  // sandwich for t <= T from a deeper launch, where v^ is a supersolution
  {
    const double sigma = r.num("sigma"), delta = r.num("delta"), T_super = r.num("T_super");
    const double n_deep = r.num("sandwich_n");
    if (!(T_super > -n_deep)) throw DomainError("exp_nonstandard: need T_super > -sandwich_n");
    NonstandardOptions od = opt;
    od.half_width = r.num("sandwich_width");
    const auto deep = build_nonstandard(r.f, cone, n_deep, T_super, od);
    double worst_sub = 0.0, worst_super = 0.0;
    for (const auto& b : deep.snapshots) {
      const Grid& g = b.grid;
      for (Index j = 0; j < g.n2; ++j)
        for (Index i = 0; i < g.n1; ++i) {
          const double x1 = -std::abs(g.x1(i)), x2 = g.x2(j), u = b.values(i, j);
          worst_sub = std::min(worst_sub, u - rotated_value(cone, b.t, x1, x2));
          worst_super = std::min(worst_super, supersolution_value(cone, sigma, delta, b.t, x1, x2) - u);
        }
    }
    r.measure("worst_sandwich_lower", worst_sub);
    r.measure("worst_sandwich_upper", worst_super);
    r.verdict("sandwich", worst_sub >= -1e-3 && worst_super >= -1e-3,
              "launch at t = " + fmt(-n_deep) + ", t <= " + fmt(T_super) + ": min of u - v_ = " + fmt(worst_sub, 3) +
                  ", min of v^ - u = " + fmt(worst_super, 3) + " (sigma " + fmt(sigma) + ", delta " + fmt(delta) +
                  "); both >= -1e-3");
  }

  // insensitivity to n: runs from -n and -2n compared at t = -n and t = 0
  if (r.num("doubling") > 0.0) {
    const auto a = build_nonstandard(r.f, cone, n, 0.0, opt);
    const auto b = build_nonstandard(r.f, cone, 2 * n, 0.0, opt);
    auto compare = [&](double t) {
      const ScalarField* ua = nullptr;
      const ScalarField* ub = nullptr;
      for (const auto& s : a.snapshots)
        if (std::abs(s.t - t) < 1e-9) ua = &s;
      for (const auto& s : b.snapshots)
        if (std::abs(s.t - t) < 1e-9) ub = &s;
      if (!ua || !ub) throw NumericalError("exp_nonstandard: doubling runs miss a snapshot at t = " + fmt(t));
      double m = 0.0;
      const Grid& g = ua->grid;
      for (Index j = 0; j < g.n2; ++j)
        for (Index i = 0; i < g.n1; ++i) {
          const double v = sample_cubic(*ub, g.x1(i), g.x2(j), kNaN);
          if (std::isfinite(v)) m = std::max(m, std::abs(ua->values(i, j) - v));
        }
      return m;
    };
    const double d0 = compare(-n), d1 = compare(0.0);
    r.measure("doubling_diff_start", d0);
    r.measure("doubling_diff_t0", d1);
    r.verdict("n_doubling", d1 < d0,
              "sup |u_n - u_2n| shrinks from " + fmt(d0, 3) + " at t = " + fmt(-n) + " to " + fmt(d1, 3) +
                  " at t = 0");
  }

  if (r.write_files()) {
    fs::create_directories(r.out);
    std::ofstream refs(r.out / "refs.csv");
    refs << "t,line,x1,x2\n";
    for (const auto& ref : run.refs)
      for (std::size_t l = 0; l < ref.lines.size(); ++l)
        for (const auto& q : ref.lines[l])
          refs << format_csv_number(ref.t) << ',' << l << ',' << format_csv_number(q[0]) << ','
               << format_csv_number(q[1]) << '\n';
    auto& sh = r.table("shifts", {"t", "shift"});
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) sh.rows.push_back({run.snapshots[k].t, run.shifts[k]});
    if (r.write_snapshots())
      for (const auto& s : run.snapshots) {
        const long ms10 = std::lround(s.t * 10);
        r.snapshot(s, "u_t" + std::string(ms10 < 0 ? "m" : "p") + std::to_string(std::abs(ms10)));
      }
  }
}

void exp_supersolution(Run& r) {
  const double alpha = r.num("alpha"), h = r.num("cone_h");
  const Index n = static_cast<Index>(r.num("cone_n"));
  const auto& cone = cached_conical_front(r.f, alpha, h, n, r.num("relax_time"));
  SupersolutionWindow w;
  w.t_start = r.num("t_start");
  const double dt = cfl_limit(h, 2, r.f.max_abs_deriv(), cone.speed);

  auto& grid = r.table("grid_search", {"sigma", "delta", "T", "min_interior", "min_boundary", "tol", "pass"});
  const SupersolutionReport* best = nullptr;
  std::vector<SupersolutionReport> all;
  for (double T : r.cfg.list("T", {}))
    for (double s : r.cfg.list("sigma", {}))
      for (double d : r.cfg.list("delta", {})) {
        if (T < w.t_start) continue;
        all.push_back(check_supersolution(cone, r.f, s, d, T, h, dt, w));
        const auto& a = all.back();
        grid.rows.push_back({s, d, T, a.min_interior, a.min_boundary, a.tol, a.pass ? 1.0 : 0.0});
      }
  auto margin = [](const SupersolutionReport& a) { return std::min(a.min_interior, a.min_boundary); };
  for (const auto& a : all)
    if (a.pass && (!best || margin(a) > margin(*best))) best = &a;
  if (!best) {
    r.verdict("residual", false, "no (sigma, delta, T) in the grid passes");
    return;
  }
  r.measure("sigma", best->sigma);
  r.measure("delta", best->delta);
  r.measure("T", best->T);
  r.measure("min_interior", best->min_interior);
  r.measure("min_boundary", best->min_boundary);
  r.measure("tol", best->tol);
  r.verdict("residual", true,
            "best (sigma, delta, T) = (" + fmt(best->sigma) + ", " + fmt(best->delta) + ", " + fmt(best->T) +
                "): min interior N = " + fmt(best->min_interior, 3) + ", min boundary v_x1 = " +
                fmt(best->min_boundary, 3) + ", both >= -" + fmt(best->tol, 3));

  // refine the conical field and the check together
  const double hc = 2 * h;
  const auto& coarse = cached_conical_front(r.f, alpha, hc, (n - 1) / 2 + 1, r.num("relax_time"));
  const double dtc = cfl_limit(hc, 2, r.f.max_abs_deriv(), coarse.speed);
  const auto rc = check_supersolution(coarse, r.f, best->sigma, best->delta, best->T, hc, dtc, w);
  auto& conv = r.table("convergence", {"h", "dt", "min_interior", "min_boundary"});
  conv.rows.push_back({hc, dtc, rc.min_interior, rc.min_boundary});
  conv.rows.push_back({h, dt, best->min_interior, best->min_boundary});
  // both errors scale with h² + dt, which drops by about 4 per halving
  const double lim_i = best->min_interior + (best->min_interior - rc.min_interior) / 3.0;
  const double lim_b = best->min_boundary + (best->min_boundary - rc.min_boundary) / 3.0;
  r.measure("limit_interior", lim_i);
  r.measure("limit_boundary", lim_b);
  const bool rising = best->min_interior >= rc.min_interior && best->min_boundary >= rc.min_boundary;
  const bool toward_zero = lim_i >= -1e-3 && lim_b >= -1e-3;
  r.verdict("convergence", rising && toward_zero,
            "h " + fmt(hc) + " -> " + fmt(h) + ": interior " + fmt(rc.min_interior, 3) + " -> " +
                fmt(best->min_interior, 3) + " (limit " + fmt(lim_i, 3) + "), boundary " + fmt(rc.min_boundary, 3) +
                " -> " + fmt(best->min_boundary, 3) + " (limit " + fmt(lim_b, 3) +
                "); need both rising with limits >= -1e-3");

  // behaviour of the continuum minima as T goes down
  auto& sweep = r.table("T_sweep", {"T", "sigma", "delta", "min_interior", "min_boundary"});
  const double sd = r.num("sweep_delta");
  for (double T : r.cfg.list("T_sweep", {})) {
    SupersolutionWindow ws = w;
    ws.t_start = T - 40.0;
    const auto a = check_supersolution(cone, r.f, best->sigma, sd, T, h, dt, ws);
    sweep.rows.push_back({T, best->sigma, sd, a.min_interior, a.min_boundary});
  }
}

void exp_terrace(Run& r) {
  const auto ladder = subfront_speeds(r.f);
  auto& lt = r.table("ladder", {"lower", "upper", "speed"});
  for (const auto& s : ladder.fronts) lt.rows.push_back({s.lower, s.upper, s.speed});
  if (ladder.fronts.size() != 2)
    throw DomainError("exp_terrace: needs exactly two sub-fronts, got " + std::to_string(ladder.fronts.size()));
  const double g_low = ladder.fronts[0].speed, g_high = ladder.fronts[1].speed;
  r.measure("gamma_low", g_low);
  r.measure("gamma_high", g_high);
  r.verdict("ordering", g_low > g_high && !ladder.single_front_possible,
            "gamma_low = " + fmt(g_low) + " > gamma_high = " + fmt(g_high));

  const double h = r.num("h"), t_end = r.num("t_end"), t_fit = r.num("t_fit");
  const double x0 = r.num("x_min", std::min(0.0, g_high) * t_end - 30.0);
  const double x1 = r.num("x_max", std::max(0.0, g_low) * t_end + 30.0);
  const Grid g = Grid::line(static_cast<Index>(std::llround((x1 - x0) / h)) + 1, h, x0);
  const ScalarField u0 = step_field(r.num("theta_step"), StepVariant::upper, g);
  const auto levels = r.cfg.list("levels", {0.25, 0.75});
  auto& pos = r.table("positions", {"t", "x_low", "x_high"});
  std::vector<double> ts, xl, xh, sep;
  ScalarField mid, last;
  const double t_mid = 0.5 * (t_fit + t_end);
  evolve_observe(u0, r.f, BoundaryPolicy::all(EdgePolicy::neumann()),
                 options_for(g, r.f, t_end, r.num("snapshot_every"), r.num("dt", 0.0)),
                 [&](const ScalarField& u) {
                   if (u.t <= 0.0) return;
                   const double a = first_crossing(u, levels[0]), b = first_crossing(u, levels[1]);
                   pos.rows.push_back({u.t, a, b});
                   if (u.t >= t_fit - 1e-9) {
                     ts.push_back(u.t);
                     xl.push_back(a);
                     xh.push_back(b);
                     sep.push_back(a - b);
                   }
                   if (mid.values.size() == 0 && u.t >= t_mid - 1e-9) mid = u;
                   last = u;
                 });
  const double sl = fit_slope(ts, xl), sh = fit_slope(ts, xh), rate = fit_slope(ts, sep);
  r.measure("speed_low", sl);
  r.measure("speed_high", sh);
  r.measure("separation_rate", rate);
  r.verdict("speeds_differ", sl - sh >= 0.05,
            "fitted speeds " + fmt(sl) + " (level " + fmt(levels[0]) + ") and " + fmt(sh) + " (level " +
                fmt(levels[1]) + ") differ by " + fmt(sl - sh) + " >= 0.05");
  r.verdict("separation_rate", rel_ok(rate, g_low - g_high, 0.10),
            "separation growth " + within(rate, g_low - g_high, 0.10));
  // shape convergence would make u(t_end) a translate of u(t_mid)
  const double span = std::abs(x1 - x0);
  const auto [s, d] = self_shift_distance_1d(last, mid, -span / 2, span / 2);
  r.measure("self_shift_distance", d);
  r.verdict("no_shape_convergence", d >= 0.1,
            "min over shifts sup |u(" + fmt(t_end) + ", x) - u(" + fmt(mid.t) + ", x - s)| = " + fmt(d, 4) +
                " >= 0.1 (best s = " + fmt(s, 4) + ")");
  if (r.write_files()) write_csv(last, r.out / "final.csv");
}

void exp_planar_liouville(Run& r) {
  const auto p = solve_profile(r.f);
  const double cf = p.speed(), h = r.num("h"), A = r.num("amplitude"), lam = r.num("wavelength");
  const double W = r.num("half_width"), t_end = r.num("t_end");
  // one period of the cosine with zero-flux sides
  const Grid g = Grid::covering(0.0, lam, -W, W, h);
  const double start = -W / 2;
  if (start + cf * t_end > W - 10) throw DomainError("exp_planar_liouville: half_width too small for t_end");
  const ScalarField u0 = ScalarField::sample(
      g, 0.0, [&](double x1, double x2) { return p(x2 - start - A * std::cos(2 * kPi * x1 / lam)); });
  BoundaryPolicy bc = BoundaryPolicy::all(EdgePolicy::neumann());
  bc.set(Edge::bottom, EdgePolicy::farfield(1.0)).set(Edge::top, EdgePolicy::farfield(0.0));
  auto& t = r.table("planarity", {"t", "xi", "residual"});
  std::vector<double> ts, xs;
  ScalarField last;
  double res0 = kNaN;
  evolve_observe(u0, r.f, bc, options_for(g, r.f, t_end, r.num("snapshot_every"), r.num("dt", 0.0)),
                 [&](const ScalarField& u) {
                   const auto pl = planarity(extract_level_set(u, 0.5), &u);
                   // planarity orients e away from u > 1/2, i.e. upward here
                   const double xi = pl.e[1] > 0 ? pl.xi : -pl.xi;
                   t.rows.push_back({u.t, xi, pl.residual});
                   if (std::isnan(res0)) res0 = pl.residual;
                   if (u.t >= t_end / 2 - 1e-9) {
                     ts.push_back(u.t);
                     xs.push_back(xi);
                   }
                   last = u;
                 });
  const double res1 = t.rows.back()[2], speed = fit_slope(ts, xs);
  auto sup = [&](double s) {
    double m = 0.0;
    for (Index j = 0; j < g.n2; ++j)
      for (Index i = 0; i < g.n1; ++i) m = std::max(m, std::abs(last.values(i, j) - p(g.x2(j) - s)));
    return m;
  };
  const double guess = t.rows.back()[1];
  const auto [s, d] = minimize_scan(sup, guess - 2, guess + 2, 21);
  r.measure("residual_start", res0);
  r.measure("residual_end", res1);
  r.measure("speed", speed);
  r.measure("profile_distance", d);
  r.verdict("flattens", res1 <= 0.01 * res0,
            "planarity residual " + fmt(res0, 3) + " -> " + fmt(res1, 3) + " (<= 1% of the start)");
  r.verdict("planar_speed", rel_ok(speed, cf, 0.02), "speed of the fitted line " + within(speed, cf, 0.02));
  r.verdict("planar_profile", d <= 0.01,
            "min over shifts sup |u - phi_f(x2 - s)| = " + fmt(d, 3) + " <= 0.01 (s = " + fmt(s, 4) + ")");
  r.snapshot(last, "final");
}

void exp_metastable(Run& r) {
  if (std::abs(r.f.integral01()) > 1e-12)
    throw DomainError("exp_metastable: needs a balanced f (integral of f over [0,1] = " + fmt(r.f.integral01()) + ")");
  const double h = r.num("h"), W = r.num("half_width"), P = r.num("plateau"), t_end = r.num("t_end");
  if (!(P < W - 5)) throw DomainError("exp_metastable: plateau must stay 5 units inside the domain");
  const Grid g = Grid::line(static_cast<Index>(std::llround(2 * W / h)) + 1, h, -W);
  const ScalarField u0 = ScalarField::sample(g, 0.0, [&](double x, double) { return std::abs(x) <= P ? 1.0 : 0.0; });
  auto& t = r.table("interfaces", {"t", "x_left", "x_right"});
  std::vector<double> ts, xl, xr;
  evolve_observe(u0, r.f, BoundaryPolicy::all(EdgePolicy::neumann()),
                 options_for(g, r.f, t_end, r.num("snapshot_every"), r.num("dt", 0.0)),
                 [&](const ScalarField& u) {
                   const auto s = extract_level_set(u, 0.5);
                   if (s.size() != 2) return;
                   t.rows.push_back({u.t, s.points[0][0], s.points[1][0]});
                   if (u.t >= t_end / 4 - 1e-9) {
                     ts.push_back(u.t);
                     xl.push_back(s.points[0][0]);
                     xr.push_back(s.points[1][0]);
                   }
                 });
  if (ts.size() < 3) throw NumericalError("exp_metastable: the plateau did not keep two interfaces");
  const double vl = fit_slope(ts, xl), vr = fit_slope(ts, xr);
  r.measure("speed_left", vl);
  r.measure("speed_right", vr);
  r.verdict("slow_interfaces", std::max(std::abs(vl), std::abs(vr)) <= 1e-3,
            "interface speeds " + fmt(vl, 3) + ", " + fmt(vr, 3) + " over t >= " + fmt(t_end / 4) +
                ", |.| <= 1e-3");
}

using Pipeline = void (*)(Run&);
const std::map<std::string, Pipeline>& pipelines() {
  static const std::map<std::string, Pipeline> m = {
      {"exp_profile", exp_profile},
      {"exp_front_speed", exp_front_speed},
      {"exp_fife_mcleod", exp_fife_mcleod},
      {"exp_spreading", exp_spreading},
      {"exp_spreading_upper", exp_spreading_upper},
      {"exp_mean_speed", exp_mean_speed},
      {"exp_nonstandard", exp_nonstandard},
      {"exp_supersolution", exp_supersolution},
      {"exp_terrace", exp_terrace},
      {"exp_planar_liouville", exp_planar_liouville},
      {"exp_metastable", exp_metastable},
  };
  return m;
}

}  // namespace

// --- report ----------------------------------------------------------------

bool ExperimentReport::passed() const {
  return error.empty() && !verdicts.empty() &&
         std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

double ExperimentReport::value(const std::string& key) const {
  for (const auto& [k, v] : measured)
    if (k == key) return v;
  return kNaN;
}

const Verdict* ExperimentReport::verdict(const std::string& id) const {
  for (const auto& v : verdicts)
    if (v.id == id) return &v;
  return nullptr;
}

const Table* ExperimentReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

std::string version_string() { return std::string("frontlab ") + FRONTLAB_VERSION; }

ExperimentConfig preset_config(const std::string& name, const std::string& profile) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw ConfigError("unknown experiment '" + name + "'");
  if (profile != "smoke" && profile != "full") throw ConfigError("profile must be smoke or full, got '" + profile + "'");
  ExperimentConfig c;
  c.name = name;
  c.f = it->second.f;
  c.profile = profile;
  c.params = profile == "full" ? it->second.full : it->second.smoke;
  return c;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.name = cfg.name;
  rep.version = version_string();
  const auto t0 = std::chrono::steady_clock::now();
  const auto it = pipelines().find(cfg.name);
  if (it == pipelines().end()) throw ConfigError("unknown experiment '" + cfg.name + "'");

  ExperimentConfig merged = preset_config(cfg.name, cfg.profile);
  if (!cfg.f.empty()) merged.f = cfg.f;
  merged.seed = cfg.seed;
  merged.out_dir = cfg.out_dir;
  for (const auto& [k, v] : cfg.params) merged.params[k] = v;
  validate_config(merged);
  rep.config = serialize_config(merged);

  Run run{merged, rep, Nonlinearity::parse(merged.f), merged.out_dir.empty() ? fs::path() : fs::path(merged.out_dir)};
  if (run.write_files()) fs::create_directories(run.out);
  try {
    it->second(run);
  } catch (const DomainError& e) {
    rep.error = std::string("domain error: ") + e.what();
  } catch (const NumericalError& e) {
    rep.error = std::string("numerical error: ") + e.what();
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (run.write_files()) write_report(rep, run.out);
  return rep;
}

std::string format_csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_table_csv(const Table& t, const fs::path& path, const std::string& header_comment) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_csv_number(row[k]);
    os << '\n';
  }
}

void write_report(const ExperimentReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream os(dir / "report.txt");
  if (!os) throw ConfigError("cannot write " + (dir / "report.txt").string());
  os << "name = " << report.name << '\n';
  os << "version = " << report.version << '\n';
  os << "wall_seconds = " << fmt(report.wall_seconds, 4) << '\n';
  os << "status = " << (report.passed() ? "PASS" : (report.error.empty() ? "FAIL" : "ERROR")) << '\n';
  if (!report.error.empty()) os << "error = " << report.error << '\n';
  os << "\n[measured]\n";
  for (const auto& [k, v] : report.measured) os << k << " = " << format_csv_number(v) << '\n';
  os << "\n[verdicts]\n";
  for (const auto& v : report.verdicts) os << v.id << " = " << (v.pass ? "PASS" : "FAIL") << " | " << v.detail << '\n';
  os << "\n[config]\n" << report.config;
  for (const auto& t : report.tables) write_table_csv(t, dir / (t.name + ".csv"));
}

// --- building blocks -------------------------------------------------------

std::pair<double, double> minimize_scan(const std::function<double(double)>& fn, double lo, double hi, int samples) {
  if (!(hi > lo) || samples < 3) throw DomainError("minimize_scan: need lo < hi and at least 3 samples");
  const double step = (hi - lo) / (samples - 1);
  double best_x = lo, best = kInf;
  for (int k = 0; k < samples; ++k) {
    const double x = lo + step * k;
    const double v = fn(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  const auto [x, v] = boost::math::tools::brent_find_minima(fn, std::max(lo, best_x - step),
                                                            std::min(hi, best_x + step), 30);
  return v < best ? std::make_pair(x, v) : std::make_pair(best_x, best);
}

std::pair<double, double> profile_distance_1d(const ScalarField& u, const ProfileSolution& p) {
  const Grid& g = u.grid;
  const double x_half = first_crossing(u, 0.5);
  if (!std::isfinite(x_half)) throw NumericalError("profile_distance_1d: no 1/2 crossing");
  auto sup = [&](double s) {
    double m = 0.0;
    for (Index i = 0; i < g.n1; ++i) m = std::max(m, std::abs(u.values(i, 0) - p(g.x1(i) - s)));
    return m;
  };
  return minimize_scan(sup, x_half - 2.0, x_half + 2.0, 41);
}

std::pair<double, double> self_shift_distance_1d(const ScalarField& u, const ScalarField& v, double lo, double hi) {
  const Grid& g = u.grid;
  auto sup = [&](double s) {
    double m = 0.0;
    for (Index i = 0; i < g.n1; ++i) {
      const double w = sample_cubic(v, g.x1(i) - s, 0.0, kNaN);
      if (std::isfinite(w)) m = std::max(m, std::abs(u.values(i, 0) - w));
    }
    return m;
  };
  const int samples = std::max(41, static_cast<int>((hi - lo) / (2 * g.h)));
  return minimize_scan(sup, lo, hi, samples);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw NumericalError("fit_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw NumericalError("fit_slope: degenerate abscissae");
  return sxy / sxx;
}

const ConicalFront& cached_conical_front(const Nonlinearity& f, double alpha, double h, Index n, double relax_time) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<ConicalFront>> cache;
  const std::string key = f.label() + "|" + format_csv_number(alpha) + "|" + format_csv_number(h) + "|" +
                          std::to_string(n);
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[key];
  if (!slot) {
    const auto p = solve_profile(f);
    auto cf = conical_front(f, p, alpha, conical_grid(n, h), relax_time);
    slot = std::make_unique<ConicalFront>(std::move(cf));
  }
  return *slot;
}

}  // namespace frontlab
