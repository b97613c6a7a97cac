// Acceptance run: one PASS/FAIL line per criterion, sub-results indented
// below it. Exit status is 0 once every criterion ran to a verdict; with
// --strict it is 0 only when all of them pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "frontlab/experiments.hpp"

using namespace frontlab;

namespace {

struct Outcome {
  bool pass = false;
  bool errored = false;  // no verdict could be reached
  std::string summary;
  std::vector<std::string> lines;
};

std::string out_root;

std::string num(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

ExperimentReport run(const std::string& name, const std::string& profile,
                     const std::map<std::string, ConfigValue>& overrides = {}, const std::string& tag = "") {
  ExperimentConfig cfg = preset_config(name, profile);
  for (const auto& [k, v] : overrides) cfg.params[k] = v;
  cfg.out_dir = out_root.empty() ? "" : out_root + "/" + (tag.empty() ? name : tag);
  return run_experiment(cfg);
}

// all verdicts of a report, or the listed ones
Outcome from_report(const ExperimentReport& rep, const std::vector<std::string>& ids = {}) {
  Outcome o;
  o.pass = rep.error.empty();
  o.errored = !rep.error.empty();
  if (o.errored) o.lines.push_back("error: " + rep.error);
  std::set<std::string> wanted(ids.begin(), ids.end());
  int counted = 0;
  for (const auto& v : rep.verdicts) {
    const bool used = wanted.empty() || wanted.count(v.id);
    if (used) {
      o.pass = o.pass && v.pass;
      ++counted;
    }
    o.lines.push_back(std::string(v.pass ? "ok   " : "miss ") + v.id + (used ? "" : " (info)") + ": " + v.detail);
  }
  if (counted == 0) o.pass = false;
  o.lines.push_back("wall " + num(rep.wall_seconds, 3) + " s");
  return o;
}

// --- 1 ---------------------------------------------------------------------

Outcome c1_wave_speed() {
  Outcome o;
  o.pass = true;
  double worst_c = 0.0, worst_shape = 0.0;
  for (double th : {0.2, 0.3, 0.4}) {
    const auto p = solve_profile(Nonlinearity::cubic(th), 1e-10);
    const double exact = (1 - 2 * th) / std::sqrt(2.0);
    const double dc = std::abs(p.speed() - exact);
    // sup over samples of |φ(ξ) - 1/(1+e^{(ξ-s)/√2})|, minimised over the shift s
    auto err = [&](double s) {
      double e = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k)
        e = std::max(e, std::abs(p.phi()[k] - 1.0 / (1.0 + std::exp((p.xi(k) - s) / std::sqrt(2.0)))));
      return e;
    };
    const auto [shift, shape] = minimize_scan(err, -0.05, 0.05, 11);
    worst_c = std::max(worst_c, dc);
    worst_shape = std::max(worst_shape, shape);
    o.pass = o.pass && dc <= 1e-4 && shape <= 1e-5;
    o.lines.push_back("theta " + num(th) + ": c_f = " + num(p.speed(), 10) + ", |dc| = " + num(dc, 3) +
                      ", shape error " + num(shape, 3) + " at shift " + num(shift, 3));
  }
  o.summary = "max |dc| = " + num(worst_c, 3) + " <= 1e-4, max shape error = " + num(worst_shape, 3) + " <= 1e-5";
  return o;
}

// --- 10 --------------------------------------------------------------------

EvolveOptions options(const Grid& g, const Nonlinearity& f, double t_end, double every, double drift = 0.0) {
  EvolveOptions o;
  o.drift = drift;
  o.drift_scheme = DriftScheme::central;
  o.dt = cfl_limit(g, f, drift);
  o.t_end = t_end;
  o.snapshot_every = every;
  return o;
}

Outcome c10_properties() {
  Outcome o;
  const auto f = Nonlinearity::cubic(0.3);
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  // comparison principle
  double worst_cmp = -1e300;
  {
    const auto g = Grid::plane(32, 28, 0.5, -8.0, -7.0);
    for (int k = 0; k < 20; ++k) {
      ScalarField u(g), v(g);
      for (Eigen::Index n = 0; n < g.size(); ++n) {
        const double a = U(rng), b = U(rng);
        u.values(n) = std::min(a, b);
        v.values(n) = std::max(a, b);
      }
      BoundaryPolicy bc;
      if (k % 2) bc = BoundaryPolicy::all(EdgePolicy::profile());
      const double drift = (k % 4 == 3) ? 0.3 : 0.0;
      const auto su = evolve(u, f, bc, options(g, f, 6.0, 1.0, drift));
      const auto sv = evolve(v, f, bc, options(g, f, 6.0, 1.0, drift));
      for (std::size_t s = 0; s < su.size(); ++s) worst_cmp = std::max(worst_cmp, (su[s].values - sv[s].values).maxCoeff());
    }
  }
  const bool cmp_ok = worst_cmp <= 1e-12;
  o.lines.push_back(std::string(cmp_ok ? "ok   " : "miss ") + "comparison: 20 ordered pairs, max(u - v) = " +
                    num(worst_cmp, 3) + " <= 1e-12");

  // distance chain
  int chain_bad = 0;
  {
    std::uniform_real_distribution<double> X(-30.0, 30.0);
    std::uniform_int_distribution<int> N(1, 60);
    for (int k = 0; k < 100; ++k) {
      InterfaceSet a, b;
      for (int n = N(rng); n > 0; --n) a.points.emplace_back(X(rng), X(rng));
      for (int n = N(rng); n > 0; --n) b.points.emplace_back(X(rng), X(rng));
      const double d = dist_inf(a, b), dt = dist_tilde(a, b), dh = dist_hausdorff(a, b);
      if (!(d <= dt && dt <= dh)) ++chain_bad;
    }
  }
  const bool chain_ok = chain_bad == 0;
  o.lines.push_back(std::string(chain_ok ? "ok   " : "miss ") + "distance chain d <= d~ <= Hausdorff: " +
                    std::to_string(100 - chain_bad) + "/100 random pairs");

  // worker counts
  bool det_ok = true;
  {
    const auto g = Grid::plane(96, 80, 0.5, -24.0, -20.0);
    ScalarField u0(g);
    for (Eigen::Index n = 0; n < g.size(); ++n) u0.values(n) = U(rng);
    std::vector<std::vector<ScalarField>> runs;
    for (int w : {1, 2, 3, 5}) {
      auto opt = options(g, f, 3.0, 1.0, 0.4);
      opt.threads = w;
      runs.push_back(evolve(u0, f, BoundaryPolicy::all(EdgePolicy::profile()), opt));
    }
    for (std::size_t r = 1; r < runs.size(); ++r)
      for (std::size_t s = 0; s < runs[0].size(); ++s) det_ok = det_ok && (runs[r][s].values == runs[0][s].values).all();
  }
  o.lines.push_back(std::string(det_ok ? "ok   " : "miss ") +
                    "determinism: 1, 2, 3 and 5 workers give bit-identical snapshots");

  // equilibria
  bool eq_ok = true;
  for (const Grid& g : {Grid::line(201, 0.1, -10.0), Grid::plane(40, 36, 0.5, -10.0, -9.0)})
    for (double c : {0.0, 0.3, 1.0})
      for (double drift : {0.0, 0.5}) {
        const auto snaps = evolve(ScalarField(g, 0.0, c), f, BoundaryPolicy::all(EdgePolicy::farfield(c)),
                                  options(g, f, 10.0, 2.0, drift));
        for (const auto& s : snaps) eq_ok = eq_ok && (s.values == c).all();
      }
  o.lines.push_back(std::string(eq_ok ? "ok   " : "miss ") + "equilibria 0, theta, 1 stay exact (1D, 2D, with drift)");

  // domain doubling of the conical mean speeds
  bool dd_ok = false;
  {
    const auto small = run("exp_mean_speed", "smoke", {{"n", 384.0}, {"clip_L", 88.0}, {"t_end", 300.0}}, "doubling_384");
    const auto big = run("exp_mean_speed", "smoke", {{"n", 768.0}, {"clip_L", 88.0}, {"t_end", 300.0}}, "doubling_768");
    if (small.error.empty() && big.error.empty()) {
      dd_ok = true;
      std::string detail;
      for (const char* k : {"inf", "tilde", "hausdorff"}) {
        const double a = small.value(std::string("gamma_") + k), b = big.value(std::string("gamma_") + k);
        const double rel = std::abs(a - b) / std::abs(b);
        dd_ok = dd_ok && rel < 0.01;
        detail += std::string(" ") + k + " " + num(a) + " -> " + num(b) + " (" + num(100 * rel, 3) + "%)";
      }
      o.lines.push_back(std::string(dd_ok ? "ok   " : "miss ") + "domain doubling 384 -> 768:" + detail + ", each < 1%");
    } else {
      o.lines.push_back("miss domain doubling: " + small.error + big.error);
    }
  }

  o.pass = cmp_ok && chain_ok && det_ok && eq_ok && dd_ok;
  o.summary = "comparison, distance chain, determinism, equilibria, domain doubling";
  return o;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> body;
};

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::set<int> only;
  for (int a = 1; a < argc; ++a) {
    if (!std::strcmp(argv[a], "--strict")) strict = true;
    else if (!std::strcmp(argv[a], "--out") && a + 1 < argc) out_root = argv[++a];
    else if (!std::strcmp(argv[a], "--only") && a + 1 < argc) {
      std::stringstream ss(argv[++a]);
      std::string item;
      while (std::getline(ss, item, ',')) only.insert(std::stoi(item));
    } else {
      std::fprintf(stderr, "usage: %s [--strict] [--out dir] [--only 1,2,...]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "wave-speed oracle", c1_wave_speed},
      {2, "planar front speed", [] { return from_report(run("exp_front_speed", "full")); }},
      {3, "Fife-McLeod convergence", [] { return from_report(run("exp_fife_mcleod", "full")); }},
      {4, "spreading lower bound", [] { return from_report(run("exp_spreading", "full")); }},
      {5, "retraction upper bound", [] { return from_report(run("exp_spreading_upper", "full")); }},
      {6, "conical front mean speeds", [] { return from_report(run("exp_mean_speed", "full")); }},
      {7, "non-standard front",
       [] {
         return from_report(run("exp_nonstandard", "full"),
                            {"a_transition", "b_mean_speed", "c_long_time", "d_non_rigidity", "e_monotone"});
       }},
      {8, "supersolution residual", [] { return from_report(run("exp_supersolution", "full")); }},
      {9, "terrace obstruction", [] { return from_report(run("exp_terrace", "full")); }},
      {10, "property suites", c10_properties},
  };

  int passed = 0, ran = 0, crashed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.errored = true;
      o.summary = std::string("exception: ") + e.what();
    }
    crashed += o.errored;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ++ran;
    passed += o.pass;
    std::printf("CRITERION %2d %s  %s%s%s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                o.summary.empty() ? "" : ": ", o.summary.c_str(), secs);
    for (const auto& l : o.lines) std::printf("      %s\n", l.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%d criteria PASS\n", passed, ran);
  if (crashed) return 1;
  return strict && passed != ran ? 1 : 0;
}
