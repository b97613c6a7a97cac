#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frontlab/experiments.hpp"

using namespace frontlab;
namespace fs = std::filesystem;

namespace {

int print_report(const ExperimentReport& rep) {
  std::cout << rep.name << " (" << rep.version << ", " << rep.wall_seconds << " s)\n";
  for (const auto& [k, v] : rep.measured) std::cout << "  " << k << " = " << format_csv_number(v) << '\n';
  for (const auto& v : rep.verdicts) std::cout << (v.pass ? "PASS " : "FAIL ") << v.id << ": " << v.detail << '\n';
  if (!rep.error.empty()) std::cout << "ERROR " << rep.error << '\n';
  return rep.passed() ? 0 : 1;
}

std::vector<fs::path> snapshot_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".flab") out.push_back(e.path());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"front-lab: bistable reaction-diffusion fronts"};
  app.require_subcommand(1);

  std::string f_spec = "cubic(0.3)", out, profile = "smoke";

  // profile
  auto* c_profile = app.add_subcommand("profile", "planar front (c_f, phi_f) by shooting");
  double tol = 1e-10;
  c_profile->add_option("--f", f_spec, "nonlinearity, e.g. cubic(0.3)");
  c_profile->add_option("--tol", tol, "speed bisection width");
  c_profile->add_option("--out", out, "CSV with xi, phi, dphi");

  // evolve
  auto* c_evolve = app.add_subcommand("evolve", "evolve planar, step or ball data and write snapshots");
  int dim = 1;
  std::string init = "planar";
  double h = 0.1, half_width = 40.0, t_end = 20.0, every = 1.0, theta = 0.9, R = 10.0, drift = 0.0;
  c_evolve->add_option("--f", f_spec);
  c_evolve->add_option("--dim", dim)->check(CLI::Range(1, 2));
  c_evolve->add_option("--init", init)->check(CLI::IsMember({"planar", "step-lower", "step-upper", "ball"}));
  c_evolve->add_option("--spacing", h, "grid spacing h")->check(CLI::PositiveNumber);
  c_evolve->add_option("--half-width", half_width, "domain [-W, W] per axis")->check(CLI::PositiveNumber);
  c_evolve->add_option("--t-end", t_end);
  c_evolve->add_option("--snapshot-every", every);
  c_evolve->add_option("--theta", theta, "step value");
  c_evolve->add_option("--R", R, "ball radius");
  c_evolve->add_option("--drift", drift, "c in u_t = Lap u + c d_last u + f(u)");
  c_evolve->add_option("--out", out)->required();

  // speed
  auto* c_speed = app.add_subcommand("speed", "global mean speed of a snapshot series");
  std::string in_dir, kind = "inf";
  double level = 0.5;
  c_speed->add_option("--in", in_dir, "directory of .flab snapshots")->required();
  c_speed->add_option("--kind", kind)->check(CLI::IsMember({"inf", "tilde", "hausdorff"}));
  c_speed->add_option("--level", level);
  c_speed->add_option("--out", out, "CSV with tau, distance");

  // experiment shortcuts
  double eps = 0.08, alpha = std::numbers::pi / 3, n = 60.0;
  bool upper = false;
  auto* c_spread = app.add_subcommand("spreading", "spreading lower bound (or --upper: retraction bound)");
  c_spread->add_option("--f", f_spec);
  c_spread->add_option("--R", R);
  c_spread->add_option("--eps", eps);
  c_spread->add_option("--level", level);
  c_spread->add_flag("--upper", upper);
  c_spread->add_option("--profile", profile)->check(CLI::IsMember({"smoke", "full"}));
  c_spread->add_option("--out", out);

  auto* c_non = app.add_subcommand("nonstandard", "non-standard front from the rotated V");
  c_non->add_option("--f", f_spec);
  c_non->add_option("--alpha", alpha);
  c_non->add_option("--n", n);
  c_non->add_option("--t-end", t_end);
  c_non->add_option("--profile", profile)->check(CLI::IsMember({"smoke", "full"}));
  c_non->add_option("--out", out);

  double theta_step = 0.05;
  auto* c_terrace = app.add_subcommand("terrace", "two-interface terrace from upper step data");
  c_terrace->add_option("--f", f_spec);
  c_terrace->add_option("--theta-step", theta_step);
  c_terrace->add_option("--t-end", t_end);
  c_terrace->add_option("--profile", profile)->check(CLI::IsMember({"smoke", "full"}));
  c_terrace->add_option("--out", out);

  std::vector<double> sigmas, deltas, Ts;
  auto* c_super = app.add_subcommand("verify-supersolution", "grid residual of the supersolution");
  c_super->add_option("--f", f_spec);
  c_super->add_option("--alpha", alpha);
  c_super->add_option("--sigma", sigmas)->delimiter(',');
  c_super->add_option("--delta", deltas)->delimiter(',');
  c_super->add_option("--T", Ts)->delimiter(',');
  c_super->add_option("--profile", profile)->check(CLI::IsMember({"smoke", "full"}));
  c_super->add_option("--out", out);

  std::string config_path;
  auto* c_run = app.add_subcommand("run", "run an experiment config file");
  c_run->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  c_run->add_option("--out", out, "overrides out_dir");

  app.add_subcommand("list", "registered experiments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_profile->parsed()) {
      const auto f = Nonlinearity::parse(f_spec);
      const auto p = solve_profile(f, tol);
      std::printf("c_f = %.10g\nlambda = %.10g\nmu = %.10g\n", p.speed(), p.lambda(), p.mu());
      if (!out.empty()) {
        Table t{"profile", {"xi", "phi", "dphi"}, {}};
        for (std::size_t k = 0; k < p.size(); ++k) t.rows.push_back({p.xi(k), p.phi()[k], p.dphi()[k]});
        write_table_csv(t, out, "c_f=" + format_csv_number(p.speed()));
      }
      return 0;
    }

    if (c_evolve->parsed()) {
      const auto f = Nonlinearity::parse(f_spec);
      const Eigen::Index m = static_cast<Eigen::Index>(std::llround(2 * half_width / h)) + 1;
      const Grid g = dim == 1 ? Grid::line(m, h, -half_width) : Grid::plane(m, m, h, -half_width, -half_width);
      ScalarField u0;
      BoundaryPolicy bc = BoundaryPolicy::all(EdgePolicy::neumann());
      if (init == "planar") {
        u0 = planar_field(solve_profile(f), dim == 1 ? Point2(1, 0) : Point2(0, 1), 0.0, g);
      } else if (init == "step-lower") {
        u0 = step_field(theta, StepVariant::lower, g);
      } else if (init == "step-upper") {
        u0 = step_field(theta, StepVariant::upper, g);
      } else {
        u0 = ball_field(theta, 0.0, R, g);
      }
      EvolveOptions o;
      o.drift = drift;
      o.dt = cfl_limit(g, f, drift);
      o.t_end = t_end;
      o.snapshot_every = every;
      fs::create_directories(out);
      int k = 0;
      evolve_observe(u0, f, bc, o, [&](const ScalarField& u) {
        char name[32];
        std::snprintf(name, sizeof name, "u_%05d", k++);
        write_snapshot(u, fs::path(out) / (std::string(name) + ".flab"));
        if (dim == 1) write_csv(u, fs::path(out) / (std::string(name) + ".csv"));
      });
      std::printf("%d snapshots in %s\n", k, out.c_str());
      return 0;
    }

    if (c_speed->parsed()) {
      auto files = snapshot_files(in_dir);
      std::vector<InterfaceSet> ifs;
      for (const auto& p : files) {
        const auto u = read_snapshot(p);
        ifs.push_back(extract_level_set(u, level));
      }
      std::sort(ifs.begin(), ifs.end(), [](const InterfaceSet& a, const InterfaceSet& b) { return a.t < b.t; });
      const auto e = mean_speed(ifs, parse_distance_kind(kind));
      std::printf("gamma_hat = %.8g\nfit_residual = %.4g\nwindow = [%g, %g]\n", e.gamma_hat, e.fit_residual, e.t_min,
                  e.t_max);
      if (!out.empty()) {
        Table t{"distance", {"tau", "distance"}, {}};
        for (std::size_t k = 0; k < e.tau.size(); ++k) t.rows.push_back({e.tau[k], e.distance[k]});
        write_table_csv(t, out, "gamma_hat=" + format_csv_number(e.gamma_hat) + " kind=" + kind);
      }
      return 0;
    }

    ExperimentConfig cfg;
    if (c_run->parsed()) {
      cfg = load_config(config_path);
      if (!out.empty()) cfg.out_dir = out;
    } else if (c_spread->parsed()) {
      cfg.name = upper ? "exp_spreading_upper" : "exp_spreading";
      cfg.params["eps"] = eps;
      if (c_spread->count("--R")) cfg.params["R"] = R;
      if (c_spread->count("--level")) cfg.params["level"] = level;
    } else if (c_non->parsed()) {
      cfg.name = "exp_nonstandard";
      cfg.params["alpha"] = alpha;
      cfg.params["n"] = n;
      if (c_non->count("--t-end")) cfg.params["t_end"] = t_end;
      cfg.params["write_snapshots"] = 1.0;
    } else if (c_terrace->parsed()) {
      cfg.name = "exp_terrace";
      cfg.params["theta_step"] = theta_step;
      if (c_terrace->count("--t-end")) cfg.params["t_end"] = t_end;
    } else if (c_super->parsed()) {
      cfg.name = "exp_supersolution";
      cfg.params["alpha"] = alpha;
      if (!sigmas.empty()) cfg.params["sigma"] = sigmas;
      if (!deltas.empty()) cfg.params["delta"] = deltas;
      if (!Ts.empty()) cfg.params["T"] = Ts;
    } else {
      for (const auto& name : experiment_names()) {
        std::cout << name << ':';
        for (const auto& k : experiment_keys(name)) std::cout << ' ' << k;
        std::cout << '\n';
      }
      return 0;
    }
    if (!c_run->parsed()) {
      cfg.profile = profile;
      cfg.out_dir = out;
      // an explicit --f wins over the experiment's default nonlinearity
      for (auto* sub : {c_spread, c_non, c_terrace, c_super})
        if (sub->parsed() && sub->count("--f")) cfg.f = f_spec;
    }
    return print_report(run_experiment(cfg));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
