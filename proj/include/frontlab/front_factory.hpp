#pragma once

#include <string>
#include <vector>

#include "frontlab/field.hpp"
#include "frontlab/interface_geometry.hpp"
#include "frontlab/nonlinearity.hpp"
#include "frontlab/rd_engine.hpp"
#include "frontlab/wave_profile.hpp"

namespace frontlab {

/// φ_f(x·e + xi) at the nodes. On 1D grids only e[0] is used.
ScalarField planar_field(const ProfileSolution& p, const Point2& e, double xi, const Grid& g);

enum class StepVariant { lower, upper };

/// lower: ϑ for x <= 0, 0 for x > 0. upper: 1 for x <= 0, ϑ for x > 0.
/// The jump sits between the node nearest 0 and its right neighbour.
ScalarField step_field(double theta, StepVariant variant, const Grid& g);

/// `inside` on |x| < R, `outside` elsewhere.
ScalarField ball_field(double inside, double outside, double R, const Grid& g);

/// Steady V-shaped front φ(x1, x2) of Δφ + cφ_{x2} + f(φ) = 0, c = c_f/sin α,
/// with level sets asymptotic to x2 = |x1| cot α.
struct ConicalFront {
  double alpha = 0.0;
  double speed = 0.0;  // c
  ProfileSolution planar;
  ScalarField field;          // comoving steady state (central drift)
  std::vector<Point2> psi;    // 1/2-level ordinate per column, (x1, x2)
  double relaxed_for = 0.0;   // time spent relaxing
  double last_change = 0.0;   // ||u(t+1) - u(t)||_inf at stop

  /// max(φ_f(x1 cos α + x2 sin α), φ_f(-x1 cos α + x2 sin α)).
  double asymptote(double x1, double x2) const;
  /// Bicubic inside the computed window, asymptote outside.
  double operator()(double x1, double x2) const;
  /// Slope of ψ fitted on the outer 20% of columns (x1 > 0 side).
  double edge_slope() const;
};

struct ConicalOptions {
  double tol = 1e-6;       // stop when the change over one time unit drops below
  double dt = 0.0;         // 0: CFL limit
  int threads = 0;
};

/// Relaxes max(planar+, planar-) in the frame moving up at c = c_f/sin α with
/// frozen Dirichlet traces. Throws NumericalError with the last change when
/// relax_time runs out.
ConicalFront conical_front(const Nonlinearity& f, const ProfileSolution& p, double alpha, const Grid& g,
                           double relax_time, const ConicalOptions& opt = {});

/// Grid centred on x1 = 0 with the V apex about a third of the way up.
Grid conical_grid(Eigen::Index n, double h);

/// v̲(t, x1, x2) = φ(x1 sin α - x2 cos α, x1 cos α + x2 sin α - ct).
double rotated_value(const ConicalFront& cf, double t, double x1, double x2);
ScalarField rotated_v(const ConicalFront& cf, double t, const Grid& g);

/// Lower planar envelope max(φ_f(-|x1| sin 2α - x2 cos 2α - c_f t), φ_f(x2 - c_f t)).
double planar_envelope(const ProfileSolution& p, double alpha, double t, double x1, double x2);

/// Vertices of Γ_t: for t <= 0 the two half-lines from P^l_t and P^r_t joined
/// by [P^l_t, P^r_t]; for t > 0 the V x2 = |tan 2α| |x1| + c_f t/|cos 2α|.
/// Arms are cut at length `extent` from their corner.
Polyline reference_polyline(double t, double alpha, double cf, double extent);

/// Same set resampled every `spacing` along the polyline.
InterfaceSet reference_interfaces(double t, double alpha, double cf, double extent = 100.0, double spacing = 0.1);

struct SupersolutionReport {
  double sigma = 0.0, delta = 0.0, T = 0.0;
  double h = 0.0, dt = 0.0;
  double min_interior = 0.0;  // min of N̄ over interior nodes with v̄ < 1
  double min_boundary = 0.0;  // min of v̄_{x1} on x1 = 0 where v̄ < 1
  Point2 argmin_interior = Point2::Zero();
  double t_interior = 0.0;
  Point2 argmin_boundary = Point2::Zero();
  double t_boundary = 0.0;
  double tol = 0.0;  // 10 (h² + dt)
  bool pass = false;
};

struct SupersolutionWindow {
  double x1_min = -40.0;       // right edge is x1 = 0
  double below = 25.0;         // x2 range relative to c_f t
  double above = 45.0;
  double t_start = -40.0;
  double sample_every = 0.5;   // spacing of checked time levels
};

/// v̄(t,x) = min(v̲(t + σ e^{δt}, x) + δ e^{δ(x1 + t)}, 1) on {x1 <= 0}:
/// N̄ = v̄_t - Δv̄ - f(v̄) by centred differences with steps h and dt, and
/// the one-sided second-order v̄_{x1} on x1 = 0.
SupersolutionReport check_supersolution(const ConicalFront& cf, const Nonlinearity& f, double sigma, double delta,
                                        double T, double h, double dt, const SupersolutionWindow& w = {});

/// v̄ itself.
double supersolution_value(const ConicalFront& cf, double sigma, double delta, double t, double x1, double x2);

struct NonstandardOptions {
  double half_width = 40.0;   // window x1 in [-W, W]
  double height = 100.0;      // window height
  double h = 0.25;
  double dt = 0.0;            // 0: CFL limit
  double snapshot_every = 2.5;  // must divide recenter_every
  double recenter_every = 5.0;
  int threads = 0;
};

struct NonstandardRun {
  double alpha = 0.0;
  double n_start = 0.0;
  double cf = 0.0;
  std::vector<ScalarField> snapshots;  // lab coordinates, t from -n to t_end
  std::vector<double> shifts;          // cumulative vertical window shift per snapshot
  std::vector<ReferenceInterface> refs;
};

/// u(-n, x) = v̲(-n, -|x1|, x2) evolved on the full plane (the even extension
/// of the half-plane Neumann problem). Side and top edges carry
/// max(planar envelope, v̲(t, -|x1|, x2)); the bottom row is frozen per
/// segment. The window follows the median of the 1/2-level set in whole rows.
/// Needs the kink of u(-n) at least 5 units left of x1 = 0.
NonstandardRun build_nonstandard(const Nonlinearity& f, const ConicalFront& cf, double n_start, double t_end,
                                 const NonstandardOptions& opt = {});

}  // namespace frontlab
