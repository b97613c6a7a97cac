#pragma once

#include <array>
#include <functional>
#include <vector>

#include "frontlab/field.hpp"
#include "frontlab/nonlinearity.hpp"

namespace frontlab {

enum class EdgeKind { neumann_zero, dirichlet_farfield, dirichlet_profile };

/// Boundary value as a function of (t, x1, x2).
using TraceFn = std::function<double(double, double, double)>;

struct EdgePolicy {
  EdgeKind kind = EdgeKind::neumann_zero;
  double limit = 0.0;
  TraceFn trace;  // dirichlet_profile only; empty means "frozen from u0"

  static EdgePolicy neumann() { return {}; }
  static EdgePolicy farfield(double limit) { return {EdgeKind::dirichlet_farfield, limit, {}}; }
  static EdgePolicy profile(TraceFn trace = {}) { return {EdgeKind::dirichlet_profile, 0.0, std::move(trace)}; }
};

enum Edge : int { left = 0, right = 1, bottom = 2, top = 3 };

/// One policy per edge. In 1D only left/right are consulted.
struct BoundaryPolicy {
  std::array<EdgePolicy, 4> edges;

  static BoundaryPolicy all(const EdgePolicy& p) { return {{p, p, p, p}}; }
  BoundaryPolicy& set(Edge e, EdgePolicy p) {
    edges[e] = std::move(p);
    return *this;
  }
  const EdgePolicy& operator[](Edge e) const { return edges[e]; }
};

/// upwind: one-sided by sign(c). central: (u_{j+1} - u_{j-1}) / 2h, still
/// monotone while h |c| <= 2 and free of the O(h |c|) artificial diffusion.
enum class DriftScheme { upwind, central };

struct EvolveOptions {
  double dt = 0.0;
  double t_end = 0.0;           // absolute time
  double drift = 0.0;           // c in u_t = Δu + c ∂_{x_last} u + f(u)
  DriftScheme drift_scheme = DriftScheme::upwind;
  double snapshot_every = 0.0;  // <= 0: initial and final state only
  bool clamp = true;
  int threads = 0;              // 0: hardware concurrency, capped by FRONTLAB_THREADS
};

/// Largest stable (and monotone) explicit Euler step:
/// 0.9 h² / (2 dim + h |drift| + h² max|f'|).
double cfl_limit(double h, int dim, double max_abs_fprime, double drift = 0.0);
inline double cfl_limit(const Grid& g, const Nonlinearity& f, double drift = 0.0) {
  return cfl_limit(g.h, g.dim, f.max_abs_deriv(), drift);
}

/// Worker count after applying the FRONTLAB_THREADS cap.
int worker_count(int requested);

using SnapshotObserver = std::function<void(const ScalarField&)>;

/// Explicit Euler for u_t = Δ_h u + c D_2 u + f(u) with the 3-point/5-point
/// Laplacian and an upwind drift difference. The observer sees the initial
/// state, every snapshot time and the final state. Results do not depend on
/// the worker count.
void evolve_observe(const ScalarField& u0, const Nonlinearity& f, const BoundaryPolicy& bc, const EvolveOptions& opts,
                    const SnapshotObserver& observer);

std::vector<ScalarField> evolve(const ScalarField& u0, const Nonlinearity& f, const BoundaryPolicy& bc,
                                const EvolveOptions& opts);

/// Half-plane {x1 <= 0} problem: the right edge must be the line x1 = 0 and
/// carries the zero-flux condition; the other edges follow `others`.
std::vector<ScalarField> evolve_half_plane(const ScalarField& u0, const Nonlinearity& f, const EvolveOptions& opts,
                                           BoundaryPolicy others = BoundaryPolicy::all(EdgePolicy::neumann()));

/// u_t - Δu - c ∂_2 u - f(u) at interior nodes of `cur` (centered in time
/// and space); boundary nodes are set to zero.
ScalarField pde_residual(const ScalarField& prev, const ScalarField& cur, const ScalarField& next,
                         const Nonlinearity& f, double drift = 0.0);

}  // namespace frontlab
