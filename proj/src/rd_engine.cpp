#include "frontlab/rd_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "frontlab/errors.hpp"
#include "frontlab/parallel.hpp"

namespace frontlab {

namespace {

using Eigen::Index;

template <int N>
struct FactoredReaction {
  double lead;
  std::array<double, N> roots;
  double operator()(double s) const {
    s = std::min(std::max(s, 0.0), 1.0);
    double acc = lead;
    for (int k = 0; k < N; ++k) acc *= s - roots[k];
    return acc;
  }
};

struct GenericReaction {
  const Nonlinearity* f;
  double operator()(double s) const { return (*f)(s); }
};

struct StepContext {
  const double* u = nullptr;
  double* out = nullptr;
  Index n1 = 0, n2 = 1;
  double inv_h2 = 0.0;
  double dt = 0.0;
  double w_plus = 0.0;   // drift weight toward +x_last
  double w_minus = 0.0;  // drift weight toward -x_last
  bool clamp = true;
  std::array<bool, 4> fixed{};  // Dirichlet edges: nodes not stepped
};

template <typename R>
void step_rows_2d(const StepContext& cx, const R& react, Index j0, Index j1) {
  const Index n1 = cx.n1, n2 = cx.n2;
  const double inv_h2 = cx.inv_h2, dt = cx.dt, wp = cx.w_plus, wm = cx.w_minus;
  auto node = [&](double c, double w, double e, double s, double n) {
    const double lap = ((w + e) + (s + n) - 4.0 * c) * inv_h2;
    const double v = c + dt * (lap + wp * (n - c) + wm * (s - c) + react(c));
    return cx.clamp ? std::min(std::max(v, 0.0), 1.0) : v;
  };
  const Index i_begin = cx.fixed[Edge::left] ? 1 : 0;
  const Index i_end = cx.fixed[Edge::right] ? n1 - 1 : n1;
  for (Index j = j0; j < j1; ++j) {
    if ((j == 0 && cx.fixed[Edge::bottom]) || (j == n2 - 1 && cx.fixed[Edge::top])) continue;
    const Index js = j == 0 ? 1 : j - 1;
    const Index jn = j == n2 - 1 ? n2 - 2 : j + 1;
    const double* r = cx.u + j * n1;
    const double* rs = cx.u + js * n1;
    const double* rn = cx.u + jn * n1;
    double* o = cx.out + j * n1;
    if (i_begin == 0) o[0] = node(r[0], r[1], r[1], rs[0], rn[0]);
    for (Index i = 1; i < n1 - 1; ++i) o[i] = node(r[i], r[i - 1], r[i + 1], rs[i], rn[i]);
    if (i_end == n1) o[n1 - 1] = node(r[n1 - 1], r[n1 - 2], r[n1 - 2], rs[n1 - 1], rn[n1 - 1]);
  }
}

template <typename R>
void step_line(const StepContext& cx, const R& react) {
  const Index n = cx.n1;
  const double inv_h2 = cx.inv_h2, dt = cx.dt, wp = cx.w_plus, wm = cx.w_minus;
  auto node = [&](double c, double w, double e) {
    const double lap = (w + e - 2.0 * c) * inv_h2;
    const double v = c + dt * (lap + wp * (e - c) + wm * (w - c) + react(c));
    return cx.clamp ? std::min(std::max(v, 0.0), 1.0) : v;
  };
  const double* u = cx.u;
  double* o = cx.out;
  if (!cx.fixed[Edge::left]) o[0] = node(u[0], u[1], u[1]);
  for (Index i = 1; i < n - 1; ++i) o[i] = node(u[i], u[i - 1], u[i + 1]);
  if (!cx.fixed[Edge::right]) o[n - 1] = node(u[n - 1], u[n - 2], u[n - 2]);
}

// Values of one Dirichlet edge.
struct EdgeState {
  EdgePolicy policy;
  Eigen::ArrayXd frozen;
};

bool is_dirichlet(const EdgePolicy& p) { return p.kind != EdgeKind::neumann_zero; }

Index edge_length(const Grid& g, int e) { return e < 2 ? g.n2 : g.n1; }

// Node (i, j) of the k-th point along edge e.
std::pair<Index, Index> edge_node(const Grid& g, int e, Index k) {
  switch (e) {
    case Edge::left: return {0, k};
    case Edge::right: return {g.n1 - 1, k};
    case Edge::bottom: return {k, 0};
    default: return {k, g.n2 - 1};
  }
}

class Boundary {
 public:
  Boundary(const BoundaryPolicy& bc, const ScalarField& u0) : grid_(u0.grid) {
    const int edges = grid_.dim == 1 ? 2 : 4;
    for (int e = 0; e < edges; ++e) {
      const EdgePolicy& p = bc.edges[e];
      fixed_[e] = is_dirichlet(p);
      if (!fixed_[e]) continue;
      EdgeState st{p, {}};
      if (p.kind == EdgeKind::dirichlet_profile && !p.trace) {
        st.frozen.resize(edge_length(grid_, e));
        for (Index k = 0; k < st.frozen.size(); ++k) {
          auto [i, j] = edge_node(grid_, e, k);
          st.frozen[k] = u0.values(i, j);
        }
      }
      states_[e] = std::move(st);
    }
  }

  const std::array<bool, 4>& fixed() const { return fixed_; }

  void apply(ScalarField& u, double t) const {
    for (int e = 0; e < 4; ++e) {
      if (!fixed_[e]) continue;
      const EdgeState& st = states_[e];
      const Index len = edge_length(grid_, e);
      for (Index k = 0; k < len; ++k) {
        auto [i, j] = edge_node(grid_, e, k);
        double v;
        if (st.policy.kind == EdgeKind::dirichlet_farfield) v = st.policy.limit;
        else if (st.policy.trace) v = st.policy.trace(t, grid_.x1(i), grid_.dim == 2 ? grid_.x2(j) : 0.0);
        else v = st.frozen[k];
        u.values(i, j) = v;
      }
    }
  }

 private:
  Grid grid_;
  std::array<bool, 4> fixed_{};
  std::array<EdgeState, 4> states_;
};

void check_finite(const ScalarField& u) {
  const Grid& g = u.grid;
  for (Index j = 0; j < g.n2; ++j)
    for (Index i = 0; i < g.n1; ++i)
      if (!std::isfinite(u.values(i, j))) {
        std::ostringstream os;
        os << "non-finite value at node (" << i << ", " << j << "), x = (" << g.x1(i);
        if (g.dim == 2) os << ", " << g.x2(j);
        os << "), t = " << u.t;
        throw NumericalError(os.str());
      }
}

template <typename R>
void run(const ScalarField& u0, const R& react, const Boundary& boundary, const EvolveOptions& opts,
         const SnapshotObserver& observer) {
  const Grid& g = u0.grid;
  std::vector<double> targets;
  if (opts.snapshot_every > 0.0) {
    for (long k = 1;; ++k) {
      const double tk = u0.t + static_cast<double>(k) * opts.snapshot_every;
      if (tk >= opts.t_end - 1e-9 * opts.snapshot_every) break;
      targets.push_back(tk);
    }
  }
  if (opts.t_end > u0.t) targets.push_back(opts.t_end);

  ScalarField cur = u0;
  boundary.apply(cur, cur.t);
  check_finite(cur);
  observer(cur);
  ScalarField next = cur;

  StepContext cx;
  cx.n1 = g.n1;
  cx.n2 = g.n2;
  cx.inv_h2 = 1.0 / (g.h * g.h);
  if (opts.drift_scheme == DriftScheme::central) {
    if (g.h * std::abs(opts.drift) > 2.0)
      throw DomainError("evolve: central drift needs h |c| <= 2 to stay monotone");
    cx.w_plus = 0.5 * opts.drift / g.h;
    cx.w_minus = -cx.w_plus;
  } else {
    cx.w_plus = std::max(opts.drift, 0.0) / g.h;
    cx.w_minus = std::max(-opts.drift, 0.0) / g.h;
  }
  cx.clamp = opts.clamp;
  cx.fixed = boundary.fixed();

  const int workers = g.dim == 2 ? std::min<int>(worker_count(opts.threads), static_cast<int>(g.n2)) : 1;
  RowWorkers pool(workers);

  for (double target : targets) {
    const double t_start = cur.t;
    const long steps = std::max(1L, static_cast<long>(std::ceil((target - t_start) / opts.dt - 1e-9)));
    cx.dt = (target - t_start) / static_cast<double>(steps);
    const std::function<void(long, long)> task = [&](long j0, long j1) { step_rows_2d(cx, react, j0, j1); };
    for (long m = 0; m < steps; ++m) {
      cx.u = cur.values.data();
      cx.out = next.values.data();
      if (g.dim == 1) step_line(cx, react);
      else pool.for_blocks(g.n2, task);
      next.t = m + 1 == steps ? target : t_start + static_cast<double>(m + 1) * cx.dt;
      boundary.apply(next, next.t);
      std::swap(cur.values, next.values);
      cur.t = next.t;
    }
    check_finite(cur);
    observer(cur);
  }
}

}  // namespace

double cfl_limit(double h, int dim, double max_abs_fprime, double drift) {
  if (!(h > 0.0)) throw DomainError("cfl_limit: h must be positive");
  return 0.9 * h * h / (2.0 * dim + h * std::abs(drift) + h * h * max_abs_fprime);
}

int worker_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* cap = std::getenv("FRONTLAB_THREADS")) {
    const int c = std::atoi(cap);
    if (c > 0) n = std::min(n, c);
  }
  return n;
}

void evolve_observe(const ScalarField& u0, const Nonlinearity& f, const BoundaryPolicy& bc, const EvolveOptions& opts,
                    const SnapshotObserver& observer) {
  const Grid& g = u0.grid;
  if (g.n1 < 3 || (g.dim == 2 && g.n2 < 3)) throw DomainError("evolve: grid needs at least 3 nodes per axis");
  if (!(opts.dt > 0.0)) throw DomainError("evolve: dt must be positive");
  if (opts.t_end < u0.t) throw DomainError("evolve: t_end lies before the initial time");
  const double limit = cfl_limit(g, f, opts.drift);
  if (opts.dt > limit) {
    std::ostringstream os;
    os << "CFL violation: dt = " << opts.dt << " exceeds the stable limit " << limit << " for h = " << g.h;
    throw DomainError(os.str());
  }
  const Boundary boundary(bc, u0);
  const auto& roots = f.roots();
  if (roots.size() == 3) {
    run(u0, FactoredReaction<3>{f.leading(), {roots[0], roots[1], roots[2]}}, boundary, opts, observer);
  } else if (roots.size() == 5) {
    run(u0, FactoredReaction<5>{f.leading(), {roots[0], roots[1], roots[2], roots[3], roots[4]}}, boundary, opts,
        observer);
  } else {
    run(u0, GenericReaction{&f}, boundary, opts, observer);
  }
}

std::vector<ScalarField> evolve(const ScalarField& u0, const Nonlinearity& f, const BoundaryPolicy& bc,
                                const EvolveOptions& opts) {
  std::vector<ScalarField> out;
  evolve_observe(u0, f, bc, opts, [&](const ScalarField& s) { out.push_back(s); });
  return out;
}

std::vector<ScalarField> evolve_half_plane(const ScalarField& u0, const Nonlinearity& f, const EvolveOptions& opts,
                                           BoundaryPolicy others) {
  if (u0.grid.dim != 2) throw DomainError("evolve_half_plane: needs a 2D field");
  if (std::abs(u0.grid.x1_max()) > 1e-6 * u0.grid.h)
    throw DomainError("evolve_half_plane: the right edge must be the line x1 = 0");
  others.set(Edge::right, EdgePolicy::neumann());
  return evolve(u0, f, others, opts);
}

ScalarField pde_residual(const ScalarField& prev, const ScalarField& cur, const ScalarField& next,
                         const Nonlinearity& f, double drift) {
  if (!prev.grid.same_as(cur.grid) || !next.grid.same_as(cur.grid))
    throw DomainError("pde_residual: snapshots live on different grids");
  const double dt1 = cur.t - prev.t, dt2 = next.t - cur.t;
  if (!(dt1 > 0.0) || std::abs(dt1 - dt2) > 1e-9 * std::max(1.0, std::abs(dt1)))
    throw DomainError("pde_residual: snapshots must be equally spaced in time");
  const Grid& g = cur.grid;
  const double inv_h2 = 1.0 / (g.h * g.h), inv_2h = 0.5 / g.h, inv_2dt = 1.0 / (dt1 + dt2);
  ScalarField out(g, cur.t, 0.0);
  const auto& u = cur.values;
  if (g.dim == 1) {
    for (Index i = 1; i + 1 < g.n1; ++i) {
      const double ut = (next.values(i, 0) - prev.values(i, 0)) * inv_2dt;
      const double lap = (u(i - 1, 0) + u(i + 1, 0) - 2.0 * u(i, 0)) * inv_h2;
      const double dx = (u(i + 1, 0) - u(i - 1, 0)) * inv_2h;
      out.values(i, 0) = ut - lap - drift * dx - f(u(i, 0));
    }
    return out;
  }
  for (Index j = 1; j + 1 < g.n2; ++j)
    for (Index i = 1; i + 1 < g.n1; ++i) {
      const double ut = (next.values(i, j) - prev.values(i, j)) * inv_2dt;
      const double lap = ((u(i - 1, j) + u(i + 1, j)) + (u(i, j - 1) + u(i, j + 1)) - 4.0 * u(i, j)) * inv_h2;
      const double d2 = (u(i, j + 1) - u(i, j - 1)) * inv_2h;
      out.values(i, j) = ut - lap - drift * d2 - f(u(i, j));
    }
  return out;
}

}  // namespace frontlab
