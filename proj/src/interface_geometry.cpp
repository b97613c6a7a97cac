#include "frontlab/interface_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>


#include <Eigen/Eigenvalues>

#include "frontlab/errors.hpp"

namespace frontlab {

using Eigen::Index;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Point2 lerp(const Point2& a, const Point2& b, double ua, double ub, double level) {
  const double s = (level - ua) / (ub - ua);
  return a + s * (b - a);
}

InterfaceSet extract_line(const ScalarField& u, double level) {
  InterfaceSet out;
  out.t = u.t;
  out.level = level;
  out.dim = 1;
  const Grid& g = u.grid;
  for (Index i = 0; i + 1 < g.n1; ++i) {
    const double a = u.values(i, 0), b = u.values(i + 1, 0);
    if ((a >= level) != (b >= level)) out.points.emplace_back(g.x1(i) + g.h * (level - a) / (b - a), 0.0);
  }
  return out;
}

InterfaceSet extract_plane(const ScalarField& u, double level) {
  InterfaceSet out;
  out.t = u.t;
  out.level = level;
  out.dim = 2;
  const Grid& g = u.grid;
  const Index n1 = g.n1, n2 = g.n2;
  auto above = [&](Index i, Index j) { return u.values(i, j) >= level; };
  auto node = [&](Index i, Index j) { return Point2(g.x1(i), g.x2(j)); };
  // crossing point ids of horizontal edges (i,j)-(i+1,j) and vertical edges (i,j)-(i,j+1)
  std::vector<int> hid(static_cast<std::size_t>(n1 * n2), -1), vid(static_cast<std::size_t>(n1 * n2), -1);
  auto hpoint = [&](Index i, Index j) {
    int& id = hid[static_cast<std::size_t>(j * n1 + i)];
    if (id < 0) {
      id = static_cast<int>(out.points.size());
      out.points.push_back(lerp(node(i, j), node(i + 1, j), u.values(i, j), u.values(i + 1, j), level));
    }
    return id;
  };
  auto vpoint = [&](Index i, Index j) {
    int& id = vid[static_cast<std::size_t>(j * n1 + i)];
    if (id < 0) {
      id = static_cast<int>(out.points.size());
      out.points.push_back(lerp(node(i, j), node(i, j + 1), u.values(i, j), u.values(i, j + 1), level));
    }
    return id;
  };
  for (Index j = 0; j + 1 < n2; ++j) {
    for (Index i = 0; i + 1 < n1; ++i) {
      const bool c0 = above(i, j), c1 = above(i + 1, j), c2 = above(i + 1, j + 1), c3 = above(i, j + 1);
      if (c0 == c1 && c1 == c2 && c2 == c3) continue;
      // edges: 0 bottom, 1 right, 2 top, 3 left
      auto edge = [&](int e) {
        switch (e) {
          case 0: return hpoint(i, j);
          case 1: return vpoint(i + 1, j);
          case 2: return hpoint(i, j + 1);
          default: return vpoint(i, j);
        }
      };
      const bool cut[4] = {c0 != c1, c1 != c2, c3 != c2, c0 != c3};
      const int ncut = cut[0] + cut[1] + cut[2] + cut[3];
      if (ncut == 2) {
        int e[2], k = 0;
        for (int q = 0; q < 4; ++q)
          if (cut[q]) e[k++] = q;
        out.segments.push_back({edge(e[0]), edge(e[1])});
      } else {
        const double center =
            0.25 * ((u.values(i, j) + u.values(i + 1, j + 1)) + (u.values(i + 1, j) + u.values(i, j + 1)));
        if ((center >= level) == c0) {
          // corners 0 and 2 joined through the center: cut off corners 1 and 3
          out.segments.push_back({edge(0), edge(1)});
          out.segments.push_back({edge(2), edge(3)});
        } else {
          out.segments.push_back({edge(3), edge(0)});
          out.segments.push_back({edge(1), edge(2)});
        }
      }
    }
  }
  return out;
}

void require_nonempty(const InterfaceSet& a, const InterfaceSet& b) {
  if (a.empty() || b.empty()) throw DomainError("interface distance: empty point set");
}

double perpendicular_distance(const Point2& p, const Point2& a, const Point2& b) {
  return std::sqrt(segment_distance_sq(p, a, b));
}

void douglas_peucker(const Polyline& line, std::size_t lo, std::size_t hi, double tol, std::vector<bool>& keep) {
  if (hi <= lo + 1) return;
  double worst = -1.0;
  std::size_t at = lo;
  for (std::size_t k = lo + 1; k < hi; ++k) {
    const double d = perpendicular_distance(line[k], line[lo], line[hi]);
    if (d > worst) {
      worst = d;
      at = k;
    }
  }
  if (worst > tol) {
    keep[at] = true;
    douglas_peucker(line, lo, at, tol, keep);
    douglas_peucker(line, at, hi, tol, keep);
  }
}

}  // namespace

InterfaceSet extract_level_set(const ScalarField& u, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("extract_level_set: level must lie in (0,1)");
  return u.grid.dim == 1 ? extract_line(u, level) : extract_plane(u, level);
}

InterfaceSet translated(const InterfaceSet& s, const Point2& shift) {
  InterfaceSet out = s;
  for (auto& p : out.points) p += shift;
  return out;
}

InterfaceSet clipped(const InterfaceSet& s, const std::function<bool(const Point2&)>& inside) {
  InterfaceSet out;
  out.t = s.t;
  out.level = s.level;
  out.dim = s.dim;
  std::vector<int> remap(s.points.size(), -1);
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    if (inside(s.points[k])) {
      remap[k] = static_cast<int>(out.points.size());
      out.points.push_back(s.points[k]);
    }
  }
  for (const auto& sg : s.segments)
    if (remap[sg[0]] >= 0 && remap[sg[1]] >= 0) out.segments.push_back({remap[sg[0]], remap[sg[1]]});
  return out;
}

InterfaceSet clipped(const InterfaceSet& s, const Point2& lo, const Point2& hi) {
  const bool line = s.dim == 1;
  return clipped(s, [&](const Point2& p) {
    return p[0] >= lo[0] && p[0] <= hi[0] && (line || (p[1] >= lo[1] && p[1] <= hi[1]));
  });
}

double segment_distance_sq(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return (p - a).squaredNorm();
  const double s = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  if (s == 0.0) return (p - a).squaredNorm();
  if (s == 1.0) return (p - b).squaredNorm();
  return (p - (a + s * d)).squaredNorm();
}

SegmentIndex::SegmentIndex(std::vector<std::array<Point2, 2>> segments) : segs_(std::move(segments)) {
  if (segs_.empty()) return;
  Point2 lo = segs_[0][0], hi = segs_[0][0];
  double total_len = 0.0;
  for (const auto& s : segs_) {
    for (const auto& p : s) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    total_len += (s[1] - s[0]).norm();
  }
  const Point2 ext = hi - lo;
  const double n = static_cast<double>(segs_.size());
  const double span = std::max(ext[0], ext[1]);
  double cell = std::max({std::sqrt(ext[0] * ext[1] / n), total_len / n, span / 4096.0});
  if (!(cell > 0.0)) cell = 1.0;
  cell_ = cell;
  lo_ = lo;
  nx_ = static_cast<long>(ext[0] / cell) + 1;
  ny_ = static_cast<long>(ext[1] / cell) + 1;
  buckets_.assign(static_cast<std::size_t>(nx_ * ny_), {});
  auto cx = [&](double x) { return std::clamp(static_cast<long>((x - lo_[0]) / cell_), 0L, nx_ - 1); };
  auto cy = [&](double y) { return std::clamp(static_cast<long>((y - lo_[1]) / cell_), 0L, ny_ - 1); };
  for (std::size_t k = 0; k < segs_.size(); ++k) {
    const auto& s = segs_[k];
    const long i0 = cx(std::min(s[0][0], s[1][0])), i1 = cx(std::max(s[0][0], s[1][0]));
    const long j0 = cy(std::min(s[0][1], s[1][1])), j1 = cy(std::max(s[0][1], s[1][1]));
    for (long j = j0; j <= j1; ++j)
      for (long i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j * nx_ + i)].push_back(static_cast<int>(k));
  }
}

SegmentIndex SegmentIndex::of_points(const std::vector<Point2>& points) {
  std::vector<std::array<Point2, 2>> segs;
  segs.reserve(points.size());
  for (const auto& p : points) segs.push_back({p, p});
  return SegmentIndex(std::move(segs));
}

SegmentIndex SegmentIndex::of_polylines(const std::vector<Polyline>& lines) {
  std::vector<std::array<Point2, 2>> segs;
  for (const auto& line : lines) {
    if (line.size() == 1) segs.push_back({line[0], line[0]});
    for (std::size_t k = 0; k + 1 < line.size(); ++k) segs.push_back({line[k], line[k + 1]});
  }
  return SegmentIndex(std::move(segs));
}

double SegmentIndex::nearest_sq(const Point2& p) const {
  if (segs_.empty()) throw DomainError("nearest distance to an empty set");
  const long ci = std::clamp(static_cast<long>(std::floor((p[0] - lo_[0]) / cell_)), 0L, nx_ - 1);
  const long cj = std::clamp(static_cast<long>(std::floor((p[1] - lo_[1]) / cell_)), 0L, ny_ - 1);
  double best = kInf;
  const long r_max = std::max(nx_, ny_);
  for (long r = 0; r <= r_max; ++r) {
    // cells at ring r are at least (r-1) cells away
    if (r >= 1) {
      const double bound = static_cast<double>(r - 1) * cell_;
      if (bound * bound > best) break;
    }
    for (long j = cj - r; j <= cj + r; ++j) {
      if (j < 0 || j >= ny_) continue;
      const bool edge_row = j == cj - r || j == cj + r;
      for (long i = ci - r; i <= ci + r; i += edge_row ? 1 : 2 * r) {
        if (i >= 0 && i < nx_)
          for (int k : buckets_[static_cast<std::size_t>(j * nx_ + i)])
            best = std::min(best, segment_distance_sq(p, segs_[k][0], segs_[k][1]));
        if (r == 0) break;
      }
    }
  }
  return best;
}

double SegmentIndex::nearest(const Point2& p) const { return std::sqrt(nearest_sq(p)); }

std::string to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::inf: return "inf";
    case DistanceKind::tilde: return "tilde";
    default: return "hausdorff";
  }
}

DistanceKind parse_distance_kind(const std::string& name) {
  if (name == "inf") return DistanceKind::inf;
  if (name == "tilde") return DistanceKind::tilde;
  if (name == "hausdorff") return DistanceKind::hausdorff;
  throw DomainError("unknown distance kind '" + name + "' (expected inf, tilde or hausdorff)");
}

double dist_inf(const InterfaceSet& a, const InterfaceSet& b) {
  require_nonempty(a, b);
  const InterfaceSet& small = a.size() <= b.size() ? a : b;
  const InterfaceSet& large = a.size() <= b.size() ? b : a;
  const SegmentIndex idx = SegmentIndex::of_points(large.points);
  double best = kInf;
  for (const auto& p : small.points) best = std::min(best, idx.nearest_sq(p));
  return std::sqrt(best);
}

double directed_sup(const InterfaceSet& a, const InterfaceSet& b) {
  require_nonempty(a, b);
  const SegmentIndex idx = SegmentIndex::of_points(b.points);
  double worst = 0.0;
  for (const auto& p : a.points) worst = std::max(worst, idx.nearest_sq(p));
  return std::sqrt(worst);
}

double dist_tilde(const InterfaceSet& a, const InterfaceSet& b) {
  return std::min(directed_sup(a, b), directed_sup(b, a));
}

double dist_hausdorff(const InterfaceSet& a, const InterfaceSet& b) {
  return std::max(directed_sup(a, b), directed_sup(b, a));
}

double distance(const InterfaceSet& a, const InterfaceSet& b, DistanceKind kind) {
  switch (kind) {
    case DistanceKind::inf: return dist_inf(a, b);
    case DistanceKind::tilde: return dist_tilde(a, b);
    default: return dist_hausdorff(a, b);
  }
}

SpeedEstimate mean_speed(const std::vector<InterfaceSet>& interfaces, DistanceKind kind) {
  if (interfaces.size() < 5) throw DomainError("mean_speed: need at least 5 interfaces");
  std::vector<const InterfaceSet*> sorted;
  for (const auto& s : interfaces) sorted.push_back(&s);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->t < b->t; });
  SpeedEstimate est;
  est.kind = kind;
  est.t_min = sorted.front()->t;
  est.t_max = sorted.back()->t;
  if (est.t_max - est.t_min < 10.0) throw DomainError("mean_speed: window shorter than 10 time units");
  const double anchor_end = est.t_min + (est.t_max - est.t_min) / 3.0;
  for (std::size_t a = 0; a < sorted.size() && sorted[a]->t <= anchor_end; ++a)
    for (std::size_t b = a + 1; b < sorted.size(); ++b) {
      const double tau = sorted[b]->t - sorted[a]->t;
      if (tau <= 0.0) continue;
      est.tau.push_back(tau);
      est.distance.push_back(distance(*sorted[a], *sorted[b], kind));
    }
  if (est.tau.size() < 2) throw DomainError("mean_speed: not enough snapshot pairs");
  std::vector<std::size_t> order(est.tau.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return est.tau[x] > est.tau[y]; });
  std::size_t keep = (order.size() + 1) / 2;
  keep = std::max<std::size_t>(keep, 2);
  // the fit needs two distinct τ
  while (keep < order.size() && est.tau[order[keep - 1]] == est.tau[order[0]]) ++keep;
  double st = 0, sd = 0;
  for (std::size_t k = 0; k < keep; ++k) {
    st += est.tau[order[k]];
    sd += est.distance[order[k]];
  }
  const double mt = st / static_cast<double>(keep), md = sd / static_cast<double>(keep);
  double stt = 0, std_ = 0;
  for (std::size_t k = 0; k < keep; ++k) {
    const double dt = est.tau[order[k]] - mt;
    stt += dt * dt;
    std_ += dt * (est.distance[order[k]] - md);
  }
  est.gamma_hat = stt > 0.0 ? std_ / stt : 0.0;
  est.intercept = md - est.gamma_hat * mt;
  for (std::size_t k = 0; k < keep; ++k) {
    const double tau = est.tau[order[k]];
    const double r = std::abs(est.distance[order[k]] - (est.gamma_hat * tau + est.intercept)) / tau;
    est.fit_residual = std::max(est.fit_residual, r);
  }
  if (!std::isfinite(est.gamma_hat)) throw NumericalError("mean_speed: non-finite slope");
  return est;
}

Planarity planarity(const InterfaceSet& s, const ScalarField* u) {
  Planarity out;
  if (s.empty()) throw DomainError("planarity: empty interface");
  if (s.dim == 1) {
    out.e = Point2(1.0, 0.0);
    out.xi = s.points.front()[0];
    for (const auto& p : s.points) out.residual = std::max(out.residual, std::abs(p[0] - out.xi));
  } else {
    Point2 mean = Point2::Zero();
    for (const auto& p : s.points) mean += p;
    mean /= static_cast<double>(s.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : s.points) cov += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    out.e = es.eigenvectors().col(0).normalized();
    out.xi = out.e.dot(mean);
    for (const auto& p : s.points) out.residual = std::max(out.residual, std::abs(out.e.dot(p) - out.xi));
  }
  if (u != nullptr) {
    const Grid& g = u->grid;
    long vote = 0;
    for (Index j = 0; j < g.n2; ++j)
      for (Index i = 0; i < g.n1; ++i) {
        if (!(u->values(i, j) > s.level)) continue;
        const double side = out.e.dot(Point2(g.x1(i), g.dim == 2 ? g.x2(j) : 0.0)) - out.xi;
        vote += side < 0.0 ? 1 : (side > 0.0 ? -1 : 0);
      }
    if (vote < 0) {
      out.e = -out.e;
      out.xi = -out.xi;
    }
  }
  return out;
}

std::vector<Polyline> chain_polylines(const InterfaceSet& s) {
  std::vector<Polyline> out;
  if (s.dim == 1) {
    for (const auto& p : s.points) out.push_back({p});
    return out;
  }
  const std::size_t n = s.points.size();
  std::vector<std::vector<int>> adj(n);
  for (std::size_t k = 0; k < s.segments.size(); ++k) {
    adj[s.segments[k][0]].push_back(static_cast<int>(k));
    adj[s.segments[k][1]].push_back(static_cast<int>(k));
  }
  std::vector<bool> used(s.segments.size(), false);
  auto walk = [&](int start) {
    Polyline line{s.points[start]};
    int at = start;
    for (;;) {
      int next_seg = -1;
      for (int k : adj[at])
        if (!used[k]) {
          next_seg = k;
          break;
        }
      if (next_seg < 0) break;
      used[next_seg] = true;
      at = s.segments[next_seg][0] == at ? s.segments[next_seg][1] : s.segments[next_seg][0];
      line.push_back(s.points[at]);
    }
    return line;
  };
  // open chains first, from their endpoints, then closed loops
  for (std::size_t p = 0; p < n; ++p)
    if (adj[p].size() == 1 && !used[adj[p][0]]) out.push_back(walk(static_cast<int>(p)));
  for (std::size_t p = 0; p < n; ++p)
    for (int k : adj[p])
      if (!used[k]) out.push_back(walk(static_cast<int>(p)));
  return out;
}

Polyline simplify_polyline(const Polyline& line, double tol) {
  if (line.size() <= 2) return line;
  std::vector<bool> keep(line.size(), false);
  keep.front() = keep.back() = true;
  if ((line.front() - line.back()).norm() == 0.0) {
    // closed loop: split at the point farthest from the start
    std::size_t far = 0;
    double best = -1.0;
    for (std::size_t k = 1; k + 1 < line.size(); ++k) {
      const double d = (line[k] - line[0]).norm();
      if (d > best) {
        best = d;
        far = k;
      }
    }
    keep[far] = true;
    douglas_peucker(line, 0, far, tol, keep);
    douglas_peucker(line, far, line.size() - 1, tol, keep);
  } else {
    douglas_peucker(line, 0, line.size() - 1, tol, keep);
  }
  Polyline out;
  for (std::size_t k = 0; k < line.size(); ++k)
    if (keep[k]) out.push_back(line[k]);
  return out;
}

int count_pieces(const InterfaceSet& s, double tol) {
  int pieces = 0;
  for (const auto& line : chain_polylines(s))
    if (line.size() >= 2) pieces += static_cast<int>(simplify_polyline(line, tol).size()) - 1;
  return pieces;
}

int side_by_half(const ScalarField& u, Index i, Index j) {
  const double v = u.values(i, j);
  return v > 0.5 ? 1 : (v < 0.5 ? -1 : 0);
}

TransitionTable verify_transition(const std::vector<ScalarField>& history,
                                  const std::vector<ReferenceInterface>& refs, const std::vector<double>& eps_grid,
                                  const SideRule& side) {
  TransitionTable table;
  table.eps = eps_grid;
  std::vector<double> worst(eps_grid.size(), 0.0);
  if (refs.empty()) throw DomainError("verify_transition: no reference interfaces");
  for (const auto& u : history) {
    const ReferenceInterface* ref = &refs.front();
    for (const auto& r : refs)
      if (std::abs(r.t - u.t) < std::abs(ref->t - u.t)) ref = &r;
    if (std::abs(ref->t - u.t) > 1e-6 * (1.0 + std::abs(u.t)))
      throw DomainError("verify_transition: no reference interface at t = " + std::to_string(u.t));
    const SegmentIndex idx = SegmentIndex::of_polylines(ref->lines);
    const Grid& g = u.grid;
    for (Index j = 0; j < g.n2; ++j)
      for (Index i = 0; i < g.n1; ++i) {
        const int sd = side(u, i, j);
        if (sd == 0) continue;
        const double d = idx.nearest(Point2(g.x1(i), g.dim == 2 ? g.x2(j) : 0.0));
        table.max_node_distance = std::max(table.max_node_distance, d);
        const double v = u.values(i, j);
        for (std::size_t k = 0; k < eps_grid.size(); ++k) {
          const bool ok = sd > 0 ? v >= 1.0 - eps_grid[k] : v <= eps_grid[k];
          if (!ok) worst[k] = std::max(worst[k], d);
        }
      }
  }
  table.M = worst;
  for (auto& m : table.M)
    if (m >= table.max_node_distance && table.max_node_distance > 0.0) m = kInf;
  return table;
}

}  // namespace frontlab
