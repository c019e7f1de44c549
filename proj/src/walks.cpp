#include "perclab/walks.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "perclab/rng.hpp"

namespace perclab {

namespace {

Quad quad_abs(const Quad& q) { return q.sign() < 0 ? -q : q; }

void require_interior(const Window& win, int32_t pos, const char* who) {
  if (pos < 0) throw std::invalid_argument(std::string(who) + ": vertex not in window");
  if (!win.interior(pos))
    throw std::invalid_argument(std::string(who) +
                                ": vertex lies on the window boundary");
}

// sqrt(m(x)m(y)) in the family's quadratic field.
Quad edge_conductance_exact(const GraphFamily& g, const VertexRef& x,
                            const VertexRef& y) {
  return quad_sqrt(m_value(g, x) * m_value(g, y), g.quad_D());
}

// Open-edge move mass at v for the given kind (self-loop is the remainder).
Quad move_mass(KernelKind kind, const GraphFamily& g, const VertexRef& v,
               const VertexRef& y, const Quad& denom) {
  switch (kind) {
    case KernelKind::sqrt_biased:
      return edge_conductance_exact(g, v, y) / denom;
    case KernelKind::delayed_srw:
    case KernelKind::plain_srw:
      return Quad(Rat(1)) / denom;
  }
  throw std::logic_error("move_mass: unknown kernel kind");
}

Quad kernel_denominator(KernelKind kind, const GraphFamily& g, const VertexRef& v) {
  if (kind == KernelKind::sqrt_biased) return stationary_weight(g, v, kind);
  return Quad(Rat(static_cast<long long>(neighbors(g, v).size())));
}

KernelDist kernel_dist_impl(KernelKind kind, const Window& win, const Config& cfg,
                            const VertexRef& v) {
  const int32_t pos = win.index_of(v);
  require_interior(win, pos, "kernel");
  if (kind != KernelKind::plain_srw && cfg.open.size() != win.edge_count())
    throw std::invalid_argument("kernel: config does not match the window");

  const GraphFamily& g = *win.family;
  const Quad denom = kernel_denominator(kind, g, v);

  KernelDist dist;
  dist.at = pos;
  Quad moved(Rat(0));
  const auto lo = static_cast<size_t>(win.adj_offset[static_cast<size_t>(pos)]);
  const auto hi = static_cast<size_t>(win.adj_offset[static_cast<size_t>(pos) + 1]);
  for (size_t k = lo; k < hi; ++k) {
    const auto [nb, eid] = win.adj[k];
    if (kind != KernelKind::plain_srw && !cfg.open[static_cast<size_t>(eid)]) continue;
    KernelMove mv;
    mv.to = nb;
    mv.edge = eid;
    mv.prob = move_mass(kind, g, v, win.vertices[static_cast<size_t>(nb)], denom);
    moved += mv.prob;
    dist.moves.push_back(std::move(mv));
  }
  dist.self = Quad(Rat(1)) - moved;
  return dist;
}

}  // namespace

std::string kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::sqrt_biased: return "sqrt_biased";
    case KernelKind::delayed_srw: return "delayed_srw";
    case KernelKind::plain_srw: return "plain_srw";
  }
  return "?";
}

Quad KernelDist::total() const {
  Quad t = self;
  for (const auto& mv : moves) t += mv.prob;
  return t;
}

Quad stationary_weight(const GraphFamily& g, const VertexRef& v, KernelKind kind) {
  if (kind != KernelKind::sqrt_biased)
    return Quad(Rat(static_cast<long long>(neighbors(g, v).size())));
  Quad pi(Rat(0));
  for (const auto& z : neighbors(g, v)) pi += edge_conductance_exact(g, v, z);
  return pi;
}

KernelDist biased_kernel(const Window& win, const Config& cfg, const VertexRef& v) {
  return kernel_dist_impl(KernelKind::sqrt_biased, win, cfg, v);
}

KernelDist reversed_kernel(const Window& win, const Config& cfg, const VertexRef& v) {
  const int32_t pos = win.index_of(v);
  require_interior(win, pos, "reversed_kernel");
  if (cfg.open.size() != win.edge_count())
    throw std::invalid_argument("reversed_kernel: config does not match the window");

  const GraphFamily& g = *win.family;
  const Quad pi_x = stationary_weight(g, v, KernelKind::sqrt_biased);

  KernelDist dist;
  dist.at = pos;
  Quad moved(Rat(0));
  const auto lo = static_cast<size_t>(win.adj_offset[static_cast<size_t>(pos)]);
  const auto hi = static_cast<size_t>(win.adj_offset[static_cast<size_t>(pos) + 1]);
  for (size_t k = lo; k < hi; ++k) {
    const auto [nb, eid] = win.adj[k];
    if (!cfg.open[static_cast<size_t>(eid)]) continue;
    const VertexRef& y = win.vertices[static_cast<size_t>(nb)];
    const Quad pi_y = stationary_weight(g, y, KernelKind::sqrt_biased);
    // q(y, x) literally: y's own denominator is pi(y).
    const Quad q_yx = edge_conductance_exact(g, y, v) / pi_y;
    KernelMove mv;
    mv.to = nb;
    mv.edge = eid;
    mv.prob = pi_y / pi_x * q_yx;
    moved += mv.prob;
    dist.moves.push_back(std::move(mv));
  }
  dist.self = Quad(Rat(1)) - moved;
  return dist;
}

KernelDist kernel_dist(KernelKind kind, const Window& win, const Config& cfg,
                       const VertexRef& v) {
  return kernel_dist_impl(kind, win, cfg, v);
}

StationarityReport stationarity_check(const Window& win, const Config& cfg,
                                      KernelKind kind) {
  if (kind != KernelKind::plain_srw && cfg.open.size() != win.edge_count())
    throw std::invalid_argument("stationarity_check: config does not match the window");
  const GraphFamily& g = *win.family;
  const size_t n = win.vertex_count();

  std::vector<Quad> pi(n);
  std::vector<uint8_t> interior(n, 0);
  size_t count = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!win.interior(static_cast<int32_t>(i))) continue;
    interior[i] = 1;
    pi[i] = stationary_weight(g, win.vertices[i], kind);
    ++count;
  }

  // q restricted to the interior: edges to boundary vertices act as closed,
  // their mass joins the self-loop; denominators stay those of the full graph.
  auto open_interior = [&](size_t k, int32_t from) {
    const auto [nb, eid] = win.adj[k];
    (void)from;
    if (!interior[static_cast<size_t>(nb)]) return false;
    if (kind == KernelKind::plain_srw) return true;
    return cfg.open[static_cast<size_t>(eid)] != 0;
  };
  auto q_move = [&](int32_t from, int32_t to) {
    return move_mass(kind, g, win.vertices[static_cast<size_t>(from)],
                     win.vertices[static_cast<size_t>(to)],
                     kernel_denominator(kind, g, win.vertices[static_cast<size_t>(from)]));
  };

  StationarityReport rep;
  rep.interior_vertices = count;
  rep.max_stationarity_dev = Quad(Rat(0));
  rep.max_detailed_balance_dev = Quad(Rat(0));
  for (size_t y = 0; y < n; ++y) {
    if (!interior[y]) continue;
    const auto lo = static_cast<size_t>(win.adj_offset[y]);
    const auto hi = static_cast<size_t>(win.adj_offset[y + 1]);
    // Flow into y from its interior neighbors plus its own self-loop.
    Quad inflow(Rat(0));
    Quad self_mass(Rat(1));
    for (size_t k = lo; k < hi; ++k) {
      if (!open_interior(k, static_cast<int32_t>(y))) continue;
      const auto [nb, eid] = win.adj[k];
      (void)eid;
      const Quad q_xy = q_move(nb, static_cast<int32_t>(y));
      inflow += pi[static_cast<size_t>(nb)] * q_xy;
      const Quad q_yx = q_move(static_cast<int32_t>(y), nb);
      self_mass -= q_yx;
      const Quad db = quad_abs(pi[y] * q_yx - pi[static_cast<size_t>(nb)] * q_xy);
      if ((db - rep.max_detailed_balance_dev).sign() > 0)
        rep.max_detailed_balance_dev = db;
    }
    inflow += pi[y] * self_mass;
    const Quad dev = quad_abs(inflow - pi[y]);
    if ((dev - rep.max_stationarity_dev).sign() > 0) rep.max_stationarity_dev = dev;
  }
  return rep;
}

int32_t Trajectory::at(int64_t k) const {
  if (k < lo() || k > hi())
    throw std::out_of_range("trajectory: index out of range");
  if (k == 0) return start;
  if (k > 0) return forward[static_cast<size_t>(k - 1)];
  return backward[static_cast<size_t>(-k - 1)];
}

Trajectory simulate_two_sided(const Window& win, const Config& cfg,
                              const VertexRef& start, int64_t steps_forward,
                              int64_t steps_backward, uint64_t seed,
                              KernelKind kind) {
  const int32_t pos0 = win.index_of(start);
  require_interior(win, pos0, "simulate_two_sided");
  if (steps_forward < 0 || steps_backward < 0)
    throw std::invalid_argument("simulate_two_sided: negative step count");

  // Per-vertex compiled sampler: cumulative double weights over the exact
  // moves; the final slot is the self-loop.
  struct Compiled {
    std::vector<double> cum;
    std::vector<int32_t> to;
  };
  std::unordered_map<int32_t, Compiled> cache;
  auto compiled_at = [&](int32_t pos, bool reversed) -> const Compiled& {
    auto it = cache.find(pos);
    if (it != cache.end()) return it->second;
    const VertexRef& v = win.vertices[static_cast<size_t>(pos)];
    const KernelDist dist = reversed && kind == KernelKind::sqrt_biased
                                ? reversed_kernel(win, cfg, v)
                                : kernel_dist_impl(kind, win, cfg, v);
    Compiled c;
    double acc = 0;
    for (const auto& mv : dist.moves) {
      acc += mv.prob.to_double();
      c.cum.push_back(acc);
      c.to.push_back(mv.to);
    }
    c.cum.push_back(1.0);
    c.to.push_back(pos);
    return cache.emplace(pos, std::move(c)).first->second;
  };
  // The reversed kernel is checked exactly equal to the forward one in tests;
  // compiling it separately would duplicate cache entries, so both directions
  // share one table per kind (for sqrt_biased they are the same map anyway).

  Trajectory traj;
  traj.start = pos0;
  traj.seed = seed;

  auto run_side = [&](int64_t steps, rng::Stream stream, bool reversed,
                      std::vector<int32_t>& out, bool& truncated) {
    int32_t cur = pos0;
    for (int64_t s = 0; s < steps; ++s) {
      if (!win.interior(cur)) {
        truncated = true;
        break;
      }
      const Compiled& c = compiled_at(cur, reversed);
      const double u =
          rng::uniform01(seed, stream, static_cast<uint64_t>(s), 0);
      size_t k = static_cast<size_t>(
          std::upper_bound(c.cum.begin(), c.cum.end(), u) - c.cum.begin());
      if (k >= c.to.size()) k = c.to.size() - 1;
      cur = c.to[k];
      out.push_back(cur);
    }
  };
  run_side(steps_forward, rng::Stream::walk_fwd, false, traj.forward,
           traj.truncated_forward);
  run_side(steps_backward, rng::Stream::walk_bwd, true, traj.backward,
           traj.truncated_backward);
  return traj;
}

double frequency(const Trajectory& traj, const std::vector<uint8_t>& member,
                 int64_t m, int64_t n) {
  if (m >= n) throw std::invalid_argument("frequency: need m < n");
  if (m < traj.lo() || n > traj.hi() + 1)
    throw std::invalid_argument("frequency: index window outside the trajectory");
  int64_t visits = 0;
  for (int64_t k = m; k < n; ++k) {
    const int32_t pos = traj.at(k);
    if (member[static_cast<size_t>(pos)]) ++visits;
  }
  return static_cast<double>(visits) / static_cast<double>(n - m);
}

std::vector<uint8_t> cluster_member_mask(const ClusterDecomposition& dec,
                                         int32_t vertex_pos) {
  std::vector<uint8_t> mask(dec.cluster_id.size(), 0);
  const int32_t id = dec.cluster_id[static_cast<size_t>(vertex_pos)];
  for (size_t i = 0; i < mask.size(); ++i) mask[i] = dec.cluster_id[i] == id ? 1 : 0;
  return mask;
}

}  // namespace perclab
