#include "perclab/percolation.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "perclab/rng.hpp"

namespace perclab {

namespace {

struct UnionFind {
  std::vector<int32_t> parent, rank_;
  explicit UnionFind(size_t n) : parent(n), rank_(n, 0) {
    for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int32_t>(i);
  }
  int32_t find(int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int32_t a, int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }
};

// Reusable BFS scratch: epoch stamps avoid clearing the visited array between
// trials. One instance per thread.
struct BfsScratch {
  std::vector<uint32_t> stamp;
  std::vector<int32_t> queue;
  uint32_t epoch = 0;
  void begin(size_t n) {
    if (stamp.size() < n) {
      stamp.assign(n, 0);
      epoch = 0;
    }
    if (++epoch == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      epoch = 1;
    }
    queue.clear();
  }
  bool visited(int32_t i) const { return stamp[static_cast<size_t>(i)] == epoch; }
  void visit(int32_t i) {
    stamp[static_cast<size_t>(i)] = epoch;
    queue.push_back(i);
  }
};

// Explores the open cluster of `from`, sampling each window edge on demand
// with the same (seed, edge index, trial) keying as sample_config. If
// `stop_at` is nonnegative the search returns as soon as that vertex is
// reached; otherwise the whole cluster is visited. Returns whether `stop_at`
// was reached (false when stop_at < 0).
bool explore_cluster(const Window& win, double p, uint64_t seed, uint64_t trial,
                     int32_t from, int32_t stop_at, BfsScratch& s) {
  s.begin(win.vertex_count());
  s.visit(from);
  if (from == stop_at) return true;
  for (size_t head = 0; head < s.queue.size(); ++head) {
    const int32_t x = s.queue[head];
    const auto lo = static_cast<size_t>(win.adj_offset[static_cast<size_t>(x)]);
    const auto hi = static_cast<size_t>(win.adj_offset[static_cast<size_t>(x) + 1]);
    for (size_t k = lo; k < hi; ++k) {
      const auto [nb, eid] = win.adj[k];
      if (s.visited(nb)) continue;
      if (rng::uniform01(seed, rng::Stream::perc_edge,
                         static_cast<uint64_t>(eid), trial) >= p)
        continue;
      if (nb == stop_at) return true;
      s.visit(nb);
    }
  }
  return false;
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("percolation: p must lie in [0,1]");
}

void check_config(const Window& win, const Config& cfg) {
  if (cfg.open.size() != win.edge_count())
    throw std::invalid_argument("percolation: config does not match the window");
}

int thread_count(int workers) {
  return workers > 0 ? workers : omp_get_max_threads();
}

// Smallest ball around x that contains y; its radius is d(x, y). Throws when
// the distance exceeds what any in-budget window could hold.
Window ball_reaching(FamilyPtr g, const VertexRef& x, const VertexRef& y) {
  for (int r = 0;; ++r) {
    Window win = ball(g, x, r);
    if (win.contains(y)) return win;
    if (static_cast<size_t>(win.vertex_count()) >= kDefaultWindowBudget ||
        r > 256)
      throw resource_error("connectivity: target is too far from the source");
  }
}

bool family_is_tree(const GraphFamily& g) {
  switch (g.kind) {
    case FamilyKind::fixed_end_tree:
    case FamilyKind::oriented_tree:
    case FamilyKind::subdivided_fixed_end_tree:
      return true;
    case FamilyKind::euclidean_lattice:
      return g.dim == 1;
    default:
      return false;
  }
}

void check_radii(const std::vector<int>& radii) {
  if (radii.empty())
    throw std::invalid_argument("tilted_mass: at least one radius is required");
  for (size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 0)
      throw std::invalid_argument("tilted_mass: radii must be nonnegative");
    if (i > 0 && radii[i] <= radii[i - 1])
      throw std::invalid_argument("tilted_mass: radii must be strictly increasing");
  }
}

Estimate finish_estimate(int64_t hits, int64_t trials) {
  Estimate est;
  est.trials = trials;
  est.hits = hits;
  est.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
  est.se = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(trials));
  return est;
}

}  // namespace

Config sample_config(const Window& win, double p, uint64_t seed, uint64_t trial) {
  check_probability(p);
  Config cfg;
  cfg.p = p;
  cfg.seed = seed;
  cfg.trial = trial;
  cfg.uniform.resize(win.edge_count());
  cfg.open.resize(win.edge_count());
  for (size_t e = 0; e < win.edge_count(); ++e) {
    cfg.uniform[e] =
        rng::uniform01(seed, rng::Stream::perc_edge, static_cast<uint64_t>(e), trial);
    cfg.open[e] = cfg.uniform[e] < p ? 1 : 0;
  }
  return cfg;
}

ClusterDecomposition clusters(const Window& win, const Config& cfg) {
  check_config(win, cfg);
  const size_t n = win.vertex_count();
  UnionFind uf(n);
  for (size_t e = 0; e < win.edge_count(); ++e) {
    if (cfg.open[e]) uf.unite(win.edges[e].u, win.edges[e].v);
  }

  ClusterDecomposition out;
  out.cluster_id.assign(n, 0);
  // Canonical id of a cluster = smallest vertex index it contains.
  std::vector<int32_t> min_of_root(n, -1);
  for (size_t i = 0; i < n; ++i) {
    const int32_t r = uf.find(static_cast<int32_t>(i));
    if (min_of_root[static_cast<size_t>(r)] < 0)
      min_of_root[static_cast<size_t>(r)] = static_cast<int32_t>(i);
  }
  std::unordered_map<int32_t, int32_t> slot_of_id;
  for (size_t i = 0; i < n; ++i) {
    const int32_t id = min_of_root[static_cast<size_t>(uf.find(static_cast<int32_t>(i)))];
    out.cluster_id[i] = id;
    auto [it, inserted] =
        slot_of_id.emplace(id, static_cast<int32_t>(out.roots.size()));
    if (inserted) {
      out.roots.push_back(id);
      out.stats.emplace_back();
      ClusterStats& st = out.stats.back();
      st.min_level = win.vertices[i].level;
      st.max_level = win.vertices[i].level;
    }
    ClusterStats& st = out.stats[static_cast<size_t>(it->second)];
    st.size += 1;
    st.boundary_touch = st.boundary_touch || win.is_boundary[i];
    st.min_level = std::min<int64_t>(st.min_level, win.vertices[i].level);
    st.max_level = std::max<int64_t>(st.max_level, win.vertices[i].level);
  }
  // BFS order guarantees vertex 0 is the window center and ids ascend with
  // first appearance, so roots is already sorted.
  return out;
}

Estimate connectivity_estimate(FamilyPtr g, double p, const VertexRef& x,
                               const VertexRef& y, int64_t trials, uint64_t seed,
                               int margin, int workers) {
  check_probability(p);
  if (trials < 1) throw std::invalid_argument("connectivity: trials must be positive");
  if (margin < 0) throw std::invalid_argument("connectivity: margin must be >= 0");
  const int d = ball_reaching(g, x, y).radius;
  const Window win = ball(g, x, d + margin);
  const int32_t src = win.index_of(x);
  const int32_t dst = win.index_of(y);

  std::vector<uint8_t> hit(static_cast<size_t>(trials), 0);
  const int nt = thread_count(workers);
#pragma omp parallel num_threads(nt)
  {
    BfsScratch scratch;
#pragma omp for schedule(static)
    for (int64_t t = 0; t < trials; ++t) {
      hit[static_cast<size_t>(t)] = explore_cluster(
          win, p, seed, static_cast<uint64_t>(t), src, dst, scratch);
    }
  }
  int64_t hits = 0;
  for (uint8_t h : hit) hits += h;
  return finish_estimate(hits, trials);
}

Estimate connectivity_estimate_serial(FamilyPtr g, double p, const VertexRef& x,
                                      const VertexRef& y, int64_t trials,
                                      uint64_t seed, int margin) {
  check_probability(p);
  if (trials < 1) throw std::invalid_argument("connectivity: trials must be positive");
  if (margin < 0) throw std::invalid_argument("connectivity: margin must be >= 0");
  const int d = ball_reaching(g, x, y).radius;
  const Window win = ball(g, x, d + margin);
  const int32_t src = win.index_of(x);
  const int32_t dst = win.index_of(y);

  int64_t hits = 0;
  for (int64_t t = 0; t < trials; ++t) {
    const Config cfg = sample_config(win, p, seed, static_cast<uint64_t>(t));
    const ClusterDecomposition dec = clusters(win, cfg);
    hits += dec.same_cluster(src, dst) ? 1 : 0;
  }
  return finish_estimate(hits, trials);
}

std::vector<DecayRow> decay_curve(FamilyPtr g, double p, const VertexRef& o,
                                  const std::vector<VertexRef>& targets,
                                  int64_t trials, uint64_t seed, int margin,
                                  int workers) {
  check_probability(p);
  if (trials < 1) throw std::invalid_argument("decay_curve: trials must be positive");
  if (targets.empty())
    throw std::invalid_argument("decay_curve: at least one target is required");

  int max_d = 0;
  for (const auto& t : targets) max_d = std::max(max_d, ball_reaching(g, o, t).radius);
  const Window win = ball(g, o, max_d + margin);
  const int32_t src = win.index_of(o);

  const size_t k = targets.size();
  std::vector<int32_t> tpos(k);
  std::vector<int> dist(k);
  for (size_t i = 0; i < k; ++i) {
    tpos[i] = win.index_of(targets[i]);
    dist[i] = win.depth[static_cast<size_t>(tpos[i])];
    if (i > 0 && dist[i] < dist[i - 1])
      throw std::invalid_argument("decay_curve: targets must be sorted by distance");
  }

  // All targets are read off one shared cluster exploration per trial, so the
  // per-trial coupling is common to every row.
  std::vector<uint8_t> hit(static_cast<size_t>(trials) * k, 0);
  const int nt = thread_count(workers);
#pragma omp parallel num_threads(nt)
  {
    BfsScratch scratch;
#pragma omp for schedule(static)
    for (int64_t t = 0; t < trials; ++t) {
      explore_cluster(win, p, seed, static_cast<uint64_t>(t), src, -1, scratch);
      for (size_t i = 0; i < k; ++i)
        hit[static_cast<size_t>(t) * k + i] = scratch.visited(tpos[i]) ? 1 : 0;
    }
  }

  std::vector<DecayRow> rows(k);
  double running = 1.0;
  for (size_t i = 0; i < k; ++i) {
    int64_t hits = 0;
    for (int64_t t = 0; t < trials; ++t) hits += hit[static_cast<size_t>(t) * k + i];
    rows[i].target = targets[i];
    rows[i].distance = dist[i];
    rows[i].est = finish_estimate(hits, trials);
    running = std::min(running, rows[i].est.p_hat);
    rows[i].running_min = running;
  }
  return rows;
}

std::vector<Rat> tilted_mass(const Window& win, const Config& cfg,
                             const VertexRef& o, const std::vector<int>& radii) {
  check_config(win, cfg);
  check_radii(radii);
  if (win.kind != WindowKind::ball || !(win.center == o))
    throw std::invalid_argument("tilted_mass: window must be a ball centered at o");
  if (radii.back() > win.radius)
    throw std::invalid_argument("tilted_mass: radius exceeds the window radius");

  const GraphFamily& g = *win.family;
  // Cluster of o inside the window, tallied by distance from o.
  std::vector<Rat> by_depth(static_cast<size_t>(win.radius) + 1, Rat(0));
  std::vector<uint8_t> seen(win.vertex_count(), 0);
  std::vector<int32_t> queue;
  seen[0] = 1;  // the center is vertex 0 by construction
  queue.push_back(0);
  by_depth[0] = m_value(g, o);
  for (size_t head = 0; head < queue.size(); ++head) {
    const int32_t x = queue[head];
    const auto lo = static_cast<size_t>(win.adj_offset[static_cast<size_t>(x)]);
    const auto hi = static_cast<size_t>(win.adj_offset[static_cast<size_t>(x) + 1]);
    for (size_t k = lo; k < hi; ++k) {
      const auto [nb, eid] = win.adj[k];
      if (seen[static_cast<size_t>(nb)] || !cfg.open[static_cast<size_t>(eid)]) continue;
      seen[static_cast<size_t>(nb)] = 1;
      by_depth[static_cast<size_t>(win.depth[static_cast<size_t>(nb)])] +=
          m_value(g, win.vertices[static_cast<size_t>(nb)]);
      queue.push_back(nb);
    }
  }

  const Rat m_o = m_value(g, o);
  std::vector<Rat> out;
  out.reserve(radii.size());
  Rat acc(0);
  int depth = 0;
  for (int r : radii) {
    for (; depth <= r; ++depth) acc += by_depth[static_cast<size_t>(depth)];
    out.push_back(acc / m_o);
  }
  return out;
}

std::vector<Rat> tilted_mass_lazy(FamilyPtr g, double p, const VertexRef& o,
                                  const std::vector<int>& radii, uint64_t seed,
                                  uint64_t trial) {
  check_probability(p);
  check_radii(radii);
  // On a tree every edge of the o-x geodesic is a cut edge, so membership in
  // the cluster of o and the distance from o are both decided by edges within
  // distance max(radii): no window is needed and cluster-internal BFS depth
  // equals graph distance. With cycles neither holds, so we refuse.
  if (!family_is_tree(*g))
    throw std::invalid_argument("tilted_mass_lazy: requires an acyclic family");
  const int rmax = radii.back();

  std::unordered_set<VertexRef, VertexRefHash> seen{o};
  std::deque<std::pair<VertexRef, int>> queue{{o, 0}};
  std::vector<Rat> by_depth(static_cast<size_t>(rmax) + 1, Rat(0));
  by_depth[0] = m_value(*g, o);
  while (!queue.empty()) {
    auto [x, d] = queue.front();
    queue.pop_front();
    if (d == rmax) continue;
    for (const auto& nb : neighbors(*g, x)) {
      if (seen.count(nb)) continue;
      if (rng::uniform01(seed, rng::Stream::perc_edge, canonical_edge_key(x, nb),
                         trial) >= p)
        continue;
      seen.insert(nb);
      by_depth[static_cast<size_t>(d) + 1] += m_value(*g, nb);
      queue.push_back({nb, d + 1});
    }
  }

  const Rat m_o = m_value(*g, o);
  std::vector<Rat> out;
  out.reserve(radii.size());
  Rat acc(0);
  int depth = 0;
  for (int r : radii) {
    for (; depth <= r; ++depth) acc += by_depth[static_cast<size_t>(depth)];
    out.push_back(acc / m_o);
  }
  return out;
}

RayDecoration ray_decoration_sample(const Window& win, uint64_t seed) {
  const GraphFamily& g = *win.family;
  if (g.kind != FamilyKind::fixed_end_tree)
    throw std::invalid_argument(
        "ray_decoration_sample: only fixed-end trees are supported");
  if (win.kind != WindowKind::ball)
    throw std::invalid_argument("ray_decoration_sample: window must be a ball");
  const auto b = static_cast<uint32_t>(g.b);

  // Decisions are keyed by canonical addresses, so enlarging the window only
  // refines censored values; it never changes settled ones.
  auto choice_of = [&](const VertexRef& v) {
    return rng::uniform_index(seed, rng::Stream::ray_choice, canonical_key(v), 0, b);
  };
  auto up_neighbor = [&](const VertexRef& v) {
    for (const auto& nb : neighbors(g, v))
      if (nb.level == v.level + 1) return nb;
    throw std::logic_error("ray_decoration_sample: vertex without a parent");
  };
  // Which of parent's b offspring slots child occupies.
  auto slot_of = [&](const VertexRef& child, const VertexRef& parent) {
    const __int128 cm = i128_parse(child.addr);
    const __int128 pm = i128_parse(parent.addr);
    return static_cast<uint32_t>(cm - static_cast<__int128>(g.b) * pm);
  };

  RayDecoration out;
  const size_t ne = win.edge_count();
  out.omega1.assign(ne, 0);
  out.omega2.assign(ne, 0);
  out.insert_n.assign(ne, -1);
  out.censored.assign(ne, 0);

  for (size_t e = 0; e < ne; ++e) {
    VertexRef a = win.vertices[static_cast<size_t>(win.edges[e].u)];
    VertexRef c = win.vertices[static_cast<size_t>(win.edges[e].v)];
    if (a.level < c.level) std::swap(a, c);  // a = parent, c = offspring

    if (choice_of(a) == slot_of(c, a)) {
      out.omega1[e] = 1;
      out.omega2[e] = 1;
      continue;
    }

    // Height of a within its ray: climb while the parent's chosen offspring
    // is the current vertex. If the climb exits the window the true height is
    // unknown; sample with the truncated value and flag the edge.
    int n = 0;
    VertexRef cur = a;
    bool censored = false;
    for (;;) {
      const VertexRef par = up_neighbor(cur);
      if (!win.contains(par)) {
        censored = true;
        break;
      }
      if (choice_of(par) != slot_of(cur, par)) break;
      cur = par;
      ++n;
    }
    out.insert_n[e] = n;
    out.censored[e] = censored ? 1 : 0;
    const double accept = std::ldexp(1.0, -(n + 1));
    if (rng::uniform01(seed, rng::Stream::ray_insert, canonical_edge_key(a, c), 0) <
        accept)
      out.omega2[e] = 1;
  }
  return out;
}

}  // namespace perclab
