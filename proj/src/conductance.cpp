#include "perclab/conductance.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "perclab/errors.hpp"
#include "perclab/rng.hpp"

namespace perclab {

namespace {

constexpr size_t kDotBlocks = 256;

int thread_count(int workers) {
  return workers > 0 ? workers : omp_get_max_threads();
}

// Fixed-order blocked reduction: per-block partial sums are combined
// serially, so the result does not depend on the number of threads.
double det_dot(const std::vector<double>& a, const std::vector<double>& b, int nt) {
  const size_t n = a.size();
  double partial[kDotBlocks];
#pragma omp parallel for schedule(static) num_threads(nt)
  for (size_t blk = 0; blk < kDotBlocks; ++blk) {
    const size_t lo = blk * n / kDotBlocks;
    const size_t hi = (blk + 1) * n / kDotBlocks;
    double s = 0;
    for (size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[blk] = s;
  }
  double total = 0;
  for (size_t blk = 0; blk < kDotBlocks; ++blk) total += partial[blk];
  return total;
}

void validate_network(const Network& net) {
  if (net.n <= 0) throw std::invalid_argument("network: empty vertex set");
  if (net.source < 0 || net.source >= net.n)
    throw std::invalid_argument("network: source out of range");
  if (net.conductance.size() != net.edges.size())
    throw std::invalid_argument("network: conductance/edge count mismatch");
  for (size_t e = 0; e < net.edges.size(); ++e) {
    const auto& ed = net.edges[e];
    if (ed.u < 0 || ed.v < 0 || ed.u >= net.n || ed.v >= net.n || ed.u == ed.v)
      throw std::invalid_argument("network: bad edge endpoints");
    if (!(net.conductance[e] > 0))
      throw std::invalid_argument("network: conductances must be positive");
  }
  for (int32_t b : net.boundary) {
    if (b < 0 || b >= net.n) throw std::invalid_argument("network: bad boundary vertex");
    if (b == net.source)
      throw std::invalid_argument("network: source may not be wired to the boundary");
  }
}

struct MiniUf {
  std::vector<int32_t> p;
  explicit MiniUf(int32_t n) : p(static_cast<size_t>(n)) {
    for (int32_t i = 0; i < n; ++i) p[static_cast<size_t>(i)] = i;
  }
  int32_t find(int32_t x) {
    while (p[static_cast<size_t>(x)] != x) {
      p[static_cast<size_t>(x)] = p[static_cast<size_t>(p[static_cast<size_t>(x)])];
      x = p[static_cast<size_t>(x)];
    }
    return x;
  }
  // Returns false if already joined.
  bool unite(int32_t a, int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[static_cast<size_t>(a)] = b;
    return true;
  }
};

bool source_reaches_boundary(const Network& net) {
  if (net.boundary.empty()) return false;
  MiniUf uf(net.n);
  for (const auto& e : net.edges) uf.unite(e.u, e.v);
  const int32_t s = uf.find(net.source);
  for (int32_t b : net.boundary)
    if (uf.find(b) == s) return true;
  return false;
}

}  // namespace

ConductanceResult solve_effective_conductance(const Network& net, double tol,
                                              int workers, int64_t max_iterations) {
  validate_network(net);
  ConductanceResult res;
  if (!source_reaches_boundary(net)) return res;
  res.reached_boundary = true;

  const size_t nv = static_cast<size_t>(net.n);
  std::vector<uint8_t> wired(nv, 0);
  for (int32_t b : net.boundary) wired[static_cast<size_t>(b)] = 1;

  // Unknowns: everything but the source and the wired set.
  std::vector<int32_t> row_of(nv, -1);
  std::vector<int32_t> vertex_of;
  for (size_t i = 0; i < nv; ++i) {
    if (static_cast<int32_t>(i) == net.source || wired[i]) continue;
    row_of[i] = static_cast<int32_t>(vertex_of.size());
    vertex_of.push_back(static_cast<int32_t>(i));
  }
  const size_t nu = vertex_of.size();

  // Assemble the weighted Laplacian restricted to unknowns (CSR) and the
  // right-hand side from edges into the unit-potential source.
  std::vector<double> diag(nu, 0), rhs(nu, 0);
  std::vector<int32_t> degree(nu, 0);
  for (const auto& e : net.edges) {
    if (row_of[static_cast<size_t>(e.u)] >= 0 && row_of[static_cast<size_t>(e.v)] >= 0) {
      ++degree[static_cast<size_t>(row_of[static_cast<size_t>(e.u)])];
      ++degree[static_cast<size_t>(row_of[static_cast<size_t>(e.v)])];
    }
  }
  std::vector<size_t> offset(nu + 1, 0);
  for (size_t i = 0; i < nu; ++i)
    offset[i + 1] = offset[i] + static_cast<size_t>(degree[i]);
  std::vector<int32_t> col(offset[nu]);
  std::vector<double> val(offset[nu]);
  std::vector<size_t> fill(offset.begin(), offset.end() - 1);
  for (size_t e = 0; e < net.edges.size(); ++e) {
    const int32_t u = net.edges[e].u, v = net.edges[e].v;
    const double c = net.conductance[e];
    const int32_t ru = row_of[static_cast<size_t>(u)], rv = row_of[static_cast<size_t>(v)];
    if (ru >= 0) diag[static_cast<size_t>(ru)] += c;
    if (rv >= 0) diag[static_cast<size_t>(rv)] += c;
    if (ru >= 0 && rv >= 0) {
      col[fill[static_cast<size_t>(ru)]] = rv;
      val[fill[static_cast<size_t>(ru)]++] = c;
      col[fill[static_cast<size_t>(rv)]] = ru;
      val[fill[static_cast<size_t>(rv)]++] = c;
    }
    if (ru >= 0 && v == net.source) rhs[static_cast<size_t>(ru)] += c;
    if (rv >= 0 && u == net.source) rhs[static_cast<size_t>(rv)] += c;
  }

  const int nt = thread_count(workers);
  std::vector<double> x(nu, 0);
  if (nu > 0) {
    // Jacobi-preconditioned conjugate gradients on (D - A) x = rhs.
    std::vector<double> r = rhs, z(nu), p(nu), q(nu), minv(nu);
    for (size_t i = 0; i < nu; ++i)
      minv[i] = diag[i] > 0 ? 1.0 / diag[i] : 0.0;  // isolated rows stay at 0
    const double bnorm = std::sqrt(det_dot(rhs, rhs, nt));
    const double target = tol * std::max(bnorm, 1e-300);
    double rnorm = bnorm;
    if (rnorm > target) {
      for (size_t i = 0; i < nu; ++i) z[i] = minv[i] * r[i];
      p = z;
      double rz = det_dot(r, z, nt);
      int64_t iter = 0;
      for (; iter < max_iterations; ++iter) {
#pragma omp parallel for schedule(static) num_threads(nt)
        for (size_t i = 0; i < nu; ++i) {
          double s = diag[i] * p[i];
          for (size_t k = offset[i]; k < offset[i + 1]; ++k)
            s -= val[k] * p[static_cast<size_t>(col[k])];
          q[i] = s;
        }
        const double pq = det_dot(p, q, nt);
        if (!(pq > 0))
          throw numeric_error("conductance: conjugate-gradient breakdown, residual " +
                              std::to_string(rnorm));
        const double alpha = rz / pq;
#pragma omp parallel for schedule(static) num_threads(nt)
        for (size_t i = 0; i < nu; ++i) {
          x[i] += alpha * p[i];
          r[i] -= alpha * q[i];
        }
        rnorm = std::sqrt(det_dot(r, r, nt));
        if (rnorm <= target) {
          ++iter;
          break;
        }
#pragma omp parallel for schedule(static) num_threads(nt)
        for (size_t i = 0; i < nu; ++i) z[i] = minv[i] * r[i];
        const double rz_new = det_dot(r, z, nt);
        const double beta = rz_new / rz;
        rz = rz_new;
#pragma omp parallel for schedule(static) num_threads(nt)
        for (size_t i = 0; i < nu; ++i) p[i] = z[i] + beta * p[i];
      }
      res.iterations = iter;
      res.residual = rnorm;
      if (rnorm > target)
        throw numeric_error("conductance: no convergence in " +
                            std::to_string(max_iterations) +
                            " iterations, residual " + std::to_string(rnorm));
    }
  }

  // Current out of the source: sum over its edges of c * (1 - potential).
  double out = 0;
  for (size_t e = 0; e < net.edges.size(); ++e) {
    const int32_t u = net.edges[e].u, v = net.edges[e].v;
    int32_t other = -1;
    if (u == net.source) other = v;
    else if (v == net.source) other = u;
    else continue;
    const double pot = wired[static_cast<size_t>(other)]
                           ? 0.0
                           : x[static_cast<size_t>(row_of[static_cast<size_t>(other)])];
    out += net.conductance[e] * (1.0 - pot);
  }
  res.c_eff = out;
  return res;
}

double effective_conductance(const Network& net, double tol, int workers) {
  return solve_effective_conductance(net, tol, workers).c_eff;
}

double effective_conductance_direct(const Network& net) {
  validate_network(net);
  if (!source_reaches_boundary(net)) return 0;

  const size_t nv = static_cast<size_t>(net.n);
  {
    MiniUf uf(net.n);
    for (const auto& e : net.edges)
      if (!uf.unite(e.u, e.v))
        throw std::invalid_argument("direct conductance: network has a cycle");
  }
  std::vector<uint8_t> wired(nv, 0);
  for (int32_t b : net.boundary) wired[static_cast<size_t>(b)] = 1;

  std::vector<std::vector<std::pair<int32_t, double>>> adj(nv);
  for (size_t e = 0; e < net.edges.size(); ++e) {
    adj[static_cast<size_t>(net.edges[e].u)].push_back(
        {net.edges[e].v, net.conductance[e]});
    adj[static_cast<size_t>(net.edges[e].v)].push_back(
        {net.edges[e].u, net.conductance[e]});
  }

  // Downward conductance to the wired set by post-order accumulation:
  // each child contributes the series combination of its edge and its own
  // subtree; wired vertices terminate their branch at resistance 0.
  std::vector<double> down(nv, 0);
  std::vector<int32_t> parent(nv, -2), order;
  order.reserve(nv);
  parent[static_cast<size_t>(net.source)] = -1;
  std::deque<int32_t> queue{net.source};
  while (!queue.empty()) {
    const int32_t x = queue.front();
    queue.pop_front();
    order.push_back(x);
    if (wired[static_cast<size_t>(x)]) continue;  // branch ends at the boundary
    for (const auto& [nb, c] : adj[static_cast<size_t>(x)]) {
      if (parent[static_cast<size_t>(nb)] != -2) continue;
      parent[static_cast<size_t>(nb)] = x;
      queue.push_back(nb);
    }
  }
  for (size_t i = order.size(); i-- > 0;) {
    const int32_t x = order[i];
    if (wired[static_cast<size_t>(x)]) continue;
    double c_total = 0;
    for (const auto& [nb, c] : adj[static_cast<size_t>(x)]) {
      if (parent[static_cast<size_t>(nb)] != x) continue;
      double r_child;
      if (wired[static_cast<size_t>(nb)]) r_child = 0;
      else if (down[static_cast<size_t>(nb)] > 0)
        r_child = 1.0 / down[static_cast<size_t>(nb)];
      else
        continue;  // dead-end subtree carries no current
      c_total += 1.0 / (1.0 / c + r_child);
    }
    down[static_cast<size_t>(x)] = c_total;
  }
  return down[static_cast<size_t>(net.source)];
}

Network cluster_network(const Window& win, const Config& cfg, const VertexRef& o,
                        int R, EdgeWeight weight) {
  if (win.kind != WindowKind::ball || !(win.center == o))
    throw std::invalid_argument("cluster_network: window must be a ball centered at o");
  if (R < 1 || R > win.radius)
    throw std::invalid_argument("cluster_network: need 1 <= R <= window radius");
  if (cfg.open.size() != win.edge_count())
    throw std::invalid_argument("cluster_network: config does not match the window");
  const GraphFamily& g = *win.family;

  // Component of o in the open subgraph induced on B(o, R).
  std::vector<int32_t> id_of(win.vertex_count(), -1);
  Network net;
  auto admit = [&](int32_t pos) {
    id_of[static_cast<size_t>(pos)] = net.n++;
    net.label.push_back(win.vertices[static_cast<size_t>(pos)]);
    if (win.depth[static_cast<size_t>(pos)] == R)
      net.boundary.push_back(id_of[static_cast<size_t>(pos)]);
  };
  admit(0);  // the center is window vertex 0
  net.source = 0;
  std::deque<int32_t> queue{0};
  while (!queue.empty()) {
    const int32_t x = queue.front();
    queue.pop_front();
    const auto lo = static_cast<size_t>(win.adj_offset[static_cast<size_t>(x)]);
    const auto hi = static_cast<size_t>(win.adj_offset[static_cast<size_t>(x) + 1]);
    for (size_t k = lo; k < hi; ++k) {
      const auto [nb, eid] = win.adj[k];
      if (!cfg.open[static_cast<size_t>(eid)]) continue;
      if (win.depth[static_cast<size_t>(nb)] > R) continue;
      if (id_of[static_cast<size_t>(nb)] < 0) {
        admit(nb);
        queue.push_back(nb);
      }
      if (nb > x) {  // record each admissible edge once
        const int32_t a = id_of[static_cast<size_t>(x)];
        const int32_t b = id_of[static_cast<size_t>(nb)];
        net.edges.push_back({std::min(a, b), std::max(a, b)});
        double c = 1.0;
        if (weight == EdgeWeight::sqrt_mm)
          c = std::sqrt(to_double(m_value(g, win.vertices[static_cast<size_t>(x)]) *
                                  m_value(g, win.vertices[static_cast<size_t>(nb)])));
        net.conductance.push_back(c);
      }
    }
  }
  return net;
}

Network ray_cluster_network(FamilyPtr g, const VertexRef& o, int R, uint64_t seed,
                            EdgeWeight weight, size_t max_vertices) {
  if (g->kind != FamilyKind::fixed_end_tree)
    throw std::invalid_argument("ray_cluster_network: only fixed-end trees are supported");
  if (R < 1) throw std::invalid_argument("ray_cluster_network: need R >= 1");
  const auto b = static_cast<uint32_t>(g->b);

  auto choice_of = [&](const VertexRef& v) {
    return rng::uniform_index(seed, rng::Stream::ray_choice, canonical_key(v), 0, b);
  };
  auto up_neighbor = [&](const VertexRef& v) {
    for (const auto& nb : neighbors(*g, v))
      if (nb.level == v.level + 1) return nb;
    throw std::logic_error("ray_cluster_network: vertex without a parent");
  };
  auto slot_of = [&](const VertexRef& child, const VertexRef& parent) {
    return static_cast<uint32_t>(i128_parse(child.addr) -
                                 static_cast<__int128>(g->b) * i128_parse(parent.addr));
  };
  // Height of x within its kept-offspring ray; the climb is almost surely
  // finite (each ancestor continues it with probability 1/b) and needs no
  // window, so the height is never censored.
  auto ray_height = [&](const VertexRef& x) {
    int n = 0;
    VertexRef cur = x;
    for (;;) {
      const VertexRef par = up_neighbor(cur);
      if (choice_of(par) != slot_of(cur, par)) return n;
      cur = par;
      ++n;
    }
  };
  // Open in omega_2: kept by the parent's choice, or reinserted with
  // probability 2^-(h+1) at the parent's ray height h.
  auto open_edge = [&](const VertexRef& parent, const VertexRef& child) {
    if (choice_of(parent) == slot_of(child, parent)) return true;
    const double accept = std::ldexp(1.0, -(ray_height(parent) + 1));
    return rng::uniform01(seed, rng::Stream::ray_insert,
                          canonical_edge_key(parent, child), 0) < accept;
  };

  Network net;
  std::unordered_map<VertexRef, int32_t, VertexRefHash> id_of;
  auto admit = [&](const VertexRef& v, int dist) {
    if (static_cast<size_t>(net.n) >= max_vertices)
      throw resource_error("ray_cluster_network: vertex budget exceeded");
    id_of.emplace(v, net.n);
    net.label.push_back(v);
    if (dist == R) net.boundary.push_back(net.n);
    return net.n++;
  };
  auto conduct = [&](const VertexRef& x, const VertexRef& y) {
    if (weight == EdgeWeight::unit) return 1.0;
    return std::sqrt(to_double(m_value(*g, x) * m_value(*g, y)));
  };

  admit(o, 0);
  net.source = 0;
  std::deque<std::pair<VertexRef, int>> queue{{o, 0}};
  while (!queue.empty()) {
    auto [x, d] = queue.front();
    queue.pop_front();
    if (d == R) continue;  // wired sphere: do not explore past it
    const int32_t xid = id_of.at(x);
    std::vector<std::pair<VertexRef, VertexRef>> incident;  // (parent, child)
    const VertexRef par = up_neighbor(x);
    incident.push_back({par, x});
    for (const auto& nb : neighbors(*g, x))
      if (nb.level == x.level - 1) incident.push_back({x, nb});
    for (const auto& [p, c] : incident) {
      const VertexRef& y = (p == x) ? c : p;
      if (id_of.count(y)) continue;  // tree: only the BFS parent repeats
      if (!open_edge(p, c)) continue;
      const int32_t yid = admit(y, d + 1);
      net.edges.push_back({std::min(xid, yid), std::max(xid, yid)});
      net.conductance.push_back(conduct(x, y));
      queue.push_back({y, d + 1});
    }
  }
  return net;
}

}  // namespace perclab
