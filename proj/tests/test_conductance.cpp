#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "perclab/conductance.hpp"
#include "perclab/rng.hpp"

using namespace perclab;

namespace {

// Path 0-1-...-R of unit conductances: source at one end, wired at the other.
Network path_network(int R) {
  Network net;
  net.n = R + 1;
  net.source = 0;
  net.boundary = {R};
  for (int i = 0; i < R; ++i) {
    net.edges.push_back({i, i + 1});
    net.conductance.push_back(1.0);
  }
  return net;
}

// Complete rooted binary tree with unit conductances, root = source,
// depth-R leaves wired. Vertices in level order: node i has children 2i+1,
// 2i+2.
Network binary_tree_network(int R) {
  Network net;
  const int32_t n = static_cast<int32_t>((1u << (R + 1)) - 1);
  const int32_t first_leaf = static_cast<int32_t>((1u << R) - 1);
  net.n = n;
  net.source = 0;
  for (int32_t i = 0; i < first_leaf; ++i) {
    net.edges.push_back({i, 2 * i + 1});
    net.edges.push_back({i, 2 * i + 2});
    net.conductance.push_back(1.0);
    net.conductance.push_back(1.0);
  }
  for (int32_t i = first_leaf; i < n; ++i) net.boundary.push_back(i);
  return net;
}

// Random tree on n vertices (vertex i > 0 attaches to a uniform earlier
// vertex) with conductances in (0.1, 2.1) and a few wired vertices.
Network random_tree_network(int n, uint64_t seed) {
  Network net;
  net.n = n;
  net.source = 0;
  for (int i = 1; i < n; ++i) {
    const auto parent = static_cast<int32_t>(
        rng::uniform01(seed, rng::Stream::generic, static_cast<uint64_t>(i), 0) * i);
    net.edges.push_back({std::min(parent, i), std::max(parent, i)});
    net.conductance.push_back(
        0.1 + 2.0 * rng::uniform01(seed, rng::Stream::generic,
                                   static_cast<uint64_t>(i), 1));
  }
  for (int i = 1; i < n; ++i)
    if (rng::uniform01(seed, rng::Stream::generic, static_cast<uint64_t>(i), 2) < 0.15)
      net.boundary.push_back(i);
  return net;
}

}  // namespace

TEST_CASE("a source cut off from the wired set has zero conductance") {
  auto g = make_grandparent(2);
  const Window win = ball(g, origin(*g), 3);
  const Config closed = sample_config(win, 0.0, 4);
  const Network net = cluster_network(win, closed, origin(*g), 3);
  CHECK(net.n == 1);
  CHECK(net.boundary.empty());

  const ConductanceResult res = solve_effective_conductance(net);
  CHECK(res.c_eff == 0.0);
  CHECK_FALSE(res.reached_boundary);
  CHECK(res.iterations == 0);
  CHECK(effective_conductance_direct(net) == 0.0);

  Network marooned = path_network(4);
  marooned.n += 2;  // a separate wired component the source cannot reach
  marooned.edges.push_back({5, 6});
  marooned.conductance.push_back(1.0);
  marooned.boundary = {6};
  CHECK(solve_effective_conductance(marooned).c_eff == 0.0);
  CHECK(effective_conductance_direct(marooned) == 0.0);
}

TEST_CASE("half-line of unit conductances has conductance 1/R") {
  for (int R = 1; R <= 64; ++R) {
    const Network net = path_network(R);
    const ConductanceResult res = solve_effective_conductance(net);
    CHECK(res.reached_boundary);
    CHECK(std::abs(res.c_eff - 1.0 / R) <= 1e-9);
    CHECK(std::abs(effective_conductance_direct(net) - 1.0 / R) <= 1e-12);
  }
}

TEST_CASE("rooted binary tree of depth R has conductance 1/(1 - 2^-R)") {
  for (int R = 1; R <= 12; ++R) {
    const Network net = binary_tree_network(R);
    const double expect = 1.0 / (1.0 - std::ldexp(1.0, -R));
    CHECK(std::abs(effective_conductance(net) - expect) <= 1e-9);
    CHECK(std::abs(effective_conductance_direct(net) - expect) <= 1e-10);
  }
  // The limit is total conductance 1: the infinite tree is transient.
  CHECK(effective_conductance_direct(binary_tree_network(12)) ==
        doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("series and parallel laws hold on hand-built networks") {
  Network series;
  series.n = 3;
  series.source = 0;
  series.boundary = {2};
  series.edges = {{0, 1}, {1, 2}};
  series.conductance = {3.0, 6.0};
  const double expect_series = 1.0 / (1.0 / 3.0 + 1.0 / 6.0);
  CHECK(effective_conductance(series) == doctest::Approx(expect_series).epsilon(1e-10));
  CHECK(effective_conductance_direct(series) ==
        doctest::Approx(expect_series).epsilon(1e-12));

  Network parallel;  // two distinct two-edge routes around a square
  parallel.n = 4;
  parallel.source = 0;
  parallel.boundary = {2};
  parallel.edges = {{0, 1}, {1, 2}, {0, 3}, {3, 2}};
  parallel.conductance = {1.0, 1.0, 1.0, 1.0};
  CHECK(effective_conductance(parallel) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(effective_conductance_direct(parallel), std::invalid_argument);
}

TEST_CASE("iterative and direct routes agree on random tree networks") {
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    const Network net = random_tree_network(40 + static_cast<int>(seed) * 13, seed);
    const double direct = effective_conductance_direct(net);
    const ConductanceResult iter = solve_effective_conductance(net);
    if (net.boundary.empty()) {
      CHECK(direct == 0.0);
      CHECK(iter.c_eff == 0.0);
      continue;
    }
    CHECK(iter.reached_boundary);
    CHECK(std::abs(iter.c_eff - direct) <= 1e-8 * std::max(1.0, direct));
  }
}

TEST_CASE("network validation rejects malformed input") {
  Network bad = path_network(3);
  bad.conductance[1] = 0.0;
  CHECK_THROWS_AS(effective_conductance(bad), std::invalid_argument);
  bad = path_network(3);
  bad.edges[0] = {0, 9};
  CHECK_THROWS_AS(effective_conductance(bad), std::invalid_argument);
  bad = path_network(3);
  bad.boundary = {0};
  CHECK_THROWS_AS(effective_conductance(bad), std::invalid_argument);
  bad = path_network(3);
  bad.conductance.pop_back();
  CHECK_THROWS_AS(effective_conductance(bad), std::invalid_argument);
  CHECK_THROWS_AS(effective_conductance(Network{}), std::invalid_argument);
}

TEST_CASE("the iteration cap raises a numeric error carrying the residual") {
  const Network net = path_network(40);
  CHECK_THROWS_AS(solve_effective_conductance(net, 1e-10, 0, 2), numeric_error);
}

TEST_CASE("worker count does not change the solved conductance bits") {
  auto g = make_fixed_end_tree(2);
  const Window win = ball(g, origin(*g), 5);
  const Config cfg = sample_config(win, 0.8, 21);
  const Network net = cluster_network(win, cfg, origin(*g), 5);
  const ConductanceResult one = solve_effective_conductance(net, 1e-10, 1);
  const ConductanceResult three = solve_effective_conductance(net, 1e-10, 3);
  CHECK(one.c_eff == three.c_eff);
  CHECK(one.iterations == three.iterations);
  CHECK(one.residual == three.residual);
}

TEST_CASE("cluster networks carry the open component out to the wired sphere") {
  auto g = make_euclidean_lattice(1);
  const Window win = ball(g, origin(*g), 8);
  Config cfg = sample_config(win, 0.0, 1);
  // Open exactly the eight edges to the right of the origin: the cluster is a
  // half-line and only its far end lies on the sphere.
  for (size_t e = 0; e < win.edge_count(); ++e) {
    const VertexRef& u = win.vertices[static_cast<size_t>(win.edges[e].u)];
    const VertexRef& v = win.vertices[static_cast<size_t>(win.edges[e].v)];
    if (i128_parse(u.addr) >= 0 && i128_parse(v.addr) >= 0)
      cfg.open[e] = 1;
  }
  const Network net = cluster_network(win, cfg, origin(*g), 8, EdgeWeight::unit);
  CHECK(net.n == 9);
  CHECK(net.edges.size() == 8);
  REQUIRE(net.boundary.size() == 1);
  CHECK(win.depth[static_cast<size_t>(
            win.index_of(net.label[static_cast<size_t>(net.boundary[0])]))] == 8);
  CHECK(net.label[static_cast<size_t>(net.source)] == origin(*g));
  CHECK(std::abs(effective_conductance(net) - 1.0 / 8) <= 1e-9);
  CHECK(std::abs(effective_conductance_direct(net) - 1.0 / 8) <= 1e-12);

  CHECK_THROWS_AS(cluster_network(win, cfg, origin(*g), 0), std::invalid_argument);
  CHECK_THROWS_AS(cluster_network(win, cfg, origin(*g), 9), std::invalid_argument);
  CHECK_THROWS_AS(cluster_network(win, cfg, win.vertices[1], 3), std::invalid_argument);
  Config short_cfg = cfg;
  short_cfg.open.pop_back();
  CHECK_THROWS_AS(cluster_network(win, short_cfg, origin(*g), 3), std::invalid_argument);
}

TEST_CASE("effective conductance is nonincreasing as the wired sphere recedes") {
  auto g = make_fixed_end_tree(2);
  const Window win = ball(g, origin(*g), 6);
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const Config cfg = sample_config(win, 0.7, seed);
    for (EdgeWeight w : {EdgeWeight::sqrt_mm, EdgeWeight::unit}) {
      double prev = -1;
      for (int R = 2; R <= 6; ++R) {
        const double c = effective_conductance(cluster_network(win, cfg, origin(*g), R, w));
        if (prev >= 0) CHECK(c <= prev + 1e-8);
        prev = c;
      }
    }
  }
  // Cyclic clusters exercise the iterative route on the same invariant.
  auto eu = make_euclidean_lattice(2);
  const Window weu = ball(eu, origin(*eu), 5);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const Config cfg = sample_config(weu, 0.7, seed);
    double prev = -1;
    for (int R = 2; R <= 5; ++R) {
      const double c = effective_conductance(cluster_network(weu, cfg, origin(*eu), R));
      CHECK(c >= 0);
      if (prev >= 0) CHECK(c <= prev + 1e-8);
      prev = c;
    }
  }
}

TEST_CASE("full-tree conductance stays bounded away from zero") {
  auto g = make_fixed_end_tree(2);
  const Window win = ball(g, origin(*g), 10);
  const Config full = sample_config(win, 1.0, 1);
  double prev = -1, last = 0;
  for (int R = 2; R <= 10; ++R) {
    const Network net = cluster_network(win, full, origin(*g), R);
    last = effective_conductance_direct(net);
    const double iterative = effective_conductance(net);
    CHECK(std::abs(iterative - last) <= 1e-8 * std::max(1.0, last));
    if (prev >= 0) CHECK(last <= prev + 1e-12);
    prev = last;
  }
  CHECK(last >= 0.5);  // transient regime: the limit is strictly positive
}

TEST_CASE("ray-decorated cluster conductance decays with the sphere radius") {
  auto g = make_fixed_end_tree(2);
  const VertexRef o = origin(*g);
  for (uint64_t seed : {5u, 6u}) {
    std::vector<double> c;
    for (int R : {4, 8, 16}) {
      const Network net = ray_cluster_network(g, o, R, seed);
      c.push_back(effective_conductance_direct(net));
      // The decorated cluster is a sub-forest of the tree, so both routes
      // apply while the values are still well inside iterative resolution.
      if (R <= 8) {
        const ConductanceResult iter = solve_effective_conductance(net);
        CHECK(std::abs(iter.c_eff - c.back()) <= 1e-8 * std::max(1.0, c.back()));
      }
    }
    CHECK(c[0] > 0);
    CHECK(c[1] <= c[0] + 1e-12);
    CHECK(c[2] <= c[1] + 1e-12);
    CHECK(c[2] < c[0]);  // recurrent regime: the trend is toward zero
  }
}

TEST_CASE("ray cluster networks match the windowed decoration") {
  auto g = make_fixed_end_tree(2);
  const VertexRef o = origin(*g);
  const int R = 4;
  const uint64_t seed = 77;
  const Window win = ball(g, o, 10);
  const RayDecoration dec = ray_decoration_sample(win, seed);

  // Component of o under the decorated edge set, explored to distance R the
  // slow way: straight BFS over window adjacency.
  std::set<VertexRef> members{o};
  std::vector<std::pair<int32_t, int>> queue{{win.index_of(o), 0}};
  size_t edges_seen = 0, sphere = 0;
  while (!queue.empty()) {
    const auto [pos, d] = queue.back();
    queue.pop_back();
    if (d == R) {
      ++sphere;
      continue;
    }
    const auto lo = static_cast<size_t>(win.adj_offset[static_cast<size_t>(pos)]);
    const auto hi = static_cast<size_t>(win.adj_offset[static_cast<size_t>(pos) + 1]);
    for (size_t k = lo; k < hi; ++k) {
      const auto [nb, eid] = win.adj[k];
      if (!dec.omega2[static_cast<size_t>(eid)]) continue;
      REQUIRE_FALSE(dec.censored[static_cast<size_t>(eid)]);
      const VertexRef& v = win.vertices[static_cast<size_t>(nb)];
      if (members.count(v)) continue;
      members.insert(v);
      ++edges_seen;
      queue.push_back({nb, d + 1});
    }
  }

  const Network net = ray_cluster_network(g, o, R, seed);
  CHECK(net.n == static_cast<int32_t>(members.size()));
  CHECK(net.edges.size() == edges_seen);
  CHECK(net.boundary.size() == sphere);
  for (const auto& v : net.label) CHECK(members.count(v) == 1);

  CHECK_THROWS_AS(ray_cluster_network(make_grandparent(2), origin(*make_grandparent(2)),
                                      4, seed),
                  std::invalid_argument);
  CHECK_THROWS_AS(ray_cluster_network(g, o, 0, seed), std::invalid_argument);
}
