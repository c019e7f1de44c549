#include "perclab/window.hpp"

#include <deque>
#include <set>
#include <unordered_set>

#include "doctest.h"

using namespace perclab;

namespace {

// Naive BFS oracle, structured independently of the Window builder.
size_t bfs_ball_size(FamilyPtr g, int R) {
  std::unordered_set<VertexRef, VertexRefHash> seen{origin(*g)};
  std::deque<std::pair<VertexRef, int>> q{{origin(*g), 0}};
  while (!q.empty()) {
    auto [v, d] = q.front();
    q.pop_front();
    if (d == R) continue;
    for (auto& nb : neighbors(*g, v))
      if (seen.insert(nb).second) q.push_back({nb, d + 1});
  }
  return seen.size();
}

}  // namespace

TEST_CASE("ball sizes: anchor examples") {
  CHECK(ball(make_oriented_tree(1, 2), origin(*make_oriented_tree(1, 2)), 1)
            .vertex_count() == 5);
  auto z1 = make_euclidean_lattice(1);
  CHECK(ball(z1, origin(*z1), 3).vertex_count() == 7);
  auto gp = make_grandparent(2);
  CHECK(ball(gp, origin(*gp), 1).vertex_count() == 9);
  auto t = make_fixed_end_tree(2);
  CHECK(ball(t, origin(*t), 0).vertex_count() == 1);
}

TEST_CASE("ball agrees with the naive BFS oracle") {
  for (auto& g : {make_fixed_end_tree(2), make_oriented_tree(1, 2),
                  make_grandparent(2), make_diestel_leader(2, 3),
                  make_subdivided_fixed_end_tree(3), make_euclidean_lattice(2),
                  make_product_with_Z(make_oriented_tree(1, 1), 1)}) {
    CAPTURE(g->name());
    for (int R : {0, 1, 2, 3, 4})
      CHECK(ball(g, origin(*g), R).vertex_count() == bfs_ball_size(g, R));
  }
}

TEST_CASE("window structure: depths, edges, adjacency") {
  auto g = make_oriented_tree(1, 2);
  Window w = ball(g, origin(*g), 3);
  CHECK(w.vertices[0] == origin(*g));
  CHECK(w.depth[0] == 0);
  for (size_t i = 0; i < w.vertex_count(); ++i) CHECK(w.depth[i] <= 3);
  // Edge endpoints valid, u < v, no duplicates.
  std::set<std::pair<int32_t, int32_t>> seen;
  for (auto& e : w.edges) {
    CHECK(e.u < e.v);
    CHECK(e.v < static_cast<int32_t>(w.vertex_count()));
    CHECK(seen.insert({e.u, e.v}).second);
  }
  // CSR adjacency is consistent with the edge list.
  size_t half_edges = 0;
  for (size_t i = 0; i < w.vertex_count(); ++i) {
    for (int32_t a = w.adj_offset[i]; a < w.adj_offset[i + 1]; ++a) {
      auto [j, e] = w.adj[a];
      CHECK((w.edges[e].u == static_cast<int32_t>(i) ||
             w.edges[e].v == static_cast<int32_t>(i)));
      CHECK((w.edges[e].u == j || w.edges[e].v == j));
      ++half_edges;
    }
  }
  CHECK(half_edges == 2 * w.edge_count());
  // Deterministic rebuild.
  Window w2 = ball(g, origin(*g), 3);
  CHECK(w.vertices == w2.vertices);
  CHECK(w.edges == w2.edges);
}

TEST_CASE("boundary marks are exactly the vertices missing a neighbor") {
  for (auto& g : {make_oriented_tree(1, 2), make_grandparent(2),
                  make_subdivided_fixed_end_tree(3), make_euclidean_lattice(2)}) {
    CAPTURE(g->name());
    Window w = ball(g, origin(*g), 3);
    for (size_t i = 0; i < w.vertex_count(); ++i) {
      int degree = g->orbit_degrees()[w.vertices[i].orbit];
      int present = w.adj_offset[i + 1] - w.adj_offset[i];
      CHECK(w.is_boundary[i] == (present < degree ? 1 : 0));
    }
  }
}

TEST_CASE("interior vertices of a ball keep their full degree") {
  auto g = make_grandparent(2);
  Window w = ball(g, origin(*g), 2);
  REQUIRE(w.interior(0));
  CHECK(w.adj_offset[1] - w.adj_offset[0] == 8);
}

TEST_CASE("slab_component basics on the oriented tree") {
  auto g = make_oriented_tree(1, 2);
  // One level: component of o = the single unoriented edge.
  Window w0 = slab_component(g, origin(*g), 0, 5);
  CHECK(w0.vertex_count() == 2);
  CHECK(w0.edge_count() == 1);
  CHECK(w0.is_boundary[0] == 1);
  CHECK(w0.is_boundary[1] == 1);
  // Two levels: infinite periodic tree, truncated at depth 3; levels in {0,1}.
  Window w1 = slab_component(g, origin(*g), 1, 3);
  CHECK(w1.vertex_count() > 4);
  for (auto& v : w1.vertices) {
    CHECK(v.level >= 0);
    CHECK(v.level <= 1);
  }
}

TEST_CASE("slab_component of a plain fixed-end tree level is an isolated vertex") {
  auto g = make_fixed_end_tree(3);
  Window w = slab_component(g, origin(*g), 0, 4);
  CHECK(w.vertex_count() == 1);
  CHECK(w.edge_count() == 0);
}

TEST_CASE("slab_component rejects families without levels") {
  auto z = make_euclidean_lattice(2);
  CHECK_THROWS_AS(slab_component(z, origin(*z), 1, 3), std::invalid_argument);
  auto prod = make_product_with_Z(make_fixed_end_tree(2), 1);
  CHECK_NOTHROW(slab_component(prod, origin(*prod), 1, 2));
  // q = 1 with a genuine level grading stays allowed.
  auto sym = make_oriented_tree(1, 1);
  CHECK_NOTHROW(slab_component(sym, origin(*sym), 1, 3));
}

TEST_CASE("sphere sizes partition the ball") {
  auto g = make_oriented_tree(1, 2);
  Window w = ball(g, origin(*g), 4);
  auto sph = sphere_sizes(w);
  REQUIRE(sph.size() == 5);
  int64_t total = 0;
  for (auto s : sph) total += s;
  CHECK(total == static_cast<int64_t>(w.vertex_count()));
  CHECK(sph[0] == 1);
  CHECK(sph[1] == 4);
}

TEST_CASE("window budget raises a resource error") {
  auto g = make_oriented_tree(1, 2);
  CHECK_THROWS_AS(ball(g, origin(*g), 8, 100), resource_error);
}
