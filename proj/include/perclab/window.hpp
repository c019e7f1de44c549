// Finite canonical enumerations of pieces of an infinite graph: balls B(o,R)
// and truncated slab components (the connected component of o inside a band of
// consecutive levels). Vertices appear in BFS discovery order, which is
// deterministic because neighbor enumeration is; edges are listed once, in
// scan order of their smaller endpoint index. A vertex is marked boundary as
// soon as any of its infinite-graph neighbors was left out of the window.
#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "perclab/errors.hpp"
#include "perclab/graphs.hpp"

namespace perclab {

enum class WindowKind { ball, slab_component };

struct WindowEdge {
  int32_t u = 0, v = 0;  // positions into vertices, u < v
  friend bool operator==(const WindowEdge&, const WindowEdge&) = default;
};

struct Window {
  FamilyPtr family;
  WindowKind kind = WindowKind::ball;
  VertexRef center;
  int radius = 0;    // ball: R; slab_component: BFS truncation depth
  int n_levels = 0;  // slab_component only

  std::vector<VertexRef> vertices;  // BFS order, center first
  std::vector<WindowEdge> edges;    // canonical order
  std::vector<int32_t> depth;       // BFS distance from center, per vertex
  std::vector<uint8_t> is_boundary; // per vertex

  // CSR adjacency over window edges: for vertex i, adj[adj_offset[i]..adj_offset[i+1])
  // lists (neighbor position, edge id).
  std::vector<int32_t> adj_offset;
  std::vector<std::pair<int32_t, int32_t>> adj;

  int32_t index_of(const VertexRef& v) const {
    auto it = pos_.find(v);
    return it == pos_.end() ? -1 : it->second;
  }
  bool contains(const VertexRef& v) const { return pos_.count(v) > 0; }
  bool interior(int32_t i) const { return !is_boundary[static_cast<size_t>(i)]; }
  size_t vertex_count() const { return vertices.size(); }
  size_t edge_count() const { return edges.size(); }
  std::string kind_str() const;

  std::unordered_map<VertexRef, int32_t, VertexRefHash> pos_;
};

inline constexpr size_t kDefaultWindowBudget = 4'000'000;

// All vertices at graph distance <= R from o, with induced edges.
Window ball(FamilyPtr g, const VertexRef& o, int R,
            size_t max_vertices = kDefaultWindowBudget);

// BFS (to the given depth) of the connected component of o induced on levels
// {level(o) .. level(o)+n_levels}. Requires a family with a nonconstant level
// function; euclidean lattices and their products are rejected.
Window slab_component(FamilyPtr g, const VertexRef& o, int n_levels, int depth,
                      size_t max_vertices = kDefaultWindowBudget);

// Vertex count per BFS depth 0..max(depth) (sphere sizes).
std::vector<int64_t> sphere_sizes(const Window& w);

}  // namespace perclab
