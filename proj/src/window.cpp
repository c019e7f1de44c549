#include "perclab/window.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <string>

namespace perclab {

namespace {

// Shared BFS enumerator. `admit` filters which neighbors may enter the window
// (level restriction for slabs); `max_depth` stops expansion (< 0 = no cap).
Window explore(FamilyPtr g, const VertexRef& o, int max_depth, size_t max_vertices,
               const std::function<bool(const VertexRef&)>& admit) {
  Window w;
  w.family = g;
  w.center = o;
  w.vertices.push_back(o);
  w.depth.push_back(0);
  w.pos_.emplace(o, 0);
  std::deque<int32_t> queue{0};
  while (!queue.empty()) {
    int32_t i = queue.front();
    queue.pop_front();
    if (max_depth >= 0 && w.depth[i] >= max_depth) continue;
    // Copy: w.vertices may reallocate while we append.
    VertexRef v = w.vertices[i];
    for (auto& nb : neighbors(*g, v)) {
      if (!admit(nb) || w.pos_.count(nb)) continue;
      if (w.vertices.size() >= max_vertices)
        throw resource_error("window budget exceeded at " +
                             std::to_string(max_vertices) + " vertices");
      int32_t j = static_cast<int32_t>(w.vertices.size());
      w.pos_.emplace(nb, j);
      w.vertices.push_back(std::move(nb));
      w.depth.push_back(w.depth[i] + 1);
      queue.push_back(j);
    }
  }

  // Induced edges in canonical scan order + boundary marks.
  const int32_t V = static_cast<int32_t>(w.vertices.size());
  w.is_boundary.assign(V, 0);
  std::vector<std::vector<std::pair<int32_t, int32_t>>> inc(V);
  for (int32_t i = 0; i < V; ++i) {
    for (auto& nb : neighbors(*g, w.vertices[i])) {
      int32_t j = w.index_of(nb);
      if (j < 0) {
        w.is_boundary[i] = 1;
        continue;
      }
      if (j > i) {
        int32_t e = static_cast<int32_t>(w.edges.size());
        w.edges.push_back({i, j});
        inc[i].push_back({j, e});
        inc[j].push_back({i, e});
      }
    }
  }
  w.adj_offset.assign(V + 1, 0);
  for (int32_t i = 0; i < V; ++i)
    w.adj_offset[i + 1] = w.adj_offset[i] + static_cast<int32_t>(inc[i].size());
  w.adj.reserve(w.adj_offset[V]);
  for (int32_t i = 0; i < V; ++i)
    for (auto& pr : inc[i]) w.adj.push_back(pr);
  return w;
}

}  // namespace

std::string Window::kind_str() const {
  if (kind == WindowKind::ball)
    return "ball(" + center.str() + "," + std::to_string(radius) + ")";
  return "slab_component(" + center.str() + "," + std::to_string(n_levels) +
         ",depth=" + std::to_string(radius) + ")";
}

Window ball(FamilyPtr g, const VertexRef& o, int R, size_t max_vertices) {
  if (R < 0) throw std::invalid_argument("ball: negative radius");
  Window w = explore(g, o, R, max_vertices, [](const VertexRef&) { return true; });
  w.kind = WindowKind::ball;
  w.radius = R;
  return w;
}

Window slab_component(FamilyPtr g, const VertexRef& o, int n_levels, int depth,
                      size_t max_vertices) {
  if (!g->graded())
    throw std::invalid_argument("slab_component: " + g->name() +
                                " has a constant level function");
  if (n_levels < 0) throw std::invalid_argument("slab_component: negative n_levels");
  if (depth < 0) throw std::invalid_argument("slab_component: negative depth");
  const int64_t lo = o.level, hi = o.level + n_levels;
  Window w = explore(g, o, depth, max_vertices, [lo, hi](const VertexRef& v) {
    return v.level >= lo && v.level <= hi;
  });
  w.kind = WindowKind::slab_component;
  w.radius = depth;
  w.n_levels = n_levels;
  return w;
}

std::vector<int64_t> sphere_sizes(const Window& w) {
  std::vector<int64_t> out;
  for (auto d : w.depth) {
    if (static_cast<size_t>(d) >= out.size()) out.resize(d + 1, 0);
    ++out[d];
  }
  return out;
}

}  // namespace perclab
