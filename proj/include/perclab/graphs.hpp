// Graph families with a fixed point at infinity / graded automorphism
// structure, addressed so that every vertex has one canonical, hashable name.
//
// Vertex models (all relative to a distinguished origin):
//   fixed_end_tree(b)      tree where every vertex has one parent (toward the
//                          fixed end) and b children: vertex = (level, m),

//                          parent(level, m) = (level+1, floor(m/b)),
//                          children = (level-1, b*m + i). Degree b+1.
//   grandparent(b)         same vertex set, plus edges to the grandparent
//                          (level+2) and from the b^2 grandchildren (level-2).
//   oriented_tree(n1,n2)   (1,n1,n2)-oriented (n1+n2+1)-regular tree: every
//                          vertex meets 1 unoriented edge (level 0), n1
//                          outgoing (level +1) and n2 incoming (level -1)
//                          oriented edges. Vertices are reduced edge-words
//                          from the origin: '~' (unoriented, involutive),
//                          'A'+i (outgoing slot i), 'a'+j (incoming slot j),
//                          where stepping back along the entry edge reuses
//                          slot 0 of the opposite kind.
//   diestel_leader(k,n)    pairs of tree vertices at opposite heights:
//                          vertex = (level, m1, m2); up-moves pair the first
//                          tree's parent with a child in the second tree.
//   subdivided_fixed_end_tree(d)
//                          degree-d tree with fixed end, one midpoint vertex
//                          per edge. A midpoint is addressed by the lower
//                          endpoint of its edge and sits one level above it
//                          with orbit measure 1/(d-1) (stabilizer orbit count:
//                          a vertex stabilizer permutes its d-1 child-edge
//                          midpoints, an edge stabilizer fixes both endpoints).
//   euclidean_lattice(dim) Z^dim (optionally with a parity 2-coloring that
//                          splits the single orbit in two).
//   product_with_Z(base,d) cartesian product of any family with Z^d.
//
// Levels grade the modular structure: m(v) = orbit_measure(orbit) * q^level
// with q = modular_base. Modular ratios, cocycle identities and orbit
// representatives are all exact rationals.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "perclab/exact.hpp"

namespace perclab {

enum class FamilyKind {
  fixed_end_tree,
  oriented_tree,
  grandparent,
  diestel_leader,
  product_with_Z,
  subdivided_fixed_end_tree,
  euclidean_lattice,
};

std::string kind_name(FamilyKind k);

struct GraphFamily;
using FamilyPtr = std::shared_ptr<const GraphFamily>;

struct GraphFamily {
  FamilyKind kind;
  int b = 0;          // fixed_end_tree / grandparent: children per vertex
  int n1 = 0, n2 = 0; // oriented_tree
  int k = 0, n = 0;   // diestel_leader
  int degree = 0;     // subdivided_fixed_end_tree: underlying tree degree
  int dim = 0;        // euclidean_lattice / product_with_Z
  bool colored = false;  // euclidean_lattice: parity 2-coloring
  FamilyPtr base;        // product_with_Z

  int orbit_count() const;
  Rat modular_base() const;
  std::vector<int> orbit_degrees() const;
  std::vector<Rat> orbit_measures() const;  // per-orbit m, orbit 0 -> 1
  // Squarefree D with sqrt(m(x)m(y)) in Q(sqrt(D)) for every edge; throws for
  // parameters where no single quadratic extension suffices.
  long long quad_D() const;
  // True when the level function is nonconstant (slabs make sense).
  bool graded() const;
  std::string name() const;
};

FamilyPtr make_fixed_end_tree(int b);
FamilyPtr make_oriented_tree(int n1, int n2);
FamilyPtr make_grandparent(int b);
FamilyPtr make_diestel_leader(int k, int n);
FamilyPtr make_subdivided_fixed_end_tree(int degree);
FamilyPtr make_euclidean_lattice(int dim, bool colored = false);
FamilyPtr make_product_with_Z(FamilyPtr base, int dim);
// Parses "oriented_tree(1,2)", "euclidean_lattice(2)", "fixed_end_tree(2)xZ1", ...
FamilyPtr build_family(const std::string& text);

struct VertexRef {
  int32_t orbit = 0;
  int64_t level = 0;
  std::string addr;

  friend bool operator==(const VertexRef&, const VertexRef&) = default;
  // Canonical total order: (orbit, level, addr length, addr).
  friend bool operator<(const VertexRef& x, const VertexRef& y) {
    if (x.orbit != y.orbit) return x.orbit < y.orbit;
    if (x.level != y.level) return x.level < y.level;
    if (x.addr.size() != y.addr.size()) return x.addr.size() < y.addr.size();
    return x.addr < y.addr;
  }
  std::string str() const {
    return std::to_string(orbit) + ":" + std::to_string(level) + ":" + addr;
  }
};

struct VertexRefHash {
  size_t operator()(const VertexRef& v) const {
    size_t h = std::hash<std::string>{}(v.addr);
    h ^= std::hash<int64_t>{}(v.level) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h ^= std::hash<int32_t>{}(v.orbit) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return h;
  }
};

// Per-orbit weight pair: a (positive, sums to 1) and the relative stabilizer
// measure m (m[0] = 1). m defaults to the family's own orbit measures.
struct OrbitWeights {
  std::vector<Rat> a;
  std::vector<Rat> m;
};

// Uniform a over the family's orbits, family m.
OrbitWeights uniform_weights(const GraphFamily& g);
// Validates sizes/positivity/normalization against g; throws invalid_argument.
void check_weights(const GraphFamily& g, const OrbitWeights& w);

VertexRef origin(const GraphFamily& g);

// All neighbors of v, in a fixed canonical order; adjacency is symmetric.
std::vector<VertexRef> neighbors(const GraphFamily& g, const VertexRef& v);

// Stabilizer measure m(v) = orbit_measure(orbit(v)) * modular_base^level(v).
Rat m_value(const GraphFamily& g, const VertexRef& v);

// Modular ratio (a_v m(v)) / (a_u m(u)) for orbit weights a.
Rat modular_ratio(const GraphFamily& g, const std::vector<Rat>& a,
                  const VertexRef& u, const VertexRef& v);
Rat modular_ratio(const GraphFamily& g, const OrbitWeights& w,
                  const VertexRef& u, const VertexRef& v);

// One vertex per orbit at level 0, found by BFS from the origin (origin first).
std::vector<VertexRef> orbit_representatives(const GraphFamily& g);

// Endpoint of the canonical geodesic of the given length from the origin
// (used to pick connectivity targets deterministically).
VertexRef canonical_target(const GraphFamily& g, int distance);

// Graph distance from u to v by bidirectionless BFS, or -1 if it exceeds cap.
int distance_between(const GraphFamily& g, const VertexRef& u, const VertexRef& v,
                     int cap);

// Stable 64-bit keys derived from canonical addresses; used to seed
// per-vertex / per-edge decisions in windowless (lazy) sampling.
uint64_t canonical_key(const VertexRef& v);
uint64_t canonical_edge_key(const VertexRef& u, const VertexRef& v);

// 128-bit helpers for the tree coordinates (std::to_string has no  __int128).
std::string i128_str(__int128 v);
__int128 i128_parse(const std::string& s);

}  // namespace perclab
