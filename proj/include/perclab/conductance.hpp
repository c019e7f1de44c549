// Electrical-network diagnostics for percolation clusters: effective
// conductance from a source vertex to a wired boundary sphere, solved by
// Jacobi-preconditioned conjugate gradients on the discrete harmonic
// equations (OpenMP-parallel with fixed-order reductions, so results are
// bit-identical for any worker count), plus a serial direct elimination
// reference for acyclic networks. Builders turn windowed percolation
// clusters, or lazily explored one-offspring-ray decorated clusters, into
// explicit networks with unit or sqrt(m(x)m(y)) edge conductances.
#pragma once

#include <cstdint>
#include <vector>

#include "perclab/percolation.hpp"
#include "perclab/window.hpp"

namespace perclab {

enum class EdgeWeight { sqrt_mm, unit };

struct Network {
  int32_t n = 0;
  std::vector<WindowEdge> edges;
  std::vector<double> conductance;  // per edge, > 0
  int32_t source = 0;
  std::vector<int32_t> boundary;  // wired together at potential 0
  std::vector<VertexRef> label;   // optional vertex names; builders fill this
};

struct ConductanceResult {
  double c_eff = 0;
  int64_t iterations = 0;
  double residual = 0;
  bool reached_boundary = false;  // false <=> source cut off, c_eff forced 0
};

// Unit potential at the source, zero on the wired boundary; interior
// potentials from conjugate gradients run to 2-norm residual <= tol * |rhs|.
// Returns 0 (without solving) when no open path joins source and boundary.
// Exceeding the iteration cap raises a numeric error carrying the residual.
ConductanceResult solve_effective_conductance(const Network& net, double tol = 1e-10,
                                              int workers = 0,
                                              int64_t max_iterations = 1'000'000);

double effective_conductance(const Network& net, double tol = 1e-10,
                             int workers = 0);

// Series/parallel elimination along the tree from the source; exact up to
// float rounding and independent of the iterative route. Cyclic input -> error.
double effective_conductance_direct(const Network& net);

// The open cluster of o inside B(o, R) (window must be a ball centered at o
// with radius >= R >= 1): source o, boundary = cluster vertices at distance
// exactly R, conductances per the weight rule.
Network cluster_network(const Window& win, const Config& cfg, const VertexRef& o,
                        int R, EdgeWeight weight = EdgeWeight::sqrt_mm);

// The omega_2 cluster of o in the one-offspring-ray decoration of a
// fixed-end tree, explored lazily out to distance R with canonical-address
// keying (no window, so R far beyond any storable ball is fine). Ray heights
// are exact here: there is no truncation to censor them.
Network ray_cluster_network(FamilyPtr g, const VertexRef& o, int R, uint64_t seed,
                            EdgeWeight weight = EdgeWeight::sqrt_mm,
                            size_t max_vertices = kDefaultWindowBudget);

}  // namespace perclab
