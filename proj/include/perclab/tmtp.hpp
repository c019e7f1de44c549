// Exact-arithmetic verification layer for the tilted mass-transport identity,
// the per-orbit stationary weights, and harmonicity of modular ratios.
//
// Everything here is exact: Markov chains and balance systems are solved over
// rationals, transport sums enumerate finite balls, and the deliverable of
// each check is a rational that must be exactly zero (or an exactly equal
// lhs/rhs pair).
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "perclab/exact.hpp"
#include "perclab/graphs.hpp"
#include "perclab/window.hpp"

namespace perclab {

// Lazy chain on the orbit set: stay put with probability 1/2, otherwise step
// to a uniform neighbor and record its orbit.
struct OrbitChain {
  std::vector<std::vector<Rat>> transition;  // row-stochastic, L x L
  std::vector<Rat> stationary;               // positive, sums to 1, exact
};

OrbitChain lazy_orbit_chain(const GraphFamily& g);

// Stationary orbit weights computed two independent ways: (1) the lazy-chain
// stationary vector biased by 1/deg and renormalized; (2) exact solution of
// the per-orbit balance system 0 = sum_{z~y} [a_[z] m(z) - a_[y] m(y)].
// Both routes must agree; solve_mu throws numeric_error if they do not.
struct MuResult {
  OrbitWeights weights;           // a = mu (biasing route), m = family measures
  std::vector<Rat> mu_from_system;  // independent linear-solve route
  std::vector<Rat> residuals;       // balance residual per orbit rep at a = mu
};

MuResult solve_mu(const GraphFamily& g);

// Diagonally invariant transport with finite support radius.
struct Transport {
  std::string name;
  int support_radius = 0;
  std::function<Rat(const VertexRef&, const VertexRef&)> evaluate;
};

// Fixed suite: identity, adjacency indicator, same-level / one-up / two-up
// edge indicators, and a distance-2 sphere indicator with a level constraint.
std::vector<Transport> transport_suite(FamilyPtr g);

struct TmtpResult {
  std::string transport;
  Rat lhs, rhs;
  bool equal = false;
};

// lhs = sum_i a_i sum_x f(o_i, x); rhs = sum_i a_i sum_x f(x, o_i) D(o_i, x)
// with D the a-weighted modular ratio; sums enumerate B(o_i, support_radius).
TmtpResult verify_tmtp(FamilyPtr g, const OrbitWeights& w, const Transport& f);

// Exact edge conductance (empty function = unit conductances).
using Conductance = std::function<Rat(const VertexRef&, const VertexRef&)>;

// max over interior y of |D(x,y) - (sum_{z~y} c(y,z) D(x,z)) / (sum c(y,z))|,
// exact. Throws invalid_argument if the window has no interior vertex.
Rat harmonicity_residual(const Window& win, const OrbitWeights& w,
                         const VertexRef& x, const Conductance& c = {});

// max |D(x,y)D(y,z) - D(x,z)| over `trials` seeded triples from B(o,4) plus
// the degenerate triple; exact rational, must be zero.
Rat cocycle_check(FamilyPtr g, const OrbitWeights& w, int trials, uint64_t seed);

}  // namespace perclab
