// Seeded Bernoulli bond percolation on windows: configuration sampling with a
// per-edge uniform coupling, union-find cluster decomposition, Monte Carlo
// connectivity and decay curves, exact tilted cluster masses, and the
// one-offspring-ray decoration process on fixed-end trees.
//
// Sampling is a pure function of coordinates. Windowed edges draw their
// uniform from (seed, edge index, trial); windowless (lazy) exploration draws
// from (seed, canonical edge key, trial), so a lazily explored cluster is
// reproducible without enumerating a window first. Trial loops are
// OpenMP-parallel with per-trial result slots and a fixed-order reduction;
// serial reference implementations (full config + union-find) are kept for
// equivalence testing.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "perclab/exact.hpp"
#include "perclab/graphs.hpp"
#include "perclab/window.hpp"

namespace perclab {

struct Config {
  double p = 0;
  uint64_t seed = 0;
  uint64_t trial = 0;
  std::vector<double> uniform;  // per window edge, the coupling variable
  std::vector<uint8_t> open;    // open[e] = uniform[e] < p
};

// Deterministic per (win, p, seed, trial); open iff uniform < p, so configs
// at p1 <= p2 with equal coordinates are coupled monotonically.
Config sample_config(const Window& win, double p, uint64_t seed, uint64_t trial = 0);

struct ClusterStats {
  int64_t size = 0;
  bool boundary_touch = false;
  int64_t min_level = 0, max_level = 0;
};

struct ClusterDecomposition {
  std::vector<int32_t> cluster_id;  // per vertex: smallest vertex index in its cluster
  std::vector<int32_t> roots;       // distinct cluster ids, ascending
  std::vector<ClusterStats> stats;  // parallel to roots
  bool same_cluster(int32_t u, int32_t v) const {
    return cluster_id[u] == cluster_id[v];
  }
  size_t cluster_count() const { return roots.size(); }
};

ClusterDecomposition clusters(const Window& win, const Config& cfg);

struct Estimate {
  double p_hat = 0;
  double se = 0;
  int64_t trials = 0;
  int64_t hits = 0;
};

// Monte Carlo probability that x and y are connected inside
// ball(x, d(x,y)+margin) (free boundary: a lower-bound estimator for the
// infinite-graph connectivity). Workers <= 0 means the OpenMP default.
Estimate connectivity_estimate(FamilyPtr g, double p, const VertexRef& x,
                               const VertexRef& y, int64_t trials, uint64_t seed,
                               int margin = 2, int workers = 0);

// Reference implementation: per trial, materialize the full Config and take
// the union-find decomposition. Bit-identical hits to connectivity_estimate.
Estimate connectivity_estimate_serial(FamilyPtr g, double p, const VertexRef& x,
                                      const VertexRef& y, int64_t trials,
                                      uint64_t seed, int margin = 2);

struct DecayRow {
  VertexRef target;
  int distance = 0;
  Estimate est;
  double running_min = 0;  // min of p_hat over this and all closer targets
};

// One estimate per target, all targets evaluated on the same per-trial
// configs (shared coupling). Targets must be sorted by distance from o.
std::vector<DecayRow> decay_curve(FamilyPtr g, double p, const VertexRef& o,
                                  const std::vector<VertexRef>& targets,
                                  int64_t trials, uint64_t seed, int margin = 2,
                                  int workers = 0);

// Exact partial tilted sums sum_{x in C(o), d(o,x) <= R} m(x)/m(o) for each
// requested radius. The window must be centered at o (depths are distances).
std::vector<Rat> tilted_mass(const Window& win, const Config& cfg,
                             const VertexRef& o, const std::vector<int>& radii);

// Windowless variant: explores the cluster of o lazily with canonical-key
// sampling, so radii far beyond any storable window are reachable.
std::vector<Rat> tilted_mass_lazy(FamilyPtr g, double p, const VertexRef& o,
                                  const std::vector<int>& radii, uint64_t seed,
                                  uint64_t trial = 0);

struct RayDecoration {
  std::vector<uint8_t> omega1;    // per edge: chosen offspring edge
  std::vector<uint8_t> omega2;    // per edge: omega1 plus inserted edges
  std::vector<int32_t> insert_n;  // per edge: ray height used for insertion, -1 if n/a
  std::vector<uint8_t> censored;  // per edge: ray top left the window
};

// One-offspring decoration on a ball window of a fixed-end tree: every vertex
// keeps exactly one uniformly chosen offspring edge (omega1); every other
// offspring edge (x,y) is reinserted with probability 2^{-(n+1)} where n is
// the distance from x to the top of its omega1-ray (omega2).
RayDecoration ray_decoration_sample(const Window& win, uint64_t seed);

}  // namespace perclab
