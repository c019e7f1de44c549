// Random-walk kernels on percolation configurations, in exact quadratic-field
// arithmetic: the square-root-biased walk puts conductance sqrt(m(x)m(y)) on
// every edge and folds closed edges into self-loops, so that pi(x) =
// sum_{z~x} sqrt(m(z)m(x)) is reversible for it and the time reversal equals
// the forward kernel. Also provides delayed / plain simple random walk,
// two-sided trajectory simulation driven by split counter streams, and exact
// visit-frequency statistics.
#pragma once

#include <cstdint>
#include <vector>

#include "perclab/exact.hpp"
#include "perclab/percolation.hpp"
#include "perclab/window.hpp"

namespace perclab {

enum class KernelKind { sqrt_biased, delayed_srw, plain_srw };

std::string kernel_kind_name(KernelKind k);

struct KernelMove {
  int32_t to = -1;    // window position
  int32_t edge = -1;  // window edge id
  Quad prob;
};

struct KernelDist {
  int32_t at = -1;
  std::vector<KernelMove> moves;  // one per open incident edge, adjacency order
  Quad self;                      // stay probability (remainder)
  Quad total() const;             // sums moves + self; equals 1 exactly
};

// One-step law of the biased walk at an interior vertex: open edge (v,y) gets
// sqrt(m(v)m(y)) / sum_{z~v} sqrt(m(z)m(v)) (denominator over all graph
// neighbors), closed edges feed the self-loop. Boundary vertex -> error.
KernelDist biased_kernel(const Window& win, const Config& cfg, const VertexRef& v);

// Time reversal computed literally as pi(y)/pi(x) * q(y,x) with
// pi(x) = sum_{z~x} sqrt(m(z)m(x)); the arithmetic, not algebra on paper,
// reduces it back to the forward kernel, which callers may check exactly.
KernelDist reversed_kernel(const Window& win, const Config& cfg, const VertexRef& v);

// Kind dispatch. delayed_srw: open edges 1/deg, closed mass stays put.
// plain_srw ignores the configuration: every edge 1/deg.
KernelDist kernel_dist(KernelKind kind, const Window& win, const Config& cfg,
                       const VertexRef& v);

struct StationarityReport {
  Quad max_stationarity_dev;     // max_y |sum_x pi(x) q(x,y) - pi(y)|
  Quad max_detailed_balance_dev; // max over open edges |pi(x)q(x,y) - pi(y)q(y,x)|
  size_t interior_vertices = 0;
};

// Both deviations over the interior sub-window, edges to boundary vertices
// treated as closed; exact zero is the expected outcome for every kind.
StationarityReport stationarity_check(const Window& win, const Config& cfg,
                                      KernelKind kind = KernelKind::sqrt_biased);

struct Trajectory {
  int32_t start = -1;             // window position of index 0
  std::vector<int32_t> forward;   // positions at indices +1, +2, ...
  std::vector<int32_t> backward;  // positions at indices -1, -2, ...
  bool truncated_forward = false; // halted early on boundary contact
  bool truncated_backward = false;
  uint64_t seed = 0;

  int64_t lo() const { return -static_cast<int64_t>(backward.size()); }
  int64_t hi() const { return static_cast<int64_t>(forward.size()); }
  int32_t at(int64_t k) const;  // k in [lo(), hi()]
};

// Two-sided walk from an interior start: the forward side is driven by the
// kernel, the backward side by an independent counter stream and the reversed
// kernel. Each side halts (with its truncation flag) on first boundary
// contact, where the kernel is no longer defined.
Trajectory simulate_two_sided(const Window& win, const Config& cfg,
                              const VertexRef& start, int64_t steps_forward,
                              int64_t steps_backward, uint64_t seed,
                              KernelKind kind = KernelKind::sqrt_biased);

// Visit frequency of the index window [m, n): (1/(n-m)) * #{k : member[at(k)]}.
// member is a per-window-vertex mask; indices outside the trajectory -> error.
double frequency(const Trajectory& traj, const std::vector<uint8_t>& member,
                 int64_t m, int64_t n);

// Membership mask of the cluster containing the given window position.
std::vector<uint8_t> cluster_member_mask(const ClusterDecomposition& dec,
                                         int32_t vertex_pos);

// Exact stationary weight pi(x) = sum_{z~x} sqrt(m(z)m(x)) of the biased
// walk (kind sqrt_biased), or the degree for the simple-random-walk kinds.
Quad stationary_weight(const GraphFamily& g, const VertexRef& v, KernelKind kind);

}  // namespace perclab
