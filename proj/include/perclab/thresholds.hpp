// Percolation-threshold formulas for oriented trees and their slab
// approximations. The heavy-cluster threshold of the (1,n1,n2)-oriented tree
// has a closed form; independently, the finite slabs (levels {0..n}) are
// periodic trees whose branching equals the Perron root of a small
// level/entry-type state graph, and 1/lambda* decreases to the closed form
// as the slab widens. Also the cogrowth lower bound for the uniqueness
// threshold of (b+1)-regular-tree x Z products.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perclab/exact.hpp"

namespace perclab {

// Heavy-cluster threshold of the (1,n1,n2)-oriented tree:
//   (1 + 2 sqrt(n1 n2) - sqrt((2 sqrt(n1 n2) + 1)^2 - 4 (n1 + n2)))
//   / (2 (n1 + n2)),
// symmetric in (n1, n2). Requires n1, n2 >= 1.
double ph_closed_form(int n1, int n2);

// Exact value of the same expression whenever both square roots are
// rational (in particular 1/(2k) for n1 = n2 = k, and 1/2 for (1,1));
// nullopt when the value is genuinely irrational.
std::optional<Rat> ph_closed_form_exact(int n1, int n2);

// Lower bound for the uniqueness threshold of T_{b+1} x Z:
// 1 / (sqrt(b) + 1 + sqrt(2 sqrt(b) - 1)). Requires b >= 2.
double pu_lower_bound(int b);

// Vertices of the slab tree (the component of the origin induced on levels
// {0..n} of the oriented tree) are classified by their level and by the type
// of the edge through which a root-ward walk enters them. Child
// multiplicities depend only on that pair, so the slab is the directed cover
// of this finite state graph.
enum class SlabEntry { root, unoriented, forward, backward };

std::string slab_entry_name(SlabEntry e);

struct SlabState {
  int level = 0;
  SlabEntry entry = SlabEntry::root;
};

struct SlabStateGraph {
  int n1 = 0, n2 = 0, n_levels = 0;
  std::vector<SlabState> states;  // root state first
  // counts[s] lists (target state, child multiplicity), multiplicities > 0.
  std::vector<std::vector<std::pair<size_t, int64_t>>> counts;

  size_t root_state() const { return 0; }
  size_t state_count() const { return states.size(); }
};

// Builds the state graph and, unless self_test_depth is 0, certifies it: the
// directed-cover sphere sizes must equal those of a fresh breadth-first
// exploration of the actual slab, exactly, out to self_test_depth (clamped
// so the exploration stays within self_test_budget vertices). A mismatch
// throws logic_error -- the construction itself is then wrong.
SlabStateGraph slab_state_graph(int n1, int n2, int n, int self_test_depth = 12,
                                size_t self_test_budget = 500'000);

// Sphere sizes of the directed cover (depth 0 is the root alone). Counts are
// exact; overflow past int64 throws a numeric error.
std::vector<int64_t> cover_spheres(const SlabStateGraph& sg, int depth);

// sqrt(B(depth) / B(depth - 2)) for ball volumes B(d) = S(0) + ... + S(d):
// a two-level growth-ratio estimate of the cover's branching for
// cross-checking the spectral route. Ball volumes rather than sphere sizes,
// because narrow slabs carry a strong oscillatory subdominant mode that the
// cumulative ratio damps. Degenerate slabs estimate 1, matching the
// spectral-radius convention. Requires depth >= 3.
double cover_growth_estimate(const SlabStateGraph& sg, int depth);

// Largest positive eigenvalue of the child-count matrix (root state
// excluded), by power iteration until the Collatz-Wielandt enclosure
// [min_i (Mv)_i/v_i, max_i (Mv)_i/v_i] is tighter than tol relatively; the
// enclosure makes the result a certified bracket midpoint. Degenerate slabs
// (n = 0, all components finite) return 1 by convention so that 1/lambda
// reports threshold 1. Exceeding the iteration cap throws a numeric error.
double slab_spectral_radius(const SlabStateGraph& sg, double tol = 1e-10,
                            int64_t max_iterations = 1'000'000);

struct SpectralRow {
  int n = 0;
  double lambda_star = 0;
  double inv_lambda = 0;
  double bfs_growth_estimate = 0;
};

struct SpectralReport {
  int n1 = 0, n2 = 0;
  std::vector<SpectralRow> rows;
  double closed_form = 0;
  bool monotone = false;

  double terminal_gap() const;  // last inv_lambda minus closed_form
};

// Scans n = 1..n_max: each row carries lambda*(A_n), its reciprocal, and the
// growth-ratio cross-check. Enforces that inv_lambda is nonincreasing and
// stays above the closed form, both within 1e-9; violations throw a numeric
// error. tol is passed through to the spectral solve.
SpectralReport ph_limit_scan(int n1, int n2, int n_max, double tol = 1e-10);

}  // namespace perclab
