#include "perclab/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "perclab/errors.hpp"
#include "perclab/graphs.hpp"
#include "perclab/window.hpp"

namespace perclab {

namespace {

// Exact integer square root, or -1 when v is not a perfect square.
long long perfect_sqrt(long long v) {
  if (v < 0) return -1;
  auto r = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(v))));
  while (r > 0 && r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r * r == v ? r : -1;
}

void check_orientation(int n1, int n2) {
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("oriented-tree thresholds: need n1, n2 >= 1");
}

constexpr __int128 kSphereCeiling = static_cast<__int128>(1e30);

// State masses per depth; exact while they stay under the ceiling.
std::vector<__int128> cover_sphere_masses(const SlabStateGraph& sg, int depth) {
  std::vector<__int128> cur(sg.state_count(), 0), next(sg.state_count());
  cur[sg.root_state()] = 1;
  std::vector<__int128> spheres{1};
  for (int d = 1; d <= depth; ++d) {
    std::fill(next.begin(), next.end(), 0);
    __int128 total = 0;
    for (size_t s = 0; s < sg.state_count(); ++s) {
      if (cur[s] == 0) continue;
      for (const auto& [t, mult] : sg.counts[s]) {
        next[t] += cur[s] * mult;
        total += cur[s] * mult;
      }
    }
    if (total > kSphereCeiling)
      throw numeric_error("cover spheres: counts exceed the exact ceiling");
    spheres.push_back(total);
    std::swap(cur, next);
  }
  return spheres;
}

// Slab sphere sizes by real exploration, memoized: within depth d of the
// origin the slab {0..n} is indistinguishable from {0..min(n,d)}, so deep
// scans reuse a handful of explorations.
std::vector<int64_t> slab_bfs_spheres(int n1, int n2, int n, int depth,
                                      size_t budget) {
  const int n_eff = std::min(n, depth);
  using Key = std::tuple<int, int, int, int>;
  static std::map<Key, std::vector<int64_t>> cache;
  static std::mutex mu;
  const Key key{n1, n2, n_eff, depth};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto g = make_oriented_tree(n1, n2);
  const Window w = slab_component(g, origin(*g), n_eff, depth, budget);
  std::vector<int64_t> spheres = sphere_sizes(w);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(spheres)).first->second;
}

void trim_zeros(std::vector<int64_t>& v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
}

}  // namespace

double ph_closed_form(int n1, int n2) {
  check_orientation(n1, n2);
  const double s = std::sqrt(static_cast<double>(n1) * n2);
  const double inner = (2 * s + 1) * (2 * s + 1) - 4.0 * (n1 + n2);
  return (1 + 2 * s - std::sqrt(inner)) / (2.0 * (n1 + n2));
}

std::optional<Rat> ph_closed_form_exact(int n1, int n2) {
  check_orientation(n1, n2);
  const long long s = perfect_sqrt(static_cast<long long>(n1) * n2);
  if (s < 0) return std::nullopt;
  const long long inner = (2 * s + 1) * (2 * s + 1) - 4LL * (n1 + n2);
  const long long t = perfect_sqrt(inner);
  if (t < 0) return std::nullopt;
  return Rat(1 + 2 * s - t, 2LL * (n1 + n2));
}

double pu_lower_bound(int b) {
  if (b < 2) throw std::invalid_argument("pu_lower_bound: need b >= 2");
  const double rb = std::sqrt(static_cast<double>(b));
  return 1.0 / (rb + 1 + std::sqrt(2 * rb - 1));
}

std::string slab_entry_name(SlabEntry e) {
  switch (e) {
    case SlabEntry::root: return "root";
    case SlabEntry::unoriented: return "unoriented";
    case SlabEntry::forward: return "forward";
    case SlabEntry::backward: return "backward";
  }
  throw std::logic_error("slab_entry_name: bad enum");
}

SlabStateGraph slab_state_graph(int n1, int n2, int n, int self_test_depth,
                                size_t self_test_budget) {
  check_orientation(n1, n2);
  if (n < 0) throw std::invalid_argument("slab_state_graph: need n >= 0");

  SlabStateGraph sg;
  sg.n1 = n1;
  sg.n2 = n2;
  sg.n_levels = n;

  std::map<std::pair<int, int>, size_t> index;
  auto add_state = [&](int level, SlabEntry entry) {
    index[{level, static_cast<int>(entry)}] = sg.states.size();
    sg.states.push_back({level, entry});
  };
  add_state(0, SlabEntry::root);
  for (int i = 0; i <= n; ++i) add_state(i, SlabEntry::unoriented);
  for (int i = 1; i <= n; ++i) add_state(i, SlabEntry::forward);
  for (int i = 0; i + 1 <= n; ++i) add_state(i, SlabEntry::backward);

  sg.counts.resize(sg.states.size());
  for (size_t s = 0; s < sg.states.size(); ++s) {
    const auto [i, t] = sg.states[s];
    auto emit = [&](int level, SlabEntry entry, int64_t mult) {
      if (mult > 0)
        sg.counts[s].push_back({index.at({level, static_cast<int>(entry)}), mult});
    };
    // One unoriented edge per vertex; it is the parent iff we entered by it.
    if (t != SlabEntry::unoriented) emit(i, SlabEntry::unoriented, 1);
    // n1 edges toward level i+1; entering downward consumed one of them.
    if (i < n) emit(i + 1, SlabEntry::forward, n1 - (t == SlabEntry::backward ? 1 : 0));
    // n2 edges toward level i-1; entering upward consumed one of them.
    if (i > 0) emit(i - 1, SlabEntry::backward, n2 - (t == SlabEntry::forward ? 1 : 0));
  }

  if (self_test_depth > 0) {
    // Walk the cover spheres one depth at a time, clamping the certification
    // depth so the real exploration stays within the vertex budget.
    std::vector<__int128> cur(sg.state_count(), 0), next(sg.state_count());
    cur[sg.root_state()] = 1;
    std::vector<int64_t> from_cover{1};
    __int128 cumulative = 1;
    for (int d = 1; d <= self_test_depth; ++d) {
      std::fill(next.begin(), next.end(), 0);
      __int128 total = 0;
      for (size_t s = 0; s < sg.state_count(); ++s) {
        if (cur[s] == 0) continue;
        for (const auto& [t, mult] : sg.counts[s]) {
          next[t] += cur[s] * mult;
          total += cur[s] * mult;
        }
      }
      if (cumulative + total > static_cast<__int128>(self_test_budget)) break;
      cumulative += total;
      from_cover.push_back(static_cast<int64_t>(total));
      std::swap(cur, next);
    }
    const int depth = static_cast<int>(from_cover.size()) - 1;
    std::vector<int64_t> from_bfs =
        slab_bfs_spheres(n1, n2, n, depth, self_test_budget);
    trim_zeros(from_cover);
    trim_zeros(from_bfs);
    if (from_cover != from_bfs)
      throw std::logic_error(
          "slab_state_graph: directed-cover spheres disagree with the real slab "
          "exploration");
  }
  return sg;
}

std::vector<int64_t> cover_spheres(const SlabStateGraph& sg, int depth) {
  if (depth < 0) throw std::invalid_argument("cover_spheres: negative depth");
  const std::vector<__int128> masses = cover_sphere_masses(sg, depth);
  std::vector<int64_t> out;
  out.reserve(masses.size());
  for (__int128 m : masses) {
    if (m > static_cast<__int128>(std::numeric_limits<int64_t>::max()))
      throw numeric_error("cover_spheres: sphere size exceeds int64");
    out.push_back(static_cast<int64_t>(m));
  }
  return out;
}

double cover_growth_estimate(const SlabStateGraph& sg, int depth) {
  if (depth < 3) throw std::invalid_argument("cover_growth_estimate: need depth >= 3");
  const std::vector<__int128> masses = cover_sphere_masses(sg, depth);
  __int128 ball_far = 0, ball_near = 0;
  for (int d = 0; d <= depth; ++d) {
    ball_far += masses[static_cast<size_t>(d)];
    if (d <= depth - 2) ball_near += masses[static_cast<size_t>(d)];
  }
  return std::sqrt(static_cast<double>(ball_far) / static_cast<double>(ball_near));
}

double slab_spectral_radius(const SlabStateGraph& sg, double tol,
                            int64_t max_iterations) {
  if (sg.n_levels == 0) return 1.0;  // finite components: threshold-1 convention

  // Compact child-count matrix over the non-root states (nothing maps back
  // into the root, so it plays no part in the branching).
  const size_t m = sg.state_count() - 1;
  std::vector<std::vector<std::pair<size_t, int64_t>>> mat(m);
  for (size_t s = 1; s < sg.state_count(); ++s)
    for (const auto& [t, mult] : sg.counts[s]) mat[s - 1].push_back({t - 1, mult});

  // Power iteration on (M + I): the added diagonal makes the irreducible
  // count matrix aperiodic, so the Collatz-Wielandt bracket
  // [min w_i/v_i, max w_i/v_i] for w = (M+I)v closes onto lambda + 1.
  std::vector<double> v(m, 1.0), w(m);
  for (int64_t iter = 1; iter <= max_iterations; ++iter) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0, wmax = 0;
    for (size_t i = 0; i < m; ++i) {
      double acc = v[i];
      for (const auto& [j, mult] : mat[i]) acc += static_cast<double>(mult) * v[j];
      w[i] = acc;
      const double ratio = acc / v[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      wmax = std::max(wmax, acc);
    }
    if (hi - lo <= tol * hi) return 0.5 * (lo + hi) - 1.0;
    for (size_t i = 0; i < m; ++i) v[i] = w[i] / wmax;
  }
  throw numeric_error("slab_spectral_radius: no convergence within the iteration cap");
}

double SpectralReport::terminal_gap() const {
  if (rows.empty()) return 0;
  return rows.back().inv_lambda - closed_form;
}

SpectralReport ph_limit_scan(int n1, int n2, int n_max, double tol) {
  check_orientation(n1, n2);
  if (n_max < 2) throw std::invalid_argument("ph_limit_scan: need n_max >= 2");

  SpectralReport rep;
  rep.n1 = n1;
  rep.n2 = n2;
  rep.closed_form = ph_closed_form(n1, n2);

  double prev_inv = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    const SlabStateGraph sg = slab_state_graph(n1, n2, n);
    SpectralRow row;
    row.n = n;
    row.lambda_star = slab_spectral_radius(sg, tol);
    row.inv_lambda = 1.0 / row.lambda_star;
    row.bfs_growth_estimate = cover_growth_estimate(sg, 18);
    if (row.inv_lambda > prev_inv + 1e-9)
      throw numeric_error("ph_limit_scan: 1/lambda increased at n = " +
                          std::to_string(n));
    if (row.inv_lambda < rep.closed_form - 1e-9)
      throw numeric_error("ph_limit_scan: 1/lambda fell below the closed form at n = " +
                          std::to_string(n));
    prev_inv = row.inv_lambda;
    rep.rows.push_back(row);
  }
  rep.monotone = true;
  return rep;
}

}  // namespace perclab
