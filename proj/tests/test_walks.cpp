#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "perclab/walks.hpp"

using namespace perclab;

namespace {

std::vector<FamilyPtr> kernel_families() {
  return {make_fixed_end_tree(2),  make_oriented_tree(1, 2),
          make_grandparent(2),     make_diestel_leader(2, 3),
          make_subdivided_fixed_end_tree(3), make_euclidean_lattice(2)};
}

int ball_radius_for(const GraphFamily& g) {
  return g.kind == FamilyKind::diestel_leader ? 2 : 3;
}

// Window edge ids incident to a position, keyed by the neighbor position.
std::map<int32_t, int32_t> incident_edges(const Window& win, int32_t pos) {
  std::map<int32_t, int32_t> out;
  const auto lo = static_cast<size_t>(win.adj_offset[static_cast<size_t>(pos)]);
  const auto hi = static_cast<size_t>(win.adj_offset[static_cast<size_t>(pos) + 1]);
  for (size_t k = lo; k < hi; ++k) out[win.adj[k].first] = win.adj[k].second;
  return out;
}

}  // namespace

TEST_CASE("kernel kinds have stable names") {
  CHECK(kernel_kind_name(KernelKind::sqrt_biased) == "sqrt_biased");
  CHECK(kernel_kind_name(KernelKind::delayed_srw) == "delayed_srw");
  CHECK(kernel_kind_name(KernelKind::plain_srw) == "plain_srw");
}

TEST_CASE("biased kernel at the oriented-tree origin matches the closed forms") {
  auto g = make_oriented_tree(1, 2);
  const VertexRef o = origin(*g);
  const Window win = ball(g, o, 3);
  const Config cfg = sample_config(win, 1.0, 7);

  const KernelDist kd = biased_kernel(win, cfg, o);
  REQUIRE(kd.moves.size() == 4);
  CHECK(kd.self.is_zero());
  CHECK(kd.total() == Quad(1));

  // Probabilities depend only on the neighbor's weight ratio: the partner
  // (ratio 1) gets 1/(1+2*sqrt2), the single heavy neighbor (ratio 2) gets
  // sqrt2/(1+2*sqrt2), each of the two light neighbors (ratio 1/2) gets
  // (1/sqrt2)/(1+2*sqrt2). Denominators rationalized against 1+2*sqrt2.
  const Quad partner_prob(Rat(-1, 7), Rat(2, 7), 2);
  const Quad heavy_prob(Rat(4, 7), Rat(-1, 7), 2);
  const Quad light_prob(Rat(2, 7), Rat(-1, 14), 2);
  const Rat m_o = m_value(*g, o);
  int partners = 0, heavies = 0, lights = 0;
  for (const auto& mv : kd.moves) {
    const Rat ratio = m_value(*g, win.vertices[static_cast<size_t>(mv.to)]) / m_o;
    if (ratio == 1) {
      CHECK(mv.prob == partner_prob);
      ++partners;
    } else if (ratio == 2) {
      CHECK(mv.prob == heavy_prob);
      ++heavies;
    } else {
      REQUIRE(ratio == Rat(1, 2));
      CHECK(mv.prob == light_prob);
      ++lights;
    }
    CHECK(mv.prob.to_double() ==
          doctest::Approx(ratio == 1   ? 0.2612038749637414
                          : ratio == 2 ? 0.3693980625181293
                                       : 0.1846990312590646)
              .epsilon(1e-12));
  }
  CHECK(partners == 1);
  CHECK(heavies == 1);
  CHECK(lights == 2);
}

TEST_CASE("closing every edge turns the configured kernels into self-loops") {
  auto g = make_grandparent(2);
  const Window win = ball(g, origin(*g), 3);
  const Config closed = sample_config(win, 0.0, 3);

  for (KernelKind kind : {KernelKind::sqrt_biased, KernelKind::delayed_srw}) {
    const KernelDist kd = kernel_dist(kind, win, closed, origin(*g));
    CHECK(kd.moves.empty());
    CHECK(kd.self == Quad(1));
  }
  // The plain walk ignores the configuration entirely.
  const KernelDist plain = kernel_dist(KernelKind::plain_srw, win, closed, origin(*g));
  CHECK(plain.moves.size() == 8);
  CHECK(plain.self.is_zero());
  for (const auto& mv : plain.moves) CHECK(mv.prob == Quad(Rat(1, 8)));
}

TEST_CASE("kernel mass sums to one exactly for every kind and family") {
  for (const auto& g : kernel_families()) {
    const Window win = ball(g, origin(*g), ball_radius_for(*g));
    const Config cfg = sample_config(win, 0.5, 11);
    for (size_t i = 0; i < win.vertex_count(); ++i) {
      if (!win.interior(static_cast<int32_t>(i))) continue;
      for (KernelKind kind :
           {KernelKind::sqrt_biased, KernelKind::delayed_srw, KernelKind::plain_srw}) {
        const KernelDist kd = kernel_dist(kind, win, cfg, win.vertices[i]);
        CHECK(kd.total() == Quad(1));
      }
    }
  }
}

TEST_CASE("literal time reversal reproduces the biased kernel exactly") {
  for (const auto& g : kernel_families()) {
    const Window win = ball(g, origin(*g), ball_radius_for(*g));
    for (uint64_t seed : {1u, 2u, 3u}) {
      const Config cfg = sample_config(win, 0.5, seed);
      for (size_t i = 0; i < win.vertex_count(); ++i) {
        if (!win.interior(static_cast<int32_t>(i))) continue;
        const KernelDist fwd = biased_kernel(win, cfg, win.vertices[i]);
        const KernelDist rev = reversed_kernel(win, cfg, win.vertices[i]);
        REQUIRE(fwd.moves.size() == rev.moves.size());
        for (size_t k = 0; k < fwd.moves.size(); ++k) {
          CHECK(fwd.moves[k].to == rev.moves[k].to);
          CHECK(fwd.moves[k].edge == rev.moves[k].edge);
          CHECK(fwd.moves[k].prob == rev.moves[k].prob);
        }
        CHECK(fwd.self == rev.self);
      }
    }
  }
}

TEST_CASE("on lattices the biased walk is exactly the delayed simple walk") {
  for (auto g : {make_euclidean_lattice(1), make_euclidean_lattice(2),
                 make_euclidean_lattice(2, true)}) {
    const Window win = ball(g, origin(*g), 3);
    const Config cfg = sample_config(win, 0.4, 17);
    for (size_t i = 0; i < win.vertex_count(); ++i) {
      if (!win.interior(static_cast<int32_t>(i))) continue;
      const KernelDist biased =
          kernel_dist(KernelKind::sqrt_biased, win, cfg, win.vertices[i]);
      const KernelDist delayed =
          kernel_dist(KernelKind::delayed_srw, win, cfg, win.vertices[i]);
      REQUIRE(biased.moves.size() == delayed.moves.size());
      for (size_t k = 0; k < biased.moves.size(); ++k) {
        CHECK(biased.moves[k].to == delayed.moves[k].to);
        CHECK(biased.moves[k].prob == delayed.moves[k].prob);
      }
      CHECK(biased.self == delayed.self);
    }
  }
}

TEST_CASE("kernels are undefined on the window boundary") {
  auto g = make_oriented_tree(1, 2);
  const Window win = ball(g, origin(*g), 2);
  const Config cfg = sample_config(win, 0.5, 1);
  for (size_t i = 0; i < win.vertex_count(); ++i) {
    if (win.depth[i] != win.radius) continue;
    CHECK_THROWS_AS(biased_kernel(win, cfg, win.vertices[i]), std::invalid_argument);
    CHECK_THROWS_AS(
        simulate_two_sided(win, cfg, win.vertices[i], 1, 1, 0),
        std::invalid_argument);
    break;
  }
}

TEST_CASE("stationarity and detailed balance hold exactly on every family") {
  for (const auto& g : kernel_families()) {
    const Window win = ball(g, origin(*g), ball_radius_for(*g));
    const Config cfg = sample_config(win, 0.5, 23);
    for (KernelKind kind :
         {KernelKind::sqrt_biased, KernelKind::delayed_srw, KernelKind::plain_srw}) {
      const StationarityReport rep = stationarity_check(win, cfg, kind);
      CHECK(rep.interior_vertices > 0);
      CHECK(rep.max_stationarity_dev.is_zero());
      CHECK(rep.max_detailed_balance_dev.is_zero());
    }
  }
}

TEST_CASE("stationary weights match hand-computed anchors") {
  auto ot = make_oriented_tree(1, 2);
  CHECK(stationary_weight(*ot, origin(*ot), KernelKind::sqrt_biased) ==
        Quad(Rat(1), Rat(2), 2));

  auto fe = make_fixed_end_tree(2);
  CHECK(stationary_weight(*fe, origin(*fe), KernelKind::sqrt_biased) ==
        Quad(Rat(0), Rat(2), 2));

  auto gp = make_grandparent(2);
  CHECK(stationary_weight(*gp, origin(*gp), KernelKind::sqrt_biased) ==
        Quad(Rat(4), Rat(2), 2));
  CHECK(stationary_weight(*gp, origin(*gp), KernelKind::delayed_srw) == Quad(8));
  CHECK(stationary_weight(*gp, origin(*gp), KernelKind::plain_srw) == Quad(8));

  auto eu = make_euclidean_lattice(2);
  CHECK(stationary_weight(*eu, origin(*eu), KernelKind::sqrt_biased) == Quad(4));
}

TEST_CASE("trajectories are reproducible and respect the index window") {
  auto g = make_oriented_tree(1, 2);
  const Window win = ball(g, origin(*g), 3);
  const Config closed = sample_config(win, 0.0, 2);

  const Trajectory still = simulate_two_sided(win, closed, origin(*g), 40, 25, 9);
  CHECK(still.lo() == -25);
  CHECK(still.hi() == 40);
  CHECK_FALSE(still.truncated_forward);
  CHECK_FALSE(still.truncated_backward);
  for (int64_t k = still.lo(); k <= still.hi(); ++k) CHECK(still.at(k) == still.start);

  const Trajectory point = simulate_two_sided(win, closed, origin(*g), 0, 0, 9);
  CHECK(point.lo() == 0);
  CHECK(point.hi() == 0);
  CHECK(point.at(0) == point.start);
  CHECK_THROWS_AS(point.at(1), std::out_of_range);
  CHECK_THROWS_AS(point.at(-1), std::out_of_range);

  const Config cfg = sample_config(win, 0.8, 2);
  const Trajectory a = simulate_two_sided(win, cfg, origin(*g), 30, 30, 4);
  const Trajectory b = simulate_two_sided(win, cfg, origin(*g), 30, 30, 4);
  CHECK(a.forward == b.forward);
  CHECK(a.backward == b.backward);
  const Trajectory c = simulate_two_sided(win, cfg, origin(*g), 30, 30, 5);
  CHECK(a.forward != c.forward);
}

TEST_CASE("identical kernels drive identical trajectories on the lattice") {
  auto g = make_euclidean_lattice(2);
  const Window win = ball(g, origin(*g), 5);
  const Config cfg = sample_config(win, 0.6, 31);
  const Trajectory biased = simulate_two_sided(win, cfg, origin(*g), 200, 200, 8,
                                               KernelKind::sqrt_biased);
  const Trajectory delayed = simulate_two_sided(win, cfg, origin(*g), 200, 200, 8,
                                                KernelKind::delayed_srw);
  CHECK(biased.forward == delayed.forward);
  CHECK(biased.backward == delayed.backward);
  CHECK(biased.truncated_forward == delayed.truncated_forward);
}

TEST_CASE("one-step law matches the kernel empirically") {
  auto g = make_oriented_tree(1, 2);
  const VertexRef o = origin(*g);
  const Window win = ball(g, o, 3);
  const Config cfg = sample_config(win, 0.6, 5);
  const KernelDist kd = biased_kernel(win, cfg, o);

  const int64_t trials = 20000;
  std::map<int32_t, int64_t> tally;
  for (int64_t s = 0; s < trials; ++s) {
    const Trajectory t =
        simulate_two_sided(win, cfg, o, 1, 0, static_cast<uint64_t>(s));
    ++tally[t.at(1)];
  }

  auto check_rate = [&](int32_t pos, double expect) {
    const double got = static_cast<double>(tally[pos]) / static_cast<double>(trials);
    const double se = std::sqrt(std::max(expect * (1 - expect), 1e-12) /
                                static_cast<double>(trials));
    CHECK(std::abs(got - expect) <= 3 * se + 1e-3);
  };
  for (const auto& mv : kd.moves) check_rate(mv.to, mv.prob.to_double());
  check_rate(win.index_of(o), kd.self.to_double());
}

TEST_CASE("long walks halt at the boundary with the truncation flag") {
  auto eu = make_euclidean_lattice(1);
  const Window win = ball(eu, origin(*eu), 4);
  const Config open = sample_config(win, 1.0, 1);
  const Trajectory t = simulate_two_sided(win, open, origin(*eu), 500, 500, 12,
                                          KernelKind::delayed_srw);
  CHECK(t.truncated_forward);
  CHECK(t.truncated_backward);
  CHECK(t.forward.size() < 500);
  CHECK_FALSE(win.interior(t.forward.back()));

  // The biased walk on a fixed-end tree drifts toward heavier weights, so it
  // leaves a small ball quickly.
  auto fe = make_fixed_end_tree(2);
  const Window wfe = ball(fe, origin(*fe), 3);
  const Config ofe = sample_config(wfe, 1.0, 1);
  const Trajectory tb = simulate_two_sided(wfe, ofe, origin(*fe), 200, 0, 3);
  CHECK(tb.truncated_forward);
  CHECK_FALSE(wfe.interior(tb.forward.back()));
}

TEST_CASE("visit frequencies are exact counts over the index window") {
  auto g = make_grandparent(2);
  const Window win = ball(g, origin(*g), 3);
  const Config closed = sample_config(win, 0.0, 6);
  const Trajectory t = simulate_two_sided(win, closed, origin(*g), 10, 10, 1);

  std::vector<uint8_t> all(win.vertex_count(), 1), none(win.vertex_count(), 0);
  CHECK(frequency(t, all, t.lo(), t.hi() + 1) == 1.0);
  CHECK(frequency(t, none, t.lo(), t.hi() + 1) == 0.0);
  std::vector<uint8_t> only_start(win.vertex_count(), 0);
  only_start[static_cast<size_t>(t.start)] = 1;
  CHECK(frequency(t, only_start, 0, 5) == 1.0);

  CHECK_THROWS_AS(frequency(t, all, 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(frequency(t, all, 5, 2), std::invalid_argument);
  CHECK_THROWS_AS(frequency(t, all, t.lo() - 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(frequency(t, all, 0, t.hi() + 2), std::invalid_argument);
}

TEST_CASE("long-run visit frequency matches the stationary law on a finite cluster") {
  // Freeze a three-vertex cluster {child, origin, parent} of the binary
  // fixed-end tree and leave every other edge closed. The biased walk started
  // inside can never leave, so its empirical occupation must converge to the
  // stationary weights pi restricted to the cluster: (1, 2, 4)/7 after
  // normalization, since pi doubles with each level.
  auto g = make_fixed_end_tree(2);
  const VertexRef o = origin(*g);
  const Window win = ball(g, o, 4);
  Config cfg = sample_config(win, 0.0, 1);

  const int32_t pos_o = win.index_of(o);
  int32_t pos_parent = -1, pos_child = -1;
  for (const auto& [nb, eid] : incident_edges(win, pos_o)) {
    const VertexRef& v = win.vertices[static_cast<size_t>(nb)];
    if (v.level == o.level + 1 && pos_parent < 0) {
      pos_parent = nb;
      cfg.open[static_cast<size_t>(eid)] = 1;
    } else if (v.level == o.level - 1 && pos_child < 0) {
      pos_child = nb;
      cfg.open[static_cast<size_t>(eid)] = 1;
    }
  }
  REQUIRE(pos_parent >= 0);
  REQUIRE(pos_child >= 0);

  const double pi_o = stationary_weight(*g, o, KernelKind::sqrt_biased).to_double();
  const double pi_p =
      stationary_weight(*g, win.vertices[static_cast<size_t>(pos_parent)],
                        KernelKind::sqrt_biased)
          .to_double();
  const double pi_c =
      stationary_weight(*g, win.vertices[static_cast<size_t>(pos_child)],
                        KernelKind::sqrt_biased)
          .to_double();
  CHECK(pi_p / pi_o == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pi_c / pi_o == doctest::Approx(0.5).epsilon(1e-12));

  const int64_t n = 200000;
  const Trajectory t = simulate_two_sided(win, cfg, o, n, 0, 42);
  REQUIRE_FALSE(t.truncated_forward);

  std::vector<uint8_t> cluster(win.vertex_count(), 0);
  cluster[static_cast<size_t>(pos_o)] = 1;
  cluster[static_cast<size_t>(pos_parent)] = 1;
  cluster[static_cast<size_t>(pos_child)] = 1;
  CHECK(frequency(t, cluster, 0, n) == 1.0);  // confined to its cluster

  std::vector<uint8_t> parent_only(win.vertex_count(), 0);
  parent_only[static_cast<size_t>(pos_parent)] = 1;
  const double expect = pi_p / (pi_o + pi_p + pi_c);
  CHECK(frequency(t, parent_only, 0, n) == doctest::Approx(expect).epsilon(0.05));
  CHECK(std::abs(frequency(t, parent_only, 0, n) - expect) < 0.02);
}

TEST_CASE("cluster membership masks match the decomposition") {
  auto g = make_grandparent(2);
  const Window win = ball(g, origin(*g), 3);
  const Config cfg = sample_config(win, 0.5, 9);
  const ClusterDecomposition dec = clusters(win, cfg);
  for (int32_t pos : {0, 1, static_cast<int32_t>(win.vertex_count()) - 1}) {
    const std::vector<uint8_t> mask = cluster_member_mask(dec, pos);
    for (size_t i = 0; i < mask.size(); ++i)
      CHECK(static_cast<bool>(mask[i]) ==
            dec.same_cluster(pos, static_cast<int32_t>(i)));
  }
}
