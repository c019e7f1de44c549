#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "perclab/errors.hpp"
#include "perclab/thresholds.hpp"

using namespace perclab;

TEST_CASE("closed-form threshold matches independent evaluation") {
  // (1,2): the displayed expression specializes to (2*sqrt2+1-sqrt(4*sqrt2-3))/6.
  const double sqrt2 = std::sqrt(2.0);
  const double expect12 = (2 * sqrt2 + 1 - std::sqrt(4 * sqrt2 - 3)) / 6;
  CHECK(ph_closed_form(1, 2) == doctest::Approx(expect12).epsilon(1e-14));
  CHECK(ph_closed_form(1, 2) == doctest::Approx(0.3664068597841079).epsilon(1e-12));

  const double s6 = std::sqrt(6.0);
  const double expect23 = (1 + 2 * s6 - std::sqrt((2 * s6 + 1) * (2 * s6 + 1) - 20)) / 10;
  CHECK(ph_closed_form(2, 3) == doctest::Approx(expect23).epsilon(1e-14));
  CHECK(ph_closed_form(2, 3) == doctest::Approx(0.2052167952).epsilon(1e-9));

  for (int a = 1; a <= 6; ++a)
    for (int b = a; b <= 6; ++b)
      CHECK(ph_closed_form(a, b) == ph_closed_form(b, a));

  CHECK_THROWS_AS(ph_closed_form(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(ph_closed_form(3, -1), std::invalid_argument);
}

TEST_CASE("the algebraic branch gives exact simple values") {
  for (int k = 1; k <= 8; ++k) {
    const auto exact = ph_closed_form_exact(k, k);
    REQUIRE(exact.has_value());
    CHECK(*exact == Rat(1, 2 * k));
    CHECK(ph_closed_form(k, k) == doctest::Approx(to_double(*exact)).epsilon(1e-14));
  }
  // (1,1) is the subtle corner: the inner square root is sqrt(1), so the
  // value is exactly 1/2 (the spectral scan below corroborates it).
  CHECK(*ph_closed_form_exact(1, 1) == Rat(1, 2));

  // A genuinely asymmetric exact case: n1 n2 = 9 and the inner radicand is 9.
  const auto e19 = ph_closed_form_exact(1, 9);
  REQUIRE(e19.has_value());
  CHECK(*e19 == Rat(1, 5));
  CHECK(ph_closed_form(1, 9) == doctest::Approx(0.2).epsilon(1e-14));

  CHECK_FALSE(ph_closed_form_exact(1, 2).has_value());
  CHECK_FALSE(ph_closed_form_exact(1, 4).has_value());
  CHECK_FALSE(ph_closed_form_exact(2, 8).has_value());
}

TEST_CASE("uniqueness-threshold lower bound for tree times line") {
  auto independent = [](double b) {
    const double rb = std::sqrt(b);
    return 1.0 / (rb + 1 + std::sqrt(2 * rb - 1));
  };
  CHECK(pu_lower_bound(3) == doctest::Approx(independent(3)).epsilon(1e-14));
  CHECK(pu_lower_bound(3) == doctest::Approx(0.2324610182).epsilon(1e-9));
  CHECK(pu_lower_bound(6) == doctest::Approx(0.1843632966).epsilon(1e-9));

  // The explicit instance where the heavy threshold undercuts the bound.
  CHECK(*ph_closed_form_exact(3, 3) == Rat(1, 6));
  CHECK(to_double(Rat(1, 6)) < pu_lower_bound(6));

  // Asymptotics: the bound times sqrt(b) climbs toward 1.
  double prev = 0;
  for (int b : {100, 10'000, 1'000'000, 1'000'000'000}) {
    const double scaled = pu_lower_bound(b) * std::sqrt(static_cast<double>(b));
    CHECK(scaled > prev);
    CHECK(scaled < 1);
    prev = scaled;
  }
  CHECK(prev > 0.99);

  CHECK_THROWS_AS(pu_lower_bound(1), std::invalid_argument);
}

TEST_CASE("slab state graphs are certified against the real slab") {
  for (auto [n1, n2] : {std::pair{1, 2}, {2, 2}, {1, 1}, {3, 1}}) {
    for (int n = 0; n <= 3; ++n) {
      const SlabStateGraph sg = slab_state_graph(n1, n2, n);
      CHECK(sg.state_count() == static_cast<size_t>(3 * n + 2));
      CHECK(sg.states[sg.root_state()].entry == SlabEntry::root);

      // The root at the bottom level has its partner and, if the slab has any
      // height, its full complement of upward edges.
      int64_t root_children = 0;
      for (const auto& [t, mult] : sg.counts[sg.root_state()]) root_children += mult;
      CHECK(root_children == 1 + (n >= 1 ? n1 : 0));
    }
  }

  const SlabStateGraph degenerate = slab_state_graph(1, 2, 0);
  const std::vector<int64_t> spheres = cover_spheres(degenerate, 4);
  CHECK(spheres == std::vector<int64_t>{1, 1, 0, 0, 0});
  CHECK(slab_spectral_radius(degenerate) == 1.0);
  CHECK(cover_growth_estimate(degenerate, 18) == 1.0);

  CHECK_THROWS_AS(slab_state_graph(0, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(slab_state_graph(1, 2, -1), std::invalid_argument);
}

TEST_CASE("equal orientations give a level-reflection symmetric state graph") {
  const int n = 2;
  const SlabStateGraph sg = slab_state_graph(2, 2, n);
  auto mirror_entry = [](SlabEntry e) {
    if (e == SlabEntry::forward) return SlabEntry::backward;
    if (e == SlabEntry::backward) return SlabEntry::forward;
    return e;
  };
  auto find_state = [&](int level, SlabEntry e) {
    for (size_t s = 1; s < sg.state_count(); ++s)
      if (sg.states[s].level == level && sg.states[s].entry == e) return s;
    FAIL("state not found");
    return size_t{0};
  };
  for (size_t s = 1; s < sg.state_count(); ++s) {
    const size_t ms = find_state(n - sg.states[s].level, mirror_entry(sg.states[s].entry));
    REQUIRE(sg.counts[s].size() == sg.counts[ms].size());
    for (const auto& [t, mult] : sg.counts[s]) {
      const size_t mt = find_state(n - sg.states[t].level, mirror_entry(sg.states[t].entry));
      bool found = false;
      for (const auto& [t2, mult2] : sg.counts[ms])
        if (t2 == mt && mult2 == mult) found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("cover spheres match a hand recursion on the narrowest slab") {
  const SlabStateGraph sg = slab_state_graph(1, 2, 1);
  // Four non-root states u0, u1, f1, b0 with transitions
  // u0 -> f1, u1 -> 2 b0, f1 -> u1 + b0, b0 -> u0; root -> u0 + f1.
  int64_t u0 = 1, u1 = 0, f1 = 1, b0 = 0;
  std::vector<int64_t> expect{1, 2};
  for (int d = 2; d <= 14; ++d) {
    const int64_t nu0 = b0, nu1 = f1, nf1 = u0, nb0 = 2 * u1 + f1;
    u0 = nu0;
    u1 = nu1;
    f1 = nf1;
    b0 = nb0;
    expect.push_back(u0 + u1 + f1 + b0);
  }
  CHECK(cover_spheres(sg, 14) == expect);
  CHECK(cover_spheres(sg, 0) == std::vector<int64_t>{1});

  // Exactness guard: wide orientations overflow int64 and must say so.
  const SlabStateGraph wide = slab_state_graph(26, 26, 2);
  CHECK_THROWS_AS(cover_spheres(wide, 16), numeric_error);
}

TEST_CASE("spectral radius has certified anchors and Perron bounds") {
  // (1,2), n = 1: the count matrix has characteristic polynomial
  // x^4 - x - 2 on its recurrent part, so lambda* solves that quartic.
  const double lam = slab_spectral_radius(slab_state_graph(1, 2, 1));
  CHECK(std::abs(lam * lam * lam * lam - lam - 2) <= 1e-8);

  // Single-cycle and constant-row-sum slabs come out exactly.
  CHECK(slab_spectral_radius(slab_state_graph(1, 1, 1)) == 1.0);
  CHECK(slab_spectral_radius(slab_state_graph(2, 2, 1)) == 2.0);

  const SlabStateGraph sg = slab_state_graph(1, 2, 4);
  int64_t row_min = INT64_MAX, row_max = 0;
  for (size_t s = 1; s < sg.state_count(); ++s) {
    int64_t sum = 0;
    for (const auto& [t, mult] : sg.counts[s]) sum += mult;
    row_min = std::min(row_min, sum);
    row_max = std::max(row_max, sum);
  }
  const double lam4 = slab_spectral_radius(sg);
  CHECK(static_cast<double>(row_min) <= lam4 + 1e-12);
  CHECK(lam4 <= static_cast<double>(row_max) + 1e-12);

  CHECK_THROWS_AS(slab_spectral_radius(slab_state_graph(1, 2, 2), 1e-10, 1),
                  numeric_error);
}

TEST_CASE("growth estimates track the spectral radius") {
  for (int n = 1; n <= 6; ++n) {
    const SlabStateGraph sg = slab_state_graph(1, 2, n);
    const double lam = slab_spectral_radius(sg);
    const double est = cover_growth_estimate(sg, 18);
    CHECK(std::abs(est - lam) / lam <= 0.02);
  }
  const SlabStateGraph sg23 = slab_state_graph(2, 3, 6);
  CHECK(std::abs(cover_growth_estimate(sg23, 18) - slab_spectral_radius(sg23)) /
            slab_spectral_radius(sg23) <=
        0.02);
}

TEST_CASE("threshold scans are monotone, bounded below, and converge") {
  const SpectralReport rep = ph_limit_scan(1, 2, 16);
  CHECK(rep.monotone);
  REQUIRE(rep.rows.size() == 16);
  CHECK(rep.rows.front().n == 1);
  CHECK(rep.rows.front().inv_lambda < 1.0);  // the narrowest slab already branches
  double prev = 1e9;
  for (const auto& row : rep.rows) {
    CHECK(row.inv_lambda == 1.0 / row.lambda_star);
    CHECK(row.inv_lambda <= prev + 1e-9);
    CHECK(row.inv_lambda >= rep.closed_form - 1e-9);
    prev = row.inv_lambda;
  }
  CHECK(rep.terminal_gap() > 0);
  CHECK(rep.terminal_gap() < 0.01);

  // The (1,1) corner: the scan corroborates the exact value 1/2 and rules
  // out the superficially plausible (3 - sqrt 5)/4 = 0.19098...
  const SpectralReport unimodular = ph_limit_scan(1, 1, 12);
  CHECK(unimodular.monotone);
  CHECK(unimodular.closed_form == 0.5);
  CHECK(unimodular.rows.back().inv_lambda > 0.45);
  CHECK(unimodular.terminal_gap() < 0.03);

  const SpectralReport sym = ph_limit_scan(3, 3, 24);
  CHECK(std::abs(sym.rows.back().inv_lambda - 1.0 / 6) <= 5e-3);

  CHECK_THROWS_AS(ph_limit_scan(1, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(ph_limit_scan(0, 2, 8), std::invalid_argument);
}
