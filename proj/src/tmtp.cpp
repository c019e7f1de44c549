#include "perclab/tmtp.hpp"

#include <deque>
#include <unordered_set>

#include "perclab/errors.hpp"
#include "perclab/rng.hpp"

namespace perclab {

namespace {

Rat rat_abs(Rat x) { return x < 0 ? -x : x; }

// Solve v·P = v, sum(v) = 1 exactly (P row-stochastic, irreducible-for-our-
// families). Builds (P^T - I) with the last row replaced by normalization.
std::vector<Rat> stationary_of(const std::vector<std::vector<Rat>>& P) {
  const size_t L = P.size();
  std::vector<std::vector<Rat>> A(L, std::vector<Rat>(L, Rat(0)));
  std::vector<Rat> rhs(L, Rat(0));
  for (size_t i = 0; i < L; ++i)
    for (size_t j = 0; j < L; ++j) A[i][j] = P[j][i] - (i == j ? Rat(1) : Rat(0));
  for (size_t j = 0; j < L; ++j) A[L - 1][j] = 1;
  rhs[L - 1] = 1;
  auto sol = solve_exact(A, rhs);
  if (!sol) throw numeric_error("stationary_of: singular chain system");
  for (size_t i = 0; i < L; ++i) {
    Rat check(0);
    for (size_t j = 0; j < L; ++j) check += (*sol)[j] * P[j][i];
    if (check != (*sol)[i]) throw numeric_error("stationary_of: verification failed");
    if ((*sol)[i] <= 0) throw numeric_error("stationary_of: nonpositive entry");
  }
  return *sol;
}

bool adjacent(const GraphFamily& g, const VertexRef& u, const VertexRef& v) {
  for (auto& nb : neighbors(g, u))
    if (nb == v) return true;
  return false;
}

}  // namespace

OrbitChain lazy_orbit_chain(const GraphFamily& g) {
  const int L = g.orbit_count();
  auto reps = orbit_representatives(g);
  OrbitChain chain;
  chain.transition.assign(L, std::vector<Rat>(L, Rat(0)));
  for (int i = 0; i < L; ++i) {
    auto nbs = neighbors(g, reps[i]);
    const Rat step(1, 2 * static_cast<long long>(nbs.size()));
    chain.transition[i][i] += Rat(1, 2);
    for (auto& z : nbs) chain.transition[i][z.orbit] += step;
  }
  for (int i = 0; i < L; ++i) {
    Rat row(0);
    for (int j = 0; j < L; ++j) row += chain.transition[i][j];
    if (row != 1) throw numeric_error("lazy_orbit_chain: row sum != 1");
  }
  chain.stationary = stationary_of(chain.transition);
  return chain;
}

MuResult solve_mu(const GraphFamily& g) {
  const int L = g.orbit_count();
  auto reps = orbit_representatives(g);
  auto chain = lazy_orbit_chain(g);

  // Route 1: bias the lazy-chain stationary vector by 1/deg.
  std::vector<Rat> mu(L);
  Rat total(0);
  for (int i = 0; i < L; ++i) {
    mu[i] = chain.stationary[i] / Rat(static_cast<long long>(neighbors(g, reps[i]).size()));
    total += mu[i];
  }
  for (auto& x : mu) x /= total;

  // Route 2: exact solve of the balance system at the orbit representatives,
  // one row per orbit, last row replaced by normalization.
  std::vector<std::vector<Rat>> A(L, std::vector<Rat>(L, Rat(0)));
  std::vector<Rat> rhs(L, Rat(0));
  for (int i = 0; i < L; ++i) {
    auto nbs = neighbors(g, reps[i]);
    for (auto& z : nbs) A[i][z.orbit] += m_value(g, z);
    A[i][i] -= Rat(static_cast<long long>(nbs.size())) * m_value(g, reps[i]);
  }
  for (int j = 0; j < L; ++j) A[L - 1][j] = 1;
  rhs[L - 1] = 1;
  auto sol = solve_exact(A, rhs);
  if (!sol) throw numeric_error("solve_mu: balance system singular");
  for (int i = 0; i < L; ++i)
    if (mu[i] != (*sol)[i])
      throw numeric_error("solve_mu: biasing route and balance solve disagree");

  MuResult out;
  out.weights = OrbitWeights{mu, g.orbit_measures()};
  out.mu_from_system = *sol;
  out.residuals.assign(L, Rat(0));
  for (int i = 0; i < L; ++i) {
    Rat r(0);
    for (auto& z : neighbors(g, reps[i]))
      r += mu[z.orbit] * m_value(g, z) - mu[i] * m_value(g, reps[i]);
    out.residuals[i] = r;
  }
  return out;
}

std::vector<Transport> transport_suite(FamilyPtr g) {
  std::vector<Transport> suite;
  suite.push_back({"identity", 0, [](const VertexRef& u, const VertexRef& v) {
                     return Rat(u == v ? 1 : 0);
                   }});
  suite.push_back({"adjacency", 1, [g](const VertexRef& u, const VertexRef& v) {
                     return Rat(adjacent(*g, u, v) ? 1 : 0);
                   }});
  suite.push_back({"level_edge", 1, [g](const VertexRef& u, const VertexRef& v) {
                     return Rat(v.level == u.level && adjacent(*g, u, v) ? 1 : 0);
                   }});
  suite.push_back({"up_edge", 1, [g](const VertexRef& u, const VertexRef& v) {
                     return Rat(v.level == u.level + 1 && adjacent(*g, u, v) ? 1 : 0);
                   }});
  suite.push_back({"up2_edge", 1, [g](const VertexRef& u, const VertexRef& v) {
                     return Rat(v.level == u.level + 2 && adjacent(*g, u, v) ? 1 : 0);
                   }});
  suite.push_back({"up2_sphere", 2, [g](const VertexRef& u, const VertexRef& v) {
                     return Rat(v.level == u.level + 2 &&
                                        distance_between(*g, u, v, 2) == 2
                                    ? 1
                                    : 0);
                   }});
  return suite;
}

TmtpResult verify_tmtp(FamilyPtr g, const OrbitWeights& w, const Transport& f) {
  check_weights(*g, w);
  auto reps = orbit_representatives(*g);
  Rat lhs(0), rhs(0);
  for (size_t i = 0; i < reps.size(); ++i) {
    Window win = ball(g, reps[i], f.support_radius);
    Rat sent(0), received(0);
    for (auto& x : win.vertices) {
      sent += f.evaluate(reps[i], x);
      Rat fx = f.evaluate(x, reps[i]);
      if (fx != 0) received += fx * modular_ratio(*g, w, reps[i], x);
    }
    lhs += w.a[i] * sent;
    rhs += w.a[i] * received;
  }
  return {f.name, lhs, rhs, lhs == rhs};
}

Rat harmonicity_residual(const Window& win, const OrbitWeights& w,
                         const VertexRef& x, const Conductance& c) {
  const GraphFamily& g = *win.family;
  check_weights(g, w);
  Rat worst(0);
  bool any_interior = false;
  for (size_t yi = 0; yi < win.vertex_count(); ++yi) {
    if (!win.interior(static_cast<int32_t>(yi))) continue;
    any_interior = true;
    const VertexRef& y = win.vertices[yi];
    Rat num(0), den(0);
    for (int32_t a = win.adj_offset[yi]; a < win.adj_offset[yi + 1]; ++a) {
      const VertexRef& z = win.vertices[win.adj[a].first];
      Rat cond = c ? c(y, z) : Rat(1);
      if (cond <= 0) throw std::invalid_argument("harmonicity_residual: c <= 0");
      num += cond * modular_ratio(g, w, x, z);
      den += cond;
    }
    Rat r = rat_abs(modular_ratio(g, w, x, y) - num / den);
    if (r > worst) worst = r;
  }
  if (!any_interior)
    throw std::invalid_argument("harmonicity_residual: window has no interior vertex");
  return worst;
}

Rat cocycle_check(FamilyPtr g, const OrbitWeights& w, int trials, uint64_t seed) {
  check_weights(*g, w);
  Window win = ball(g, origin(*g), 4);
  const auto n = static_cast<uint32_t>(win.vertex_count());
  Rat worst(0);
  auto probe = [&](const VertexRef& x, const VertexRef& y, const VertexRef& z) {
    Rat dev = rat_abs(modular_ratio(*g, w, x, y) * modular_ratio(*g, w, y, z) -
                      modular_ratio(*g, w, x, z));
    if (dev > worst) worst = dev;
  };
  probe(win.vertices[0], win.vertices[0], win.vertices[0]);
  auto pick = [&](int t, uint64_t slot) -> const VertexRef& {
    return win.vertices[rng::uniform_index(seed, rng::Stream::generic, t, slot, n)];
  };
  for (int t = 0; t < trials; ++t) probe(pick(t, 0), pick(t, 1), pick(t, 2));
  return worst;
}

}  // namespace perclab
