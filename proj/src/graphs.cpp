#include "perclab/graphs.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "perclab/rng.hpp"

namespace perclab {

namespace {

// Floor division/remainder (addresses go negative on the far side of the origin).
__int128 fdiv(__int128 a, __int128 b) {
  __int128 q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
struct TreeCoord {
  int64_t level;
  __int128 m;
};

TreeCoord decode_tree(const VertexRef& v) { return {v.level, i128_parse(v.addr)}; }

VertexRef tree_ref(int orbit, int64_t level, __int128 m) {
  return {orbit, level, i128_str(m)};
}

std::vector<int64_t> parse_coords(const std::string& s) {
  std::vector<int64_t> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stoll(s.substr(pos, comma - pos)));
    pos = comma + 1;
    if (comma == s.size()) break;
  }
  return out;
}

std::string format_coords(const std::vector<int64_t>& z) {
  std::string s;
  for (size_t i = 0; i < z.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(z[i]);
  }
  return s;
}

int coord_parity(const std::vector<int64_t>& z) {
  int64_t s = 0;
  for (auto c : z) s += c;
  return static_cast<int>(((s % 2) + 2) % 2);
}

}  // namespace

std::string kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::fixed_end_tree: return "fixed_end_tree";
    case FamilyKind::oriented_tree: return "oriented_tree";
    case FamilyKind::grandparent: return "grandparent";
    case FamilyKind::diestel_leader: return "diestel_leader";
    case FamilyKind::product_with_Z: return "product_with_Z";
    case FamilyKind::subdivided_fixed_end_tree: return "subdivided_fixed_end_tree";
    case FamilyKind::euclidean_lattice: return "euclidean_lattice";
  }
  throw std::logic_error("kind_name: bad enum");
}

std::string i128_str(__int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  std::string s;
  while (u) {
    s += static_cast<char>('0' + static_cast<int>(u % 10));
    u /= 10;
  }
  if (neg) s += '-';
  std::reverse(s.begin(), s.end());
  return s;
}

__int128 i128_parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("i128_parse: empty");
  size_t i = 0;
  bool neg = s[0] == '-';
  if (neg) i = 1;
  __int128 v = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("i128_parse: " + s);
    v = v * 10 + (s[i] - '0');
  }
  return neg ? -v : v;
}

int GraphFamily::orbit_count() const {
  switch (kind) {
    case FamilyKind::subdivided_fixed_end_tree: return 2;
    case FamilyKind::euclidean_lattice: return colored ? 2 : 1;
    case FamilyKind::product_with_Z: return base->orbit_count();
    default: return 1;
  }
}

Rat GraphFamily::modular_base() const {
  switch (kind) {
    case FamilyKind::fixed_end_tree:
    case FamilyKind::grandparent: return Rat(b);
    case FamilyKind::oriented_tree: return Rat(n2, n1);
    case FamilyKind::diestel_leader: return Rat(k, n);
    case FamilyKind::subdivided_fixed_end_tree: return Rat(degree - 1);
    case FamilyKind::euclidean_lattice: return Rat(1);
    case FamilyKind::product_with_Z: return base->modular_base();
  }
  throw std::logic_error("modular_base: bad enum");
}

std::vector<int> GraphFamily::orbit_degrees() const {
  switch (kind) {
    case FamilyKind::fixed_end_tree: return {b + 1};
    case FamilyKind::oriented_tree: return {1 + n1 + n2};
    case FamilyKind::grandparent: return {b + 1 + 1 + b * b};
    case FamilyKind::diestel_leader: return {k + n};
    case FamilyKind::subdivided_fixed_end_tree: return {degree, 2};
    case FamilyKind::euclidean_lattice:
      return colored ? std::vector<int>{2 * dim, 2 * dim} : std::vector<int>{2 * dim};
    case FamilyKind::product_with_Z: {
      auto d = base->orbit_degrees();
      for (auto& x : d) x += 2 * dim;
      return d;
    }
  }
  throw std::logic_error("orbit_degrees: bad enum");
}

std::vector<Rat> GraphFamily::orbit_measures() const {
  switch (kind) {
    case FamilyKind::subdivided_fixed_end_tree: return {Rat(1), Rat(1, degree - 1)};
    case FamilyKind::euclidean_lattice:
      return colored ? std::vector<Rat>{Rat(1), Rat(1)} : std::vector<Rat>{Rat(1)};
    case FamilyKind::product_with_Z: return base->orbit_measures();
    default: return {Rat(1)};
  }
}

long long GraphFamily::quad_D() const {
  switch (kind) {
    case FamilyKind::fixed_end_tree:
    case FamilyKind::grandparent: return squarefree_part(b);
    case FamilyKind::oriented_tree:
      return squarefree_part(static_cast<long long>(n1) * n2);
    case FamilyKind::diestel_leader:
      return squarefree_part(static_cast<long long>(k) * n);
    case FamilyKind::subdivided_fixed_end_tree:
      // Edge weight products m(x)m(y) are (d-1)^{2l} (across midpoint/upper
      // endpoint) or (d-1)^{2l-1} (midpoint/lower endpoint), so one extension
      // by sqrt(d-1) covers every edge.
      return squarefree_part(degree - 1);
    case FamilyKind::euclidean_lattice: return 1;
    case FamilyKind::product_with_Z: return base->quad_D();
  }
  throw std::logic_error("quad_D: bad enum");
}

bool GraphFamily::graded() const {
  switch (kind) {
    case FamilyKind::euclidean_lattice: return false;
    case FamilyKind::product_with_Z: return base->graded();
    default: return true;
  }
}

std::string GraphFamily::name() const {
  switch (kind) {
    case FamilyKind::fixed_end_tree: return "fixed_end_tree(" + std::to_string(b) + ")";
    case FamilyKind::oriented_tree:
      return "oriented_tree(" + std::to_string(n1) + "," + std::to_string(n2) + ")";
    case FamilyKind::grandparent: return "grandparent(" + std::to_string(b) + ")";
    case FamilyKind::diestel_leader:
      return "diestel_leader(" + std::to_string(k) + "," + std::to_string(n) + ")";
    case FamilyKind::subdivided_fixed_end_tree:
      return "subdivided_fixed_end_tree(" + std::to_string(degree) + ")";
    case FamilyKind::euclidean_lattice:
      return "euclidean_lattice(" + std::to_string(dim) + (colored ? ",colored" : "") +
             ")";
    case FamilyKind::product_with_Z:
      return base->name() + "xZ" + std::to_string(dim);
  }
  throw std::logic_error("name: bad enum");
}

namespace {
FamilyPtr own(GraphFamily g) { return std::make_shared<const GraphFamily>(std::move(g)); }
}  // namespace

FamilyPtr make_fixed_end_tree(int b) {
  if (b < 2) throw std::invalid_argument("fixed_end_tree: b >= 2 required");
  GraphFamily g;
  g.kind = FamilyKind::fixed_end_tree;
  g.b = b;
  return own(g);
}

FamilyPtr make_oriented_tree(int n1, int n2) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("oriented_tree: n1, n2 >= 1 required");
  if (n1 > 26 || n2 > 26)
    throw std::invalid_argument("oriented_tree: at most 26 slots per direction");
  GraphFamily g;
  g.kind = FamilyKind::oriented_tree;
  g.n1 = n1;
  g.n2 = n2;
  return own(g);
}

FamilyPtr make_grandparent(int b) {
  if (b < 2) throw std::invalid_argument("grandparent: b >= 2 required");
  GraphFamily g;
  g.kind = FamilyKind::grandparent;
  g.b = b;
  return own(g);
}

FamilyPtr make_diestel_leader(int k, int n) {
  if (k < 2 || n < 2) throw std::invalid_argument("diestel_leader: k, n >= 2 required");
  GraphFamily g;
  g.kind = FamilyKind::diestel_leader;
  g.k = k;
  g.n = n;
  return own(g);
}

FamilyPtr make_subdivided_fixed_end_tree(int degree) {
  if (degree < 3)
    throw std::invalid_argument("subdivided_fixed_end_tree: degree >= 3 required");
  GraphFamily g;
  g.kind = FamilyKind::subdivided_fixed_end_tree;
  g.degree = degree;
  return own(g);
}

FamilyPtr make_euclidean_lattice(int dim, bool colored) {
  if (dim < 1) throw std::invalid_argument("euclidean_lattice: dim >= 1 required");
  GraphFamily g;
  g.kind = FamilyKind::euclidean_lattice;
  g.dim = dim;
  g.colored = colored;
  return own(g);
}

FamilyPtr make_product_with_Z(FamilyPtr base, int dim) {
  if (!base) throw std::invalid_argument("product_with_Z: null base");
  if (dim < 1) throw std::invalid_argument("product_with_Z: dim >= 1 required");
  if (base->kind == FamilyKind::product_with_Z)
    throw std::invalid_argument("product_with_Z: nested products not supported");
  GraphFamily g;
  g.kind = FamilyKind::product_with_Z;
  g.dim = dim;
  g.base = std::move(base);
  return own(g);
}

FamilyPtr build_family(const std::string& text) {
  // Optional product suffix "xZ<d>".
  auto xz = text.rfind("xZ");
  if (xz != std::string::npos && xz > 0 && text.find('(', xz) == std::string::npos) {
    int d = std::stoi(text.substr(xz + 2));
    return make_product_with_Z(build_family(text.substr(0, xz)), d);
  }
  auto open = text.find('(');
  auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw std::invalid_argument("family: expected name(args): " + text);
  std::string base_name = text.substr(0, open);
  std::string args = text.substr(open + 1, close - open - 1);
  std::vector<std::string> parts;
  std::stringstream ss(args);
  std::string part;
  while (std::getline(ss, part, ',')) parts.push_back(part);
  auto arg = [&](size_t i) { return std::stoi(parts.at(i)); };
  if (base_name == "fixed_end_tree") return make_fixed_end_tree(arg(0));
  if (base_name == "oriented_tree") return make_oriented_tree(arg(0), arg(1));
  if (base_name == "grandparent") return make_grandparent(arg(0));
  if (base_name == "diestel_leader") return make_diestel_leader(arg(0), arg(1));
  if (base_name == "subdivided_fixed_end_tree")
    return make_subdivided_fixed_end_tree(arg(0));
  if (base_name == "euclidean_lattice")
    return make_euclidean_lattice(arg(0),
                                  parts.size() > 1 && parts[1] == "colored");
  throw std::invalid_argument("unknown family: " + base_name);
}

VertexRef origin(const GraphFamily& g) {
  switch (g.kind) {
    case FamilyKind::fixed_end_tree:
    case FamilyKind::grandparent:
    case FamilyKind::subdivided_fixed_end_tree: return tree_ref(0, 0, 0);
    case FamilyKind::oriented_tree: return {0, 0, ""};
    case FamilyKind::diestel_leader: return {0, 0, "0:0"};
    case FamilyKind::euclidean_lattice:
      return {0, 0, format_coords(std::vector<int64_t>(g.dim, 0))};
    case FamilyKind::product_with_Z: {
      VertexRef o = origin(*g.base);
      o.addr += "|" + format_coords(std::vector<int64_t>(g.dim, 0));
      return o;
    }
  }
  throw std::logic_error("origin: bad enum");
}

namespace {

// Unoriented-edge letter; outside the forward ('A'+i) and backward ('a'+j)
// slot ranges so entry-type tests cannot confuse it with an oriented step.
constexpr char kPartner = '~';

std::vector<VertexRef> oriented_neighbors(const GraphFamily& g, const VertexRef& v) {
  const std::string& w = v.addr;
  const char last = w.empty() ? '\0' : w.back();
  std::vector<VertexRef> out;
  out.reserve(1 + g.n1 + g.n2);
  // Unoriented partner (same level).
  if (last == kPartner)
    out.push_back({0, v.level, w.substr(0, w.size() - 1)});
  else
    out.push_back({0, v.level, w + kPartner});
  // Outgoing neighbors (level +1). Entering along an incoming edge consumed
  // outgoing slot 0 of this vertex for the way back.
  bool entered_from_above = last >= 'A' && last <= 'Z';  // last step was outgoing
  bool entered_from_below = last >= 'a' && last <= 'z';  // last step was incoming
  if (entered_from_below) {
    out.push_back({0, v.level + 1, w.substr(0, w.size() - 1)});
    for (int i = 1; i < g.n1; ++i)
      out.push_back({0, v.level + 1, w + static_cast<char>('A' + i)});
  } else {
    for (int i = 0; i < g.n1; ++i)
      out.push_back({0, v.level + 1, w + static_cast<char>('A' + i)});
  }
  // Incoming neighbors (level -1); symmetric bookkeeping.
  if (entered_from_above) {
    out.push_back({0, v.level - 1, w.substr(0, w.size() - 1)});
    for (int j = 1; j < g.n2; ++j)
      out.push_back({0, v.level - 1, w + static_cast<char>('a' + j)});
  } else {
    for (int j = 0; j < g.n2; ++j)
      out.push_back({0, v.level - 1, w + static_cast<char>('a' + j)});
  }
  return out;
}

std::vector<VertexRef> dl_neighbors(const GraphFamily& g, const VertexRef& v) {
  auto colon = v.addr.find(':');
  __int128 m1 = i128_parse(v.addr.substr(0, colon));
  __int128 m2 = i128_parse(v.addr.substr(colon + 1));
  std::vector<VertexRef> out;
  out.reserve(g.k + g.n);
  auto mk = [&](int64_t lev, __int128 a, __int128 b2) {
    out.push_back({0, lev, i128_str(a) + ":" + i128_str(b2)});
  };
  // Up: first tree to its parent, second tree to each child.
  for (int j = 0; j < g.n; ++j) mk(v.level + 1, fdiv(m1, g.k), m2 * g.n + j);
  // Down: first tree to each child, second tree to its parent.
  for (int i = 0; i < g.k; ++i) mk(v.level - 1, m1 * g.k + i, fdiv(m2, g.n));
  return out;
}

std::vector<VertexRef> euclid_neighbors(const GraphFamily& g, const VertexRef& v) {
  auto z = parse_coords(v.addr);
  std::vector<VertexRef> out;
  out.reserve(2 * g.dim);
  for (int i = 0; i < g.dim; ++i) {
    for (int s : {+1, -1}) {
      auto zz = z;
      zz[i] += s;
      out.push_back({g.colored ? coord_parity(zz) : 0, 0, format_coords(zz)});
    }
  }
  return out;
}

}  // namespace

std::vector<VertexRef> neighbors(const GraphFamily& g, const VertexRef& v) {
  switch (g.kind) {
    case FamilyKind::fixed_end_tree: {
      auto [lev, m] = decode_tree(v);
      std::vector<VertexRef> out;
      out.reserve(g.b + 1);
      out.push_back(tree_ref(0, lev + 1, fdiv(m, g.b)));
      for (int i = 0; i < g.b; ++i) out.push_back(tree_ref(0, lev - 1, m * g.b + i));
      return out;
    }
    case FamilyKind::grandparent: {
      auto [lev, m] = decode_tree(v);
      const __int128 b2 = static_cast<__int128>(g.b) * g.b;
      std::vector<VertexRef> out;
      out.reserve(g.b + 2 + g.b * g.b);
      out.push_back(tree_ref(0, lev + 1, fdiv(m, g.b)));
      for (int i = 0; i < g.b; ++i) out.push_back(tree_ref(0, lev - 1, m * g.b + i));
      out.push_back(tree_ref(0, lev + 2, fdiv(m, b2)));
      for (int i = 0; i < g.b * g.b; ++i)
        out.push_back(tree_ref(0, lev - 2, m * b2 + i));
      return out;
    }
    case FamilyKind::oriented_tree: return oriented_neighbors(g, v);
    case FamilyKind::diestel_leader: return dl_neighbors(g, v);
    case FamilyKind::subdivided_fixed_end_tree: {
      const int b = g.degree - 1;
      auto [lev, m] = decode_tree(v);
      std::vector<VertexRef> out;
      if (v.orbit == 0) {
        // Tree vertex at (lev, m): midpoint of its parent edge, then the
        // midpoints of its child edges (each addressed by the child).
        out.reserve(g.degree);
        out.push_back(tree_ref(1, lev + 1, m));
        for (int i = 0; i < b; ++i) out.push_back(tree_ref(1, lev, m * b + i));
      } else {
        // Midpoint of the edge (child c, parent(c)) with c = (lev-1, m).
        out.reserve(2);
        out.push_back(tree_ref(0, lev, fdiv(m, b)));      // upper endpoint
        out.push_back(tree_ref(0, lev - 1, m));           // lower endpoint c
      }
      return out;
    }
    case FamilyKind::euclidean_lattice: return euclid_neighbors(g, v);
    case FamilyKind::product_with_Z: {
      auto bar = v.addr.rfind('|');
      VertexRef bv{v.orbit, v.level, v.addr.substr(0, bar)};
      std::string ztail = v.addr.substr(bar + 1);
      auto z = parse_coords(ztail);
      std::vector<VertexRef> out;
      for (auto& nb : neighbors(*g.base, bv)) {
        nb.addr += "|" + ztail;
        out.push_back(std::move(nb));
      }
      for (int i = 0; i < g.dim; ++i) {
        for (int s : {+1, -1}) {
          auto zz = z;
          zz[i] += s;
          out.push_back({v.orbit, v.level, bv.addr + "|" + format_coords(zz)});
        }
      }
      return out;
    }
  }
  throw std::logic_error("neighbors: bad enum");
}

Rat m_value(const GraphFamily& g, const VertexRef& v) {
  return g.orbit_measures()[v.orbit] * rat_pow(g.modular_base(), v.level);
}

Rat modular_ratio(const GraphFamily& g, const std::vector<Rat>& a,
                  const VertexRef& u, const VertexRef& v) {
  if (static_cast<int>(a.size()) != g.orbit_count())
    throw std::invalid_argument("modular_ratio: weight count != orbit count");
  return (a[v.orbit] * m_value(g, v)) / (a[u.orbit] * m_value(g, u));
}

Rat modular_ratio(const GraphFamily& g, const OrbitWeights& w,
                  const VertexRef& u, const VertexRef& v) {
  check_weights(g, w);
  Rat num = w.a[v.orbit] * w.m[v.orbit] * rat_pow(g.modular_base(), v.level);
  Rat den = w.a[u.orbit] * w.m[u.orbit] * rat_pow(g.modular_base(), u.level);
  return num / den;
}

OrbitWeights uniform_weights(const GraphFamily& g) {
  const int L = g.orbit_count();
  return {std::vector<Rat>(L, Rat(1, L)), g.orbit_measures()};
}

void check_weights(const GraphFamily& g, const OrbitWeights& w) {
  const int L = g.orbit_count();
  if (static_cast<int>(w.a.size()) != L || static_cast<int>(w.m.size()) != L)
    throw std::invalid_argument("OrbitWeights: size != orbit count");
  Rat total(0);
  for (const auto& x : w.a) {
    if (x <= 0) throw std::invalid_argument("OrbitWeights: a must be positive");
    total += x;
  }
  if (total != 1) throw std::invalid_argument("OrbitWeights: a must sum to 1");
  for (const auto& x : w.m)
    if (x <= 0) throw std::invalid_argument("OrbitWeights: m must be positive");
  if (w.m[0] != 1) throw std::invalid_argument("OrbitWeights: m[0] must be 1");
}

std::vector<VertexRef> orbit_representatives(const GraphFamily& g) {
  const int L = g.orbit_count();
  std::vector<VertexRef> reps(L);
  std::vector<bool> found(L, false);
  VertexRef o = origin(g);
  reps[o.orbit] = o;
  found[o.orbit] = true;
  int remaining = L - 1;
  std::deque<VertexRef> queue{o};
  std::unordered_set<VertexRef, VertexRefHash> seen{o};
  while (remaining > 0 && !queue.empty()) {
    VertexRef v = queue.front();
    queue.pop_front();
    for (auto& nb : neighbors(g, v)) {
      if (!seen.insert(nb).second) continue;
      if (nb.level == 0 && !found[nb.orbit]) {
        reps[nb.orbit] = nb;
        found[nb.orbit] = true;
        --remaining;
      }
      queue.push_back(nb);
    }
  }
  if (remaining > 0)
    throw std::logic_error("orbit_representatives: missing level-0 representative");
  return reps;
}

int distance_between(const GraphFamily& g, const VertexRef& u, const VertexRef& v,
                     int cap) {
  if (u == v) return 0;
  std::unordered_set<VertexRef, VertexRefHash> seen{u};
  std::deque<std::pair<VertexRef, int>> queue{{u, 0}};
  while (!queue.empty()) {
    auto [x, d] = queue.front();
    queue.pop_front();
    if (d >= cap) continue;
    for (auto& nb : neighbors(g, x)) {
      if (!seen.insert(nb).second) continue;
      if (nb == v) return d + 1;
      queue.push_back({nb, d + 1});
    }
  }
  return -1;
}

uint64_t canonical_key(const VertexRef& v) {
  return rng::hash_combine(rng::fnv1a64(v.str()), 0x7065726b6c6162ull);
}

uint64_t canonical_edge_key(const VertexRef& u, const VertexRef& v) {
  const VertexRef& lo = (u < v) ? u : v;
  const VertexRef& hi = (u < v) ? v : u;
  return rng::hash_combine(canonical_key(lo), canonical_key(hi));
}

VertexRef canonical_target(const GraphFamily& g, int distance) {
  if (distance < 0) throw std::invalid_argument("canonical_target: negative distance");
  switch (g.kind) {
    case FamilyKind::fixed_end_tree:
      // Straight down the leftmost branch: m stays 0.
      return tree_ref(0, -distance, 0);
    case FamilyKind::grandparent:
      // Grandchild steps drop two levels and no step drops more, so the
      // leftmost descendant 2*distance levels down is exactly distance away.
      return tree_ref(0, -2 * static_cast<int64_t>(distance), 0);
    case FamilyKind::oriented_tree:
      return {0, distance, std::string(static_cast<size_t>(distance), 'A')};
    case FamilyKind::diestel_leader: return {0, distance, "0:0"};
    case FamilyKind::subdivided_fixed_end_tree: {
      // Alternate midpoint/tree down the leftmost branch.
      int64_t down = distance / 2;
      if (distance % 2 == 0) return tree_ref(0, -down, 0);
      return tree_ref(1, -down, 0);
    }
    case FamilyKind::euclidean_lattice: {
      std::vector<int64_t> z(g.dim, 0);
      z[0] = distance;
      return {g.colored ? distance % 2 : 0, 0, format_coords(z)};
    }
    case FamilyKind::product_with_Z: {
      VertexRef t = canonical_target(*g.base, distance);
      std::vector<int64_t> z(g.dim, 0);
      t.addr += "|" + format_coords(z);
      return t;
    }
  }
  throw std::logic_error("canonical_target: bad enum");
}

}  // namespace perclab
