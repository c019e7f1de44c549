// perclab — command-line laboratory for Bernoulli percolation on graded
// quasi-transitive graph families: exact mass-transport and harmonicity
// identities, seeded percolation statistics, square-root-biased walk
// simulation, effective-conductance diagnostics, and percolation-threshold
// scans.
//
// Every run emits one JSON or CSV report (stdout, or a file with --out) that
// embeds the tool version and the effective run specification; stochastic
// subcommands require --seed or record the seed they generated. Reports are
// byte-identical across --workers settings: all parallel reductions in the
// compute layer are order-fixed, and timing is printed to stderr only.
//
// Exit codes: 0 success, 1 checked failure (numeric or resource), 2 usage.
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "perclab/conductance.hpp"
#include "perclab/errors.hpp"
#include "perclab/exact.hpp"
#include "perclab/graphs.hpp"
#include "perclab/percolation.hpp"
#include "perclab/report.hpp"
#include "perclab/thresholds.hpp"
#include "perclab/tmtp.hpp"
#include "perclab/walks.hpp"
#include "perclab/window.hpp"

namespace {

using namespace perclab;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// String -> value conversions (used for config-file values; command-line
// values go through CLI11's own converters).

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

template <class T>
T parse_integer(const std::string& s, const std::string& what) {
  T out{};
  const char* b = s.data();
  const char* e = b + s.size();
  auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc() || res.ptr != e)
    throw UsageError("invalid integer for " + what + ": '" + s + "'");
  return out;
}

double parse_doublev(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid number for " + what + ": '" + s + "'");
  }
}

bool parse_boolv(const std::string& s, const std::string& what) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw UsageError("invalid boolean for " + what + ": '" + s + "'");
}

void assign(std::string& ref, const std::string& v, const std::string&) { ref = v; }
void assign(int& ref, const std::string& v, const std::string& w) { ref = parse_integer<int>(v, w); }
void assign(int64_t& ref, const std::string& v, const std::string& w) { ref = parse_integer<int64_t>(v, w); }
void assign(uint64_t& ref, const std::string& v, const std::string& w) { ref = parse_integer<uint64_t>(v, w); }
void assign(double& ref, const std::string& v, const std::string& w) { ref = parse_doublev(v, w); }

std::vector<int> parse_radii(const std::string& csv) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&] {
    std::string t = trim(cur);
    if (t.empty()) throw UsageError("empty entry in --radii list");
    out.push_back(parse_integer<int>(t, "--radii"));
    cur.clear();
  };
  for (char c : csv) {
    if (c == ',') flush();
    else cur += c;
  }
  flush();
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 1) throw UsageError("--radii entries must be >= 1");
    if (i && out[i] <= out[i - 1])
      throw UsageError("--radii must be strictly increasing");
  }
  return out;
}

VertexRef parse_vertex(const std::string& s) {
  size_t c1 = s.find(':');
  size_t c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw UsageError("vertex must be 'orbit:level:addr', got '" + s + "'");
  VertexRef v;
  v.orbit = parse_integer<int32_t>(s.substr(0, c1), "vertex orbit");
  v.level = parse_integer<int64_t>(s.substr(c1 + 1, c2 - c1 - 1), "vertex level");
  v.addr = s.substr(c2 + 1);
  return v;
}

// ---------------------------------------------------------------------------
// Option surface. One Opts instance is shared by all subcommands (only one
// subcommand runs per invocation); each leaf binds the subset it uses.

struct Opts {
  // common
  std::string config_path;
  std::string format = "json";
  std::string out;
  uint64_t seed = 0;
  int64_t trials = 0;
  int workers = 0;
  // family selection
  std::string family;
  int n1 = 0, n2 = 0, b = 0, k = 0, n = 0, degree = 0, dim = 0;
  bool colored = false;
  // operation parameters
  double p = 0.5;
  int radius = 3;
  int levels = 1;
  int depth = 8;
  int d = 5;
  int margin = 2;
  int64_t steps = 1000;
  int64_t steps_back = 0;
  uint64_t trial = 0;
  std::string kind = "sqrt_biased";
  std::string weights = "mu";
  std::string conductance = "unit";
  std::string weight = "sqrt_mm";
  std::string transport;
  std::string at;
  std::string radii = "2,4,8";
  double tol = 1e-10;
  int n_max = 16;
  int dmax = 8;
  int growth_depth = 18;
  size_t max_vertices = kDefaultWindowBudget;
  bool ray = false;
};

// Per-leaf bookkeeping: the CLI11 app, config-file setters keyed by flag
// name, required flags (enforced after the config merge so a config file can
// satisfy them), and which keys the config supplied.
struct LeafCtx {
  CLI::App* cmd = nullptr;
  Opts* opts = nullptr;
  std::map<std::string, std::function<void(const std::string&)>> setters;
  std::vector<std::string> required;
  std::set<std::string> from_config;

  bool given(const std::string& name) const {
    return cmd->count("--" + name) > 0 || from_config.count(name) > 0;
  }
};

template <class T>
void bind_value(LeafCtx& L, const std::string& name, T& ref,
                const std::string& desc, bool required = false) {
  L.cmd->add_option("--" + name, ref, desc);
  L.setters[name] = [&ref, name](const std::string& v) {
    assign(ref, v, "--" + name);
  };
  if (required) L.required.push_back(name);
}

void bind_flag(LeafCtx& L, const std::string& name, bool& ref,
               const std::string& desc) {
  L.cmd->add_flag("--" + name, ref, desc);
  L.setters[name] = [&ref, name](const std::string& v) {
    ref = parse_boolv(v, "--" + name);
  };
}

void add_common(LeafCtx& L) {
  Opts& O = *L.opts;
  L.cmd->add_option("--config", O.config_path,
                    "key=value config file; command-line flags override it");
  bind_value(L, "seed", O.seed, "64-bit seed for all randomness");
  bind_value(L, "trials", O.trials, "Monte Carlo trial count");
  bind_value(L, "workers", O.workers, "worker threads (0 = library default)");
  bind_value(L, "format", O.format, "report format: json or csv");
  bind_value(L, "out", O.out, "write the report to this file instead of stdout");
}

void add_family(LeafCtx& L) {
  Opts& O = *L.opts;
  bind_value(L, "family", O.family,
             "family name (fixed_end_tree, oriented_tree, grandparent, "
             "diestel_leader, subdivided_fixed_end_tree, euclidean_lattice) "
             "or a full spec like 'oriented_tree(1,2)'",
             true);
  bind_value(L, "b", O.b, "children per vertex (fixed_end_tree, grandparent)");
  bind_value(L, "n1", O.n1, "outgoing edges per vertex (oriented_tree)");
  bind_value(L, "n2", O.n2, "incoming edges per vertex (oriented_tree)");
  bind_value(L, "k", O.k, "first branching number (diestel_leader)");
  bind_value(L, "n", O.n, "second branching number (diestel_leader)");
  bind_value(L, "degree", O.degree, "underlying tree degree (subdivided_fixed_end_tree)");
  bind_value(L, "dim", O.dim, "dimension (euclidean_lattice)");
  bind_flag(L, "colored", O.colored, "parity 2-coloring (euclidean_lattice)");
}

FamilyPtr resolve_family(const Opts& O) {
  std::string f = O.family;
  if (f.find('(') != std::string::npos || f.find("xZ") != std::string::npos)
    return build_family(f);
  for (char& c : f)
    if (c == '-') c = '_';
  if (f == "fixed_end_tree") return make_fixed_end_tree(O.b);
  if (f == "oriented_tree") return make_oriented_tree(O.n1, O.n2);
  if (f == "grandparent") return make_grandparent(O.b);
  if (f == "diestel_leader") return make_diestel_leader(O.k, O.n);
  if (f == "subdivided_fixed_end_tree") return make_subdivided_fixed_end_tree(O.degree);
  if (f == "euclidean_lattice") return make_euclidean_lattice(O.dim, O.colored);
  throw UsageError("unknown family '" + O.family + "'");
}

// ---------------------------------------------------------------------------
// Config file: UTF-8 key=value lines, '#' comments, applied only to flags the
// command line did not set. Errors name the offending line.

void apply_config(LeafCtx& L) {
  const Opts& O = *L.opts;
  if (O.config_path.empty()) return;
  std::ifstream f(O.config_path);
  if (!f) throw UsageError("cannot read config file: " + O.config_path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    auto bad = [&](const std::string& why) {
      return UsageError("config parse error at line " + std::to_string(lineno) +
                        ": " + why + ": '" + line + "'");
    };
    if (eq == std::string::npos) throw bad("expected key=value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw bad("empty key");
    if (value.empty()) throw bad("empty value");
    auto it = L.setters.find(key);
    if (it == L.setters.end())
      throw bad("unknown key '" + key + "' for this subcommand");
    if (L.cmd->count("--" + key) > 0) continue;  // flag overrides file
    try {
      it->second(value);
    } catch (const UsageError& e) {
      throw UsageError("config parse error at line " + std::to_string(lineno) +
                       ": " + e.what());
    }
    L.from_config.insert(key);
  }
}

void finish_parse(LeafCtx& L) {
  apply_config(L);
  for (const auto& r : L.required)
    if (!L.given(r))
      throw UsageError("missing required flag --" + r + " (see --help)");
  const Opts& O = *L.opts;
  if (O.format != "json" && O.format != "csv")
    throw UsageError("--format must be json or csv, got '" + O.format + "'");
}

// Stochastic subcommands: use the explicit seed or generate and record one.
uint64_t resolve_seed(LeafCtx& L, RunSpec& rs) {
  Opts& O = *L.opts;
  if (!L.given("seed")) {
    std::random_device rd;
    O.seed = (static_cast<uint64_t>(rd()) << 32) ^ rd();
  }
  rs.seed = O.seed;
  return O.seed;
}

// ---------------------------------------------------------------------------
// RunSpec assembly and report emission.

RunSpec base_spec(const std::string& sub, const Opts& O) {
  RunSpec rs;
  rs.subcommand = sub;
  rs.format = O.format;
  rs.output_path = O.out;
  return rs;
}

void P(RunSpec& rs, const std::string& key, const std::string& v) {
  rs.params.emplace_back(key, v);
}
void P(RunSpec& rs, const std::string& key, const char* v) {
  rs.params.emplace_back(key, std::string(v));
}
void P(RunSpec& rs, const std::string& key, int v) { P(rs, key, std::to_string(v)); }
void P(RunSpec& rs, const std::string& key, int64_t v) { P(rs, key, std::to_string(v)); }
void P(RunSpec& rs, const std::string& key, uint64_t v) { P(rs, key, std::to_string(v)); }
void P(RunSpec& rs, const std::string& key, double v) { P(rs, key, format_double(v)); }
void P(RunSpec& rs, const std::string& key, bool v) { P(rs, key, v ? "true" : "false"); }

using CsvRows = std::vector<std::vector<std::string>>;

void emit(const RunSpec& rs, const Json& result,
          const std::vector<std::string>& csv_header, const CsvRows& csv_rows) {
  if (rs.format == "json") {
    write_output(render_json(report_envelope(rs, result)), rs.output_path);
    return;
  }
  std::string text = csv_preamble(rs) + csv_row(csv_header);
  for (const auto& r : csv_rows) text += csv_row(r);
  write_output(text, rs.output_path);
}

std::string fd(double v) { return format_double(v); }
std::string fb(bool v) { return v ? "true" : "false"; }

// ---------------------------------------------------------------------------
// graph subcommands

void run_graph_info(LeafCtx& L) {
  finish_parse(L);
  const Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("graph info", O);
  P(rs, "family", g->name());

  Json r;
  r["family"] = g->name();
  r["kind"] = kind_name(g->kind);
  r["orbit_count"] = g->orbit_count();
  r["modular_base"] = rational_json(g->modular_base());
  r["graded"] = g->graded();
  r["orbit_degrees"] = g->orbit_degrees();
  Json measures = Json::array();
  for (const auto& m : g->orbit_measures()) measures.push_back(rational_json(m));
  r["orbit_measures"] = std::move(measures);
  std::string quad_d = "-";
  try {
    long long D = g->quad_D();
    r["quad_D"] = D;
    quad_d = std::to_string(D);
  } catch (const std::exception&) {
    r["quad_D"] = nullptr;
  }

  emit(rs, r, {"family", "kind", "orbits", "modular_base", "graded", "quad_D"},
       {{g->name(), kind_name(g->kind), std::to_string(g->orbit_count()),
         to_string(g->modular_base()), fb(g->graded()), quad_d}});
}

Json window_summary(const Window& win) {
  Json r;
  r["vertices"] = win.vertex_count();
  r["edges"] = win.edge_count();
  int64_t boundary = 0;
  for (auto f : win.is_boundary) boundary += f;
  r["boundary_vertices"] = boundary;
  r["sphere_sizes"] = sphere_sizes(win);
  return r;
}

CsvRows sphere_rows(const Window& win) {
  CsvRows rows;
  auto s = sphere_sizes(win);
  for (size_t dpt = 0; dpt < s.size(); ++dpt)
    rows.push_back({std::to_string(dpt), std::to_string(s[dpt])});
  return rows;
}

void run_graph_ball(LeafCtx& L) {
  finish_parse(L);
  const Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("graph ball", O);
  P(rs, "family", g->name());
  P(rs, "radius", O.radius);
  P(rs, "max-vertices", O.max_vertices);
  Window win = ball(g, origin(*g), O.radius, O.max_vertices);
  Json r = window_summary(win);
  r["radius"] = O.radius;
  emit(rs, r, {"depth", "vertices"}, sphere_rows(win));
}

void run_graph_slab(LeafCtx& L) {
  finish_parse(L);
  const Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("graph slab", O);
  P(rs, "family", g->name());
  P(rs, "levels", O.levels);
  P(rs, "depth", O.depth);
  P(rs, "max-vertices", O.max_vertices);
  Window win = slab_component(g, origin(*g), O.levels, O.depth, O.max_vertices);
  Json r = window_summary(win);
  r["levels"] = O.levels;
  r["depth"] = O.depth;
  emit(rs, r, {"depth", "vertices"}, sphere_rows(win));
}

// ---------------------------------------------------------------------------
// tmtp subcommands

void run_tmtp_verify(LeafCtx& L) {
  finish_parse(L);
  const Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("tmtp verify", O);
  P(rs, "family", g->name());
  if (!O.transport.empty()) P(rs, "transport", O.transport);

  MuResult mu = solve_mu(*g);
  auto suite = transport_suite(g);
  if (!O.transport.empty()) {
    std::vector<Transport> kept;
    for (auto& t : suite)
      if (t.name == O.transport) kept.push_back(t);
    if (kept.empty()) {
      std::string names;
      for (auto& t : suite) names += (names.empty() ? "" : ", ") + t.name;
      throw UsageError("unknown transport '" + O.transport + "'; available: " + names);
    }
    suite = std::move(kept);
  }

  Json rows = Json::array();
  CsvRows crows;
  bool all_equal = true;
  for (const auto& t : suite) {
    TmtpResult res = verify_tmtp(g, mu.weights, t);
    all_equal = all_equal && res.equal;
    Json row;
    row["transport"] = res.transport;
    row["support_radius"] = t.support_radius;
    row["lhs"] = rational_json(res.lhs);
    row["rhs"] = rational_json(res.rhs);
    row["equal"] = res.equal;
    rows.push_back(std::move(row));
    crows.push_back({res.transport, std::to_string(t.support_radius),
                     to_string(res.lhs), to_string(res.rhs), fb(res.equal)});
  }
  Json r;
  r["transports"] = std::move(rows);
  r["all_equal"] = all_equal;
  emit(rs, r, {"transport", "support_radius", "lhs", "rhs", "equal"}, crows);
}

void run_tmtp_mu(LeafCtx& L) {
  finish_parse(L);
  const Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("tmtp mu", O);
  P(rs, "family", g->name());

  MuResult mu = solve_mu(*g);
  auto reps = orbit_representatives(*g);
  Json rows = Json::array();
  CsvRows crows;
  for (size_t i = 0; i < mu.weights.a.size(); ++i) {
    Json row;
    row["orbit"] = i;
    row["representative"] = reps[i].str();
    row["a"] = rational_json(mu.weights.a[i]);
    row["m"] = rational_json(mu.weights.m[i]);
    row["a_system"] = rational_json(mu.mu_from_system[i]);
    row["residual"] = rational_json(mu.residuals[i]);
    rows.push_back(std::move(row));
    crows.push_back({std::to_string(i), reps[i].str(), to_string(mu.weights.a[i]),
                     to_string(mu.weights.m[i]), to_string(mu.mu_from_system[i]),
                     to_string(mu.residuals[i])});
  }
  Json r;
  r["orbits"] = std::move(rows);
  r["routes_agree"] = true;  // solve_mu throws when the two routes differ
  emit(rs, r, {"orbit", "representative", "a", "m", "a_system", "residual"}, crows);
}

void run_tmtp_harmonic(LeafCtx& L) {
  finish_parse(L);
  const Opts& O = *L.opts;
  auto g = resolve_family(O);
  int radius = L.given("radius") ? O.radius : 6;
  RunSpec rs = base_spec("tmtp harmonic", O);
  P(rs, "family", g->name());
  P(rs, "radius", radius);
  P(rs, "weights", O.weights);
  P(rs, "conductance", O.conductance);

  OrbitWeights w;
  if (O.weights == "mu") w = solve_mu(*g).weights;
  else if (O.weights == "uniform") w = uniform_weights(*g);
  else throw UsageError("--weights must be mu or uniform, got '" + O.weights + "'");

  Conductance c{};
  if (O.conductance == "orbit-sqrt-mm") {
    // Geometric mean of the endpoint orbit measures: constant on orbit pairs,
    // so it is an invariant conductance whenever the square roots are exact.
    auto measures = g->orbit_measures();
    c = [measures](const VertexRef& y, const VertexRef& z) {
      auto s = sqrt_exact(measures[y.orbit] * measures[z.orbit]);
      if (!s)
        throw UsageError(
            "orbit-sqrt-mm conductance is not rational for this family");
      return *s;
    };
  } else if (O.conductance != "unit") {
    throw UsageError("--conductance must be unit or orbit-sqrt-mm, got '" +
                     O.conductance + "'");
  }

  Window win = ball(g, origin(*g), radius, O.max_vertices);
  Rat res = harmonicity_residual(win, w, origin(*g), c);
  Json r;
  r["residual"] = rational_json(res);
  r["zero"] = (res == Rat(0));
  r["weights"] = O.weights;
  r["conductance"] = O.conductance;
  emit(rs, r, {"weights", "conductance", "residual", "zero"},
       {{O.weights, O.conductance, to_string(res), fb(res == Rat(0))}});
}

void run_tmtp_cocycle(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("tmtp cocycle", O);
  P(rs, "family", g->name());
  uint64_t seed = resolve_seed(L, rs);
  int64_t trials = L.given("trials") ? O.trials : 100;
  rs.trials = trials;

  OrbitWeights w = solve_mu(*g).weights;
  Rat dev = cocycle_check(g, w, static_cast<int>(trials), seed);
  Json r;
  r["max_deviation"] = rational_json(dev);
  r["zero"] = (dev == Rat(0));
  emit(rs, r, {"trials", "max_deviation", "zero"},
       {{std::to_string(trials), to_string(dev), fb(dev == Rat(0))}});
}

// ---------------------------------------------------------------------------
// perc subcommands

Window op_ball(const Opts& O, FamilyPtr g) {
  return ball(g, origin(*g), O.radius, O.max_vertices);
}

void run_perc_sample(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("perc sample", O);
  P(rs, "family", g->name());
  P(rs, "p", O.p);
  P(rs, "radius", O.radius);
  P(rs, "trial", O.trial);
  uint64_t seed = resolve_seed(L, rs);

  Window win = op_ball(O, g);
  Config cfg = sample_config(win, O.p, seed, O.trial);
  int64_t open = 0;
  for (auto f : cfg.open) open += f;
  Json r;
  r["vertices"] = win.vertex_count();
  r["edges"] = win.edge_count();
  r["open_edges"] = open;
  r["open_fraction"] =
      win.edge_count() ? static_cast<double>(open) / static_cast<double>(win.edge_count()) : 0.0;
  CsvRows rows;
  for (size_t e = 0; e < win.edges.size(); ++e)
    rows.push_back({std::to_string(e), win.vertices[win.edges[e].u].str(),
                    win.vertices[win.edges[e].v].str(), fd(cfg.uniform[e]),
                    std::to_string(int(cfg.open[e]))});
  emit(rs, r, {"edge", "u", "v", "uniform", "open"}, rows);
}

void run_perc_clusters(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("perc clusters", O);
  P(rs, "family", g->name());
  P(rs, "p", O.p);
  P(rs, "radius", O.radius);
  P(rs, "trial", O.trial);
  uint64_t seed = resolve_seed(L, rs);

  Window win = op_ball(O, g);
  Config cfg = sample_config(win, O.p, seed, O.trial);
  ClusterDecomposition dec = clusters(win, cfg);

  int32_t origin_root = dec.cluster_id[0];
  size_t origin_idx =
      std::lower_bound(dec.roots.begin(), dec.roots.end(), origin_root) -
      dec.roots.begin();
  int64_t largest = 0;
  for (const auto& s : dec.stats) largest = std::max(largest, s.size);

  Json r;
  r["cluster_count"] = dec.cluster_count();
  r["largest_size"] = largest;
  Json og;
  og["size"] = dec.stats[origin_idx].size;
  og["boundary_touch"] = dec.stats[origin_idx].boundary_touch;
  og["min_level"] = dec.stats[origin_idx].min_level;
  og["max_level"] = dec.stats[origin_idx].max_level;
  r["origin_cluster"] = std::move(og);
  CsvRows rows;
  for (size_t i = 0; i < dec.roots.size(); ++i) {
    const auto& s = dec.stats[i];
    rows.push_back({std::to_string(dec.roots[i]), std::to_string(s.size),
                    fb(s.boundary_touch), std::to_string(s.min_level),
                    std::to_string(s.max_level)});
  }
  emit(rs, r, {"cluster", "size", "boundary_touch", "min_level", "max_level"}, rows);
}

void run_perc_connect(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("perc connect", O);
  P(rs, "family", g->name());
  P(rs, "p", O.p);
  P(rs, "d", O.d);
  P(rs, "margin", O.margin);
  uint64_t seed = resolve_seed(L, rs);
  int64_t trials = L.given("trials") ? O.trials : 10000;
  rs.trials = trials;

  VertexRef x = origin(*g);
  VertexRef y = canonical_target(*g, O.d);
  Estimate est =
      connectivity_estimate(g, O.p, x, y, trials, seed, O.margin, O.workers);
  Json r;
  r["x"] = x.str();
  r["y"] = y.str();
  r["distance"] = O.d;
  r["p_hat"] = est.p_hat;
  r["se"] = est.se;
  r["hits"] = est.hits;
  r["trials"] = est.trials;
  emit(rs, r, {"distance", "p_hat", "se", "hits", "trials"},
       {{std::to_string(O.d), fd(est.p_hat), fd(est.se), std::to_string(est.hits),
         std::to_string(est.trials)}});
}

void run_perc_decay(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("perc decay", O);
  P(rs, "family", g->name());
  P(rs, "p", O.p);
  P(rs, "dmax", O.dmax);
  P(rs, "margin", O.margin);
  uint64_t seed = resolve_seed(L, rs);
  int64_t trials = L.given("trials") ? O.trials : 10000;
  rs.trials = trials;
  if (O.dmax < 1) throw UsageError("--dmax must be >= 1");

  std::vector<VertexRef> targets;
  for (int dist = 1; dist <= O.dmax; ++dist)
    targets.push_back(canonical_target(*g, dist));
  auto curve = decay_curve(g, O.p, origin(*g), targets, trials, seed, O.margin,
                           O.workers);
  Json rows = Json::array();
  CsvRows crows;
  for (const auto& row : curve) {
    Json j;
    j["distance"] = row.distance;
    j["target"] = row.target.str();
    j["p_hat"] = row.est.p_hat;
    j["se"] = row.est.se;
    j["hits"] = row.est.hits;
    j["running_min"] = row.running_min;
    rows.push_back(std::move(j));
    crows.push_back({std::to_string(row.distance), row.target.str(),
                     fd(row.est.p_hat), fd(row.est.se), std::to_string(row.est.hits),
                     fd(row.running_min)});
  }
  Json r;
  r["rows"] = std::move(rows);
  emit(rs, r, {"distance", "target", "p_hat", "se", "hits", "running_min"}, crows);
}

void run_perc_mass(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("perc mass", O);
  P(rs, "family", g->name());
  P(rs, "p", O.p);
  P(rs, "radii", O.radii);
  P(rs, "trial", O.trial);
  uint64_t seed = resolve_seed(L, rs);

  std::vector<int> radii = parse_radii(O.radii);
  auto masses = tilted_mass_lazy(g, O.p, origin(*g), radii, seed, O.trial);
  Json rows = Json::array();
  CsvRows crows;
  for (size_t i = 0; i < radii.size(); ++i) {
    Json j;
    j["radius"] = radii[i];
    j["tilted_mass"] = rational_json(masses[i]);
    rows.push_back(std::move(j));
    crows.push_back({std::to_string(radii[i]), to_string(masses[i]),
                     fd(to_double(masses[i]))});
  }
  Json r;
  r["rows"] = std::move(rows);
  emit(rs, r, {"radius", "tilted_mass", "tilted_mass_value"}, crows);
}

void run_perc_ray(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  if (g->kind != FamilyKind::fixed_end_tree)
    throw UsageError("perc ray-decoration requires a fixed_end_tree family");
  RunSpec rs = base_spec("perc ray-decoration", O);
  P(rs, "family", g->name());
  P(rs, "radius", O.radius);
  uint64_t seed = resolve_seed(L, rs);

  Window win = op_ball(O, g);
  RayDecoration dec = ray_decoration_sample(win, seed);

  // Chosen-offspring out-degree per vertex (counting only in-window children).
  std::vector<int> child_edges(win.vertex_count(), 0), chosen(win.vertex_count(), 0);
  int64_t omega1 = 0, omega2 = 0, inserted = 0, censored = 0;
  int64_t n0_edges = 0, n0_inserted = 0;
  for (size_t e = 0; e < win.edges.size(); ++e) {
    const auto& we = win.edges[e];
    int32_t parent = win.vertices[we.u].level > win.vertices[we.v].level ? we.u : we.v;
    ++child_edges[parent];
    if (dec.omega1[e]) {
      ++chosen[parent];
      ++omega1;
    }
    if (dec.omega2[e]) ++omega2;
    if (dec.omega2[e] && !dec.omega1[e]) ++inserted;
    if (dec.censored[e]) ++censored;
    if (dec.insert_n[e] == 0) {
      ++n0_edges;
      if (dec.omega2[e]) ++n0_inserted;
    }
  }
  int64_t out_degree_checked = 0, out_degree_violations = 0;
  for (size_t v = 0; v < win.vertex_count(); ++v) {
    if (child_edges[v] == 0) continue;
    ++out_degree_checked;
    // Vertices whose children are all in the window must keep exactly one.
    bool complete = !win.is_boundary[v];
    if (complete && chosen[v] != 1) ++out_degree_violations;
  }
  double rate = n0_edges ? double(n0_inserted) / double(n0_edges) : 0.0;
  double se = n0_edges ? std::sqrt(rate * (1 - rate) / double(n0_edges)) : 0.0;

  Json r;
  r["vertices"] = win.vertex_count();
  r["tree_edges"] = win.edge_count();
  r["omega1_edges"] = omega1;
  r["omega2_edges"] = omega2;
  r["inserted_edges"] = inserted;
  r["censored_edges"] = censored;
  r["out_degree_checked"] = out_degree_checked;
  r["out_degree_violations"] = out_degree_violations;
  Json n0;
  n0["edges"] = n0_edges;
  n0["inserted"] = n0_inserted;
  n0["rate"] = rate;
  n0["se"] = se;
  r["height0_insertion"] = std::move(n0);
  CsvRows rows;
  for (size_t e = 0; e < win.edges.size(); ++e)
    rows.push_back({std::to_string(e), win.vertices[win.edges[e].u].str(),
                    win.vertices[win.edges[e].v].str(),
                    std::to_string(int(dec.omega1[e])),
                    std::to_string(int(dec.omega2[e])),
                    std::to_string(dec.insert_n[e]),
                    std::to_string(int(dec.censored[e]))});
  emit(rs, r, {"edge", "u", "v", "omega1", "omega2", "insert_n", "censored"}, rows);
}

// ---------------------------------------------------------------------------
// walk subcommands

KernelKind parse_kind(const std::string& s) {
  std::string f = s;
  for (char& c : f)
    if (c == '-') c = '_';
  if (f == "sqrt_biased") return KernelKind::sqrt_biased;
  if (f == "delayed_srw") return KernelKind::delayed_srw;
  if (f == "plain_srw") return KernelKind::plain_srw;
  throw UsageError("--kind must be sqrt_biased, delayed_srw or plain_srw, got '" +
                   s + "'");
}

void run_walk_kernel(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  KernelKind kind = parse_kind(O.kind);
  RunSpec rs = base_spec("walk kernel", O);
  P(rs, "family", g->name());
  P(rs, "p", O.p);
  P(rs, "radius", O.radius);
  P(rs, "trial", O.trial);
  P(rs, "kind", kernel_kind_name(kind));
  if (!O.at.empty()) P(rs, "at", O.at);
  uint64_t seed = resolve_seed(L, rs);

  Window win = op_ball(O, g);
  Config cfg = sample_config(win, O.p, seed, O.trial);
  VertexRef v = O.at.empty() ? origin(*g) : parse_vertex(O.at);
  if (!win.contains(v))
    throw UsageError("vertex " + v.str() + " is not inside the window");
  KernelDist kd = kernel_dist(kind, win, cfg, v);

  Json rows = Json::array();
  CsvRows crows;
  for (const auto& mv : kd.moves) {
    Json j;
    j["to"] = win.vertices[mv.to].str();
    j["edge"] = mv.edge;
    j["prob"] = quad_json(mv.prob);
    rows.push_back(std::move(j));
    crows.push_back({win.vertices[mv.to].str(), std::to_string(mv.edge),
                     mv.prob.str(), fd(mv.prob.to_double())});
  }
  crows.push_back({"(self)", "-1", kd.self.str(), fd(kd.self.to_double())});
  Json r;
  r["at"] = v.str();
  r["kind"] = kernel_kind_name(kind);
  r["moves"] = std::move(rows);
  r["self"] = quad_json(kd.self);
  r["total_is_one"] = (kd.total() == Quad(Rat(1)));
  if (kind == KernelKind::sqrt_biased) {
    KernelDist rev = reversed_kernel(win, cfg, v);
    bool equal = rev.self == kd.self && rev.moves.size() == kd.moves.size();
    for (size_t i = 0; equal && i < kd.moves.size(); ++i)
      equal = rev.moves[i].to == kd.moves[i].to && rev.moves[i].prob == kd.moves[i].prob;
    r["reversal_equal"] = equal;
  }
  emit(rs, r, {"to", "edge", "prob", "prob_value"}, crows);
}

void run_walk_simulate(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  KernelKind kind = parse_kind(O.kind);
  RunSpec rs = base_spec("walk simulate", O);
  P(rs, "family", g->name());
  P(rs, "p", O.p);
  P(rs, "radius", O.radius);
  P(rs, "steps", O.steps);
  P(rs, "steps-back", O.steps_back);
  P(rs, "trial", O.trial);
  P(rs, "kind", kernel_kind_name(kind));
  uint64_t seed = resolve_seed(L, rs);

  Window win = op_ball(O, g);
  Config cfg = sample_config(win, O.p, seed, O.trial);
  Trajectory traj = simulate_two_sided(win, cfg, origin(*g), O.steps,
                                       O.steps_back, seed, kind);
  Json rows = Json::array();
  CsvRows crows;
  for (int64_t i = traj.lo(); i <= traj.hi(); ++i) {
    const VertexRef& v = win.vertices[traj.at(i)];
    Json j;
    j["index"] = i;
    j["orbit"] = v.orbit;
    j["level"] = v.level;
    j["address"] = v.addr;
    rows.push_back(std::move(j));
    crows.push_back({std::to_string(i), std::to_string(v.orbit),
                     std::to_string(v.level), v.addr});
  }
  Json r;
  r["kind"] = kernel_kind_name(kind);
  r["start"] = win.vertices[traj.start].str();
  r["steps_forward"] = traj.hi();
  r["steps_backward"] = -traj.lo();
  r["truncated_forward"] = traj.truncated_forward;
  r["truncated_backward"] = traj.truncated_backward;
  r["positions"] = std::move(rows);
  emit(rs, r, {"index", "orbit", "level", "address"}, crows);
}

void run_walk_stationarity(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  KernelKind kind = parse_kind(O.kind);
  RunSpec rs = base_spec("walk stationarity", O);
  P(rs, "family", g->name());
  P(rs, "p", O.p);
  P(rs, "radius", O.radius);
  P(rs, "trial", O.trial);
  P(rs, "kind", kernel_kind_name(kind));
  uint64_t seed = resolve_seed(L, rs);

  Window win = op_ball(O, g);
  Config cfg = sample_config(win, O.p, seed, O.trial);
  StationarityReport rep = stationarity_check(win, cfg, kind);
  bool zero = rep.max_stationarity_dev.is_zero() &&
              rep.max_detailed_balance_dev.is_zero();
  Json r;
  r["kind"] = kernel_kind_name(kind);
  r["interior_vertices"] = rep.interior_vertices;
  r["max_stationarity_dev"] = quad_json(rep.max_stationarity_dev);
  r["max_detailed_balance_dev"] = quad_json(rep.max_detailed_balance_dev);
  r["zero"] = zero;
  emit(rs, r,
       {"kind", "interior_vertices", "max_stationarity_dev",
        "max_detailed_balance_dev", "zero"},
       {{kernel_kind_name(kind), std::to_string(rep.interior_vertices),
         rep.max_stationarity_dev.str(), rep.max_detailed_balance_dev.str(),
         fb(zero)}});
}

void run_walk_frequency(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  KernelKind kind = parse_kind(O.kind);
  RunSpec rs = base_spec("walk frequency", O);
  P(rs, "family", g->name());
  P(rs, "p", O.p);
  P(rs, "radius", O.radius);
  P(rs, "steps", O.steps);
  P(rs, "trial", O.trial);
  P(rs, "kind", kernel_kind_name(kind));
  uint64_t seed = resolve_seed(L, rs);
  if (O.steps < 1) throw UsageError("--steps must be >= 1");

  Window win = op_ball(O, g);
  Config cfg = sample_config(win, O.p, seed, O.trial);
  ClusterDecomposition dec = clusters(win, cfg);
  std::vector<uint8_t> mask = cluster_member_mask(dec, 0);
  Trajectory traj =
      simulate_two_sided(win, cfg, origin(*g), O.steps, O.steps, seed, kind);
  // A side that reached the window boundary is shorter than requested; the
  // frequency window clamps to the realized trajectory.
  int64_t n_fwd = std::min(O.steps, traj.hi());
  int64_t n_bwd = std::min(O.steps, -traj.lo());
  double fwd = frequency(traj, mask, 0, n_fwd);
  double bwd = n_bwd > 0 ? frequency(traj, mask, -n_bwd, 0) : fwd;
  Json r;
  r["kind"] = kernel_kind_name(kind);
  r["steps"] = O.steps;
  r["steps_forward_used"] = n_fwd;
  r["steps_backward_used"] = n_bwd;
  r["alpha_forward"] = fwd;
  r["alpha_backward"] = bwd;
  r["abs_diff"] = std::abs(fwd - bwd);
  r["truncated_forward"] = traj.truncated_forward;
  r["truncated_backward"] = traj.truncated_backward;
  emit(rs, r,
       {"steps", "steps_forward_used", "steps_backward_used", "alpha_forward",
        "alpha_backward", "abs_diff", "truncated_forward", "truncated_backward"},
       {{std::to_string(O.steps), std::to_string(n_fwd), std::to_string(n_bwd),
         fd(fwd), fd(bwd), fd(std::abs(fwd - bwd)), fb(traj.truncated_forward),
         fb(traj.truncated_backward)}});
}

void run_walk_conductance(LeafCtx& L) {
  finish_parse(L);
  Opts& O = *L.opts;
  auto g = resolve_family(O);
  RunSpec rs = base_spec("walk conductance", O);
  P(rs, "family", g->name());
  EdgeWeight w;
  if (O.weight == "sqrt_mm" || O.weight == "sqrt-mm") w = EdgeWeight::sqrt_mm;
  else if (O.weight == "unit") w = EdgeWeight::unit;
  else throw UsageError("--weight must be sqrt_mm or unit, got '" + O.weight + "'");
  std::vector<int> radii = parse_radii(O.radii);

  Json rows = Json::array();
  CsvRows crows;
  auto push = [&](int R, double c_eff, int64_t iters, double residual) {
    Json j;
    j["R"] = R;
    j["c_eff"] = c_eff;
    j["iterations"] = iters;
    j["residual"] = residual;
    rows.push_back(std::move(j));
    crows.push_back({std::to_string(R), fd(c_eff), std::to_string(iters), fd(residual)});
  };

  if (O.ray) {
    // Decorated-forest clusters are exactly series/parallel reducible, so the
    // exact elimination route is used instead of the iterative solver.
    if (g->kind != FamilyKind::fixed_end_tree)
      throw UsageError("--ray requires a fixed_end_tree family");
    P(rs, "ray", true);
    P(rs, "weight", O.weight);
    P(rs, "radii", O.radii);
    uint64_t seed = resolve_seed(L, rs);
    for (int R : radii) {
      Network net = ray_cluster_network(g, origin(*g), R, seed, w, O.max_vertices);
      push(R, effective_conductance_direct(net), 0, 0.0);
    }
  } else {
    P(rs, "p", O.p);
    P(rs, "weight", O.weight);
    P(rs, "radii", O.radii);
    P(rs, "trial", O.trial);
    P(rs, "tol", O.tol);
    uint64_t seed = resolve_seed(L, rs);
    Window win = ball(g, origin(*g), radii.back(), O.max_vertices);
    Config cfg = sample_config(win, O.p, seed, O.trial);
    for (int R : radii) {
      Network net = cluster_network(win, cfg, origin(*g), R, w);
      ConductanceResult res = solve_effective_conductance(net, O.tol, O.workers);
      push(R, res.c_eff, res.iterations, res.residual);
    }
  }
  Json r;
  r["rows"] = std::move(rows);
  emit(rs, r, {"R", "c_eff", "iterations", "residual"}, crows);
}

// ---------------------------------------------------------------------------
// threshold subcommands

void run_threshold_ph(LeafCtx& L) {
  finish_parse(L);
  const Opts& O = *L.opts;
  RunSpec rs = base_spec("threshold ph", O);
  P(rs, "n1", O.n1);
  P(rs, "n2", O.n2);
  double v = ph_closed_form(O.n1, O.n2);
  auto exact = ph_closed_form_exact(O.n1, O.n2);
  Json r;
  r["n1"] = O.n1;
  r["n2"] = O.n2;
  r["value"] = v;
  if (exact) r["exact"] = rational_json(*exact);
  else r["exact"] = nullptr;
  emit(rs, r, {"n1", "n2", "value", "exact"},
       {{std::to_string(O.n1), std::to_string(O.n2), fd(v),
         exact ? to_string(*exact) : std::string("-")}});
}

void run_threshold_spectral(LeafCtx& L) {
  finish_parse(L);
  const Opts& O = *L.opts;
  RunSpec rs = base_spec("threshold slab-spectral", O);
  P(rs, "n1", O.n1);
  P(rs, "n2", O.n2);
  P(rs, "n", O.n);
  P(rs, "growth-depth", O.growth_depth);
  SlabStateGraph sg = slab_state_graph(O.n1, O.n2, O.n);
  double lambda = slab_spectral_radius(sg);
  double growth = cover_growth_estimate(sg, O.growth_depth);
  Json r;
  r["n1"] = O.n1;
  r["n2"] = O.n2;
  r["n"] = O.n;
  r["states"] = sg.state_count();
  r["lambda_star"] = lambda;
  r["inv_lambda"] = 1.0 / lambda;
  r["bfs_estimate"] = growth;
  emit(rs, r, {"n1", "n2", "n", "states", "lambda_star", "inv_lambda", "bfs_estimate"},
       {{std::to_string(O.n1), std::to_string(O.n2), std::to_string(O.n),
         std::to_string(sg.state_count()), fd(lambda), fd(1.0 / lambda), fd(growth)}});
}

void run_threshold_scan(LeafCtx& L) {
  finish_parse(L);
  const Opts& O = *L.opts;
  RunSpec rs = base_spec("threshold scan", O);
  P(rs, "n1", O.n1);
  P(rs, "n2", O.n2);
  P(rs, "n-max", O.n_max);
  SpectralReport rep = ph_limit_scan(O.n1, O.n2, O.n_max);
  Json rows = Json::array();
  CsvRows crows;
  for (const auto& row : rep.rows) {
    int states = 3 * row.n + 2;
    Json j;
    j["n"] = row.n;
    j["states"] = states;
    j["lambda_star"] = row.lambda_star;
    j["inv_lambda"] = row.inv_lambda;
    j["bfs_estimate"] = row.bfs_growth_estimate;
    j["gap"] = row.inv_lambda - rep.closed_form;
    rows.push_back(std::move(j));
    crows.push_back({std::to_string(O.n1), std::to_string(O.n2),
                     std::to_string(row.n), std::to_string(states),
                     fd(row.lambda_star), fd(row.inv_lambda),
                     fd(row.bfs_growth_estimate), fd(rep.closed_form),
                     fd(row.inv_lambda - rep.closed_form)});
  }
  Json r;
  r["closed_form"] = rep.closed_form;
  r["monotone"] = rep.monotone;
  r["terminal_gap"] = rep.terminal_gap();
  r["rows"] = std::move(rows);
  emit(rs, r,
       {"n1", "n2", "n", "states", "lambda_star", "inv_lambda", "bfs_estimate",
        "closed_form", "gap"},
       crows);
}

void run_threshold_pu(LeafCtx& L) {
  finish_parse(L);
  const Opts& O = *L.opts;
  RunSpec rs = base_spec("threshold pu-bound", O);
  P(rs, "b", O.b);
  double v = pu_lower_bound(O.b);
  Json r;
  r["b"] = O.b;
  r["value"] = v;
  emit(rs, r, {"b", "value"}, {{std::to_string(O.b), fd(v)}});
}

// ---------------------------------------------------------------------------
// wiring

struct Cli {
  CLI::App app{
      "perclab: percolation laboratory for graded quasi-transitive graphs"};
  Opts opts;
  std::vector<std::unique_ptr<LeafCtx>> leaves;

  LeafCtx& leaf(CLI::App* group, const std::string& name, const std::string& desc,
                void (*run)(LeafCtx&)) {
    auto L = std::make_unique<LeafCtx>();
    L->cmd = group->add_subcommand(name, desc);
    L->opts = &opts;
    LeafCtx* raw = L.get();
    L->cmd->callback([raw, run] { run(*raw); });
    add_common(*raw);
    leaves.push_back(std::move(L));
    return *raw;
  }
};

void build_cli(Cli& c) {
  Opts& O = c.opts;
  c.app.require_subcommand(1);

  auto* graph = c.app.add_subcommand("graph", "inspect families and finite windows");
  graph->require_subcommand(1);
  {
    LeafCtx& L = c.leaf(graph, "info", "orbit structure and modular data", run_graph_info);
    add_family(L);
  }
  {
    LeafCtx& L = c.leaf(graph, "ball", "enumerate a ball window", run_graph_ball);
    add_family(L);
    bind_value(L, "radius", O.radius, "ball radius");
    bind_value(L, "max-vertices", O.max_vertices, "enumeration budget");
  }
  {
    LeafCtx& L = c.leaf(graph, "slab", "enumerate a slab-component window", run_graph_slab);
    add_family(L);
    bind_value(L, "levels", O.levels, "slab height (levels above the origin)");
    bind_value(L, "depth", O.depth, "BFS truncation depth");
    bind_value(L, "max-vertices", O.max_vertices, "enumeration budget");
  }

  auto* tmtp = c.app.add_subcommand("tmtp", "exact tilted mass-transport checks");
  tmtp->require_subcommand(1);
  {
    LeafCtx& L = c.leaf(tmtp, "verify", "tilted transport identity per transport",
                        run_tmtp_verify);
    add_family(L);
    bind_value(L, "transport", O.transport, "run one transport by name (default: all)");
  }
  {
    LeafCtx& L = c.leaf(tmtp, "mu", "stationary orbit weights, two routes", run_tmtp_mu);
    add_family(L);
  }
  {
    LeafCtx& L = c.leaf(tmtp, "harmonic", "harmonicity residual of the modular ratio",
                        run_tmtp_harmonic);
    add_family(L);
    bind_value(L, "radius", O.radius, "ball radius, default 6 (interior is checked)");
    bind_value(L, "weights", O.weights, "orbit weights: mu or uniform");
    bind_value(L, "conductance", O.conductance, "edge conductance: unit or orbit-sqrt-mm");
    bind_value(L, "max-vertices", O.max_vertices, "enumeration budget");
  }
  {
    LeafCtx& L = c.leaf(tmtp, "cocycle", "multiplicative cocycle identity on sampled triples",
                        run_tmtp_cocycle);
    add_family(L);
  }

  auto* perc = c.app.add_subcommand("perc", "seeded Bernoulli bond percolation");
  perc->require_subcommand(1);
  {
    LeafCtx& L = c.leaf(perc, "sample", "sample one configuration on a ball", run_perc_sample);
    add_family(L);
    bind_value(L, "p", O.p, "edge-open probability");
    bind_value(L, "radius", O.radius, "ball radius");
    bind_value(L, "trial", O.trial, "trial index within the seed");
    bind_value(L, "max-vertices", O.max_vertices, "enumeration budget");
  }
  {
    LeafCtx& L = c.leaf(perc, "clusters", "cluster decomposition of one configuration",
                        run_perc_clusters);
    add_family(L);
    bind_value(L, "p", O.p, "edge-open probability");
    bind_value(L, "radius", O.radius, "ball radius");
    bind_value(L, "trial", O.trial, "trial index within the seed");
    bind_value(L, "max-vertices", O.max_vertices, "enumeration budget");
  }
  {
    LeafCtx& L = c.leaf(perc, "connect", "Monte Carlo two-point connectivity",
                        run_perc_connect);
    add_family(L);
    bind_value(L, "p", O.p, "edge-open probability");
    bind_value(L, "d", O.d, "distance of the canonical target");
    bind_value(L, "margin", O.margin, "ball margin beyond the target distance");
  }
  {
    LeafCtx& L = c.leaf(perc, "decay", "connectivity decay curve over distances",
                        run_perc_decay);
    add_family(L);
    bind_value(L, "p", O.p, "edge-open probability");
    bind_value(L, "dmax", O.dmax, "largest target distance");
    bind_value(L, "margin", O.margin, "ball margin beyond each target distance");
  }
  {
    LeafCtx& L = c.leaf(perc, "mass", "exact tilted cluster mass by radius", run_perc_mass);
    add_family(L);
    bind_value(L, "p", O.p, "edge-open probability");
    bind_value(L, "radii", O.radii, "comma-separated radii, strictly increasing");
    bind_value(L, "trial", O.trial, "trial index within the seed");
  }
  {
    LeafCtx& L = c.leaf(perc, "ray-decoration", "one-offspring ray decoration sample",
                        run_perc_ray);
    add_family(L);
    bind_value(L, "radius", O.radius, "ball radius");
    bind_value(L, "max-vertices", O.max_vertices, "enumeration budget");
  }

  auto* walk = c.app.add_subcommand("walk", "square-root-biased random walk");
  walk->require_subcommand(1);
  {
    LeafCtx& L = c.leaf(walk, "kernel", "one-step law at a vertex", run_walk_kernel);
    add_family(L);
    bind_value(L, "p", O.p, "edge-open probability");
    bind_value(L, "radius", O.radius, "ball radius");
    bind_value(L, "trial", O.trial, "trial index within the seed");
    bind_value(L, "kind", O.kind, "kernel: sqrt_biased, delayed_srw or plain_srw");
    bind_value(L, "at", O.at, "vertex as orbit:level:addr (default: origin)");
    bind_value(L, "max-vertices", O.max_vertices, "enumeration budget");
  }
  {
    LeafCtx& L = c.leaf(walk, "simulate", "two-sided trajectory export", run_walk_simulate);
    add_family(L);
    bind_value(L, "p", O.p, "edge-open probability");
    bind_value(L, "radius", O.radius, "ball radius");
    bind_value(L, "steps", O.steps, "forward steps");
    bind_value(L, "steps-back", O.steps_back, "backward steps");
    bind_value(L, "trial", O.trial, "trial index within the seed");
    bind_value(L, "kind", O.kind, "kernel: sqrt_biased, delayed_srw or plain_srw");
    bind_value(L, "max-vertices", O.max_vertices, "enumeration budget");
  }
  {
    LeafCtx& L = c.leaf(walk, "stationarity", "exact stationarity and detailed balance",
                        run_walk_stationarity);
    add_family(L);
    bind_value(L, "p", O.p, "edge-open probability");
    bind_value(L, "radius", O.radius, "ball radius");
    bind_value(L, "trial", O.trial, "trial index within the seed");
    bind_value(L, "kind", O.kind, "kernel: sqrt_biased, delayed_srw or plain_srw");
    bind_value(L, "max-vertices", O.max_vertices, "enumeration budget");
  }
  {
    LeafCtx& L = c.leaf(walk, "frequency", "cluster visit frequency, both time directions",
                        run_walk_frequency);
    add_family(L);
    bind_value(L, "p", O.p, "edge-open probability");
    bind_value(L, "radius", O.radius, "ball radius");
    bind_value(L, "steps", O.steps, "steps per time direction");
    bind_value(L, "trial", O.trial, "trial index within the seed");
    bind_value(L, "kind", O.kind, "kernel: sqrt_biased, delayed_srw or plain_srw");
    bind_value(L, "max-vertices", O.max_vertices, "enumeration budget");
  }
  {
    LeafCtx& L = c.leaf(walk, "conductance", "effective conductance to wired spheres",
                        run_walk_conductance);
    add_family(L);
    bind_value(L, "p", O.p, "edge-open probability");
    bind_value(L, "radii", O.radii, "comma-separated radii, strictly increasing");
    bind_value(L, "weight", O.weight, "edge conductance: sqrt_mm or unit");
    bind_value(L, "trial", O.trial, "trial index within the seed");
    bind_value(L, "tol", O.tol, "relative residual tolerance");
    bind_flag(L, "ray", O.ray, "use the ray-decoration cluster instead of percolation");
    bind_value(L, "max-vertices", O.max_vertices, "enumeration budget");
  }

  auto* threshold = c.app.add_subcommand("threshold", "percolation threshold formulas and scans");
  threshold->require_subcommand(1);
  {
    LeafCtx& L = c.leaf(threshold, "ph", "closed-form heavy-cluster threshold",
                        run_threshold_ph);
    bind_value(L, "n1", O.n1, "outgoing edges per vertex", true);
    bind_value(L, "n2", O.n2, "incoming edges per vertex", true);
  }
  {
    LeafCtx& L = c.leaf(threshold, "slab-spectral", "slab cover-graph spectral radius",
                        run_threshold_spectral);
    bind_value(L, "n1", O.n1, "outgoing edges per vertex", true);
    bind_value(L, "n2", O.n2, "incoming edges per vertex", true);
    bind_value(L, "n", O.n, "slab height", true);
    bind_value(L, "growth-depth", O.growth_depth, "depth for the growth estimate");
  }
  {
    LeafCtx& L = c.leaf(threshold, "scan", "1/lambda* convergence scan over slab heights",
                        run_threshold_scan);
    bind_value(L, "n1", O.n1, "outgoing edges per vertex", true);
    bind_value(L, "n2", O.n2, "incoming edges per vertex", true);
    bind_value(L, "n-max", O.n_max, "largest slab height");
  }
  {
    LeafCtx& L = c.leaf(threshold, "pu-bound", "uniqueness-threshold lower bound",
                        run_threshold_pu);
    bind_value(L, "b", O.b, "branching number", true);
  }
}

}  // namespace

int main(int argc, char** argv) {
  auto t0 = std::chrono::steady_clock::now();
  Cli cli;
  build_cli(cli);
  try {
    cli.app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << cli.app.help() << std::flush;
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run 'perclab --help' or 'perclab <subcommand> --help' for usage\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run 'perclab --help' or 'perclab <subcommand> --help' for usage\n";
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 1;
  } catch (const resource_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  auto t1 = std::chrono::steady_clock::now();
  double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  std::cerr << "[perclab] wall_ms=" << ms << "\n";
  return 0;
}
