// Deterministic report serialization shared by the CLI and the tests.
//
// Every emitted document (JSON or CSV) embeds the tool version and the full
// run specification, so a report can be replayed from its own header. All
// numeric formatting is round-trip exact and all iteration orders are fixed;
// combined with the deterministic parallel reductions in the compute layer,
// repeating a run with the same RunSpec yields byte-identical output no
// matter how many workers execute it. For that reason wall-clock timing is
// never part of the payload (the CLI prints it to stderr instead) and the
// worker count is not echoed.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "perclab/exact.hpp"

namespace perclab {

inline constexpr const char* kToolName = "perclab";
inline constexpr const char* kToolVersion = "1.0.0";

using Json = nlohmann::ordered_json;

// Canonical echo of one CLI invocation: the subcommand path ("threshold
// scan"), the family / operation parameters in a fixed order, and the common
// fields. seed and trials are present only when the run uses them; a
// stochastic run that generated its own seed records the generated value.
struct RunSpec {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> params;
  std::optional<uint64_t> seed;
  std::optional<int64_t> trials;
  std::string output_path;  // empty = stdout
  std::string format = "json";
};

// Shortest decimal string that parses back to exactly x (std::to_chars).
std::string format_double(double x);

// {"exact": "num/den", "value": <double>}.
Json rational_json(const Rat& r);

// {"exact": "<a + b sqrt(D)>", "value": <double>}.
Json quad_json(const Quad& q);

Json runspec_json(const RunSpec& rs);

// {"tool", "version", "runspec", "result"} with fixed key order.
Json report_envelope(const RunSpec& rs, Json result);

// Pretty-printed with a trailing newline; stable byte-for-byte.
std::string render_json(const Json& doc);

// RFC-4180 style quoting: fields containing comma, quote or newline are
// wrapped in double quotes with embedded quotes doubled.
std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);

// '#'-prefixed header lines carrying the tool version and the full RunSpec,
// mirroring the key=value config syntax so a report header is replayable.
std::string csv_preamble(const RunSpec& rs);

// Empty path writes to stdout; otherwise creates/truncates the file.
// Throws resource_error when the file cannot be written.
void write_output(const std::string& text, const std::string& output_path);

}  // namespace perclab
