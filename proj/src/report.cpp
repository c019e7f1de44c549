#include "perclab/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "perclab/errors.hpp"

namespace perclab {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Json rational_json(const Rat& r) {
  Json j;
  j["exact"] = to_string(r);
  j["value"] = to_double(r);
  return j;
}

Json quad_json(const Quad& q) {
  Json j;
  j["exact"] = q.str();
  j["value"] = q.to_double();
  return j;
}

Json runspec_json(const RunSpec& rs) {
  Json j;
  j["subcommand"] = rs.subcommand;
  Json params = Json::object();
  for (const auto& [k, v] : rs.params) params[k] = v;
  j["params"] = std::move(params);
  if (rs.seed) j["seed"] = *rs.seed;
  if (rs.trials) j["trials"] = *rs.trials;
  j["format"] = rs.format;
  j["out"] = rs.output_path;
  return j;
}

Json report_envelope(const RunSpec& rs, Json result) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["runspec"] = runspec_json(rs);
  j["result"] = std::move(result);
  return j;
}

std::string render_json(const Json& doc) { return doc.dump(2) + "\n"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += '\n';
  return out;
}

std::string csv_preamble(const RunSpec& rs) {
  std::string out;
  out += std::string("# tool=") + kToolName + "/" + kToolVersion + "\n";
  out += "# subcommand=" + rs.subcommand + "\n";
  for (const auto& [k, v] : rs.params) out += "# " + k + "=" + v + "\n";
  if (rs.seed) out += "# seed=" + std::to_string(*rs.seed) + "\n";
  if (rs.trials) out += "# trials=" + std::to_string(*rs.trials) + "\n";
  out += "# format=" + rs.format + "\n";
  if (!rs.output_path.empty()) out += "# out=" + rs.output_path + "\n";
  return out;
}

void write_output(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(output_path, std::ios::binary | std::ios::trunc);
  if (!f) throw resource_error("cannot open output file: " + output_path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.flush();
  if (!f) throw resource_error("failed writing output file: " + output_path);
}

}  // namespace perclab
