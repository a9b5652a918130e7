#include "scottlab/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "scottlab/error.hpp"
#include "scottlab/spectrum_store.hpp"

namespace scottlab {

namespace {

using nlohmann::json;

std::string quoted(const std::string& s) { return json(s).dump(); }

std::string number(double x) {
  if (std::isfinite(x)) return format_fixed17(x);
  return quoted(format_fixed17(x));
}

std::string boolean(bool b) { return b ? "true" : "false"; }

double read_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error("report: expected a number, got " + j.dump());
}

Relation parse_relation(const std::string& s) {
  if (s == "<=") return Relation::less_equal;
  if (s == ">=") return Relation::greater_equal;
  if (s == "==") return Relation::equal;
  throw Error("report: unknown relation '" + s + "'");
}

}  // namespace

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::less_equal: return "<=";
    case Relation::greater_equal: return ">=";
    case Relation::equal: return "==";
  }
  return "?";
}

std::string format_fixed17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_shortest(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string report_to_json(const VerificationReport& report) {
  std::string out = "{\n  \"format\": " + quoted(kCodeVersion) + ",\n";
  out += "  \"pass\": " + boolean(report.pass) + ",\n";
  out += "  \"failures\": " + std::to_string(report.failures()) + ",\n";
  out += "  \"constants\": [";
  for (std::size_t i = 0; i < report.constants.size(); ++i) {
    const auto& c = report.constants[i];
    out += i ? ",\n    " : "\n    ";
    out += "{\"gamma\": " + number(c.gamma) + ", \"A\": " + number(c.a) + ", \"t0\": " +
           number(c.t0) + ", \"m_tilde\": " + number(c.m_tilde) + ", \"m_tilde_argmax\": " +
           number(c.m_tilde_argmax) + ", \"c_emp\": " + number(c.c_emp) + ", \"M\": " +
           number(c.m) + ", \"D\": " + number(c.d) + "}";
  }
  out += report.constants.empty() ? "],\n" : "\n  ],\n";
  out += "  \"grids\": [";
  for (std::size_t i = 0; i < report.grids.size(); ++i) {
    const auto& g = report.grids[i];
    out += i ? ",\n    " : "\n    ";
    out += "{\"purpose\": " + quoted(g.purpose) + ", \"gamma\": " + number(g.gamma) +
           ", \"h\": " + number(g.spacing) + ", \"N\": " + std::to_string(g.count) +
           ", \"r_max\": " + number(g.r_max) + "}";
  }
  out += report.grids.empty() ? "],\n" : "\n  ],\n";
  out += "  \"checks\": [";
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    const auto& c = report.checks[i];
    const auto& p = c.parameters;
    out += i ? ",\n    " : "\n    ";
    out += "{\"name\": " + quoted(c.name) + ", \"parameters\": {\"gamma\": " + number(p.gamma) +
           ", \"ell\": " + std::to_string(p.ell) + ", \"n\": " + std::to_string(p.n) +
           ", \"auxiliary\": " + quoted(p.auxiliary) + "}, \"lhs\": " + number(c.lhs) +
           ", \"rhs\": " + number(c.rhs) + ", \"margin\": " + number(c.margin) +
           ", \"tolerance\": " + number(c.tolerance) + ", \"pass\": " + boolean(c.pass) +
           ", \"relation\": " + quoted(relation_name(c.relation)) + ", \"note\": " +
           quoted(c.note) + "}";
  }
  out += report.checks.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

VerificationReport report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("report: invalid JSON (") + e.what() + ")");
  }
  VerificationReport r;
  try {
    r.pass = j.at("pass").get<bool>();
    for (const auto& c : j.at("constants")) {
      ConstantsBundle b;
      b.gamma = read_number(c.at("gamma"));
      b.a = read_number(c.at("A"));
      b.t0 = read_number(c.at("t0"));
      b.m_tilde = read_number(c.at("m_tilde"));
      b.m_tilde_argmax = read_number(c.at("m_tilde_argmax"));
      b.c_emp = read_number(c.at("c_emp"));
      b.m = read_number(c.at("M"));
      b.d = read_number(c.at("D"));
      r.constants.push_back(b);
    }
    for (const auto& g : j.at("grids")) {
      r.grids.push_back({g.at("purpose").get<std::string>(), read_number(g.at("gamma")),
                         read_number(g.at("h")), g.at("N").get<std::size_t>(),
                         read_number(g.at("r_max"))});
    }
    for (const auto& c : j.at("checks")) {
      CheckResult x;
      x.name = c.at("name").get<std::string>();
      const auto& p = c.at("parameters");
      x.parameters = {read_number(p.at("gamma")), p.at("ell").get<int>(), p.at("n").get<int>(),
                      p.at("auxiliary").get<std::string>()};
      x.lhs = read_number(c.at("lhs"));
      x.rhs = read_number(c.at("rhs"));
      x.margin = read_number(c.at("margin"));
      x.tolerance = read_number(c.at("tolerance"));
      x.pass = c.at("pass").get<bool>();
      x.relation = parse_relation(c.at("relation").get<std::string>());
      x.note = c.at("note").get<std::string>();
      r.checks.push_back(std::move(x));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("report: malformed field (") + e.what() + ")");
  }
  return r;
}

void write_report(const std::filesystem::path& path, const VerificationReport& report) {
  write_file_atomically(path, report_to_json(report));
}

}  // namespace scottlab
