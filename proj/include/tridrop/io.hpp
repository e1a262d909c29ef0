// Copyright 2026 The tridrop Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tridrop/bounds.hpp"
#include "tridrop/bubble_geometry.hpp"
#include "tridrop/competitors.hpp"
#include "tridrop/core_model.hpp"
#include "tridrop/energy.hpp"
#include "tridrop/optimizer.hpp"

namespace tridrop {

using json = nlohmann::json;

/// Shortest form is not what we want here: every double goes out with 17
/// significant digits so that it parses back to the same bits.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  // Keep a marker so integral doubles re-parse as floating point.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline void emit(std::string& out, const json& j, int depth) {
  const auto pad = [&](int d) { out.append(static_cast<std::size_t>(2 * d), ' '); };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{\n";
      bool first = true;
      // nlohmann's default object is a std::map, so iteration is key-sorted.
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        pad(depth + 1);
        out += json(it.key()).dump();
        out += ": ";
        emit(out, it.value(), depth + 1);
      }
      out += "\n";
      pad(depth);
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        pad(depth + 1);
        emit(out, j[i], depth + 1);
      }
      out += "\n";
      pad(depth);
      out += "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Pretty JSON with sorted keys and 17-digit floats, newline-terminated.
inline std::string dump_json(const json& j) {
  std::string out;
  detail::emit(out, j, 0);
  out += "\n";
  return out;
}

/// RFC 4180: CRLF line ends; fields containing separators, quotes or line
/// breaks are quoted with embedded quotes doubled.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : width_(header.size()) {
    row(header);
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != width_)
      throw Error(ErrorCode::PreconditionViolated, "csv", "row width differs from header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ += ',';
      out_ += quote(fields[i]);
    }
    out_ += "\r\n";
  }

  const std::string& str() const { return out_; }

  static std::string quote(std::string_view f) {
    if (f.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(f);
    std::string q = "\"";
    for (char ch : f) {
      if (ch == '"') q += '"';
      q += ch;
    }
    q += '"';
    return q;
  }

 private:
  std::size_t width_;
  std::string out_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, path, "cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoFailure, path, "write failed");
}

// ---------------------------------------------------------------------------
// Configuration files: a JSON list of {"shape", "m1", "m2", "distance"?}.

inline json cluster_to_json(const ClusterAnsatz& a) {
  json j;
  j["shape"] = std::string(to_string(a.kind()));
  j["m1"] = a.m1();
  j["m2"] = a.m2();
  if (const auto* s = std::get_if<SeparatedBalls>(&a.shape())) j["distance"] = s->center_distance;
  return j;
}

inline json configuration_to_json(const Configuration& c) {
  json arr = json::array();
  for (const auto& a : c.clusters()) arr.push_back(cluster_to_json(a));
  return arr;
}

namespace detail {

inline double number_at(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key))
    throw Error(ErrorCode::SchemaError, where + "/" + key, "missing required field");
  const json& v = obj.at(key);
  if (!v.is_number())
    throw Error(ErrorCode::SchemaError, where + "/" + key, "expected a number");
  return v.get<double>();
}

}  // namespace detail

inline ClusterAnsatz cluster_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "shape" && it.key() != "m1" && it.key() != "m2" && it.key() != "distance")
      throw Error(ErrorCode::SchemaError, where + "/" + it.key(), "unknown key");
  if (!j.contains("shape") || !j.at("shape").is_string())
    throw Error(ErrorCode::SchemaError, where + "/shape", "expected a shape name");
  const std::string shape = j.at("shape").get<std::string>();
  const double m1 = detail::number_at(j, "m1", where);
  const double m2 = detail::number_at(j, "m2", where);
  const bool has_d = j.contains("distance");
  if (has_d && shape != "separated_balls")
    throw Error(ErrorCode::SchemaError, where + "/distance",
                "distance only applies to separated_balls");

  try {
    if (shape == "single_ball") {
      validate_masses({m1, m2});
      if (m1 > 0.0 && m2 > 0.0)
        throw Error(ErrorCode::InvalidShape, "shape", "a single ball holds one phase");
      return m2 == 0.0 ? ClusterAnsatz::single_ball(1, m1) : ClusterAnsatz::single_ball(2, m2);
    }
    if (shape == "double_bubble") return ClusterAnsatz::double_bubble(m1, m2);
    if (shape == "separated_balls")
      return ClusterAnsatz::separated_balls(m1, m2, detail::number_at(j, "distance", where));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaError) throw;
    throw Error(e.code(), where + (e.field().empty() ? "" : "/" + e.field()), e.what());
  }
  throw Error(ErrorCode::SchemaError, where + "/shape", "unknown shape '" + shape + "'");
}

inline std::vector<ClusterAnsatz> clusters_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, "", "expected a list of clusters");
  std::vector<ClusterAnsatz> out;
  for (std::size_t k = 0; k < j.size(); ++k)
    out.push_back(cluster_from_json(j[k], "/" + std::to_string(k)));
  return out;
}

inline std::vector<ClusterAnsatz> parse_clusters(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, "", e.what());
  }
  return clusters_from_json(j);
}

// ---------------------------------------------------------------------------
// Reports.

inline json to_json(const ProblemParams& p) {
  json j;
  j["M1"] = p.M1;
  j["M2"] = p.M2;
  j["gamma11"] = p.gamma11;
  j["gamma12"] = p.gamma12;
  j["gamma22"] = p.gamma22;
  j["kernel_prefactor"] = p.kernel_prefactor;
  return j;
}

inline json to_json(const QuadratureSpec& s) {
  json j;
  j["method"] = std::string(to_string(s.method));
  j["samples"] = s.samples;
  j["grid_h"] = s.grid_h;
  j["seed"] = s.seed;
  return j;
}

inline json to_json(const MassPair& m) { return json::array({m[0], m[1]}); }

inline json to_json(const BoundsReport& r) {
  json j;
  j["m_S"] = to_json(r.m_S);
  j["m_plus_lb"] = to_json(r.m_plus_lb);
  j["H"] = to_json(r.H);
  j["eps_case"] = to_json(r.eps_case);
  j["eps_min"] = r.eps_min;
  j["upper_energy"] = r.upper_energy;
  j["K_pure"] = r.K_pure;
  j["K_mixed"] = r.K_mixed;
  j["K"] = r.K;
  return j;
}

inline json to_json(const EnergyBreakdown& e) {
  json j;
  j["perimeter"] = e.perimeter;
  j["self1"] = e.self1;
  j["self2"] = e.self2;
  j["cross"] = e.cross;
  j["total"] = e.total;
  j["std_error"] = e.std_error;
  j["relaxed"] = e.relaxed;
  return j;
}

inline json to_json(const DoubleBubbleGeometry& g) {
  json j;
  j["m1"] = g.m1;
  j["m2"] = g.m2;
  j["r1"] = g.r1;
  j["r2"] = g.r2;
  j["r0"] = g.r0;  // null when the separating surface is flat
  j["flat"] = !std::isfinite(g.r0);
  j["theta1"] = g.theta1;
  j["theta2"] = g.theta2;
  j["theta0"] = g.theta0;
  j["junction_radius"] = g.junction_radius;
  j["area1"] = g.area1;
  j["area2"] = g.area2;
  j["area0"] = g.area0;
  j["area"] = g.total_area();
  j["hutchings_lower_bound"] = hutchings_lower_bound(g.m1, g.m2);
  j["degenerate"] = g.degenerate;
  j["iterations"] = g.iterations;
  j["residual"] = g.degenerate ? 0.0 : bubble_residuals(g).max();
  return j;
}

inline json to_json(const PartitionResult& r) {
  json j;
  j["energy"] = r.energy;
  j["iterations"] = r.iterations;
  j["seed"] = r.seed;
  j["cluster_cap"] = r.cluster_cap;
  j["cluster_count"] = r.configuration.size();
  j["clusters"] = configuration_to_json(r.configuration);
  return j;
}

inline json to_json(const ChainLink& l) {
  json j;
  j["lhs"] = l.lhs;
  j["rhs"] = l.rhs;
  j["slack"] = l.slack();
  j["std_error"] = l.std_error;
  j["holds"] = l.holds();
  return j;
}

inline json to_json(const ChainReport& c) {
  json j;
  j["case"] = std::string(to_string(c.case_tag));
  j["r"] = c.r;
  j["eps"] = c.eps;
  j["H"] = c.H;
  j["eps_floor"] = c.eps_floor;
  j["scaling"] = to_json(c.scaling);
  j["replacement"] = to_json(c.replacement);
  j["total"] = to_json(c.total);
  j["energy_before"] = c.energy_before;
  j["energy_after"] = c.energy_after;
  j["energy_std_error"] = c.energy_std_error;
  j["improving"] = c.improving;
  j["all_hold"] = c.all_hold();
  return j;
}

}  // namespace tridrop
