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

#include <algorithm>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tridrop/io.hpp"

namespace tridrop {

enum class Command { bounds, energy, doublebubble, optimize, verify, sweep };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::bounds: return "bounds";
    case Command::energy: return "energy";
    case Command::doublebubble: return "doublebubble";
    case Command::optimize: return "optimize";
    case Command::verify: return "verify";
    case Command::sweep: return "sweep";
  }
  return "unknown";
}

enum class OutputFormat { json, csv };

struct SweepSpec {
  std::string param;  ///< one of M1, M2, gamma11, gamma12, gamma22
  std::vector<double> values;
  std::string quantity = "K";  ///< K or E0
};

struct RunConfig {
  Command command = Command::bounds;
  ProblemParams params;
  bool has_params = false;
  QuadratureSpec quadrature;
  std::uint64_t budget = kDefaultBudget;
  std::vector<std::uint64_t> seeds{1};
  std::optional<SweepSpec> sweep;
  std::string output_path;  ///< empty: the report goes to the output stream
  OutputFormat format = OutputFormat::json;
  std::string configuration;  ///< cluster file for energy and verify
  double m1 = 0.0, m2 = 0.0;  ///< doublebubble volumes
  BoundsOptions bounds;
};

namespace detail {

class SchemaReader {
 public:
  static void object(const json& j, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorCode::SchemaError, where.empty() ? "/" : where,
                                    "expected an object");
  }

  static void only(const json& j, const std::string& where,
                   std::initializer_list<std::string_view> keys) {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
        throw Error(ErrorCode::SchemaError, where + "/" + it.key(), "unknown key");
  }

  static const json* find(const json& j, const std::string& key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
  }

  static double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw Error(ErrorCode::SchemaError, where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw Error(ErrorCode::SchemaError, where, "expected a finite number");
    return d;
  }

  static std::uint64_t integer(const json& v, const std::string& where) {
    if (!v.is_number_unsigned())
      throw Error(ErrorCode::SchemaError, where, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  static std::string string(const json& v, const std::string& where) {
    if (!v.is_string()) throw Error(ErrorCode::SchemaError, where, "expected a string");
    return v.get<std::string>();
  }

  static const json& array(const json& v, const std::string& where) {
    if (!v.is_array()) throw Error(ErrorCode::SchemaError, where, "expected an array");
    return v;
  }
};

inline double* sweep_target(ProblemParams& p, std::string_view name) {
  if (name == "M1") return &p.M1;
  if (name == "M2") return &p.M2;
  if (name == "gamma11") return &p.gamma11;
  if (name == "gamma12") return &p.gamma12;
  if (name == "gamma22") return &p.gamma22;
  return nullptr;
}

}  // namespace detail

/// Strict parse of a run document.  Unknown keys, wrong types and invalid
/// values raise SchemaError with the JSON pointer of the offending field.
inline RunConfig parse_config(const json& doc) {
  using R = detail::SchemaReader;
  R::object(doc, "");
  R::only(doc, "", {"command", "params", "quadrature", "optimizer", "sweep", "output",
                    "configuration", "masses", "bounds"});
  RunConfig cfg;

  const json* cmd = R::find(doc, "command");
  if (!cmd) throw Error(ErrorCode::SchemaError, "/command", "missing required field");
  const std::string name = R::string(*cmd, "/command");
  bool known = false;
  for (Command c : {Command::bounds, Command::energy, Command::doublebubble, Command::optimize,
                    Command::verify, Command::sweep})
    if (name == to_string(c)) cfg.command = c, known = true;
  if (!known) throw Error(ErrorCode::SchemaError, "/command", "unknown command '" + name + "'");

  if (const json* p = R::find(doc, "params")) {
    R::object(*p, "/params");
    R::only(*p, "/params", {"M1", "M2", "gamma11", "gamma12", "gamma22", "kernel_prefactor"});
    for (const char* key : {"M1", "M2", "gamma11", "gamma12", "gamma22"})
      if (!p->contains(key))
        throw Error(ErrorCode::SchemaError, std::string("/params/") + key, "missing required field");
    cfg.params.M1 = R::number(p->at("M1"), "/params/M1");
    cfg.params.M2 = R::number(p->at("M2"), "/params/M2");
    cfg.params.gamma11 = R::number(p->at("gamma11"), "/params/gamma11");
    cfg.params.gamma12 = R::number(p->at("gamma12"), "/params/gamma12");
    cfg.params.gamma22 = R::number(p->at("gamma22"), "/params/gamma22");
    if (const json* k = R::find(*p, "kernel_prefactor")) {
      cfg.params.kernel_prefactor = R::number(*k, "/params/kernel_prefactor");
      if (!(cfg.params.kernel_prefactor > 0.0))
        throw Error(ErrorCode::SchemaError, "/params/kernel_prefactor", "must be positive");
    }
    try {
      validate_params(cfg.params);
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaError, "/params/" + e.field(), e.what());
    }
    cfg.has_params = true;
  } else if (cfg.command != Command::doublebubble) {
    throw Error(ErrorCode::SchemaError, "/params", "missing required field");
  }

  if (const json* q = R::find(doc, "quadrature")) {
    R::object(*q, "/quadrature");
    R::only(*q, "/quadrature", {"method", "samples", "grid_h", "seed"});
    if (const json* m = R::find(*q, "method")) {
      const std::string s = R::string(*m, "/quadrature/method");
      if (s == "analytic") cfg.quadrature.method = QuadratureMethod::analytic;
      else if (s == "monte_carlo") cfg.quadrature.method = QuadratureMethod::monte_carlo;
      else if (s == "voxel") cfg.quadrature.method = QuadratureMethod::voxel;
      else throw Error(ErrorCode::SchemaError, "/quadrature/method", "unknown method '" + s + "'");
    }
    if (const json* v = R::find(*q, "samples"))
      cfg.quadrature.samples = R::integer(*v, "/quadrature/samples");
    if (const json* v = R::find(*q, "grid_h"))
      cfg.quadrature.grid_h = R::number(*v, "/quadrature/grid_h");
    if (const json* v = R::find(*q, "seed")) cfg.quadrature.seed = R::integer(*v, "/quadrature/seed");
    try {
      validate_spec(cfg.quadrature);
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaError, "/quadrature/" + e.field(), e.what());
    }
  }

  if (const json* o = R::find(doc, "optimizer")) {
    R::object(*o, "/optimizer");
    R::only(*o, "/optimizer", {"budget", "seeds"});
    if (const json* b = R::find(*o, "budget")) {
      cfg.budget = R::integer(*b, "/optimizer/budget");
      if (cfg.budget == 0) throw Error(ErrorCode::SchemaError, "/optimizer/budget", "must be positive");
    }
    if (const json* s = R::find(*o, "seeds")) {
      const json& arr = R::array(*s, "/optimizer/seeds");
      if (arr.empty()) throw Error(ErrorCode::SchemaError, "/optimizer/seeds", "need at least one seed");
      cfg.seeds.clear();
      for (std::size_t i = 0; i < arr.size(); ++i)
        cfg.seeds.push_back(R::integer(arr[i], "/optimizer/seeds/" + std::to_string(i)));
    }
  }

  if (const json* s = R::find(doc, "sweep")) {
    R::object(*s, "/sweep");
    R::only(*s, "/sweep", {"param", "values", "quantity"});
    SweepSpec sw;
    const json* param = R::find(*s, "param");
    if (!param) throw Error(ErrorCode::SchemaError, "/sweep/param", "missing required field");
    sw.param = R::string(*param, "/sweep/param");
    ProblemParams probe;
    if (!detail::sweep_target(probe, sw.param))
      throw Error(ErrorCode::SchemaError, "/sweep/param", "unknown parameter '" + sw.param + "'");
    const json* values = R::find(*s, "values");
    if (!values) throw Error(ErrorCode::SchemaError, "/sweep/values", "missing required field");
    const json& arr = R::array(*values, "/sweep/values");
    if (arr.empty()) throw Error(ErrorCode::SchemaError, "/sweep/values", "sweep grid is empty");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "/sweep/values/" + std::to_string(i);
      ProblemParams p = cfg.params;
      *detail::sweep_target(p, sw.param) = R::number(arr[i], where);
      try {
        validate_params(p);
      } catch (const Error& e) {
        throw Error(ErrorCode::SchemaError, where, e.what());
      }
      sw.values.push_back(*detail::sweep_target(p, sw.param));
    }
    if (const json* q = R::find(*s, "quantity")) {
      sw.quantity = R::string(*q, "/sweep/quantity");
      if (sw.quantity != "K" && sw.quantity != "E0")
        throw Error(ErrorCode::SchemaError, "/sweep/quantity", "expected K or E0");
    }
    cfg.sweep = std::move(sw);
  }
  if (cfg.command == Command::sweep && !cfg.sweep)
    throw Error(ErrorCode::SchemaError, "/sweep", "missing required field");

  cfg.format = cfg.command == Command::sweep ? OutputFormat::csv : OutputFormat::json;
  if (const json* o = R::find(doc, "output")) {
    R::object(*o, "/output");
    R::only(*o, "/output", {"path", "format"});
    if (const json* p = R::find(*o, "path")) cfg.output_path = R::string(*p, "/output/path");
    if (const json* f = R::find(*o, "format")) {
      const std::string s = R::string(*f, "/output/format");
      if (s == "json") cfg.format = OutputFormat::json;
      else if (s == "csv") cfg.format = OutputFormat::csv;
      else throw Error(ErrorCode::SchemaError, "/output/format", "expected json or csv");
    }
  }

  if (const json* c = R::find(doc, "configuration"))
    cfg.configuration = R::string(*c, "/configuration");
  if ((cfg.command == Command::energy || cfg.command == Command::verify) &&
      cfg.configuration.empty())
    throw Error(ErrorCode::SchemaError, "/configuration", "missing required field");

  if (const json* m = R::find(doc, "masses")) {
    R::object(*m, "/masses");
    R::only(*m, "/masses", {"m1", "m2"});
    for (const char* key : {"m1", "m2"})
      if (!m->contains(key))
        throw Error(ErrorCode::SchemaError, std::string("/masses/") + key, "missing required field");
    cfg.m1 = R::number(m->at("m1"), "/masses/m1");
    cfg.m2 = R::number(m->at("m2"), "/masses/m2");
    if (cfg.m1 < 0.0) throw Error(ErrorCode::SchemaError, "/masses/m1", "volume must be >= 0");
    if (cfg.m2 < 0.0) throw Error(ErrorCode::SchemaError, "/masses/m2", "volume must be >= 0");
    if (!(cfg.m1 + cfg.m2 > 0.0))
      throw Error(ErrorCode::SchemaError, "/masses", "total volume must be positive");
  } else if (cfg.command == Command::doublebubble) {
    throw Error(ErrorCode::SchemaError, "/masses", "missing required field");
  }

  if (const json* b = R::find(doc, "bounds")) {
    R::object(*b, "/bounds");
    R::only(*b, "/bounds", {"m_B"});
    if (const json* mb = R::find(*b, "m_B")) {
      const json& arr = R::array(*mb, "/bounds/m_B");
      if (arr.size() != 2) throw Error(ErrorCode::SchemaError, "/bounds/m_B", "expected two values");
      MassPair v{};
      for (std::size_t i = 0; i < 2; ++i) {
        v[i] = R::number(arr[i], "/bounds/m_B/" + std::to_string(i));
        if (!(v[i] > 0.0))
          throw Error(ErrorCode::SchemaError, "/bounds/m_B/" + std::to_string(i), "must be positive");
      }
      cfg.bounds.ball_threshold = v;
    }
  }
  return cfg;
}

inline RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, "", e.what());
  }
  return parse_config(doc);
}

// Text overloads; without them a string would also convert to json.
inline RunConfig parse_config(const std::string& text) { return parse_config(std::string_view(text)); }
inline RunConfig parse_config(const char* text) { return parse_config(std::string_view(text)); }

/// Sets the field at a JSON pointer, creating parent objects as needed.
/// Used for command-line overrides.
inline void set_field(json& doc, const std::string& pointer, json value) {
  doc[json::json_pointer(pointer)] = std::move(value);
}

// ---------------------------------------------------------------------------

struct Report {
  json document;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string render(OutputFormat f) const {
    if (f == OutputFormat::json) return dump_json(document);
    CsvWriter w(header);
    for (const auto& r : rows) w.row(r);
    return w.str();
  }
};

namespace detail {

inline std::string cell(const json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

/// One CSV row from the scalar members of an object, in key order.
inline void flatten_into(Report& rep, const json& obj) {
  std::vector<std::string> h, row;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (it->is_structured()) continue;
    h.push_back(it.key());
    row.push_back(cell(*it));
  }
  if (rep.header.empty()) rep.header = h;
  rep.rows.push_back(std::move(row));
}

inline json base_document(const RunConfig& cfg) {
  json j;
  j["command"] = std::string(to_string(cfg.command));
  if (cfg.has_params) j["params"] = to_json(cfg.params);
  return j;
}

inline Report run_bounds(const RunConfig& cfg) {
  Report rep;
  rep.document = base_document(cfg);
  const BoundsReport r = cluster_count_bound(cfg.params, cfg.bounds);
  rep.document["result"] = to_json(r);
  json flat = to_json(r);
  for (const char* key : {"m_S", "m_plus_lb", "H", "eps_case"})
    for (int i = 0; i < 2; ++i) flat[std::string(key) + "_" + std::to_string(i + 1)] = flat[key][i];
  flatten_into(rep, flat);
  return rep;
}

inline Configuration load_configuration(const RunConfig& cfg) {
  return Configuration::make(parse_clusters(read_file(cfg.configuration)), cfg.params);
}

inline Report run_energy(const RunConfig& cfg) {
  Report rep;
  rep.document = base_document(cfg);
  rep.document["quadrature"] = to_json(cfg.quadrature);
  const Configuration c = load_configuration(cfg);
  json clusters = json::array();
  EnergyBreakdown total;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const EnergyBreakdown e = cluster_energy(c[k], cfg.params, cfg.quadrature);
    total += e;
    json row = to_json(e);
    row["index"] = k;
    row["shape"] = std::string(to_string(c[k].kind()));
    row["m1"] = c[k].m1();
    row["m2"] = c[k].m2();
    flatten_into(rep, row);
    clusters.push_back(std::move(row));
  }
  rep.document["clusters"] = std::move(clusters);
  rep.document["total"] = to_json(total);
  return rep;
}

inline Report run_doublebubble(const RunConfig& cfg) {
  Report rep;
  rep.document = base_document(cfg);
  const json g = to_json(double_bubble_geometry(cfg.m1, cfg.m2));
  rep.document["result"] = g;
  flatten_into(rep, g);
  return rep;
}

inline Report run_optimize(const RunConfig& cfg) {
  Report rep;
  rep.document = base_document(cfg);
  rep.document["quadrature"] = to_json(cfg.quadrature);
  rep.document["budget"] = cfg.budget;
  rep.document["seeds"] = cfg.seeds;
  const E0Model model(cfg.params, cfg.quadrature);
  const PartitionResult r = minimize_E0_multi(model, cfg.budget, cfg.seeds);
  const BoundsReport b = cluster_count_bound(cfg.params, cfg.bounds);
  json res = to_json(r);
  res["K"] = b.K;
  res["two_ball_upper_bound"] = b.upper_energy;
  res["table_relative_error"] = model.table_relative_error();
  rep.document["result"] = res;
  for (std::size_t k = 0; k < r.configuration.size(); ++k) {
    json row = cluster_to_json(r.configuration[k]);
    row["index"] = k;
    if (!row.contains("distance")) row["distance"] = nullptr;
    flatten_into(rep, row);
  }
  return rep;
}

inline Report run_verify(const RunConfig& cfg) {
  Report rep;
  rep.document = base_document(cfg);
  rep.document["quadrature"] = to_json(cfg.quadrature);
  const Configuration c = load_configuration(cfg);
  json moves = json::array();
  std::size_t improving = 0;
  bool any_mixed = false;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!c[k].masses().mixed()) continue;
    any_mixed = true;
    json entry;
    entry["index"] = k;
    try {
      const CompetitorMove mv = dispatch_move(c, k);
      const ChainReport ch = verify_chain(c, mv, cfg.quadrature);
      entry["target"] = mv.target;
      entry["chain"] = to_json(ch);
      improving += ch.improving ? 1 : 0;
      json row = to_json(ch);
      row["index"] = k;
      row["target"] = mv.target;
      for (const char* link : {"scaling", "replacement", "total"})
        row[std::string(link) + "_slack"] = row[link]["slack"];
      flatten_into(rep, row);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PreconditionViolated) throw;
      entry["skipped"] = e.what();
    }
    moves.push_back(std::move(entry));
  }
  if (!any_mixed)
    throw Error(ErrorCode::NotMixed, "/configuration", "configuration has no mixed cluster");
  rep.document["moves"] = std::move(moves);
  rep.document["improving_count"] = improving;
  if (rep.header.empty()) rep.header = {"index"};
  return rep;
}

/// Runs `work(i)` for i < n on up to hardware_concurrency threads.  Each
/// cell writes only its own slot, so the outcome does not depend on the
/// schedule.
template <class F>
void parallel_cells(std::size_t n, F work) {
  const std::size_t nt =
      std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += nt) {
        try {
          work(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline Report run_sweep(const RunConfig& cfg) {
  const SweepSpec& sw = *cfg.sweep;
  Report rep;
  rep.document = base_document(cfg);
  rep.document["sweep"] = {{"param", sw.param}, {"quantity", sw.quantity}, {"values", sw.values}};
  std::vector<json> rows(sw.values.size());
  parallel_cells(sw.values.size(), [&](std::size_t i) {
    ProblemParams p = cfg.params;
    *sweep_target(p, sw.param) = sw.values[i];
    const BoundsReport b = cluster_count_bound(p, cfg.bounds);
    json row;
    row[sw.param] = sw.values[i];
    row["K"] = b.K;
    if (sw.quantity == "K") {
      row["K_pure"] = b.K_pure;
      row["K_mixed"] = b.K_mixed;
      row["eps_min"] = b.eps_min;
    } else {
      const E0Model model(p, cfg.quadrature);
      const PartitionResult r = minimize_E0_multi(model, cfg.budget, cfg.seeds);
      row["E0"] = r.energy;
      row["cluster_count"] = r.configuration.size();
    }
    rows[i] = std::move(row);
  });
  // The swept parameter leads; the rest follow in key order.
  for (auto& row : rows) {
    std::vector<std::string> h{sw.param}, r{cell(row[sw.param])};
    for (auto it = row.begin(); it != row.end(); ++it)
      if (it.key() != sw.param) h.push_back(it.key()), r.push_back(cell(*it));
    rep.header = h;
    rep.rows.push_back(std::move(r));
  }
  rep.document["rows"] = rows;
  return rep;
}

}  // namespace detail

/// Executes one command.  The report goes to `cfg.output_path` when set,
/// otherwise to `out`.  Returns the exit status: 0 ok, 2 invalid input
/// (including I/O), 3 numeric failure; the message goes to `err`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (!cfg.output_path.empty()) {
      // Fail before any long computation if the report cannot be written.
      std::ofstream probe(cfg.output_path, std::ios::app);
      if (!probe) throw Error(ErrorCode::IoFailure, cfg.output_path, "cannot open for writing");
    }
    Report rep;
    switch (cfg.command) {
      case Command::bounds: rep = detail::run_bounds(cfg); break;
      case Command::energy: rep = detail::run_energy(cfg); break;
      case Command::doublebubble: rep = detail::run_doublebubble(cfg); break;
      case Command::optimize: rep = detail::run_optimize(cfg); break;
      case Command::verify: rep = detail::run_verify(cfg); break;
      case Command::sweep: rep = detail::run_sweep(cfg); break;
    }
    const std::string text = rep.render(cfg.format);
    if (cfg.output_path.empty()) {
      out << text;
    } else {
      write_file(cfg.output_path, text);
      if (cfg.command == Command::optimize) {
        std::string stem = cfg.output_path;
        if (auto dot = stem.rfind('.'); dot != std::string::npos && stem.find('/', dot) == std::string::npos)
          stem.erase(dot);
        write_file(stem + ".clusters.json", dump_json(rep.document["result"]["clusters"]));
      }
    }
    return 0;
  } catch (const Error& e) {
    err << "tridrop: " << e.what() << "\n";
    return e.is_validation() ? 2 : 3;
  } catch (const std::exception& e) {
    err << "tridrop: numeric failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace tridrop
