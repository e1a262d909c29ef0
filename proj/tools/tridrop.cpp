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

// Command-line front end.  A JSON run document drives everything; flags only
// override fields of that document.
//
//   tridrop --config run.json
//   tridrop bounds --M1 1 --M2 1 --gamma11 1 --gamma12 1 --gamma22 1
//   tridrop doublebubble --m1 1 --m2 0

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tridrop/cli.hpp"

int main(int argc, char** argv) {
  using tridrop::json;
  CLI::App app{"Cluster bounds, energies and optimal partitions for two-phase droplets"};

  std::string command, config_path;
  app.add_option("command", command,
                 "bounds | energy | doublebubble | optimize | verify | sweep");
  app.add_option("-c,--config", config_path, "JSON run document");

  // Numeric overrides, keyed by the JSON pointer they replace.
  struct NumFlag {
    const char* flag;
    const char* pointer;
    std::optional<double> value;
  };
  std::vector<NumFlag> nums = {
      {"--M1", "/params/M1", {}},           {"--M2", "/params/M2", {}},
      {"--gamma11", "/params/gamma11", {}}, {"--gamma12", "/params/gamma12", {}},
      {"--gamma22", "/params/gamma22", {}}, {"--kernel-prefactor", "/params/kernel_prefactor", {}},
      {"--m1", "/masses/m1", {}},           {"--m2", "/masses/m2", {}},
      {"--grid-h", "/quadrature/grid_h", {}},
  };
  for (auto& f : nums) app.add_option(f.flag, f.value, std::string("sets ") + f.pointer);

  struct IntFlag {
    const char* flag;
    const char* pointer;
    std::optional<std::uint64_t> value;
  };
  std::vector<IntFlag> ints = {
      {"--samples", "/quadrature/samples", {}},
      {"--seed", "/quadrature/seed", {}},
      {"--budget", "/optimizer/budget", {}},
  };
  for (auto& f : ints) app.add_option(f.flag, f.value, std::string("sets ") + f.pointer);

  std::optional<std::string> method, output, format, configuration, sweep_param, sweep_quantity;
  std::vector<std::uint64_t> seeds;
  std::vector<double> sweep_values;
  app.add_option("--method", method, "analytic | monte_carlo | voxel");
  app.add_option("--seeds", seeds, "optimizer chain seeds")->delimiter(',');
  app.add_option("-o,--output", output, "report path (default: stdout)");
  app.add_option("--format", format, "json | csv");
  app.add_option("--configuration", configuration, "cluster file for energy and verify");
  app.add_option("--sweep-param", sweep_param, "M1 | M2 | gamma11 | gamma12 | gamma22");
  app.add_option("--sweep-values", sweep_values, "sweep grid")->delimiter(',');
  app.add_option("--sweep-quantity", sweep_quantity, "K | E0");

  CLI11_PARSE(app, argc, argv);

  try {
    json doc = json::object();
    if (!config_path.empty()) {
      try {
        doc = json::parse(tridrop::read_file(config_path));
      } catch (const json::parse_error& e) {
        throw tridrop::Error(tridrop::ErrorCode::SchemaError, config_path, e.what());
      }
    }
    if (!command.empty()) tridrop::set_field(doc, "/command", command);
    for (const auto& f : nums)
      if (f.value) tridrop::set_field(doc, f.pointer, *f.value);
    for (const auto& f : ints)
      if (f.value) tridrop::set_field(doc, f.pointer, *f.value);
    if (method) tridrop::set_field(doc, "/quadrature/method", *method);
    if (!seeds.empty()) tridrop::set_field(doc, "/optimizer/seeds", seeds);
    if (output) tridrop::set_field(doc, "/output/path", *output);
    if (format) tridrop::set_field(doc, "/output/format", *format);
    if (configuration) tridrop::set_field(doc, "/configuration", *configuration);
    if (sweep_param) tridrop::set_field(doc, "/sweep/param", *sweep_param);
    if (!sweep_values.empty()) tridrop::set_field(doc, "/sweep/values", sweep_values);
    if (sweep_quantity) tridrop::set_field(doc, "/sweep/quantity", *sweep_quantity);

    const tridrop::RunConfig cfg = tridrop::parse_config(doc);
    return tridrop::run(cfg, std::cout, std::cerr);
  } catch (const tridrop::Error& e) {
    std::cerr << "tridrop: " << e.what() << "\n";
    return e.is_validation() ? 2 : 3;
  }
}
