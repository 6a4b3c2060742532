/*
   Copyright 2026 The francache Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// fran: command-line front end for the two-level transmission simulator.
//
// Exit codes: 0 success, 2 infeasible instance, 1 any other error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fran/bench.hpp"
#include "fran/rng.hpp"
#include "fran/sca_cache.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;

fran::ScenarioParams params_or_default(const std::string& config) {
  if (config.empty()) return fran::ScenarioParams{};
  return fran::load_params(config);
}

void write_traces(const std::string& path, const fran::PipelineResult& res) {
  std::ofstream out(path);
  if (!out) throw fran::IoError("cannot write " + path);
  if (res.cache) {
    out << "# cache-level\n";
    fran::write_trace_csv(out, res.cache->trace, res.row.algorithm == fran::Algorithm::do_cehtm);
  }
  if (res.network) {
    out << "# network-level\n";
    fran::write_trace_csv(out, res.network->trace, false, res.instance->num_errh());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level cache / fronthaul transmission simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out_path;
  std::uint64_t seed = 1;
  std::uint64_t realization = 0;
  auto* generate = app.add_subcommand("generate", "Write a scenario bundle as JSON");
  generate->add_option("--config", config, "Scenario key = value file");
  generate->add_option("--seed", seed, "Scenario seed");
  generate->add_option("--realization", realization, "Realization index under the seed");
  generate->add_option("--out", out_path, "Output file (stdout if omitted)");

  std::string algo = "CO-CEHTM";
  std::string trace_path;
  auto* run = app.add_subcommand("run", "Run one pipeline and print its result row");
  run->add_option("--config", config, "Scenario key = value file");
  run->add_option("--algo", algo, "CO-CEHTM, DO-CEHTM or TC-CJTM");
  run->add_option("--seed", seed, "Scenario seed");
  run->add_option("--trace", trace_path, "Write SCA traces to this file");

  std::string spec_path;
  std::string output_override;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write CSV");
  sweep->add_option("--spec", spec_path, "Sweep key = value file")->required();
  sweep->add_option("--output", output_override, "Override the output path of the spec");

  std::string csv_path;
  std::string axis;
  std::string prefix;
  auto* plot = app.add_subcommand("plot-data", "Write per-algorithm plot data from a sweep CSV");
  plot->add_option("--csv", csv_path, "Sweep CSV")->required();
  plot->add_option("--axis", axis, "Sweep axis")->required();
  plot->add_option("--prefix", prefix, "Output prefix (defaults to the CSV path stem)");

  std::size_t samples = 10000;
  std::size_t tiny = 5;
  auto* verify = app.add_subcommand("verify", "Run the bound and oracle suites");
  verify->add_option("--samples", samples, "Samples per bound");
  verify->add_option("--tiny", tiny, "Number of tiny brute-force instances");
  verify->add_option("--seed", seed, "Seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      fran::ScenarioParams p = params_or_default(config);
      if (generate->count("--seed")) p.seed = seed;
      const fran::Instance inst = fran::make_instance(p, realization);
      if (out_path.empty()) {
        fran::write_instance_json(std::cout, inst);
      } else {
        std::ofstream out(out_path);
        if (!out) throw fran::IoError("cannot write " + out_path);
        fran::write_instance_json(out, inst);
      }
      return kOk;
    }
    if (*run) {
      fran::ScenarioParams p = params_or_default(config);
      if (!run->count("--seed")) seed = p.seed;
      const fran::PipelineResult res =
          fran::run_pipeline_detailed(p, fran::parse_algorithm(algo), seed);
      std::cout << fran::csv_header() << '\n';
      fran::write_csv_row(std::cout, res.row);
      if (!res.row.message.empty()) std::cerr << res.row.message << '\n';
      if (!trace_path.empty() && res.instance) write_traces(trace_path, res);
      if (res.row.status == fran::RowStatus::infeasible) return kInfeasible;
      return res.row.status == fran::RowStatus::ok ? kOk : kError;
    }
    if (*sweep) {
      fran::SweepSpec spec = fran::SweepSpec::load(spec_path);
      if (!output_override.empty()) spec.output = output_override;
      const auto rows = fran::run_sweep(spec);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += (!r.summary && r.status == fran::RowStatus::failed);
      std::cerr << "wrote " << rows.size() << " rows to " << spec.output.string();
      if (failed) std::cerr << " (" << failed << " failed)";
      std::cerr << '\n';
      return kOk;
    }
    if (*plot) {
      std::filesystem::path pre = prefix;
      if (pre.empty()) {
        pre = csv_path;
        pre.replace_extension();
      }
      const auto files = fran::emit_plot_data(csv_path, fran::parse_axis(axis), pre);
      if (files.empty()) std::cerr << "warning: no summary rows in " << csv_path << '\n';
      for (const auto& f : files) std::cout << f.string() << '\n';
      return kOk;
    }
    if (*verify) {
      const fran::VerifyReport rep = fran::run_verification(samples, tiny, seed);
      for (const auto& line : rep.lines) std::cout << line << '\n';
      return rep.passed ? kOk : kError;
    }
  } catch (const fran::InfeasiblePlacement& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
