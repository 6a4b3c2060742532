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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fran/config.hpp"
#include "fran/cvxkit.hpp"
#include "fran/metrics.hpp"
#include "fran/scenario.hpp"

namespace fran {

enum class Algorithm { co_cehtm, do_cehtm, tc_cjtm };

const char* to_string(Algorithm a);  // "CO-CEHTM", ...
// Accepts the display name in any case; throws InvalidParams otherwise.
Algorithm parse_algorithm(const std::string& name);
const std::vector<Algorithm>& all_algorithms();

enum class RowStatus { ok, infeasible, failed };

const char* to_string(RowStatus s);

struct ResultRow {
  std::string scenario_id;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::co_cehtm;
  double C = 0.0;
  double S = 0.0;
  double P_dB = 0.0;
  double B_over_S = 0.0;
  double tau = 0.0;  // configured delay, also for TC-CJTM rows
  double iterations = 0.0;  // cache-level + network-level subproblem solves
  double tdr = 0.0;
  double tar = 0.0;
  double runtime_ms = 0.0;
  RowStatus status = RowStatus::ok;
  bool summary = false;
  double tdr_se = 0.0;  // summary rows only
  std::string message;  // not written to CSV
};

struct PipelineResult {
  ResultRow row;
  std::optional<Instance> instance;
  std::optional<CacheLevelSolution> cache;
  std::optional<NetworkLevelSolution> network;
  std::optional<DeliveryReport> report;
};

// The instance is drawn from `seed` (realization 0). Never throws for
// solver or placement trouble; those end up in row.status.
PipelineResult run_pipeline_detailed(const ScenarioParams& params, Algorithm algorithm,
                                     std::uint64_t seed, const cvx::SolverOptions& options = {});
ResultRow run_pipeline(const ScenarioParams& params, Algorithm algorithm, std::uint64_t seed);

enum class SweepAxis { fronthaul_C, file_S, power_PdB, cache_B_over_S, delay_tau };

const char* to_string(SweepAxis a);
SweepAxis parse_axis(const std::string& name);
// CSV column that carries the axis value.
const char* axis_column(SweepAxis a);
// Copy of base with the axis set to value. cache_B_over_S scales B with
// S; file_S keeps B/S fixed.
ScenarioParams apply_axis(const ScenarioParams& base, SweepAxis axis, double value);

struct SweepSpec {
  SweepAxis axis = SweepAxis::fronthaul_C;
  std::vector<double> values;
  std::size_t realizations = 1;
  std::vector<Algorithm> algorithms;
  ScenarioParams base;
  std::filesystem::path output;
  // Wall-clock time in runtime_ms; off by default so reruns are
  // byte-identical.
  bool record_runtime = false;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const;
  std::size_t num_data_rows() const { return values.size() * realizations * algorithms.size(); }
  // Keys: axis, values, realizations, algorithms, output, record_runtime,
  // threads, plus any scenario key for the base parameters.
  static SweepSpec from_keys(const KeyValueFile& kv);
  static SweepSpec load(const std::filesystem::path& path);
};

std::string csv_header();
void write_csv_row(std::ostream& out, const ResultRow& row);
// Parses a CSV written by write_csv; throws IoError on schema mismatch.
std::vector<ResultRow> read_csv(std::istream& in);

// Data rows in (axis index, realization, algorithm) order, then one
// summary row per (axis value, algorithm).
std::vector<ResultRow> sweep_rows(const SweepSpec& spec);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
// Runs the sweep and writes spec.output. Throws IoError if the file cannot
// be written.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

// One file per algorithm with "axis mean_tdr stderr" lines taken from the
// summary rows, named <stem>_<ALGO>.dat next to out_prefix. Returns the
// written paths; empty when the CSV has no summary rows.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& csv,
                                                  SweepAxis axis,
                                                  const std::filesystem::path& out_prefix);

// Instance as JSON: params, geometry, channels, cache, requests, schedule.
void write_instance_json(std::ostream& out, const Instance& inst);

struct VerifyReport {
  std::vector<std::string> lines;
  bool passed = true;
};

// Bound sampling, brute-force comparison on tiny instances and the
// single-user closed form.
VerifyReport run_verification(std::size_t bound_samples = 10000, std::size_t tiny_instances = 5,
                              std::uint64_t seed = 1);

}  // namespace fran
