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

#include "fran/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fran/oracle.hpp"
#include "fran/rng.hpp"
#include "fran/sca_cache.hpp"
#include "fran/sca_cache_dist.hpp"
#include "fran/sca_network.hpp"

namespace fran {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::co_cehtm: return "CO-CEHTM";
    case Algorithm::do_cehtm: return "DO-CEHTM";
    case Algorithm::tc_cjtm: return "TC-CJTM";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  const std::string n = lower(trim(name));
  for (Algorithm a : all_algorithms()) {
    if (lower(to_string(a)) == n) return a;
  }
  throw InvalidParams("unknown algorithm `" + name + "`");
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all{Algorithm::co_cehtm, Algorithm::do_cehtm,
                                          Algorithm::tc_cjtm};
  return all;
}

const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::ok: return "ok";
    case RowStatus::infeasible: return "infeasible";
    case RowStatus::failed: return "failed";
  }
  return "?";
}

namespace {

RowStatus parse_status(const std::string& s) {
  for (RowStatus r : {RowStatus::ok, RowStatus::infeasible, RowStatus::failed}) {
    if (s == to_string(r)) return r;
  }
  throw IoError("unknown status `" + s + "`");
}

ResultRow base_row(const ScenarioParams& p, Algorithm algorithm, std::uint64_t seed) {
  ResultRow row;
  row.seed = seed;
  row.algorithm = algorithm;
  row.C = p.fronthaul_capacity;
  row.S = p.file_size;
  row.P_dB = p.power_db();
  row.B_over_S = p.cache_over_file();
  row.tau = p.delay;
  return row;
}

}  // namespace

PipelineResult run_pipeline_detailed(const ScenarioParams& params, Algorithm algorithm,
                                     std::uint64_t seed, const cvx::SolverOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult out;
  out.row = base_row(params, algorithm, seed);
  ResultRow& row = out.row;
  try {
    ScenarioParams p = params;
    p.seed = seed;
    if (algorithm == Algorithm::tc_cjtm) p.delay = 0.0;
    out.instance = make_instance(p, 0);
    const Instance& inst = *out.instance;
    const CacheLevelSolution* cache = nullptr;
    if (algorithm == Algorithm::co_cehtm) {
      out.cache = solve_cache_central(inst, options);
      cache = &*out.cache;
    } else if (algorithm == Algorithm::do_cehtm) {
      out.cache = solve_cache_decentral(inst, options);
      cache = &*out.cache;
    }
    out.network = solve_network(inst, cache, options);
    out.report = delivery_report(cache, *out.network, inst);
    row.iterations = static_cast<double>((cache ? cache->iterations : 0) + out.network->iterations);
    row.tdr = out.report->two_level_total;
    row.tar = out.report->achievable_total;
    const bool failed = (cache && cache->status == SolveStatus::failed) ||
                        out.network->status == SolveStatus::failed;
    row.status = failed ? RowStatus::failed : RowStatus::ok;
    if (cache && !cache->message.empty()) row.message = cache->message;
    if (!out.network->message.empty()) {
      if (!row.message.empty()) row.message += "; ";
      row.message += out.network->message;
    }
  } catch (const InfeasiblePlacement& e) {
    row.status = RowStatus::infeasible;
    row.tdr = row.tar = std::nan("");
    row.message = e.what();
  } catch (const Error& e) {
    row.status = RowStatus::failed;
    row.tdr = row.tar = std::nan("");
    row.message = e.what();
  }
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

ResultRow run_pipeline(const ScenarioParams& params, Algorithm algorithm, std::uint64_t seed) {
  return run_pipeline_detailed(params, algorithm, seed).row;
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::fronthaul_C: return "fronthaul_C";
    case SweepAxis::file_S: return "file_S";
    case SweepAxis::power_PdB: return "power_PdB";
    case SweepAxis::cache_B_over_S: return "cache_B_over_S";
    case SweepAxis::delay_tau: return "delay_tau";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& name) {
  const std::string n = trim(name);
  for (SweepAxis a : {SweepAxis::fronthaul_C, SweepAxis::file_S, SweepAxis::power_PdB,
                      SweepAxis::cache_B_over_S, SweepAxis::delay_tau}) {
    if (n == to_string(a) || n == axis_column(a)) return a;
  }
  throw InvalidParams("unknown sweep axis `" + name + "`");
}

const char* axis_column(SweepAxis a) {
  switch (a) {
    case SweepAxis::fronthaul_C: return "C";
    case SweepAxis::file_S: return "S";
    case SweepAxis::power_PdB: return "P_dB";
    case SweepAxis::cache_B_over_S: return "B_over_S";
    case SweepAxis::delay_tau: return "tau";
  }
  return "?";
}

ScenarioParams apply_axis(const ScenarioParams& base, SweepAxis axis, double value) {
  ScenarioParams p = base;
  switch (axis) {
    case SweepAxis::fronthaul_C: p.fronthaul_capacity = value; break;
    case SweepAxis::file_S: {
      const double ratio = base.cache_over_file();
      p.file_size = value;
      p.cache_size = ratio * value;
      break;
    }
    case SweepAxis::power_PdB: p.max_power = db_to_linear(value); break;
    case SweepAxis::cache_B_over_S: p.cache_size = value * base.file_size; break;
    case SweepAxis::delay_tau: p.delay = value; break;
  }
  p.validate();
  return p;
}

void SweepSpec::validate() const {
  if (values.empty()) throw InvalidParams("sweep needs at least one axis value");
  if (realizations < 1) throw InvalidParams("sweep needs at least one realization");
  if (algorithms.empty()) throw InvalidParams("sweep needs at least one algorithm");
  for (double v : values) apply_axis(base, axis, v);
}

SweepSpec SweepSpec::from_keys(const KeyValueFile& kv) {
  SweepSpec spec;
  spec.axis = parse_axis(kv.get("axis"));
  for (const auto& v : kv.get_list("values")) {
    try {
      std::size_t used = 0;
      spec.values.push_back(std::stod(v, &used));
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw InvalidParams("sweep value `" + v + "` is not a number");
    }
  }
  const long long r = kv.get_int("realizations", 1);
  if (r < 1) throw InvalidParams("realizations must be >= 1");
  spec.realizations = static_cast<std::size_t>(r);
  if (kv.contains("algorithms")) {
    for (const auto& a : kv.get_list("algorithms")) spec.algorithms.push_back(parse_algorithm(a));
  } else {
    spec.algorithms = all_algorithms();
  }
  spec.output = kv.get_string("output", "sweep.csv");
  spec.record_runtime = kv.get_int("record_runtime", 0) != 0;
  const long long threads = kv.get_int("threads", 0);
  if (threads < 0) throw InvalidParams("threads must be >= 0");
  spec.threads = static_cast<std::size_t>(threads);
  spec.base = params_from_keys(kv, false);
  if (const auto unused = kv.unused_keys(); !unused.empty()) {
    throw InvalidParams("unknown sweep key `" + unused.front() + "`");
  }
  spec.validate();
  return spec;
}

SweepSpec SweepSpec::load(const std::filesystem::path& path) {
  return from_keys(KeyValueFile::load(path));
}

std::string csv_header() {
  return "scenario_id,seed,algorithm,C,S,P_dB,B_over_S,tau,iterations,tdr,tar,runtime_ms,status,"
         "summary,tdr_se";
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double parse_num(const std::string& s) {
  if (s == "nan") return std::nan("");
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("bad number `" + s + "` in CSV");
  }
}

}  // namespace

void write_csv_row(std::ostream& out, const ResultRow& row) {
  out << row.scenario_id << ',' << row.seed << ',' << to_string(row.algorithm) << ','
      << num(row.C) << ',' << num(row.S) << ',' << num(row.P_dB) << ',' << num(row.B_over_S)
      << ',' << num(row.tau) << ',' << num(row.iterations) << ',' << num(row.tdr) << ','
      << num(row.tar) << ',' << num(row.runtime_ms) << ',' << to_string(row.status) << ','
      << (row.summary ? 1 : 0) << ',' << num(row.tdr_se) << '\n';
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << csv_header() << '\n';
  for (const auto& r : rows) write_csv_row(out, r);
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) throw IoError("CSV header does not match the result schema");
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 15) {
      throw IoError("CSV line " + std::to_string(lineno) + " has " + std::to_string(f.size()) +
                    " fields, expected 15");
    }
    ResultRow r;
    r.scenario_id = f[0];
    try {
      r.seed = std::stoull(f[1]);
      r.algorithm = parse_algorithm(f[2]);
    } catch (const std::exception& e) {
      throw IoError("CSV line " + std::to_string(lineno) + ": " + e.what());
    }
    r.C = parse_num(f[3]);
    r.S = parse_num(f[4]);
    r.P_dB = parse_num(f[5]);
    r.B_over_S = parse_num(f[6]);
    r.tau = parse_num(f[7]);
    r.iterations = parse_num(f[8]);
    r.tdr = parse_num(f[9]);
    r.tar = parse_num(f[10]);
    r.runtime_ms = parse_num(f[11]);
    r.status = parse_status(f[12]);
    r.summary = f[13] == "1";
    r.tdr_se = parse_num(f[14]);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

ResultRow summarize(const std::vector<const ResultRow*>& rows, const ScenarioParams& p,
                    Algorithm algorithm, std::size_t axis_index, bool record_runtime) {
  ResultRow s = base_row(p, algorithm, p.seed);
  s.scenario_id = "summary-" + std::to_string(axis_index);
  s.summary = true;
  std::vector<double> tdr;
  double tar = 0.0;
  double iters = 0.0;
  double runtime = 0.0;
  bool any_failed = false;
  for (const ResultRow* r : rows) {
    if (r->status == RowStatus::failed) any_failed = true;
    if (r->status == RowStatus::infeasible || !std::isfinite(r->tdr)) continue;
    tdr.push_back(r->tdr);
    tar += r->tar;
    iters += r->iterations;
    runtime += r->runtime_ms;
  }
  if (tdr.empty()) {
    s.status = any_failed ? RowStatus::failed : RowStatus::infeasible;
    s.tdr = s.tar = s.iterations = std::nan("");
    return s;
  }
  const double n = static_cast<double>(tdr.size());
  double mean = 0.0;
  for (double v : tdr) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : tdr) var += (v - mean) * (v - mean);
  s.tdr = mean;
  s.tar = tar / n;
  s.iterations = iters / n;
  s.runtime_ms = record_runtime ? runtime / n : 0.0;
  s.tdr_se = tdr.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
  s.status = any_failed ? RowStatus::failed : RowStatus::ok;
  return s;
}

}  // namespace

std::vector<ResultRow> sweep_rows(const SweepSpec& spec) {
  spec.validate();
  const std::size_t nv = spec.values.size();
  const std::size_t nr = spec.realizations;
  const std::size_t na = spec.algorithms.size();
  const std::size_t total = spec.num_data_rows();
  std::vector<ScenarioParams> params;
  for (double v : spec.values) params.push_back(apply_axis(spec.base, spec.axis, v));

  std::vector<ResultRow> rows(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= total) return;
      const std::size_t a = t % na;
      const std::size_t r = (t / na) % nr;
      const std::size_t v = t / (na * nr);
      ResultRow row = run_pipeline(params[v], spec.algorithms[a], derive_seed(spec.base.seed, r));
      row.scenario_id = std::to_string(v) + "-" + std::to_string(r);
      if (!spec.record_runtime) row.runtime_ms = 0.0;
      rows[t] = std::move(row);
    }
  };
  std::size_t threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, total);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t a = 0; a < na; ++a) {
      std::vector<const ResultRow*> group;
      for (std::size_t r = 0; r < nr; ++r) group.push_back(&rows[(v * nr + r) * na + a]);
      rows.push_back(summarize(group, params[v], spec.algorithms[a], v, spec.record_runtime));
    }
  }
  return rows;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
  std::vector<ResultRow> rows = sweep_rows(spec);
  if (spec.output.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(spec.output.parent_path(), ec);
  }
  std::ofstream out(spec.output, std::ios::binary);
  if (!out) throw IoError("cannot write " + spec.output.string());
  write_csv(out, rows);
  if (!out) throw IoError("write failed for " + spec.output.string());
  return rows;
}

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& csv,
                                                  SweepAxis axis,
                                                  const std::filesystem::path& out_prefix) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw IoError("cannot read " + csv.string());
  const std::vector<ResultRow> rows = read_csv(in);

  auto axis_value = [axis](const ResultRow& r) {
    switch (axis) {
      case SweepAxis::fronthaul_C: return r.C;
      case SweepAxis::file_S: return r.S;
      case SweepAxis::power_PdB: return r.P_dB;
      case SweepAxis::cache_B_over_S: return r.B_over_S;
      case SweepAxis::delay_tau: return r.tau;
    }
    return r.C;
  };

  std::vector<std::filesystem::path> written;
  for (Algorithm a : all_algorithms()) {
    std::vector<const ResultRow*> mine;
    for (const auto& r : rows) {
      if (r.summary && r.algorithm == a) mine.push_back(&r);
    }
    if (mine.empty()) continue;
    std::stable_sort(mine.begin(), mine.end(), [&](const ResultRow* x, const ResultRow* y) {
      return axis_value(*x) < axis_value(*y);
    });
    std::filesystem::path path = out_prefix;
    path += std::string("_") + to_string(a) + ".dat";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "# " << axis_column(axis) << " mean_tdr stderr\n";
    for (const ResultRow* r : mine) {
      out << num(axis_value(*r)) << ' ' << num(r->tdr) << ' ' << num(r->tdr_se) << '\n';
    }
    written.push_back(path);
  }
  return written;
}

void write_instance_json(std::ostream& out, const Instance& inst) {
  using nlohmann::json;
  std::ostringstream params;
  write_params(params, inst.params);
  json j;
  json pj = json::object();
  {
    std::istringstream lines(params.str());
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      pj[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
  }
  j["params"] = pj;
  auto points = [](const std::vector<Point>& v) {
    json a = json::array();
    for (const auto& p : v) a.push_back({p.x, p.y});
    return a;
  };
  j["errh_positions"] = points(inst.channels.errh_positions);
  j["user_positions"] = points(inst.channels.user_positions);
  json h = json::array();
  json gain = json::array();
  for (std::size_t k = 0; k < inst.num_users(); ++k) {
    json hk = json::array();
    for (std::size_t i = 0; i < inst.num_errh(); ++i) {
      json v = json::array();
      for (Eigen::Index n = 0; n < inst.channels.h[k][i].size(); ++n) {
        v.push_back({inst.channels.h[k][i][n].real(), inst.channels.h[k][i][n].imag()});
      }
      hk.push_back(v);
    }
    h.push_back(hk);
    gain.push_back(inst.channels.gain[k]);
  }
  j["channels"] = h;
  j["pathloss"] = gain;
  json cache = json::array();
  for (const auto& row : inst.cache.c) cache.push_back(row);
  j["cache"] = cache;
  j["requests"] = inst.requests.file;
  j["served"] = inst.schedule.served;
  j["leakage"] = inst.schedule.leakage;
  out << j.dump(2) << '\n';
}

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace

VerifyReport run_verification(std::size_t bound_samples, std::size_t tiny_instances,
                              std::uint64_t seed) {
  VerifyReport rep;
  auto record = [&](bool ok, const std::string& what) {
    rep.lines.push_back(std::string(ok ? "PASS " : "FAIL ") + what);
    rep.passed = rep.passed && ok;
  };

  ScenarioParams p;
  p.seed = seed;
  const Instance inst = make_instance(p, 0);
  for (BoundKind b : {BoundKind::phi, BoundKind::psi, BoundKind::logdet}) {
    const BoundGapReport g = sample_bound_gaps(b, inst, bound_samples, seed);
    record(g.min_gap >= -1e-9 && g.tangency_gap <= 1e-9,
           std::string("bound ") + to_string(b) +
               fmt(": min gap %.3e, tangency gap %.3e", g.min_gap, g.tangency_gap));
  }

  ScenarioParams tiny;
  tiny.num_errh = 2;
  tiny.num_users = 2;
  tiny.antennas = 2;
  tiny.library_size = 2;
  tiny.cache_size = tiny.file_size;
  tiny.seed = seed;
  for (std::size_t r = 0; r < tiny_instances; ++r) {
    const Instance t = make_instance(tiny, r);
    const double sca = solve_cache_central(t).objective;
    const double grid = brute_force_cache(t).objective;
    record(sca >= 0.98 * grid - 1e-12,
           "tiny instance " + std::to_string(r) + fmt(": SCA %.6f, grid %.6f", sca, grid));
  }

  ScenarioParams single;
  single.num_errh = 1;
  single.num_users = 1;
  single.antennas = 1;
  single.library_size = 1;
  single.cache_size = single.file_size;
  single.schedule_limit = 1;
  single.seed = seed;
  const Instance s = make_instance(single, 0);
  const double closed = closed_form_single_user(s.channels.h[0][0], single.max_power,
                                                single.noise_power, single.file_size,
                                                single.delay);
  const double solved = solve_cache_central(s).objective;
  record(std::abs(solved - closed) <= 1e-3,
         fmt("single user: SCA %.6f, closed form %.6f", solved, closed));
  return rep;
}

}  // namespace fran
