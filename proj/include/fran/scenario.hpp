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
#include <vector>

#include "fran/common.hpp"
#include "fran/config.hpp"
#include "fran/rng.hpp"

namespace fran {

// Scalar system parameters of one cache-enabled fog RAN instance.
// Defaults are the desk-scale reference setting (3 eRRHs, 5 users,
// 4 antennas, 10 files, caches of 3 files, P = 20 dB).
struct ScenarioParams {
  std::size_t num_errh = 3;          // K_R
  std::size_t num_users = 5;         // K_U
  std::size_t antennas = 4;          // N_t, same at every eRRH
  std::size_t library_size = 10;     // F
  double file_size = 10.0;           // S, bits/symbol
  double cache_size = 30.0;          // B, same unit as S
  double fronthaul_capacity = 5.0;   // C, bits/symbol
  double max_power = 100.0;          // P, linear
  double noise_power = 1.0;          // sigma^2
  // Cache-level phase length as a fraction of the transmission interval.
  double delay = 0.1;
  double reference_distance = 50.0;  // d0, meters
  double pathloss_exponent = 3.0;    // alpha
  double cell_radius = 500.0;        // meters
  std::size_t schedule_limit = 2;    // N_s
  double stop_threshold = 1e-3;      // eta, absolute objective change
  std::size_t max_iterations = 50;
  std::uint64_t seed = 1;

  // Throws InvalidParams on the first violated invariant.
  void validate() const;

  // floor(B/S); tolerant to B being a float multiple of S.
  std::size_t files_per_cache() const;
  std::size_t total_antennas() const { return num_errh * antennas; }
  double power_db() const;
  double cache_over_file() const { return cache_size / file_size; }
};

double db_to_linear(double db);
double linear_to_db(double linear);

// Reads the config keys k_r, k_u, n_t, f, s, b_over_s, c, p_db, sigma2,
// tau, d0, alpha, radius, n_s, eta, max_iter, seed. Missing keys keep
// their defaults; unknown keys are rejected.
ScenarioParams params_from_keys(const KeyValueFile& kv, bool reject_unknown = true);
ScenarioParams load_params(const std::filesystem::path& path);
void write_params(std::ostream& out, const ScenarioParams& p);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

// 1 / (1 + (d/d0)^alpha)
double pathloss(double distance, double reference_distance, double exponent);

struct ChannelSet {
  std::vector<Point> errh_positions;
  std::vector<Point> user_positions;
  // h[k][i]: channel from eRRH i to user k, length N_t.
  std::vector<std::vector<cvec>> h;
  std::vector<std::vector<double>> gain;  // pathloss rho[k][i]

  std::size_t num_users() const { return h.size(); }
  std::size_t num_errh() const { return errh_positions.size(); }
  const cvec& channel(std::size_t k, std::size_t i) const { return h[k][i]; }
  // [h_{k,1}; ...; h_{k,K_R}]
  cvec stacked(std::size_t k) const;
};

// c[f][i] = 1 iff file f is cached at eRRH i.
struct CacheState {
  std::vector<std::vector<std::uint8_t>> c;

  std::size_t num_files() const { return c.size(); }
  bool cached(std::size_t file, std::size_t errh) const { return c[file][errh] != 0; }
  std::optional<std::size_t> holder(std::size_t file) const;
  std::size_t files_at(std::size_t errh) const;
};

// Requested file index per user, 0-based.
struct RequestProfile {
  std::vector<std::size_t> file;
};

struct Schedule {
  std::vector<std::vector<std::size_t>> served;   // K_i
  std::vector<std::vector<std::size_t>> leakage;  // K~_i

  std::optional<std::size_t> serving_errh(std::size_t user) const;
  bool is_served(std::size_t user, std::size_t errh) const;
  std::size_t total_served() const;
};

ChannelSet generate_topology(const ScenarioParams& params, RngStream& geometry, RngStream& fading);
// Builds the channel set for explicit positions (fading drawn from the stream).
ChannelSet channels_for_positions(const ScenarioParams& params, std::vector<Point> errh,
                                  std::vector<Point> users, RngStream& fading);

CacheState place_caches(const ScenarioParams& params, RngStream& stream);
RequestProfile draw_requests(const ScenarioParams& params, RngStream& stream);
Schedule schedule_users(const ChannelSet& channels, const CacheState& cache,
                        const RequestProfile& requests, const ScenarioParams& params);

// Everything the optimizers need for one channel realization.
struct Instance {
  ScenarioParams params;
  ChannelSet channels;
  CacheState cache;
  RequestProfile requests;
  Schedule schedule;

  std::size_t num_users() const { return params.num_users; }
  std::size_t num_errh() const { return params.num_errh; }
  // c[f_k][i]
  bool user_cached_at(std::size_t user, std::size_t errh) const {
    return cache.cached(requests.file[user], errh);
  }
};

// Draws a complete instance from params.seed; `realization` selects an
// independent draw under the same seed.
Instance make_instance(const ScenarioParams& params, std::uint64_t realization = 0);

// Reassembles an instance from explicit parts and recomputes the schedule.
Instance assemble_instance(const ScenarioParams& params, ChannelSet channels, CacheState cache,
                           RequestProfile requests);

}  // namespace fran
