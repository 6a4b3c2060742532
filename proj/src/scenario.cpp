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

#include "fran/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>

namespace fran {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidParams(std::string("invalid scenario parameters: ") + what);
}

}  // namespace

void ScenarioParams::validate() const {
  require(num_errh >= 1, "k_r must be >= 1");
  require(antennas >= 1, "n_t must be >= 1");
  require(library_size >= 1, "f must be >= 1");
  require(schedule_limit >= 1, "n_s must be >= 1");
  require(schedule_limit <= antennas, "n_s must not exceed n_t");
  require(max_iterations >= 1, "max_iter must be >= 1");
  require(std::isfinite(file_size) && file_size > 0.0, "s must be > 0");
  require(std::isfinite(cache_size) && cache_size >= 0.0, "b must be >= 0");
  require(std::isfinite(fronthaul_capacity) && fronthaul_capacity >= 0.0, "c must be >= 0");
  require(std::isfinite(max_power) && max_power > 0.0, "p must be > 0");
  require(std::isfinite(noise_power) && noise_power > 0.0, "sigma2 must be > 0");
  require(std::isfinite(delay) && delay >= 0.0, "tau must be >= 0");
  require(std::isfinite(reference_distance) && reference_distance > 0.0, "d0 must be > 0");
  require(std::isfinite(pathloss_exponent) && pathloss_exponent > 0.0, "alpha must be > 0");
  require(std::isfinite(cell_radius) && cell_radius > 0.0, "radius must be > 0");
  require(std::isfinite(stop_threshold) && stop_threshold > 0.0, "eta must be > 0");
}

std::size_t ScenarioParams::files_per_cache() const {
  const double ratio = cache_size / file_size;
  return static_cast<std::size_t>(std::floor(ratio + 1e-9));
}

double ScenarioParams::power_db() const { return linear_to_db(max_power); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

ScenarioParams params_from_keys(const KeyValueFile& kv, bool reject_unknown) {
  ScenarioParams p;
  auto count = [&](const char* key, std::size_t fallback) {
    const long long v = kv.get_int(key, static_cast<long long>(fallback));
    if (v < 0) throw InvalidParams(std::string("key `") + key + "` must be non-negative");
    return static_cast<std::size_t>(v);
  };
  p.num_errh = count("k_r", p.num_errh);
  p.num_users = count("k_u", p.num_users);
  p.antennas = count("n_t", p.antennas);
  p.library_size = count("f", p.library_size);
  p.file_size = kv.get_double("s", p.file_size);
  p.cache_size = kv.get_double("b_over_s", ScenarioParams{}.cache_over_file()) * p.file_size;
  p.fronthaul_capacity = kv.get_double("c", p.fronthaul_capacity);
  p.max_power = db_to_linear(kv.get_double("p_db", linear_to_db(p.max_power)));
  p.noise_power = kv.get_double("sigma2", p.noise_power);
  p.delay = kv.get_double("tau", p.delay);
  p.reference_distance = kv.get_double("d0", p.reference_distance);
  p.pathloss_exponent = kv.get_double("alpha", p.pathloss_exponent);
  p.cell_radius = kv.get_double("radius", p.cell_radius);
  p.schedule_limit = count("n_s", p.schedule_limit);
  p.stop_threshold = kv.get_double("eta", p.stop_threshold);
  p.max_iterations = count("max_iter", p.max_iterations);
  p.seed = kv.get_uint64("seed", p.seed);
  if (reject_unknown) {
    if (const auto unused = kv.unused_keys(); !unused.empty()) {
      throw InvalidParams("unknown scenario key `" + unused.front() + "`");
    }
  }
  p.validate();
  return p;
}

ScenarioParams load_params(const std::filesystem::path& path) {
  return params_from_keys(KeyValueFile::load(path));
}

void write_params(std::ostream& out, const ScenarioParams& p) {
  const auto old_precision = out.precision(17);
  out << "k_r = " << p.num_errh << '\n'
      << "k_u = " << p.num_users << '\n'
      << "n_t = " << p.antennas << '\n'
      << "f = " << p.library_size << '\n'
      << "s = " << p.file_size << '\n'
      << "b_over_s = " << p.cache_over_file() << '\n'
      << "c = " << p.fronthaul_capacity << '\n'
      << "p_db = " << p.power_db() << '\n'
      << "sigma2 = " << p.noise_power << '\n'
      << "tau = " << p.delay << '\n'
      << "d0 = " << p.reference_distance << '\n'
      << "alpha = " << p.pathloss_exponent << '\n'
      << "radius = " << p.cell_radius << '\n'
      << "n_s = " << p.schedule_limit << '\n'
      << "eta = " << p.stop_threshold << '\n'
      << "max_iter = " << p.max_iterations << '\n'
      << "seed = " << p.seed << '\n';
  out.precision(old_precision);
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double pathloss(double d, double reference_distance, double exponent) {
  return 1.0 / (1.0 + std::pow(d / reference_distance, exponent));
}

cvec ChannelSet::stacked(std::size_t k) const {
  Eigen::Index total = 0;
  for (const auto& hk : h[k]) total += hk.size();
  cvec out(total);
  Eigen::Index offset = 0;
  for (const auto& hk : h[k]) {
    out.segment(offset, hk.size()) = hk;
    offset += hk.size();
  }
  return out;
}

std::optional<std::size_t> CacheState::holder(std::size_t file) const {
  for (std::size_t i = 0; i < c[file].size(); ++i) {
    if (c[file][i]) return i;
  }
  return std::nullopt;
}

std::size_t CacheState::files_at(std::size_t errh) const {
  std::size_t n = 0;
  for (const auto& row : c) n += row[errh] ? 1 : 0;
  return n;
}

std::optional<std::size_t> Schedule::serving_errh(std::size_t user) const {
  for (std::size_t i = 0; i < served.size(); ++i) {
    if (std::find(served[i].begin(), served[i].end(), user) != served[i].end()) return i;
  }
  return std::nullopt;
}

bool Schedule::is_served(std::size_t user, std::size_t errh) const {
  const auto& s = served[errh];
  return std::find(s.begin(), s.end(), user) != s.end();
}

std::size_t Schedule::total_served() const {
  std::size_t n = 0;
  for (const auto& s : served) n += s.size();
  return n;
}

namespace {

Point uniform_in_disc(double radius, RngStream& rng) {
  const double r = radius * std::sqrt(rng.uniform());
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

ChannelSet channels_for_positions(const ScenarioParams& params, std::vector<Point> errh,
                                  std::vector<Point> users, RngStream& fading) {
  ChannelSet ch;
  ch.errh_positions = std::move(errh);
  ch.user_positions = std::move(users);
  const std::size_t nu = ch.user_positions.size();
  const std::size_t nr = ch.errh_positions.size();
  ch.h.assign(nu, std::vector<cvec>(nr));
  ch.gain.assign(nu, std::vector<double>(nr, 0.0));
  for (std::size_t k = 0; k < nu; ++k) {
    for (std::size_t i = 0; i < nr; ++i) {
      const double rho = pathloss(distance(ch.user_positions[k], ch.errh_positions[i]),
                                  params.reference_distance, params.pathloss_exponent);
      ch.gain[k][i] = rho;
      ch.h[k][i] =
          std::sqrt(rho) * fading.complex_normal_vector(static_cast<Eigen::Index>(params.antennas));
    }
  }
  return ch;
}

ChannelSet generate_topology(const ScenarioParams& params, RngStream& geometry,
                             RngStream& fading) {
  std::vector<Point> errh(params.num_errh);
  std::vector<Point> users(params.num_users);
  for (auto& p : errh) p = uniform_in_disc(params.cell_radius, geometry);
  for (auto& p : users) p = uniform_in_disc(params.cell_radius, geometry);
  return channels_for_positions(params, std::move(errh), std::move(users), fading);
}

CacheState place_caches(const ScenarioParams& params, RngStream& stream) {
  const std::size_t per_cache = std::min(params.files_per_cache(), params.library_size);
  if (params.files_per_cache() * params.num_errh > params.library_size) {
    throw InfeasiblePlacement("cannot place " + std::to_string(params.files_per_cache()) +
                              " distinct files at each of " + std::to_string(params.num_errh) +
                              " eRRHs from a library of " + std::to_string(params.library_size));
  }
  CacheState cache;
  cache.c.assign(params.library_size, std::vector<std::uint8_t>(params.num_errh, 0));
  // Uniform random permutation; eRRH i takes the i-th block of the prefix.
  std::vector<std::size_t> order(params.library_size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t j = order.size(); j > 1; --j) {
    std::swap(order[j - 1], order[stream.below(j)]);
  }
  for (std::size_t i = 0; i < params.num_errh; ++i) {
    for (std::size_t j = 0; j < per_cache; ++j) cache.c[order[i * per_cache + j]][i] = 1;
  }
  return cache;
}

RequestProfile draw_requests(const ScenarioParams& params, RngStream& stream) {
  RequestProfile req;
  req.file.resize(params.num_users);
  for (auto& f : req.file) f = stream.below(params.library_size);
  return req;
}

Schedule schedule_users(const ChannelSet& channels, const CacheState& cache,
                        const RequestProfile& requests, const ScenarioParams& params) {
  const std::size_t nu = requests.file.size();
  const std::size_t nr = params.num_errh;
  Schedule s;
  s.served.assign(nr, {});
  s.leakage.assign(nr, {});
  for (std::size_t i = 0; i < nr; ++i) {
    // Gated norms c[f_k][i] * ||h_{k,i}||.
    std::vector<double> gated(nu);
    for (std::size_t k = 0; k < nu; ++k) {
      gated[k] = cache.cached(requests.file[k], i) ? channels.h[k][i].norm() : 0.0;
    }
    for (std::size_t k = 0; k < nu; ++k) {
      if (!cache.cached(requests.file[k], i)) continue;
      std::size_t stronger = 0;
      for (std::size_t kp = 0; kp < nu; ++kp) stronger += gated[kp] > gated[k] ? 1 : 0;
      if (stronger < params.schedule_limit) s.served[i].push_back(k);
    }
  }
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t k = 0; k < nu; ++k) {
      if (s.is_served(k, i)) continue;
      bool elsewhere = false;
      for (std::size_t j = 0; j < nr && !elsewhere; ++j) {
        elsewhere = j != i && cache.cached(requests.file[k], j);
      }
      if (elsewhere) s.leakage[i].push_back(k);
    }
  }
  return s;
}

Instance assemble_instance(const ScenarioParams& params, ChannelSet channels, CacheState cache,
                           RequestProfile requests) {
  Instance inst;
  inst.params = params;
  inst.channels = std::move(channels);
  inst.cache = std::move(cache);
  inst.requests = std::move(requests);
  inst.schedule = schedule_users(inst.channels, inst.cache, inst.requests, inst.params);
  return inst;
}

Instance make_instance(const ScenarioParams& params, std::uint64_t realization) {
  params.validate();
  RngStream geometry(params.seed, realization, StreamTag::geometry);
  RngStream fading(params.seed, realization, StreamTag::fading);
  RngStream cache_rng(params.seed, realization, StreamTag::cache);
  RngStream request_rng(params.seed, realization, StreamTag::requests);
  auto channels = generate_topology(params, geometry, fading);
  auto cache = place_caches(params, cache_rng);
  auto requests = draw_requests(params, request_rng);
  return assemble_instance(params, std::move(channels), std::move(cache), std::move(requests));
}

}  // namespace fran
