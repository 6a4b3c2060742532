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

#include <doctest.h>

#include <numeric>
#include <set>
#include <sstream>

#include "../support.hpp"
#include "fran/scenario.hpp"

using namespace fran;
using fran::testing::build_instance;
using fran::testing::vec;

TEST_CASE("pathloss") {
  CHECK(pathloss(50.0, 50.0, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pathloss(0.0, 50.0, 3.0) == 1.0);
  CHECK(pathloss(100.0, 50.0, 3.0) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("topology") {
  ScenarioParams p;
  RngStream geo(7, 0, StreamTag::geometry);
  RngStream fad(7, 0, StreamTag::fading);
  const ChannelSet ch = generate_topology(p, geo, fad);
  REQUIRE(ch.num_users() == p.num_users);
  REQUIRE(ch.num_errh() == p.num_errh);
  for (std::size_t k = 0; k < p.num_users; ++k) {
    CHECK(std::hypot(ch.user_positions[k].x, ch.user_positions[k].y) <= p.cell_radius);
    for (std::size_t i = 0; i < p.num_errh; ++i) {
      CHECK(ch.h[k][i].size() == static_cast<Eigen::Index>(p.antennas));
      const double d = distance(ch.user_positions[k], ch.errh_positions[i]);
      CHECK(ch.gain[k][i] == pathloss(d, p.reference_distance, p.pathloss_exponent));
    }
  }
  CHECK(ch.stacked(2).size() == static_cast<Eigen::Index>(p.total_antennas()));
}

TEST_CASE("small-scale fading has unit variance") {
  ScenarioParams p;
  p.num_errh = 1;
  p.num_users = 2500;
  RngStream geo(3, 0, StreamTag::geometry);
  RngStream fad(3, 0, StreamTag::fading);
  const ChannelSet ch = generate_topology(p, geo, fad);
  double sum = 0.0;
  for (std::size_t k = 0; k < p.num_users; ++k) {
    sum += ch.h[k][0].squaredNorm() / ch.gain[k][0] / static_cast<double>(p.antennas);
  }
  CHECK(sum / static_cast<double>(p.num_users) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("cache placement") {
  ScenarioParams p;
  RngStream rng(11, 0, StreamTag::cache);

  SUBCASE("empty cache") {
    p.cache_size = 0.0;
    const CacheState c = place_caches(p, rng);
    for (std::size_t f = 0; f < p.library_size; ++f) {
      for (std::size_t i = 0; i < p.num_errh; ++i) CHECK_FALSE(c.cached(f, i));
    }
  }
  SUBCASE("three files per eRRH") {
    p.cache_size = 3.0 * p.file_size;
    const CacheState c = place_caches(p, rng);
    std::size_t total = 0;
    for (std::size_t i = 0; i < p.num_errh; ++i) CHECK(c.files_at(i) == 3);
    for (std::size_t f = 0; f < p.library_size; ++f) {
      std::size_t row = 0;
      for (std::size_t i = 0; i < p.num_errh; ++i) row += c.cached(f, i) ? 1 : 0;
      CHECK(row <= 1);
      total += row;
    }
    CHECK(total == 9);
  }
  SUBCASE("too many files") {
    p.cache_size = 4.0 * p.file_size;
    CHECK_THROWS_AS(place_caches(p, rng), InfeasiblePlacement);
  }
}

TEST_CASE("placement is uniform over files") {
  ScenarioParams p;
  p.cache_size = p.file_size;  // one file per eRRH, 3 of 10 files cached
  std::vector<int> hits(p.library_size, 0);
  const int n = 20000;
  for (int r = 0; r < n; ++r) {
    RngStream rng(5, static_cast<std::uint64_t>(r), StreamTag::cache);
    const CacheState c = place_caches(p, rng);
    for (std::size_t f = 0; f < p.library_size; ++f) hits[f] += c.holder(f) ? 1 : 0;
  }
  for (int h : hits) CHECK(h / static_cast<double>(n) == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("requests") {
  ScenarioParams p;
  RngStream rng(2, 0, StreamTag::requests);
  SUBCASE("single file") {
    p.library_size = 1;
    p.cache_size = 0.0;
    for (std::size_t f : draw_requests(p, rng).file) CHECK(f == 0);
  }
  SUBCASE("no users") {
    p.num_users = 0;
    CHECK(draw_requests(p, rng).file.empty());
  }
  SUBCASE("uniform popularity") {
    p.num_users = 100000;
    std::vector<int> count(p.library_size, 0);
    for (std::size_t f : draw_requests(p, rng).file) ++count.at(f);
    for (int c : count) CHECK(c / 1e5 == doctest::Approx(0.1).epsilon(0.1));
  }
}

TEST_CASE("schedule rule") {
  ScenarioParams p;
  p.schedule_limit = 2;
  p.antennas = 2;
  // One eRRH holding file 0; users with channel norms 3, 2, 1.
  const testing::Channels norms321 = {{vec({3.0, 0.0})}, {vec({0.0, 2.0})}, {vec({1.0, 0.0})}};

  SUBCASE("strongest N_s users") {
    const Instance inst = build_instance(p, norms321, {0}, {0, 0, 0});
    CHECK(inst.schedule.served[0] == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("ties are admitted") {
    p.schedule_limit = 1;
    const testing::Channels ties = {{vec({2.0, 0.0})}, {vec({0.0, 2.0})}, {vec({1.0, 0.0})}};
    const Instance inst = build_instance(p, ties, {0}, {0, 0, 0});
    CHECK(inst.schedule.served[0] == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("uncached users are never served") {
    const Instance inst = build_instance(p, norms321, {0, -1}, {1, 0, 1});
    CHECK(inst.schedule.served[0] == std::vector<std::size_t>{1});
    CHECK(inst.schedule.total_served() == 1);
  }
  SUBCASE("leakage set") {
    // Two eRRHs; file 0 at eRRH 0, file 1 at eRRH 1, file 2 nowhere.
    const testing::Channels h = {{vec({1.0, 0.0}), vec({1.0, 0.0})},
                                 {vec({1.0, 0.0}), vec({1.0, 0.0})},
                                 {vec({1.0, 0.0}), vec({1.0, 0.0})}};
    const Instance inst = build_instance(p, h, {0, 1, -1}, {0, 1, 2});
    CHECK(inst.schedule.served[0] == std::vector<std::size_t>{0});
    CHECK(inst.schedule.served[1] == std::vector<std::size_t>{1});
    CHECK(inst.schedule.leakage[0] == std::vector<std::size_t>{1});
    CHECK(inst.schedule.leakage[1] == std::vector<std::size_t>{0});
    CHECK_FALSE(inst.schedule.serving_errh(2).has_value());
  }
}

TEST_CASE("instance invariants over many seeds") {
  ScenarioParams p;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    p.seed = seed;
    const Instance inst = make_instance(p);
    std::set<std::size_t> seen;
    for (std::size_t f = 0; f < p.library_size; ++f) {
      std::size_t row = 0;
      for (std::size_t i = 0; i < p.num_errh; ++i) row += inst.cache.cached(f, i);
      REQUIRE(row <= 1);
    }
    for (std::size_t i = 0; i < p.num_errh; ++i) {
      for (std::size_t k : inst.schedule.served[i]) {
        CHECK(inst.user_cached_at(k, i));
        CHECK(seen.insert(k).second);  // disjoint
      }
      for (std::size_t k : inst.schedule.leakage[i]) {
        CHECK_FALSE(inst.schedule.is_served(k, i));
        std::size_t holders = 0;
        for (std::size_t j = 0; j < p.num_errh; ++j) holders += (j != i && inst.user_cached_at(k, j));
        CHECK(holders == 1);
      }
    }
  }
}

TEST_CASE("determinism") {
  ScenarioParams p;
  p.seed = 99;
  const Instance a = make_instance(p, 3);
  const Instance b = make_instance(p, 3);
  const Instance c = make_instance(p, 4);
  bool same = true;
  bool differs = false;
  for (std::size_t k = 0; k < p.num_users; ++k) {
    for (std::size_t i = 0; i < p.num_errh; ++i) {
      same = same && a.channels.h[k][i] == b.channels.h[k][i];
      differs = differs || a.channels.h[k][i] != c.channels.h[k][i];
    }
  }
  CHECK(same);
  CHECK(differs);
  CHECK(a.cache.c == b.cache.c);
  CHECK(a.requests.file == b.requests.file);
}

TEST_CASE("rng streams are independent of creation order") {
  RngStream a(1, 2, StreamTag::fading);
  const double first = a.uniform();
  RngStream other(1, 2, StreamTag::geometry);
  other.uniform();
  RngStream b(1, 2, StreamTag::fading);
  CHECK(b.uniform() == first);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  for (int n = 0; n < 1000; ++n) CHECK(a.below(7) < 7);
}

TEST_CASE("config keys") {
  std::istringstream in(
      "# reference setting\n"
      "k_r = 2\nk_u = 4\nn_t = 2\nf = 8\ns = 5\nb_over_s = 2\nc = 3.5\np_db = 10\n"
      "sigma2 = 0.5\ntau = 0.2\nd0 = 40\nalpha = 3.5\nradius = 300\nn_s = 1\neta = 1e-4\n"
      "max_iter = 30\nseed = 12345\n");
  const ScenarioParams p = params_from_keys(KeyValueFile::parse(in));
  CHECK(p.num_errh == 2);
  CHECK(p.num_users == 4);
  CHECK(p.cache_size == doctest::Approx(10.0));
  CHECK(p.max_power == doctest::Approx(10.0));
  CHECK(p.power_db() == doctest::Approx(10.0));
  CHECK(p.seed == 12345u);
  CHECK(p.max_iterations == 30);

  std::ostringstream out;
  write_params(out, p);
  std::istringstream back(out.str());
  const ScenarioParams q = params_from_keys(KeyValueFile::parse(back));
  CHECK(q.fronthaul_capacity == p.fronthaul_capacity);
  CHECK(q.max_power == doctest::Approx(p.max_power).epsilon(1e-12));
  CHECK(q.seed == p.seed);

  std::istringstream typo("k_rr = 2\n");
  CHECK_THROWS_AS(params_from_keys(KeyValueFile::parse(typo)), InvalidParams);
  std::istringstream bad("n_s = 5\n");
  CHECK_THROWS_AS(params_from_keys(KeyValueFile::parse(bad)), InvalidParams);
  std::istringstream dup("c = 1\nc = 2\n");
  CHECK_THROWS(KeyValueFile::parse(dup));
}

TEST_CASE("parameter validation") {
  ScenarioParams p;
  CHECK_NOTHROW(p.validate());
  p.noise_power = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  p = {};
  p.stop_threshold = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  p = {};
  p.num_users = 0;
  CHECK_NOTHROW(p.validate());
}
