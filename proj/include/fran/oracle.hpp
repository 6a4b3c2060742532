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
#include <vector>

#include "fran/metrics.hpp"
#include "fran/scenario.hpp"

namespace fran {

// Grid over complex beamformer coefficients. Magnitudes are
// sqrt(P) * l / magnitude_levels for l = 1..magnitude_levels (plus 0),
// phases are 2 pi q / phase_levels. The first coefficient of every
// beamformer has phase 0.
struct GridSpec {
  std::size_t magnitude_levels = 8;
  std::size_t phase_levels = 16;
  // true: an eRRH whose grid point exceeds P is scaled back onto the power
  // sphere; false: such points are skipped.
  bool project = true;

  static constexpr double kMaxPoints = 1e7;
};

struct BruteForceResult {
  double objective = 0.0;
  Beamformers g;           // [user][errh], zero outside the schedule
  double points = 0.0;     // grid points evaluated
};

// Exhaustive search of the cache-level problem on tiny instances
// (<= 2 eRRHs, <= 2 antennas, <= 2 users). Objective is
// sum_k min(log2(1 + SINR_k), S / tau) over served users. Throws
// InvalidParams on oversized instances or grids. Ties go to the lowest
// grid index, so the result does not depend on the thread count.
BruteForceResult brute_force_cache(const Instance& inst, const GridSpec& grid = {});

// Number of grid points brute_force_cache would visit.
double grid_points(const Instance& inst, const GridSpec& grid);

enum class BoundKind { phi, psi, logdet };

const char* to_string(BoundKind k);

struct BoundGapReport {
  double min_gap = 0.0;       // over all samples, expansion point included
  double tangency_gap = 0.0;  // |true - bound| at the expansion point
  std::size_t samples = 0;
};

// Random expansion points and samples built from the instance channels.
// phi / psi: gap = true ratio - lower bound; logdet: gap = upper bound -
// log2 det. Draws come from the oracle stream of (seed, realization).
BoundGapReport sample_bound_gaps(BoundKind bound, const Instance& inst, std::size_t n_samples,
                                 std::uint64_t seed = 0);

// min(log2(1 + P |h|^2 / sigma^2), S / tau). Throws DomainError unless
// |h| > 0 and tau > 0.
double closed_form_single_user(const cvec& h, double max_power, double noise_power,
                               double file_size, double delay);

}  // namespace fran
