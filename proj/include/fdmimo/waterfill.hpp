// SPDX-License-Identifier: Apache-2.0
//
// Water-filling power allocation over eigen-channels: individual budget per
// user, and a sum-power variant that pools several users' eigen-channels
// under one common water level.
#pragma once

#include <vector>

#include "fdmimo/numkernel.hpp"

namespace fdmimo {

struct WaterfillResult {
  double level = 0.0;
  // Eigen-domain powers, one vector per input block.
  std::vector<RealVector> alloc;

  // sum_i log2(1 + d_i p_i) for this allocation against `eigs` blocks.
  double objective(const std::vector<RealVector>& eigs) const;
};

// Maximizes sum_i log2(1 + eigs_i p_i) s.t. sum p_i = power, p >= 0.
// alloc_i = max(level - 1/eigs_i, 0) with the level found by bisection.
// Eigenvalues below 1e-12 are treated as zero; an all-zero input yields a
// zero allocation at level 0. Throws std::domain_error on negative power.
WaterfillResult waterfill_individual(const RealVector& eigs, double power);

// One common water level across the concatenation of all blocks; equals
// waterfill_individual on the concatenated eigenvalues, re-split per block.
WaterfillResult waterfill_sum(const std::vector<RealVector>& blocks,
                              double power);

}  // namespace fdmimo
