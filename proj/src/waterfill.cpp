// SPDX-License-Identifier: Apache-2.0

#include "fdmimo/waterfill.hpp"

#include <cmath>
#include <stdexcept>

namespace fdmimo {

namespace {

constexpr double kEigZero = 1e-12;

double total_alloc(const RealVector& eigs, double level) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs[i] > kEigZero) sum += std::max(level - 1.0 / eigs[i], 0.0);
  }
  return sum;
}

}  // namespace

double WaterfillResult::objective(const std::vector<RealVector>& eigs) const {
  double sum = 0.0;
  for (std::size_t b = 0; b < alloc.size(); ++b) {
    for (Eigen::Index i = 0; i < alloc[b].size(); ++i) {
      sum += std::log2(1.0 + eigs[b][i] * alloc[b][i]);
    }
  }
  return sum;
}

WaterfillResult waterfill_individual(const RealVector& eigs, double power) {
  if (power < 0.0) {
    throw std::domain_error("waterfill: negative power budget");
  }
  WaterfillResult out;
  out.alloc.push_back(RealVector::Zero(eigs.size()));

  double lo = 0.0, hi = 0.0;
  bool any_active = false;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs[i] > kEigZero) {
      double inv = 1.0 / eigs[i];
      lo = any_active ? std::min(lo, inv) : inv;
      hi = std::max(hi, inv);
      any_active = true;
    }
  }
  if (!any_active || power == 0.0) {
    out.level = any_active ? lo : 0.0;
    return out;
  }

  // total_alloc is continuous non-decreasing in the level, 0 at lo and
  // >= power at hi + power; bisect until the budget residual is negligible.
  hi += power;
  const double tol = 1e-10 * std::max(power, 1.0);
  double level = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    level = 0.5 * (lo + hi);
    double used = total_alloc(eigs, level);
    if (std::abs(used - power) < tol) break;
    if (used < power) {
      lo = level;
    } else {
      hi = level;
    }
  }

  out.level = level;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs[i] > kEigZero) {
      out.alloc[0][i] = std::max(level - 1.0 / eigs[i], 0.0);
    }
  }
  return out;
}

WaterfillResult waterfill_sum(const std::vector<RealVector>& blocks,
                              double power) {
  Eigen::Index total = 0;
  for (const RealVector& b : blocks) total += b.size();
  RealVector merged(total);
  Eigen::Index at = 0;
  for (const RealVector& b : blocks) {
    merged.segment(at, b.size()) = b;
    at += b.size();
  }

  WaterfillResult flat = waterfill_individual(merged, power);

  WaterfillResult out;
  out.level = flat.level;
  at = 0;
  for (const RealVector& b : blocks) {
    out.alloc.push_back(flat.alloc[0].segment(at, b.size()));
    at += b.size();
  }
  return out;
}

}  // namespace fdmimo
