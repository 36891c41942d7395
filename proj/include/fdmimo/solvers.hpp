// SPDX-License-Identifier: Apache-2.0
//
// The two sum-rate maximization algorithms and the half-duplex baseline.
//
// Both algorithms work on the dual-domain objective
//   f(Q_U, Q_DU) = R_U + R_DU
//     R_U  = log2|I + sum_j Gbar_j Q_DU_j Gbar_j^H + sum_i H_U_i Q_U_i H_U_i^H|
//            - log2|I + sum_j Gbar_j Q_DU_j Gbar_j^H|
//     R_DU = log2|I + sum_j Hbar_j^H Q_DU_j Hbar_j|
// which is an explicit difference of concave functions once the effective
// self-interference channels Gbar are frozen.
//
// The minorize-maximize solver replaces the subtracted concave term by its
// tangent plane at the current iterate and maximizes the resulting concave
// surrogate with a conditional-gradient (Frank-Wolfe) method whose linear
// oracle is closed-form on the trace-constrained PSD feasible set.
//
// The alternating water-filling solver sweeps uplink users with per-user
// water-filling (Gauss-Seidel) and updates all dual downlink covariances
// jointly (Jacobi) with grouped sum-power water-filling plus an averaging
// step that guarantees a non-decreasing objective.
#pragma once

#include <cstdint>
#include <vector>

#include "fdmimo/channel.hpp"
#include "fdmimo/duality.hpp"
#include "fdmimo/numkernel.hpp"
#include "fdmimo/ratemodel.hpp"

namespace fdmimo {

// Whether whitening and the duality factors track the evolving covariances
// (recomputed at the top of every outer iteration) or stay frozen at their
// initialization values. Per-iteration refresh is the default; frozen mode
// exists to make the modeling difference measurable.
enum class RefreshMode { kPerIteration, kFrozen };

enum class InitMode { kUniform, kZero, kRandom };

struct SolverConfig {
  double outer_tol = 1e-6;      // relative objective change
  int max_outer_iters = 50;     // outer evaluations, counting initialization
  double inner_fw_gap_tol = 1e-5;
  int inner_fw_max_iters = 500;
  RefreshMode refresh_mode = RefreshMode::kPerIteration;
  InitMode init_mode = InitMode::kUniform;
  std::uint64_t init_seed = 0;  // used by InitMode::kRandom only

  // Throws config_error unless tolerances > 0 and caps >= 1.
  void validate() const;
};

// Linear power budgets in mW, one per uplink user plus the BS total.
struct PowerBudgets {
  std::vector<double> uplink_mw;
  double bs_mw = 0.0;
};
PowerBudgets power_budgets(const ScenarioConfig& cfg);

enum class StopReason { kConverged, kIterationCap };

struct TracePoint {
  int iteration = 0;   // 0 is the initialization
  double r_u = 0.0;
  double r_du = 0.0;
  double objective = 0.0;  // r_u + r_du, the quantity the solver iterates on
  int inner_iters = 0;     // conditional-gradient steps (MM only)
  double wall_ms = 0.0;    // elapsed since solver start
};

struct ConvergenceTrace {
  std::vector<TracePoint> points;
  StopReason reason = StopReason::kIterationCap;
};

struct SolverResult {
  CovarianceSet cov;  // q_u, q_du and transformed q_d all populated
  ConvergenceTrace trace;
  double r_u = 0.0;
  double r_du = 0.0;
  double f = 0.0;
};

// Initialization shared by both solvers: uniform spreads each budget evenly
// across antennas (and dual users), zero starts from no transmission, random
// draws a PSD matrix of full budget trace from init_seed.
CovarianceSet initial_covariances(const ChannelSet& ch,
                                  const PowerBudgets& budgets,
                                  const SolverConfig& cfg);

// Whiten + transform + evaluate in one step: the composite objective of a
// (q_u, q_du) pair together with everything derived from it.
struct EvaluatedState {
  CovarianceSet cov;
  EffectiveDownlink eff;
  DualityFactors factors;
  double r_u = 0.0;
  double r_du = 0.0;
  double f = 0.0;
};
EvaluatedState evaluate_covariances(const ChannelSet& ch,
                                    std::vector<Matrix> q_u,
                                    std::vector<Matrix> q_du);

// Gradient of log2|I + sum_m A_m Q_m A_m^H| with respect to Q_target:
// (1/ln 2) A_t^H (I + sum_m A_m Q_m A_m^H)^{-1} A_t, Hermitian.
Matrix logdet_gradient(const std::vector<Matrix>& channels,
                       const std::vector<Matrix>& covs, std::size_t target);

// Tangent plane of h(Q_DU) = log2|I + sum_j Gbar_j Q_DU_j Gbar_j^H| at an
// anchor point; h is concave, so the plane majorizes it everywhere and
// touches it at the anchor.
struct LinearizedH {
  double value_at_anchor = 0.0;
  std::vector<Matrix> gradients;
  std::vector<Matrix> anchor;

  double evaluate(const std::vector<Matrix>& q_du) const;
};
LinearizedH mm_linearize_h(const std::vector<Matrix>& gbar,
                           const std::vector<Matrix>& q_du_anchor);

// h itself, for tests and the surrogate-vs-true comparisons.
double si_logdet(const std::vector<Matrix>& gbar,
                 const std::vector<Matrix>& q_du);

struct FwResult {
  std::vector<Matrix> q_u;
  std::vector<Matrix> q_du;
  int iterations = 0;
  double gap = 0.0;
  bool converged = false;
};

// Maximizes the concave surrogate g - lin over the feasible covariances by
// conditional gradient, warm-started at (q_u_start, q_du_start). The linear
// oracle returns rank-1 atoms: per uplink user i, P_i v v^H for the top
// gradient eigenvector when its eigenvalue is positive (else zero); for the
// dual group, P_D v v^H placed entirely in the user with the largest positive
// top eigenvalue (lowest index on ties). Steps use backtracking line search
// from 2/(t+2); stops when the duality gap <= tol (1 + |objective|).
FwResult mm_subproblem(const ChannelSet& ch, const EffectiveDownlink& eff,
                       const std::vector<Matrix>& gbar, const LinearizedH& lin,
                       const PowerBudgets& budgets, const SolverConfig& cfg,
                       const std::vector<Matrix>& q_u_start,
                       const std::vector<Matrix>& q_du_start);

SolverResult mm_run(const ChannelSet& ch, const PowerBudgets& budgets,
                    const SolverConfig& cfg);

// One uplink water-filling update: user i's covariance against the current
// interference (already-updated users k < i, not-yet-updated users k > i,
// and the self-interference of cov.q_d).
Matrix aiwf_uplink_update(const ChannelSet& ch, const CovarianceSet& cov,
                          std::size_t i, double power_mw);

// Joint downlink update: per-user whitened effective channels computed
// against q_du (Jacobi), grouped sum-power water-filling under p_d_mw, then
// the averaging step new = (1/K_D) filled + ((K_D-1)/K_D) previous.
std::vector<Matrix> aiwf_dual_update(const EffectiveDownlink& eff,
                                     const std::vector<Matrix>& q_du,
                                     double p_d_mw);

SolverResult aiwf_run(const ChannelSet& ch, const PowerBudgets& budgets,
                      const SolverConfig& cfg);

// Half-duplex reference: uplink-only water-filling (no self-interference)
// and downlink-only dual water-filling (no cross interference), each rate
// halved for the 50/50 time split.
struct HdResult {
  double sum_rate = 0.0;  // (r_mac + r_bc) / 2
  double r_mac = 0.0;
  double r_bc = 0.0;
  ConvergenceTrace trace;
};
HdResult hd_baseline(const ChannelSet& ch, const PowerBudgets& budgets,
                     const SolverConfig& cfg);

}  // namespace fdmimo
