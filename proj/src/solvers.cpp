// SPDX-License-Identifier: Apache-2.0

#include "fdmimo/solvers.hpp"

#include <chrono>
#include <cmath>
#include <utility>

#include "fdmimo/waterfill.hpp"

namespace fdmimo {

namespace {

constexpr double kLog2e = 1.4426950408889634;  // 1 / ln 2

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Re tr(a b); real for Hermitian a, b.
double real_inner(const Matrix& a, const Matrix& b) {
  return (a * b).trace().real();
}

double rel_change(double prev, double next) {
  return std::abs(next - prev) / std::max(1.0, std::abs(next));
}

Eigen::Index user_antenna_count(const ChannelSet& ch) {
  if (!ch.h_u.empty()) return ch.h_u[0].cols();
  if (!ch.h_d.empty()) return ch.h_d[0].rows();
  throw numeric_error("channel set has no users");
}

// I_M + sum_j gbar_j q_du_j gbar_j^H + sum_i h_u_i q_u_i h_u_i^H, the
// BS-side received covariance of the DC objective's first concave term.
Matrix bs_side_matrix(const ChannelSet& ch, const std::vector<Matrix>& gbar,
                      const std::vector<Matrix>& q_u,
                      const std::vector<Matrix>& q_du) {
  const Eigen::Index m = ch.g_d.rows();
  Matrix x = Matrix::Identity(m, m);
  for (std::size_t j = 0; j < q_du.size(); ++j) {
    x += gbar[j] * q_du[j] * gbar[j].adjoint();
  }
  for (std::size_t i = 0; i < q_u.size(); ++i) {
    x += ch.h_u[i] * q_u[i] * ch.h_u[i].adjoint();
  }
  return x;
}

Matrix dual_side_matrix(const EffectiveDownlink& eff,
                        const std::vector<Matrix>& q_du, Eigen::Index m) {
  Matrix x = Matrix::Identity(m, m);
  for (std::size_t j = 0; j < q_du.size(); ++j) {
    x += eff.hbar[j].adjoint() * q_du[j] * eff.hbar[j];
  }
  return x;
}

Matrix hermitian_inverse(const Matrix& x) {
  return hermitize(x).llt().solve(Matrix::Identity(x.rows(), x.cols()));
}

// Objective a solver iterates on when whitening and duality factors are
// frozen at initialization: same formulas, stale effective channels.
double frozen_objective(const ChannelSet& ch, const EffectiveDownlink& eff,
                        const std::vector<Matrix>& gbar,
                        const std::vector<Matrix>& q_u,
                        const std::vector<Matrix>& q_du) {
  const Eigen::Index m = ch.g_d.rows();
  double r_u = logdet_psd(bs_side_matrix(ch, gbar, q_u, q_du)) -
               si_logdet(gbar, q_du);
  double r_du = logdet_psd(dual_side_matrix(eff, q_du, m));
  return r_u + r_du;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(outer_tol > 0.0)) throw config_error("outer_tol must be > 0");
  if (max_outer_iters < 1) throw config_error("max_outer_iters must be >= 1");
  if (!(inner_fw_gap_tol > 0.0)) {
    throw config_error("inner_fw_gap_tol must be > 0");
  }
  if (inner_fw_max_iters < 1) {
    throw config_error("inner_fw_max_iters must be >= 1");
  }
}

PowerBudgets power_budgets(const ScenarioConfig& cfg) {
  return {cfg.uplink_powers_mw(), cfg.bs_power_mw()};
}

CovarianceSet initial_covariances(const ChannelSet& ch,
                                  const PowerBudgets& budgets,
                                  const SolverConfig& cfg) {
  const Eigen::Index n = user_antenna_count(ch);
  const std::size_t ku = ch.h_u.size();
  const std::size_t kd = ch.h_d.size();
  const double nd = static_cast<double>(n);

  CovarianceSet cov;
  cov.q_u.resize(ku);
  cov.q_du.resize(kd);
  switch (cfg.init_mode) {
    case InitMode::kUniform:
      for (std::size_t i = 0; i < ku; ++i) {
        cov.q_u[i] = (budgets.uplink_mw[i] / nd) * Matrix::Identity(n, n);
      }
      for (std::size_t j = 0; j < kd; ++j) {
        cov.q_du[j] = (budgets.bs_mw / (static_cast<double>(kd) * nd)) *
                      Matrix::Identity(n, n);
      }
      break;
    case InitMode::kZero:
      for (std::size_t i = 0; i < ku; ++i) cov.q_u[i] = Matrix::Zero(n, n);
      for (std::size_t j = 0; j < kd; ++j) cov.q_du[j] = Matrix::Zero(n, n);
      break;
    case InitMode::kRandom: {
      GaussianStream rng(cfg.init_seed);
      auto random_psd = [&](double trace_budget) {
        Matrix x = rng.cgauss_matrix(n, n, 1.0);
        Matrix q = x * x.adjoint();
        double tr = q.real().trace();
        return tr > 0.0 ? Matrix((trace_budget / tr) * q)
                        : Matrix(Matrix::Zero(n, n));
      };
      for (std::size_t i = 0; i < ku; ++i) {
        cov.q_u[i] = random_psd(budgets.uplink_mw[i]);
      }
      for (std::size_t j = 0; j < kd; ++j) {
        cov.q_du[j] = random_psd(budgets.bs_mw / static_cast<double>(kd));
      }
      break;
    }
  }
  return cov;
}

EvaluatedState evaluate_covariances(const ChannelSet& ch,
                                    std::vector<Matrix> q_u,
                                    std::vector<Matrix> q_du) {
  EvaluatedState s;
  s.eff = whiten(ch, q_u);
  MacToBcResult t = mac_to_bc(s.eff, q_du);
  s.factors = std::move(t.factors);
  s.cov.q_u = std::move(q_u);
  s.cov.q_du = std::move(q_du);
  s.cov.q_d = std::move(t.q_d);
  s.r_u = uplink_sum_rate(ch, s.cov);
  s.r_du = dual_uplink_sum_rate(s.eff, s.cov.q_du);
  s.f = s.r_u + s.r_du;
  return s;
}

Matrix logdet_gradient(const std::vector<Matrix>& channels,
                       const std::vector<Matrix>& covs, std::size_t target) {
  const Eigen::Index m = channels[target].rows();
  Matrix x = Matrix::Identity(m, m);
  for (std::size_t k = 0; k < channels.size(); ++k) {
    x += channels[k] * covs[k] * channels[k].adjoint();
  }
  Matrix xinv = hermitian_inverse(x);
  return hermitize(kLog2e * channels[target].adjoint() * xinv *
                   channels[target]);
}

double si_logdet(const std::vector<Matrix>& gbar,
                 const std::vector<Matrix>& q_du) {
  if (gbar.empty()) return 0.0;
  const Eigen::Index m = gbar[0].rows();
  Matrix x = Matrix::Identity(m, m);
  for (std::size_t j = 0; j < q_du.size(); ++j) {
    x += gbar[j] * q_du[j] * gbar[j].adjoint();
  }
  return logdet_psd(x);
}

double LinearizedH::evaluate(const std::vector<Matrix>& q_du) const {
  double v = value_at_anchor;
  for (std::size_t j = 0; j < gradients.size(); ++j) {
    v += (gradients[j] * (q_du[j] - anchor[j])).trace().real();
  }
  return v;
}

LinearizedH mm_linearize_h(const std::vector<Matrix>& gbar,
                           const std::vector<Matrix>& q_du_anchor) {
  LinearizedH lin;
  lin.anchor = q_du_anchor;
  lin.value_at_anchor = si_logdet(gbar, q_du_anchor);
  if (gbar.empty()) return lin;

  const Eigen::Index m = gbar[0].rows();
  Matrix x = Matrix::Identity(m, m);
  for (std::size_t j = 0; j < q_du_anchor.size(); ++j) {
    x += gbar[j] * q_du_anchor[j] * gbar[j].adjoint();
  }
  Matrix xinv = hermitian_inverse(x);
  lin.gradients.reserve(gbar.size());
  for (std::size_t j = 0; j < gbar.size(); ++j) {
    lin.gradients.push_back(hermitize(kLog2e * gbar[j].adjoint() * xinv *
                                      gbar[j]));
  }
  return lin;
}

FwResult mm_subproblem(const ChannelSet& ch, const EffectiveDownlink& eff,
                       const std::vector<Matrix>& gbar, const LinearizedH& lin,
                       const PowerBudgets& budgets, const SolverConfig& cfg,
                       const std::vector<Matrix>& q_u_start,
                       const std::vector<Matrix>& q_du_start) {
  const std::size_t ku = q_u_start.size();
  const std::size_t kd = q_du_start.size();
  const Eigen::Index m = ch.g_d.rows();
  const Eigen::Index n = user_antenna_count(ch);

  FwResult res;
  res.q_u = q_u_start;
  res.q_du = q_du_start;

  auto surrogate = [&](const std::vector<Matrix>& qu,
                       const std::vector<Matrix>& qdu) {
    double value = logdet_psd(bs_side_matrix(ch, gbar, qu, qdu));
    if (kd > 0) value += logdet_psd(dual_side_matrix(eff, qdu, m));
    return value - lin.evaluate(qdu);
  };

  double fval = surrogate(res.q_u, res.q_du);

  for (int t = 0; t < cfg.inner_fw_max_iters; ++t) {
    Matrix bs_inv = hermitian_inverse(bs_side_matrix(ch, gbar, res.q_u,
                                                     res.q_du));
    Matrix dual_inv;
    if (kd > 0) {
      dual_inv = hermitian_inverse(dual_side_matrix(eff, res.q_du, m));
    }

    // Linear oracle: best rank-1 atom per uplink budget, plus one atom for
    // the shared downlink budget. The gap accumulates max <grad, S> - <grad,
    // Q> over all blocks and certifies distance to the subproblem optimum.
    double gap = 0.0;
    std::vector<Matrix> s_u(ku), s_du(kd);
    for (std::size_t i = 0; i < ku; ++i) {
      Matrix grad = hermitize(kLog2e * ch.h_u[i].adjoint() * bs_inv *
                              ch.h_u[i]);
      auto [lam, v] = top_eigpair(grad);
      double best = std::max(0.0, budgets.uplink_mw[i] * lam);
      s_u[i] = lam > 0.0
                   ? Matrix(budgets.uplink_mw[i] * v * v.adjoint())
                   : Matrix(Matrix::Zero(n, n));
      gap += best - real_inner(grad, res.q_u[i]);
    }
    if (kd > 0) {
      double best_lam = 0.0;
      Vector best_vec;
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < kd; ++j) {
        Matrix grad = hermitize(
            kLog2e * (gbar[j].adjoint() * bs_inv * gbar[j] +
                      eff.hbar[j] * dual_inv * eff.hbar[j].adjoint()) -
            lin.gradients[j]);
        auto [lam, v] = top_eigpair(grad);
        if (lam > best_lam) {
          best_lam = lam;
          best_vec = v;
          best_j = j;
        }
        gap -= real_inner(grad, res.q_du[j]);
        s_du[j] = Matrix::Zero(n, n);
      }
      if (best_lam > 0.0) {
        s_du[best_j] = budgets.bs_mw * best_vec * best_vec.adjoint();
        gap += budgets.bs_mw * best_lam;
      }
    }

    if (gap <= cfg.inner_fw_gap_tol * (1.0 + std::abs(fval))) {
      res.gap = gap;
      res.converged = true;
      break;
    }
    res.gap = gap;

    // Backtracking line search along the Frank-Wolfe direction.
    double gamma = 2.0 / (static_cast<double>(t) + 2.0);
    bool accepted = false;
    std::vector<Matrix> cand_u(ku), cand_du(kd);
    while (gamma >= 1e-12) {
      for (std::size_t i = 0; i < ku; ++i) {
        cand_u[i] = (1.0 - gamma) * res.q_u[i] + gamma * s_u[i];
      }
      for (std::size_t j = 0; j < kd; ++j) {
        cand_du[j] = (1.0 - gamma) * res.q_du[j] + gamma * s_du[j];
      }
      double fc = surrogate(cand_u, cand_du);
      if (fc > fval) {
        res.q_u = std::move(cand_u);
        res.q_du = std::move(cand_du);
        fval = fc;
        accepted = true;
        break;
      }
      gamma *= 0.5;
    }
    res.iterations = t + 1;
    if (!accepted) break;  // flat to machine precision along this direction
  }

  for (Matrix& q : res.q_u) q = hermitize(q);
  for (Matrix& q : res.q_du) q = hermitize(q);
  return res;
}

SolverResult mm_run(const ChannelSet& ch, const PowerBudgets& budgets,
                    const SolverConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  const bool frozen = cfg.refresh_mode == RefreshMode::kFrozen;

  CovarianceSet init = initial_covariances(ch, budgets, cfg);
  std::vector<Matrix> q_u = init.q_u;
  std::vector<Matrix> q_du = init.q_du;

  SolverResult out;
  EvaluatedState state = evaluate_covariances(ch, q_u, q_du);

  EffectiveDownlink frozen_eff;
  DualityFactors frozen_factors;
  std::vector<Matrix> frozen_gbar;
  if (frozen) {
    frozen_eff = state.eff;
    frozen_factors = state.factors;
    frozen_gbar = effective_si_channels(ch, frozen_eff, q_du, frozen_factors);
  }

  // The quantity termination tracks: composite objective when refreshing,
  // stale-channel objective when frozen. Traces always record the composite.
  auto opt_value = [&](const EvaluatedState& s) {
    return frozen ? frozen_objective(ch, frozen_eff, frozen_gbar, s.cov.q_u,
                                     s.cov.q_du)
                  : s.f;
  };

  double prev_opt = opt_value(state);
  out.trace.points.push_back(
      {0, state.r_u, state.r_du, state.f, 0, ms_since(t0)});

  int n = 0;
  while (static_cast<int>(out.trace.points.size()) < cfg.max_outer_iters) {
    ++n;
    std::vector<Matrix> gbar =
        frozen ? frozen_gbar
               : effective_si_channels(ch, state.eff, q_du, state.factors);
    const EffectiveDownlink& eff = frozen ? frozen_eff : state.eff;

    LinearizedH lin = mm_linearize_h(gbar, q_du);
    FwResult fw = mm_subproblem(ch, eff, gbar, lin, budgets, cfg, q_u, q_du);

    EvaluatedState cand = evaluate_covariances(ch, fw.q_u, fw.q_du);
    double cand_opt = opt_value(cand);

    if (cand_opt < prev_opt) {
      // Refreshed channels can make an accepted surrogate step decrease the
      // composite objective; damp once toward the previous iterate, then
      // stop if the decrease persists (keeping the previous iterate).
      std::vector<Matrix> half_u(q_u.size()), half_du(q_du.size());
      for (std::size_t i = 0; i < q_u.size(); ++i) {
        half_u[i] = 0.5 * (fw.q_u[i] + q_u[i]);
      }
      for (std::size_t j = 0; j < q_du.size(); ++j) {
        half_du[j] = 0.5 * (fw.q_du[j] + q_du[j]);
      }
      EvaluatedState half = evaluate_covariances(ch, half_u, half_du);
      double half_opt = opt_value(half);
      if (half_opt < prev_opt) {
        out.trace.reason = StopReason::kConverged;
        break;
      }
      cand = std::move(half);
      cand_opt = half_opt;
      fw.q_u = std::move(half_u);
      fw.q_du = std::move(half_du);
    }

    q_u = std::move(fw.q_u);
    q_du = std::move(fw.q_du);
    state = std::move(cand);
    out.trace.points.push_back(
        {n, state.r_u, state.r_du, state.f, fw.iterations, ms_since(t0)});

    if (rel_change(prev_opt, cand_opt) < cfg.outer_tol) {
      out.trace.reason = StopReason::kConverged;
      break;
    }
    prev_opt = cand_opt;
  }

  out.cov = state.cov;
  out.r_u = state.r_u;
  out.r_du = state.r_du;
  out.f = state.f;
  return out;
}

Matrix aiwf_uplink_update(const ChannelSet& ch, const CovarianceSet& cov,
                          std::size_t i, double power_mw) {
  const Eigen::Index m = ch.g_d.rows();
  Matrix interf = Matrix::Identity(m, m) + si_covariance(ch, cov.q_d);
  for (std::size_t k = 0; k < cov.q_u.size(); ++k) {
    if (k == i) continue;
    interf += ch.h_u[k] * cov.q_u[k] * ch.h_u[k].adjoint();
  }
  Matrix eff_ch = inv_sqrt_psd(interf) * ch.h_u[i];  // M x N
  EigDecomposition gram = herm_eig(eff_ch.adjoint() * eff_ch);
  WaterfillResult wf = waterfill_individual(gram.values, power_mw);
  return hermitize(gram.vectors * wf.alloc[0].asDiagonal() *
                   gram.vectors.adjoint());
}

std::vector<Matrix> aiwf_dual_update(const EffectiveDownlink& eff,
                                     const std::vector<Matrix>& q_du,
                                     double p_d_mw) {
  const std::size_t kd = q_du.size();
  if (kd == 0) return {};
  const Eigen::Index m = eff.hbar[0].cols();

  // Jacobi: all per-user effective channels against the previous iterate.
  std::vector<EigDecomposition> basis(kd);
  std::vector<RealVector> blocks(kd);
  for (std::size_t j = 0; j < kd; ++j) {
    Matrix others = Matrix::Identity(m, m);
    for (std::size_t k = 0; k < kd; ++k) {
      if (k == j) continue;
      others += eff.hbar[k].adjoint() * q_du[k] * eff.hbar[k];
    }
    Matrix eff_ch = inv_sqrt_psd(others) * eff.hbar[j].adjoint();  // M x N
    basis[j] = herm_eig(eff_ch.adjoint() * eff_ch);
    blocks[j] = basis[j].values;
  }

  WaterfillResult wf = waterfill_sum(blocks, p_d_mw);

  std::vector<Matrix> out(kd);
  const double mix = 1.0 / static_cast<double>(kd);
  for (std::size_t j = 0; j < kd; ++j) {
    Matrix filled = basis[j].vectors * wf.alloc[j].asDiagonal() *
                    basis[j].vectors.adjoint();
    out[j] = hermitize(mix * filled + (1.0 - mix) * q_du[j]);
  }
  return out;
}

SolverResult aiwf_run(const ChannelSet& ch, const PowerBudgets& budgets,
                      const SolverConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  const bool frozen = cfg.refresh_mode == RefreshMode::kFrozen;

  CovarianceSet init = initial_covariances(ch, budgets, cfg);
  std::vector<Matrix> q_u = init.q_u;
  std::vector<Matrix> q_du = init.q_du;

  SolverResult out;
  EvaluatedState state = evaluate_covariances(ch, q_u, q_du);
  EffectiveDownlink frozen_eff;
  if (frozen) frozen_eff = state.eff;

  auto opt_value = [&](const EvaluatedState& s) {
    if (!frozen) return s.f;
    CovarianceSet cov;
    cov.q_u = s.cov.q_u;
    cov.q_du = s.cov.q_du;
    cov.q_d = mac_to_bc(frozen_eff, s.cov.q_du).q_d;
    return uplink_sum_rate(ch, cov) +
           dual_uplink_sum_rate(frozen_eff, s.cov.q_du);
  };

  double prev_opt = opt_value(state);
  out.trace.points.push_back(
      {0, state.r_u, state.r_du, state.f, 0, ms_since(t0)});

  int n = 0;
  while (static_cast<int>(out.trace.points.size()) < cfg.max_outer_iters) {
    ++n;
    // Uplink sweep against the covariances of the latest transform.
    CovarianceSet work;
    work.q_u = q_u;
    work.q_d = frozen ? mac_to_bc(frozen_eff, q_du).q_d : state.cov.q_d;
    for (std::size_t i = 0; i < work.q_u.size(); ++i) {
      work.q_u[i] = aiwf_uplink_update(ch, work, i, budgets.uplink_mw[i]);
    }
    q_u = work.q_u;

    EffectiveDownlink eff_now = frozen ? frozen_eff : whiten(ch, q_u);
    q_du = aiwf_dual_update(eff_now, q_du, budgets.bs_mw);

    state = evaluate_covariances(ch, q_u, q_du);
    double opt = opt_value(state);
    out.trace.points.push_back(
        {n, state.r_u, state.r_du, state.f, 0, ms_since(t0)});

    if (rel_change(prev_opt, opt) < cfg.outer_tol) {
      out.trace.reason = StopReason::kConverged;
      break;
    }
    prev_opt = opt;
  }

  out.cov = state.cov;
  out.r_u = state.r_u;
  out.r_du = state.r_du;
  out.f = state.f;
  return out;
}

HdResult hd_baseline(const ChannelSet& ch, const PowerBudgets& budgets,
                     const SolverConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();

  CovarianceSet init = initial_covariances(ch, budgets, cfg);
  CovarianceSet mac;
  mac.q_u = init.q_u;  // q_d stays empty: no self-interference in HD uplink
  std::vector<Matrix> q_du = init.q_du;

  EffectiveDownlink bc_eff;  // no cross interference: white noise, raw H_D
  bc_eff.w.reserve(ch.h_d.size());
  bc_eff.hbar = ch.h_d;
  for (const Matrix& h : ch.h_d) {
    bc_eff.w.push_back(Matrix::Identity(h.rows(), h.rows()));
  }

  HdResult out;
  auto rates = [&]() {
    double r_mac = uplink_sum_rate(ch, mac);
    double r_bc = dual_uplink_sum_rate(bc_eff, q_du);
    return std::pair<double, double>{r_mac, r_bc};
  };

  auto [r_mac, r_bc] = rates();
  double f = 0.5 * (r_mac + r_bc);
  out.trace.points.push_back(
      {0, 0.5 * r_mac, 0.5 * r_bc, f, 0, ms_since(t0)});
  double prev_f = f;

  int n = 0;
  while (static_cast<int>(out.trace.points.size()) < cfg.max_outer_iters) {
    ++n;
    for (std::size_t i = 0; i < mac.q_u.size(); ++i) {
      mac.q_u[i] = aiwf_uplink_update(ch, mac, i, budgets.uplink_mw[i]);
    }
    if (!q_du.empty()) {
      q_du = aiwf_dual_update(bc_eff, q_du, budgets.bs_mw);
    }

    std::tie(r_mac, r_bc) = rates();
    f = 0.5 * (r_mac + r_bc);
    out.trace.points.push_back(
        {n, 0.5 * r_mac, 0.5 * r_bc, f, 0, ms_since(t0)});

    if (rel_change(prev_f, f) < cfg.outer_tol) {
      out.trace.reason = StopReason::kConverged;
      break;
    }
    prev_f = f;
  }

  out.sum_rate = f;
  out.r_mac = r_mac;
  out.r_bc = r_bc;
  return out;
}

}  // namespace fdmimo
