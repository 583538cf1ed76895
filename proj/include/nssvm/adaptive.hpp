#ifndef NSSVM_ADAPTIVE_HPP
#define NSSVM_ADAPTIVE_HPP

#include <Eigen/Core>
#include <chrono>
#include <cmath>

#include "nssvm/newton.hpp"

// NSSVM driver: the fixed-sparsity Newton step with the sparsity level s_k
// grown adaptively until the residual is small and the training accuracy
// stops improving.

namespace nssvm {

struct AdaptiveConfig {
  SolverConfig base;          // base.s acts as s_0
  double sigma = 1.1;         // growth factor, > 1
  Eigen::Index max_it = 1000;
  double acc_plateau_tol = 1e-4;  // on the percent scale
  double beta = 1.0;          // for the s(beta) initializer

  AdaptiveConfig() = default;
  explicit AdaptiveConfig(SolverConfig b) : base(b) {}
};

// s(beta) = ceil(beta * n * log2(m/n)^2), log term clamped to 1 when m <= n,
// result clamped into [1, m].
inline Eigen::Index default_s0(double beta, Eigen::Index m, Eigen::Index n) {
  double lg = std::log2(static_cast<double>(m) / static_cast<double>(n));
  if (m <= n) lg = 1.0;
  const double raw = std::ceil(beta * static_cast<double>(n) * lg * lg);
  return std::clamp<Eigen::Index>(static_cast<Eigen::Index>(raw), 1, m);
}

inline double sgn_predict(double t) { return t > 0.0 ? 1.0 : -1.0; }

// ACC in percent from a primal pair: predictions sgn(X w + b).
inline double accuracy_w(const Dataset& d, const Eigen::VectorXd& w, double b) {
  Eigen::Index wrong = 0;
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    if (sgn_predict(d.row_dot(i, w) + b) != d.label(i)) ++wrong;
  return (1.0 - static_cast<double>(wrong) / static_cast<double>(d.rows())) * 100.0;
}

inline double accuracy(const Dataset& d, const Eigen::VectorXd& alpha, double b) {
  return accuracy_w(d, apply_Q(d, alpha), b);
}

// Halt when both the residual drops below eps and the accuracy plateaus:
// ACC(alpha^k) - max_{j<k} ACC(alpha^j) < tol, with ACC(alpha^{-1}) = 0, i.e.
// the current accuracy no longer improves significantly on the best seen.
// s grows by ceil(sigma * s_k), capped at m, when k is a positive multiple of
// 10 or the residual condition already holds.
inline FitResult solve_adaptive(const Dataset& d, const AdaptiveConfig& cfg,
                                const DualIterate& z0) {
  const auto start = std::chrono::steady_clock::now();
  const SolverConfig& base = cfg.base;
  const Eigen::Index m = d.rows();
  FitResult fit;
  DualIterate z = z0;
  Eigen::Index s = std::clamp<Eigen::Index>(base.s, 1, m);
  Eigen::VectorXd g = grad_g(d, z, base.penalties);
  ActiveSet T = detail::select_active_set(d, z.alpha, g, base.eta, s);

  DualIterate best = z;
  double best_res = std::numeric_limits<double>::infinity();
  double prev_acc_max = 0.0;  // ACC(alpha^{-1}) = 0
  Eigen::VectorXd w = apply_Q(d, z.alpha);
  for (Eigen::Index k = 0;; ++k) {
    const double res = detail::residual_norm(d, z, T, g);
    const double acc = accuracy_w(d, w, z.b);
    fit.residual_history.push_back(res);
    fit.acc_history.push_back(acc);
    if (res < best_res) {
      best_res = res;
      best = z;
    }
    const bool halt_residual = res < base.eps;
    const bool halt_plateau = acc - prev_acc_max < cfg.acc_plateau_tol;
    if (halt_residual && halt_plateau) {
      fit.converged = true;
      fit.iters = k;
      fit.final_s = s;
      break;
    }
    if (k >= cfg.max_it) {
      fit.iters = k;
      fit.final_s = s;
      break;
    }
    prev_acc_max = std::max(prev_acc_max, acc);

    NewtonState state{z, T, res, k, g};
    const Eigen::VectorXd dir = newton_direction(d, state, base.penalties);
    Eigen::VectorXd alpha_next = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i : T.indices) alpha_next[i] = z.alpha[i] + dir[i];
    z.alpha = std::move(alpha_next);
    z.b += dir[m];
    detail::record_invariants(d, z, s, fit);

    if ((k > 0 && k % 10 == 0) || halt_residual)
      s = std::min<Eigen::Index>(
          m, static_cast<Eigen::Index>(std::ceil(cfg.sigma * static_cast<double>(s))));
    w = apply_Q(d, z.alpha);
    g = apply_Qt(d, w);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double e = z.alpha[i] >= 0.0 ? 1.0 / base.penalties.C : 1.0 / base.penalties.c;
      g[i] += e * z.alpha[i] - 1.0 + z.b * d.label(i);
    }
    T = detail::select_active_set(d, z.alpha, g, base.eta, s);
  }
  if (!fit.converged) z = best;
  fit.alpha = z.alpha;
  fit.b = z.b;
  detail::finish_fit(d, base.penalties, fit);
  fit.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return fit;
}

}  // namespace nssvm

#endif  // NSSVM_ADAPTIVE_HPP
