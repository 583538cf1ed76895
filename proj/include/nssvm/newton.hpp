#ifndef NSSVM_NEWTON_HPP
#define NSSVM_NEWTON_HPP

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <vector>

#include "nssvm/dataset.hpp"
#include "nssvm/linear_core.hpp"
#include "nssvm/projection.hpp"

// Fixed-sparsity Newton iteration on the stationary equations
// F(z;T) = [g_T(z); alpha_{T-bar}; <alpha_T, y_T>] = 0.

namespace nssvm {

struct SolverConfig {
  Penalties penalties{0.25, 0.0025};
  double eta = 1e-4;        // stationarity step
  Eigen::Index s = 1;       // sparsity level
  double eps = 1e-6;        // residual tolerance
  Eigen::Index max_iter = 1000;
};

// eta = 1/m, eps = max(sqrt(m), sqrt(n)) * 1e-6, C = 0.25, c = 0.01C
inline SolverConfig default_config(const Dataset& d, Eigen::Index s) {
  SolverConfig cfg;
  cfg.penalties = Penalties(0.25, 0.01 * 0.25);
  cfg.eta = 1.0 / static_cast<double>(d.rows());
  cfg.s = s;
  cfg.eps = std::max(std::sqrt(static_cast<double>(d.rows())),
                     std::sqrt(static_cast<double>(d.cols()))) * 1e-6;
  cfg.max_iter = 1000;
  return cfg;
}

// alpha^0 = 0, b^0 = sgn(<y,1>) with sgn(0) = -1
inline DualIterate default_start(const Dataset& d) {
  DualIterate z;
  z.alpha = Eigen::VectorXd::Zero(d.rows());
  z.b = d.labels().sum() > 0.0 ? 1.0 : -1.0;
  return z;
}

// Full stacked residual in the order [g_T; alpha_{T-bar}; <alpha_T, y_T>].
inline Eigen::VectorXd residual_F(const Dataset& d, const DualIterate& z,
                                  const ActiveSet& T, const Penalties& p) {
  const Eigen::VectorXd g = grad_g(d, z, p);
  const Eigen::Index m = d.rows(), s = T.size();
  Eigen::VectorXd f(m + 1);
  for (Eigen::Index r = 0; r < s; ++r) f[r] = g[T.indices[r]];
  Eigen::Index pos = s;
  std::size_t tpos = 0;
  double ydot = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tpos < T.indices.size() && T.indices[tpos] == i) {
      ydot += z.alpha[i] * d.label(i);
      ++tpos;
    } else {
      f[pos++] = z.alpha[i];
    }
  }
  f[m] = ydot;
  return f;
}

namespace detail {

// Residual norm from a cached gradient; skips materializing the off-support
// block, which is exactly zero from iteration 1 on.
inline double residual_norm(const Dataset& d, const DualIterate& z,
                            const ActiveSet& T, const Eigen::VectorXd& g) {
  double sq = 0.0, ydot = 0.0;
  for (Eigen::Index i : T.indices) {
    sq += g[i] * g[i];
    ydot += z.alpha[i] * d.label(i);
  }
  std::size_t tpos = 0;
  for (Eigen::Index i = 0; i < z.alpha.size(); ++i) {
    if (tpos < T.indices.size() && T.indices[tpos] == i) {
      ++tpos;
      continue;
    }
    if (z.alpha[i] != 0.0) sq += z.alpha[i] * z.alpha[i];
  }
  return std::sqrt(sq + ydot * ydot);
}

// At the zero iterate the magnitude ranking of alpha - eta*g can be constant
// within each class (g = -1 + b*y), making every candidate active set
// single-class. The stationary equations restricted to a single-class block
// have the root alpha = 0 with b flipped, so the iteration would cycle
// without moving alpha. Selecting the start set label-balanced breaks the
// degeneracy; it only ever triggers at alpha = 0.
inline ActiveSet select_active_set(const Dataset& d, const Eigen::VectorXd& alpha,
                                   const Eigen::VectorXd& g, double eta,
                                   Eigen::Index s) {
  ActiveSet T = top_s_indices(alpha - eta * g, s);
  if (s < 2 || !(alpha.array() == 0.0).all()) return T;
  bool mixed = false;
  const double first = d.label(T.indices.front());
  for (Eigen::Index i : T.indices)
    if (d.label(i) != first) {
      mixed = true;
      break;
    }
  if (mixed) return T;

  const Eigen::VectorXd score = (alpha - eta * g).cwiseAbs();
  auto bigger = [&](Eigen::Index a, Eigen::Index b) {
    return score[a] > score[b] || (score[a] == score[b] && a < b);
  };
  std::vector<Eigen::Index> pos, neg;
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    (d.label(i) > 0.0 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) return T;  // one-class data, nothing to mix
  const Eigen::Index want_pos =
      std::min<Eigen::Index>((s + 1) / 2, static_cast<Eigen::Index>(pos.size()));
  const Eigen::Index want_neg =
      std::min<Eigen::Index>(s - want_pos, static_cast<Eigen::Index>(neg.size()));
  auto take = [&](std::vector<Eigen::Index>& v, Eigen::Index k) {
    std::nth_element(v.begin(), v.begin() + (k - 1), v.end(), bigger);
    v.resize(k);
  };
  take(pos, want_pos);
  take(neg, want_neg);
  std::vector<Eigen::Index> merged;
  merged.reserve(want_pos + want_neg);
  merged.insert(merged.end(), pos.begin(), pos.end());
  merged.insert(merged.end(), neg.begin(), neg.end());
  // top up from the global ranking if one class was short
  if (static_cast<Eigen::Index>(merged.size()) < s) {
    std::sort(merged.begin(), merged.end());
    for (Eigen::Index i : T.indices)
      if (!std::binary_search(merged.begin(), merged.end(), i)) {
        merged.push_back(i);
        if (static_cast<Eigen::Index>(merged.size()) == s) break;
      }
  }
  std::sort(merged.begin(), merged.end());
  return ActiveSet{std::move(merged)};
}

}  // namespace detail

struct NewtonState {
  DualIterate z;
  ActiveSet T;
  double residual = 0.0;
  Eigen::Index iter = 0;
  Eigen::VectorXd g_cache;
};

// Closed-form solve of the Newton system on the active block:
//   d_{m+1} = -<y_T, Theta^{-1} g_T - alpha_T> / <y_T, Theta^{-1} y_T>
//   d_T     = -Theta^{-1}[g_T + d_{m+1} y_T]
//   d_Tbar  = -alpha_Tbar
// Returns the full length-(m+1) direction.
inline Eigen::VectorXd newton_direction(const Dataset& d, const NewtonState& state,
                                        const Penalties& p) {
  const ActiveSet& T = state.T;
  const Eigen::Index m = d.rows(), s = T.size();
  const HessianBlock h = hessian_block(d, state.z.alpha, T, p);
  Eigen::VectorXd g_t(s), y_t(s), a_t(s);
  for (Eigen::Index r = 0; r < s; ++r) {
    g_t[r] = state.g_cache[T.indices[r]];
    y_t[r] = d.label(T.indices[r]);
    a_t[r] = state.z.alpha[T.indices[r]];
  }
  const Eigen::VectorXd u = h.solve(g_t);
  const Eigen::VectorXd v = h.solve(y_t);
  const double denom = y_t.dot(v);
  const double d_b = -(y_t.dot(u) - y_t.dot(a_t)) / denom;
  const Eigen::VectorXd d_t = -(u + d_b * v);
  if (!d_t.allFinite() || !std::isfinite(d_b))
    throw NumericalBreakdown("non-finite Newton direction at iteration " +
                             std::to_string(state.iter));
  Eigen::VectorXd dir = -state.z.alpha;
  for (Eigen::Index r = 0; r < s; ++r) dir[T.indices[r]] = d_t[r];
  Eigen::VectorXd full(m + 1);
  full.head(m) = dir;
  full[m] = d_b;
  return full;
}

struct FitResult {
  Eigen::VectorXd alpha;
  double b = 0.0;
  Eigen::VectorXd w;
  ActiveSet support;
  Eigen::Index iters = 0;
  Eigen::Index final_s = 0;  // sparsity level at the last iteration
  std::vector<double> residual_history;
  std::vector<double> acc_history;  // adaptive mode only
  double wall_time = 0.0;
  bool converged = false;
  // per-iteration invariant diagnostics (criteria checked by tests)
  double max_feasibility_violation = 0.0;  // max |<alpha,y>| / (1 + ||alpha||)
  bool sparsity_preserved = true;          // ||alpha^k||_0 <= s_k throughout
};

namespace detail {

inline void finish_fit(const Dataset& d, const Penalties& p, FitResult& fit) {
  fit.w = apply_Q(d, fit.alpha);
  std::vector<Eigen::Index> supp;
  for (Eigen::Index i = 0; i < fit.alpha.size(); ++i)
    if (fit.alpha[i] != 0.0) supp.push_back(i);
  fit.support = ActiveSet{std::move(supp)};
  (void)p;
}

inline void record_invariants(const Dataset& d, const DualIterate& z,
                              Eigen::Index s, FitResult& fit) {
  const double viol =
      std::abs(z.alpha.dot(d.labels())) / (1.0 + z.alpha.norm());
  fit.max_feasibility_violation = std::max(fit.max_feasibility_violation, viol);
  if (zero_norm(z.alpha) > s) fit.sparsity_preserved = false;
}

}  // namespace detail

// Algorithm: pick T_k from the top-s entries of |alpha - eta g|, take the full
// Newton step, stop when ||F(z;T)|| < eps or the iteration cap is hit.
inline FitResult solve_fixed_s(const Dataset& d, const SolverConfig& cfg,
                               const DualIterate& z0) {
  const auto start = std::chrono::steady_clock::now();
  FitResult fit;
  DualIterate z = z0;
  Eigen::VectorXd g = grad_g(d, z, cfg.penalties);
  ActiveSet T = detail::select_active_set(d, z.alpha, g, cfg.eta, cfg.s);
  fit.final_s = std::clamp<Eigen::Index>(cfg.s, 1, d.rows());

  DualIterate best = z;
  double best_res = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0;; ++k) {
    const double res = detail::residual_norm(d, z, T, g);
    fit.residual_history.push_back(res);
    if (res < best_res) {
      best_res = res;
      best = z;
    }
    if (res < cfg.eps) {
      fit.converged = true;
      fit.iters = k;
      break;
    }
    if (k >= cfg.max_iter) {
      fit.iters = k;
      break;
    }
    NewtonState state{z, T, res, k, g};
    const Eigen::VectorXd dir = newton_direction(d, state, cfg.penalties);
    Eigen::VectorXd alpha_next = Eigen::VectorXd::Zero(d.rows());
    for (Eigen::Index i : T.indices) alpha_next[i] = z.alpha[i] + dir[i];
    z.alpha = std::move(alpha_next);
    z.b += dir[d.rows()];
    detail::record_invariants(d, z, cfg.s, fit);
    g = grad_g(d, z, cfg.penalties);
    T = detail::select_active_set(d, z.alpha, g, cfg.eta, cfg.s);
  }
  if (!fit.converged) z = best;
  fit.alpha = z.alpha;
  fit.b = z.b;
  detail::finish_fit(d, cfg.penalties, fit);
  fit.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return fit;
}

// Equivalent eta-stationarity conditions on S = supp(alpha):
//   (1) g_S(z) = 0
//   (2) eta ||g_{S-bar}(z)||_[1] <= ||alpha||_[s]
//   (3) ||alpha||_0 <= s
//   (4) <alpha, y> = 0
// evaluated at tolerance eps.
struct StationarityReport {
  double grad_support_norm = 0.0;
  double scaled_offsupport_max = 0.0;  // eta * ||g_{S-bar}||_[1]
  double alpha_sth_magnitude = 0.0;    // ||alpha||_[s]
  Eigen::Index cardinality = 0;
  double feasibility = 0.0;  // <alpha, y>
  bool pass_grad = false;
  bool pass_threshold = false;
  bool pass_sparsity = false;
  bool pass_feasibility = false;

  bool pass() const {
    return pass_grad && pass_threshold && pass_sparsity && pass_feasibility;
  }
};

inline StationarityReport check_eta_stationarity(const Dataset& d,
                                                 const DualIterate& z,
                                                 const SolverConfig& cfg) {
  const Eigen::VectorXd g = grad_g(d, z, cfg.penalties);
  StationarityReport r;
  double gs_sq = 0.0, gbar_max = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (z.alpha[i] != 0.0) {
      gs_sq += g[i] * g[i];
      ++r.cardinality;
    } else {
      gbar_max = std::max(gbar_max, std::abs(g[i]));
    }
  }
  r.grad_support_norm = std::sqrt(gs_sq);
  r.scaled_offsupport_max = cfg.eta * gbar_max;
  r.alpha_sth_magnitude =
      cfg.s <= d.rows() ? detail::kth_largest_abs(z.alpha, cfg.s) : 0.0;
  r.feasibility = z.alpha.dot(d.labels());
  r.pass_grad = r.grad_support_norm <= cfg.eps;
  r.pass_threshold = r.scaled_offsupport_max <= r.alpha_sth_magnitude + cfg.eps;
  r.pass_sparsity = r.cardinality <= cfg.s;
  r.pass_feasibility = std::abs(r.feasibility) <= cfg.eps;
  return r;
}

}  // namespace nssvm

#endif  // NSSVM_NEWTON_HPP
