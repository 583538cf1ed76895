#ifndef NSSVM_LINEAR_CORE_HPP
#define NSSVM_LINEAR_CORE_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "nssvm/dataset.hpp"
#include "nssvm/projection.hpp"

// Everything built from Q = [y_1 x_1 ... y_m x_m] (n x m), applied implicitly
// from the Dataset: dual objective, gradient, Hessian blocks, primal recovery.
// Q itself is never materialized.

namespace nssvm {

class NumericalBreakdown : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Penalties {
  double C;
  double c;

  Penalties(double C_, double c_) : C(C_), c(c_) {
    if (!(C > c && c > 0.0))
      throw std::invalid_argument("penalties must satisfy C > c > 0");
  }
};

// z = (alpha; b)
struct DualIterate {
  Eigen::VectorXd alpha;
  double b = 0.0;
};

// w = Q alpha = sum_i y_i alpha_i x_i; only rows with alpha_i != 0 are touched.
inline Eigen::VectorXd apply_Q(const Dataset& d, const Eigen::VectorXd& alpha) {
  if (alpha.size() != d.rows()) throw std::invalid_argument("alpha length mismatch");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d.cols());
  for (Eigen::Index i = 0; i < alpha.size(); ++i)
    if (alpha[i] != 0.0) d.row_axpy(i, d.label(i) * alpha[i], w);
  return w;
}

// (Q^T w)_i = y_i <x_i, w>
inline Eigen::VectorXd apply_Qt(const Dataset& d, const Eigen::VectorXd& w) {
  if (w.size() != d.cols()) throw std::invalid_argument("w length mismatch");
  Eigen::VectorXd out(d.rows());
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    out[i] = d.label(i) * d.row_dot(i, w);
  return out;
}

// Diagonal of E(alpha): 1/C where alpha_i >= 0, else 1/c.
inline Eigen::VectorXd e_diag(const Eigen::VectorXd& alpha, const Penalties& p) {
  Eigen::VectorXd e(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i)
    e[i] = alpha[i] >= 0.0 ? 1.0 / p.C : 1.0 / p.c;
  return e;
}

// D(alpha) = 1/2 ||Q alpha||^2 + 1/2 <E(alpha) alpha, alpha> - <1, alpha>
inline double dual_objective(const Dataset& d, const Eigen::VectorXd& alpha,
                             const Penalties& p) {
  const Eigen::VectorXd w = apply_Q(d, alpha);
  double quad = 0.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double e = alpha[i] >= 0.0 ? 1.0 / p.C : 1.0 / p.c;
    quad += e * alpha[i] * alpha[i];
  }
  return 0.5 * w.squaredNorm() + 0.5 * quad - alpha.sum();
}

// g(z) = Q^T(Q alpha) + E(alpha) o alpha - 1 + b y
inline Eigen::VectorXd grad_g(const Dataset& d, const DualIterate& z,
                              const Penalties& p) {
  const Eigen::VectorXd w = apply_Q(d, z.alpha);
  Eigen::VectorXd g = apply_Qt(d, w);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double e = z.alpha[i] >= 0.0 ? 1.0 / p.C : 1.0 / p.c;
    g[i] += e * z.alpha[i] - 1.0 + z.b * d.label(i);
  }
  return g;
}

// Theta = Q_T^T Q_T + E(alpha)_TT with its Cholesky factor. Positive definite
// analytically: Theta >= I/C.
struct HessianBlock {
  Eigen::MatrixXd theta;
  Eigen::LLT<Eigen::MatrixXd> chol;
  ActiveSet T;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return chol.solve(rhs); }
};

inline HessianBlock hessian_block(const Dataset& d, const Eigen::VectorXd& alpha,
                                  const ActiveSet& T, const Penalties& p) {
  const Eigen::Index s = T.size();
  Eigen::MatrixXd g_rows(s, d.cols());  // rows y_i x_i for i in T
  for (Eigen::Index r = 0; r < s; ++r)
    g_rows.row(r) = d.label(T.indices[r]) * d.row_dense(T.indices[r]).transpose();
  HessianBlock h;
  h.theta.noalias() = g_rows * g_rows.transpose();
  for (Eigen::Index r = 0; r < s; ++r) {
    const double a = alpha[T.indices[r]];
    h.theta(r, r) += a >= 0.0 ? 1.0 / p.C : 1.0 / p.c;
  }
  h.chol.compute(h.theta);
  if (h.chol.info() != Eigen::Success)
    throw NumericalBreakdown("Cholesky factorization of the active block failed");
  h.T = T;
  return h;
}

// w = Q alpha, b = <y_S, 1 - H_S(alpha) alpha_S>/|S| averaged over the support.
// Empty support: b_hat is absent and the caller keeps its own bias.
struct PrimalPair {
  Eigen::VectorXd w;
  std::optional<double> b_hat;
};

inline PrimalPair recover_primal(const Dataset& d, const Eigen::VectorXd& alpha,
                                 const Penalties& p) {
  PrimalPair out;
  out.w = apply_Q(d, alpha);
  double acc = 0.0;
  Eigen::Index nsv = 0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    // (H_S alpha_S)_i = y_i <x_i, w> + e_i alpha_i since supp(alpha) = S
    const double e = alpha[i] >= 0.0 ? 1.0 / p.C : 1.0 / p.c;
    const double h_row = d.label(i) * d.row_dot(i, out.w) + e * alpha[i];
    acc += d.label(i) * (1.0 - h_row);
    ++nsv;
  }
  if (nsv > 0) out.b_hat = acc / static_cast<double>(nsv);
  return out;
}

// 1/2 ||w||^2 + sum ell_cC(1 - y_i(<w,x_i> + b))
inline double primal_objective(const Dataset& d, const Eigen::VectorXd& w,
                               double b, const Penalties& p) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    const double t = 1.0 - d.label(i) * (d.row_dot(i, w) + b);
    loss += (t >= 0.0 ? p.C : p.c) * 0.5 * t * t;
  }
  return 0.5 * w.squaredNorm() + loss;
}

namespace detail {
inline double kth_largest_abs(const Eigen::VectorXd& v, Eigen::Index k) {
  Eigen::VectorXd a = v.cwiseAbs();
  std::nth_element(a.data(), a.data() + (k - 1), a.data() + a.size(),
                   std::greater<double>());
  return a[k - 1];
}
}  // namespace detail

inline Eigen::Index zero_norm(const Eigen::VectorXd& v) {
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) ++n;
  return n;
}

// eta* = ||alpha||_[s] / ||g||_[1] when ||alpha||_0 = s, +inf otherwise
// (including ||g||_[1] = 0).
inline double eta_star(const DualIterate& z, const Eigen::VectorXd& g,
                       Eigen::Index s) {
  if (zero_norm(z.alpha) < s) return std::numeric_limits<double>::infinity();
  const double gmax = g.cwiseAbs().maxCoeff();
  if (gmax == 0.0) return std::numeric_limits<double>::infinity();
  return detail::kth_largest_abs(z.alpha, s) / gmax;
}

}  // namespace nssvm

#endif  // NSSVM_LINEAR_CORE_HPP
