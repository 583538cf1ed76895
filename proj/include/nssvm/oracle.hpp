#ifndef NSSVM_ORACLE_HPP
#define NSSVM_ORACLE_HPP

#include <Eigen/Core>
#include <Eigen/LU>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "nssvm/linear_core.hpp"

// Brute-force reference solvers for desk-scale certification. The restricted
// solver iterates over the finitely many sign patterns of E(alpha) and solves
// each piece exactly, staying independent of the Newton code path.

namespace nssvm {

class OracleFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RestrictedSolution {
  Eigen::VectorXd alpha;  // full length m, supported on T
  double b = 0.0;
  double objective = 0.0;
};

// min D(alpha) s.t. supp(alpha) in T, <alpha, y> = 0.
inline RestrictedSolution solve_restricted(const Dataset& d,
                                           const std::vector<Eigen::Index>& T,
                                           const Penalties& p) {
  const Eigen::Index m = d.rows();
  RestrictedSolution out;
  out.alpha = Eigen::VectorXd::Zero(m);
  if (T.empty()) return out;
  const Eigen::Index s = static_cast<Eigen::Index>(T.size());

  Eigen::MatrixXd gram(s, s);  // Q_T^T Q_T
  Eigen::VectorXd y_t(s);
  for (Eigen::Index a = 0; a < s; ++a) {
    y_t[a] = d.label(T[a]);
    const Eigen::VectorXd xa = d.row_dense(T[a]);
    for (Eigen::Index b = 0; b <= a; ++b) {
      const double q = d.label(T[a]) * d.label(T[b]) * xa.dot(d.row_dense(T[b]));
      gram(a, b) = q;
      gram(b, a) = q;
    }
  }

  // KKT per sign pattern: [Theta y; y^T 0][alpha_T; b] = [1; 0]
  std::vector<bool> pattern(s, true);  // true -> alpha_i >= 0 -> 1/C
  std::set<std::vector<bool>> seen;
  const std::size_t max_iters = std::size_t{1} << std::min<Eigen::Index>(s, 62);
  Eigen::VectorXd a_t(s);
  double b = 0.0;
  for (std::size_t it = 0;; ++it) {
    if (it > max_iters || seen.count(pattern))
      throw OracleFailure("sign-pattern iteration cycled");
    seen.insert(pattern);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
    kkt.topLeftCorner(s, s) = gram;
    for (Eigen::Index a = 0; a < s; ++a)
      kkt(a, a) += pattern[a] ? 1.0 / p.C : 1.0 / p.c;
    kkt.topRightCorner(s, 1) = y_t;
    kkt.bottomLeftCorner(1, s) = y_t.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
    rhs.head(s).setOnes();
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    a_t = sol.head(s);
    b = sol[s];
    std::vector<bool> next(s);
    bool stable = true;
    for (Eigen::Index a = 0; a < s; ++a) {
      next[a] = a_t[a] >= 0.0;
      if (next[a] != pattern[a]) stable = false;
    }
    if (stable) break;
    pattern = std::move(next);
  }
  for (Eigen::Index a = 0; a < s; ++a) out.alpha[T[a]] = a_t[a];
  out.b = b;
  out.objective = dual_objective(d, out.alpha, p);
  return out;
}

struct OracleResult {
  std::vector<Eigen::Index> best_support;
  Eigen::VectorXd best_alpha;
  double best_b = 0.0;
  double best_objective = 0.0;
  std::size_t evaluated_supports = 0;
};

// Exhaustive minimum of D over all supports of size <= s; every size-s set is
// tried, which covers the smaller supports.
inline OracleResult enumerate_global(const Dataset& d, Eigen::Index s,
                                     const Penalties& p) {
  const Eigen::Index m = d.rows();
  if (m > 14 || s > 4)
    throw OracleFailure("instance too large for exhaustive enumeration");
  if (s < 1 || s > m) throw std::invalid_argument("s out of range");

  OracleResult best;
  best.best_objective = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> comb(s);
  for (Eigen::Index i = 0; i < s; ++i) comb[i] = i;
  for (;;) {
    RestrictedSolution sol = solve_restricted(d, comb, p);
    ++best.evaluated_supports;
    if (sol.objective < best.best_objective) {
      best.best_objective = sol.objective;
      best.best_alpha = sol.alpha;
      best.best_b = sol.b;
      best.best_support = comb;
    }
    // next combination in lexicographic order
    Eigen::Index i = s - 1;
    while (i >= 0 && comb[i] == m - s + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (Eigen::Index j = i + 1; j < s; ++j) comb[j] = comb[j - 1] + 1;
  }
  return best;
}

}  // namespace nssvm

#endif  // NSSVM_ORACLE_HPP
