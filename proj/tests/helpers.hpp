#ifndef NSSVM_TESTS_HELPERS_HPP
#define NSSVM_TESTS_HELPERS_HPP

#include <Eigen/Core>
#include <random>

#include "nssvm/dataset.hpp"

namespace testutil {

// Random dense dataset with Gaussian features and mixed +/-1 labels.
inline nssvm::Dataset random_dataset(Eigen::Index m, Eigen::Index n,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> X(m, n);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) X(i, j) = gauss(rng);
    y[i] = (i % 2 == 0) ? 1.0 : -1.0;  // guarantee both classes
  }
  // shuffle labels a bit but keep both classes present
  for (Eigen::Index i = 2; i < m; ++i)
    if (rng() % 3 == 0) y[i] = -y[i];
  return nssvm::Dataset::dense(std::move(X), std::move(y));
}

inline Eigen::VectorXd random_vector(Eigen::Index m, std::uint64_t seed,
                                     double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, scale);
  Eigen::VectorXd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = gauss(rng);
  return v;
}

// Dense n x m matrix Q = [y_1 x_1, ..., y_m x_m] built the obvious way.
inline Eigen::MatrixXd dense_Q(const nssvm::Dataset& d) {
  Eigen::MatrixXd X = d.to_dense_matrix();
  Eigen::MatrixXd Q(d.cols(), d.rows());
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    Q.col(i) = d.label(i) * X.row(i).transpose();
  return Q;
}

}  // namespace testutil

#endif
