#ifndef NSSVM_DATASET_HPP
#define NSSVM_DATASET_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace nssvm {

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

// Problem instance: m samples, n features, labels in {-1,+1} once binarized.
// Rows are stored densely or in CSR form depending on the nonzero density;
// both back the same row-level kernels, so callers never branch on storage.
class Dataset {
public:
  using Matrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Dataset() = default;

  static Dataset dense(Matrix features, Eigen::VectorXd labels) {
    if (features.rows() != labels.size())
      throw std::invalid_argument("feature/label count mismatch");
    if (features.rows() < 1 || features.cols() < 1)
      throw std::invalid_argument("dataset must have m >= 1, n >= 1");
    Dataset d;
    d.m_ = features.rows();
    d.n_ = features.cols();
    d.dense_ = std::move(features);
    d.labels_ = std::move(labels);
    d.sparse_ = false;
    return d;
  }

  static Dataset csr(Eigen::Index m, Eigen::Index n,
                     std::vector<std::int64_t> row_ptr,
                     std::vector<std::int32_t> cols, std::vector<double> vals,
                     Eigen::VectorXd labels) {
    if (m < 1 || n < 1) throw std::invalid_argument("dataset must have m >= 1, n >= 1");
    if (labels.size() != m) throw std::invalid_argument("feature/label count mismatch");
    if (static_cast<Eigen::Index>(row_ptr.size()) != m + 1)
      throw std::invalid_argument("bad row_ptr");
    Dataset d;
    d.m_ = m;
    d.n_ = n;
    d.row_ptr_ = std::move(row_ptr);
    d.cols_ = std::move(cols);
    d.vals_ = std::move(vals);
    d.labels_ = std::move(labels);
    d.sparse_ = true;
    return d;
  }

  Eigen::Index rows() const { return m_; }
  Eigen::Index cols() const { return n_; }
  bool is_sparse() const { return sparse_; }
  const Eigen::VectorXd& labels() const { return labels_; }
  double label(Eigen::Index i) const { return labels_[i]; }

  // Rows touched by row_dot/row_axpy since the last reset; used by tests to
  // pin the O(sn) cost of support-restricted kernels.
  static std::size_t& row_touch_counter() {
    thread_local std::size_t counter = 0;
    return counter;
  }

  double row_dot(Eigen::Index i, const Eigen::VectorXd& w) const {
    ++row_touch_counter();
    if (!sparse_) return dense_.row(i).dot(w.transpose());
    double acc = 0.0;
    for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      acc += vals_[k] * w[cols_[k]];
    return acc;
  }

  // out += coef * x_i
  void row_axpy(Eigen::Index i, double coef, Eigen::VectorXd& out) const {
    ++row_touch_counter();
    if (!sparse_) {
      out.noalias() += coef * dense_.row(i).transpose();
      return;
    }
    for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      out[cols_[k]] += coef * vals_[k];
  }

  Eigen::VectorXd row_dense(Eigen::Index i) const {
    if (!sparse_) return dense_.row(i).transpose();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n_);
    for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      r[cols_[k]] = vals_[k];
    return r;
  }

  Matrix to_dense_matrix() const {
    if (!sparse_) return dense_;
    Matrix x = Matrix::Zero(m_, n_);
    for (Eigen::Index i = 0; i < m_; ++i)
      for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        x(i, cols_[k]) = vals_[k];
    return x;
  }

  bool has_binary_labels() const {
    for (Eigen::Index i = 0; i < m_; ++i)
      if (labels_[i] != 1.0 && labels_[i] != -1.0) return false;
    return true;
  }

  Dataset with_labels(Eigen::VectorXd labels) const {
    if (labels.size() != m_) throw std::invalid_argument("label count mismatch");
    Dataset d = *this;
    d.labels_ = std::move(labels);
    return d;
  }

  bool operator==(const Dataset& other) const {
    if (m_ != other.m_ || n_ != other.n_) return false;
    if (labels_ != other.labels_) return false;
    return to_dense_matrix() == other.to_dense_matrix();
  }

private:
  Eigen::Index m_ = 0;
  Eigen::Index n_ = 0;
  Eigen::VectorXd labels_;
  bool sparse_ = false;
  Matrix dense_;
  std::vector<std::int64_t> row_ptr_;
  std::vector<std::int32_t> cols_;
  std::vector<double> vals_;
};

struct SplitDataset {
  Dataset train;
  Dataset test;  // may be empty (test.rows() == 0 represented by default Dataset)
  bool has_test = false;
};

namespace detail {

// CSR once nonzero density drops below 25%; pure storage decision.
inline constexpr double kSparseDensityThreshold = 0.25;

inline Dataset from_triplets(Eigen::Index m, Eigen::Index n,
                             const std::vector<std::int64_t>& row_ptr,
                             const std::vector<std::int32_t>& cols,
                             const std::vector<double>& vals,
                             Eigen::VectorXd labels) {
  const double density =
      static_cast<double>(vals.size()) / (static_cast<double>(m) * n);
  if (density < kSparseDensityThreshold)
    return Dataset::csr(m, n, row_ptr, cols, vals, std::move(labels));
  Dataset::Matrix x = Dataset::Matrix::Zero(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      x(i, cols[k]) = vals[k];
  return Dataset::dense(std::move(x), std::move(labels));
}

inline double parse_double(std::string_view tok, std::size_t line,
                           const char* what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || p != last)
    throw ParseError(line, std::string("malformed ") + what + " token '" +
                               std::string(tok) + "'");
  if (!std::isfinite(v))
    throw ParseError(line, std::string("non-finite ") + what);
  return v;
}

inline long parse_index(std::string_view tok, std::size_t line) {
  long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError(line, "malformed index token '" + std::string(tok) + "'");
  return v;
}

}  // namespace detail

// libsvm text format: "label idx:val idx:val ...", 1-based strictly
// increasing indices per line. n is the largest index seen.
inline Dataset parse_libsvm(std::istream& in) {
  std::vector<std::int64_t> row_ptr{0};
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
  std::vector<double> labels;
  Eigen::Index n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      std::size_t start = pos;
      while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      return std::string_view(line).substr(start, pos - start);
    };
    std::string_view label_tok = next_token();
    if (label_tok.empty()) continue;  // blank line
    // accept "+1" spelling, from_chars rejects a leading '+'
    std::string_view lt = label_tok;
    if (!lt.empty() && lt.front() == '+') lt.remove_prefix(1);
    labels.push_back(detail::parse_double(lt, lineno, "label"));
    long prev_idx = 0;
    for (;;) {
      std::string_view tok = next_token();
      if (tok.empty()) break;
      std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError(lineno, "expected idx:val, got '" + std::string(tok) + "'");
      long idx = detail::parse_index(tok.substr(0, colon), lineno);
      if (idx <= prev_idx)
        throw ParseError(lineno, "indices must be 1-based strictly increasing");
      prev_idx = idx;
      double v = detail::parse_double(tok.substr(colon + 1), lineno, "value");
      cols.push_back(static_cast<std::int32_t>(idx - 1));
      vals.push_back(v);
      n = std::max<Eigen::Index>(n, idx);
    }
    row_ptr.push_back(static_cast<std::int64_t>(vals.size()));
  }
  if (labels.empty()) throw ParseError(0, "empty stream");
  if (n == 0) n = 1;  // all-zero rows still need one feature column
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(labels.data(), labels.size());
  return detail::from_triplets(static_cast<Eigen::Index>(labels.size()), n,
                               row_ptr, cols, vals, std::move(y));
}

// Emits "%+d idx:%.17g" with 1-based indices, skipping zeros.
inline void serialize_libsvm(const Dataset& d, std::ostream& out) {
  char buf[64];
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    std::snprintf(buf, sizeof(buf), "%+d",
                  static_cast<int>(std::llround(d.label(i))));
    out << buf;
    Eigen::VectorXd row = d.row_dense(i);
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (row[j] == 0.0) continue;
      std::snprintf(buf, sizeof(buf), " %lld:%.17g",
                    static_cast<long long>(j + 1), row[j]);
      out << buf;
    }
    out << '\n';
  }
}

// label +1 where the original label equals 1, else -1
inline Dataset binarize_labels(const Dataset& d) {
  Eigen::VectorXd y(d.rows());
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    y[i] = d.label(i) == 1.0 ? 1.0 : -1.0;
  return d.with_labels(std::move(y));
}

// Feature-wise affine map onto [-1,1]; constant columns map to 0.
inline Dataset scale_features(const Dataset& d) {
  const Eigen::Index m = d.rows(), n = d.cols();
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  Dataset::Matrix x = d.to_dense_matrix();
  for (Eigen::Index j = 0; j < n; ++j) {
    lo[j] = x.col(j).minCoeff();
    hi[j] = x.col(j).maxCoeff();
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (hi[j] > lo[j]) {
      const double scale = 2.0 / (hi[j] - lo[j]);
      for (Eigen::Index i = 0; i < m; ++i)
        x(i, j) = scale * (x(i, j) - lo[j]) - 1.0;
    } else {
      x.col(j).setZero();
    }
  }
  // rebuild through the density rule: scaling can densify or sparsify
  std::vector<std::int64_t> row_ptr{0};
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      if (x(i, j) != 0.0) {
        cols.push_back(static_cast<std::int32_t>(j));
        vals.push_back(x(i, j));
      }
    row_ptr.push_back(static_cast<std::int64_t>(vals.size()));
  }
  return detail::from_triplets(m, n, row_ptr, cols, vals, d.labels());
}

namespace detail {

inline Dataset take_rows(const Dataset& d, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd y(idx.size());
  std::vector<std::int64_t> row_ptr{0};
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    y[static_cast<Eigen::Index>(r)] = d.label(idx[r]);
    Eigen::VectorXd row = d.row_dense(idx[r]);
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      if (row[j] != 0.0) {
        cols.push_back(static_cast<std::int32_t>(j));
        vals.push_back(row[j]);
      }
    row_ptr.push_back(static_cast<std::int64_t>(vals.size()));
  }
  return from_triplets(static_cast<Eigen::Index>(idx.size()), d.cols(), row_ptr,
                       cols, vals, std::move(y));
}

}  // namespace detail

// Deterministic shuffled split: first ceil(fraction*m) rows of the permuted
// order go to train. seed 0 keeps the original row order.
inline SplitDataset split_train_test(const Dataset& d, double train_fraction,
                                     std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw std::invalid_argument("train_fraction must be in (0,1]");
  const Eigen::Index m = d.rows();
  std::vector<Eigen::Index> perm(m);
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
  }
  const auto ntrain = static_cast<Eigen::Index>(
      std::ceil(train_fraction * static_cast<double>(m)));
  std::vector<Eigen::Index> tr(perm.begin(), perm.begin() + ntrain);
  std::vector<Eigen::Index> te(perm.begin() + ntrain, perm.end());
  SplitDataset out;
  out.train = detail::take_rows(d, tr);
  out.has_test = !te.empty();
  if (out.has_test) out.test = detail::take_rows(d, te);
  return out;
}

// Two Gaussian classes in R^2: positives N((0.5,-3), diag(0.2,3)), negatives
// N((-0.5,3), diag(0.2,3)). 2*m_per_class samples total, split evenly into
// train/test with equal class counts in each half.
inline SplitDataset gen_gaussian_2d(Eigen::Index m_per_class, std::uint64_t seed) {
  if (m_per_class < 1) throw std::invalid_argument("m_per_class must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g1(0.0, std::sqrt(0.2));
  std::normal_distribution<double> g2(0.0, std::sqrt(3.0));
  const Eigen::Index half = m_per_class;  // samples per split half
  const Eigen::Index pos_half = half / 2, neg_half = half - half / 2;
  auto make_half = [&](Eigen::Index npos, Eigen::Index nneg) {
    Dataset::Matrix x(npos + nneg, 2);
    Eigen::VectorXd y(npos + nneg);
    for (Eigen::Index i = 0; i < npos; ++i) {
      x(i, 0) = 0.5 + g1(rng);
      x(i, 1) = -3.0 + g2(rng);
      y[i] = 1.0;
    }
    for (Eigen::Index i = 0; i < nneg; ++i) {
      x(npos + i, 0) = -0.5 + g1(rng);
      x(npos + i, 1) = 3.0 + g2(rng);
      y[npos + i] = -1.0;
    }
    return Dataset::dense(std::move(x), std::move(y));
  };
  SplitDataset out;
  out.train = make_half(pos_half, neg_half);
  out.test = make_half(m_per_class - pos_half, m_per_class - neg_half);
  out.has_test = true;
  return out;
}

}  // namespace nssvm

#endif  // NSSVM_DATASET_HPP
