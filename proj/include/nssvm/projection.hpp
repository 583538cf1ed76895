#ifndef NSSVM_PROJECTION_HPP
#define NSSVM_PROJECTION_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace nssvm {

// Sorted working index set of cardinality s.
struct ActiveSet {
  std::vector<Eigen::Index> indices;  // strictly increasing

  Eigen::Index size() const { return static_cast<Eigen::Index>(indices.size()); }
  bool contains(Eigen::Index i) const {
    return std::binary_search(indices.begin(), indices.end(), i);
  }
  bool operator==(const ActiveSet& o) const { return indices == o.indices; }
};

// The s indices of largest |v_i|; ties broken by smaller index. Output sorted.
inline ActiveSet top_s_indices(const Eigen::VectorXd& v, Eigen::Index s) {
  const Eigen::Index m = v.size();
  if (s < 1 || s > m) throw std::invalid_argument("s out of range");
  std::vector<Eigen::Index> idx(m);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  auto bigger = [&](Eigen::Index a, Eigen::Index b) {
    const double fa = std::abs(v[a]), fb = std::abs(v[b]);
    return fa > fb || (fa == fb && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + (s - 1), idx.end(), bigger);
  idx.resize(s);
  std::sort(idx.begin(), idx.end());
  return ActiveSet{std::move(idx)};
}

// Keep the s largest-magnitude entries, zero the rest.
inline Eigen::VectorXd hard_threshold(const Eigen::VectorXd& v, Eigen::Index s) {
  ActiveSet t = top_s_indices(v, s);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (Eigen::Index i : t.indices) out[i] = v[i];
  return out;
}

// Whether T belongs to the family of top-s sets of v, with a small float
// tolerance on tied magnitudes.
inline bool is_member_Ts(const ActiveSet& T, const Eigen::VectorXd& v) {
  double min_in = std::numeric_limits<double>::infinity();
  for (Eigen::Index i : T.indices) min_in = std::min(min_in, std::abs(v[i]));
  double max_out = 0.0;
  std::size_t pos = 0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (pos < T.indices.size() && T.indices[pos] == j) {
      ++pos;
      continue;
    }
    max_out = std::max(max_out, std::abs(v[j]));
  }
  return min_in >= max_out - 1e-12;
}

}  // namespace nssvm

#endif  // NSSVM_PROJECTION_HPP
