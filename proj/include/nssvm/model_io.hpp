#ifndef NSSVM_MODEL_IO_HPP
#define NSSVM_MODEL_IO_HPP

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nssvm/newton.hpp"

// Model persistence: JSON with only the support coordinates of alpha; the
// model stays small because the support is small.

namespace nssvm {

struct Model {
  Eigen::Index n = 0;
  double b = 0.0;
  std::vector<Eigen::Index> support;
  std::vector<double> alpha;  // on support only
  Eigen::VectorXd w;
  nlohmann::json config;

  double decision(const Dataset& d, Eigen::Index i) const {
    return d.row_dot(i, w) + b;
  }
  double predict(const Dataset& d, Eigen::Index i) const {
    return decision(d, i) > 0.0 ? 1.0 : -1.0;
  }
};

inline Model model_from_fit(const FitResult& fit, Eigen::Index n,
                            nlohmann::json config) {
  Model m;
  m.n = n;
  m.b = fit.b;
  m.w = fit.w;
  m.support = fit.support.indices;
  m.alpha.reserve(m.support.size());
  for (Eigen::Index i : m.support) m.alpha.push_back(fit.alpha[i]);
  m.config = std::move(config);
  return m;
}

inline void save_model(const Model& m, std::ostream& out) {
  nlohmann::json j;
  j["n"] = m.n;
  j["b"] = m.b;
  j["support"] = m.support;
  j["alpha"] = m.alpha;
  j["w"] = std::vector<double>(m.w.data(), m.w.data() + m.w.size());
  j["config"] = m.config;
  out << j.dump(2) << '\n';
}

inline Model load_model(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in);
  Model m;
  m.n = j.at("n").get<Eigen::Index>();
  m.b = j.at("b").get<double>();
  m.support = j.at("support").get<std::vector<Eigen::Index>>();
  m.alpha = j.at("alpha").get<std::vector<double>>();
  auto wv = j.at("w").get<std::vector<double>>();
  m.w = Eigen::Map<Eigen::VectorXd>(wv.data(), static_cast<Eigen::Index>(wv.size()));
  if (j.contains("config")) m.config = j["config"];
  if (m.w.size() != m.n) throw std::runtime_error("model w/n mismatch");
  if (m.support.size() != m.alpha.size())
    throw std::runtime_error("model support/alpha mismatch");
  return m;
}

}  // namespace nssvm

#endif  // NSSVM_MODEL_IO_HPP
