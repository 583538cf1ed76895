#ifndef NSSVM_BENCH_HPP
#define NSSVM_BENCH_HPP

#include <optional>
#include <string>

#include "nssvm/metrics.hpp"

// Named parameter profiles and the repeated-trial protocols used by both the
// CLI and the acceptance suite.

namespace nssvm {

struct Profile {
  double C = 0.25;
  double beta = 1.0;  // s_0 = s(beta)
  std::string name;
};

// synth-small: C=0.25, s(0.5)   (synthetic, m <= 1e4)
// synth-large: C=0.25, s(1)     (synthetic, m > 1e4)
// real-default: C=0.25, s(0.05)
// real-a: C=0.25, s(0.2)        (the a5a-a9a family)
// real-heavy: C=log2(m), s(10)  (C resolved at fit time)
inline std::optional<Profile> lookup_profile(const std::string& name) {
  if (name == "synth-small") return Profile{0.25, 0.5, name};
  if (name == "synth-large") return Profile{0.25, 1.0, name};
  if (name == "real-default") return Profile{0.25, 0.05, name};
  if (name == "real-a") return Profile{0.25, 0.2, name};
  if (name == "real-heavy") return Profile{0.0, 10.0, name};  // C from m
  return std::nullopt;
}

inline double profile_C(const Profile& p, Eigen::Index m) {
  return p.C > 0.0 ? p.C : std::log2(static_cast<double>(m));
}

inline AdaptiveConfig make_adaptive_config(const Dataset& train,
                                           const Profile& profile,
                                           double sigma = 1.1) {
  const Eigen::Index s0 = default_s0(profile.beta, train.rows(), train.cols());
  SolverConfig base = default_config(train, s0);
  const double C = profile_C(profile, train.rows());
  base.penalties = Penalties(C, 0.01 * C);
  AdaptiveConfig cfg(base);
  cfg.sigma = sigma;
  cfg.beta = profile.beta;
  return cfg;
}

// The synthetic-benchmark protocol: per trial, generate the two-Gaussian data
// with m training samples and fit the adaptive solver under the profile.
inline TrialProtocol synthetic_protocol(Eigen::Index m, const Profile& profile,
                                        double sigma = 1.1) {
  TrialProtocol proto;
  proto.make_data = [m](std::uint64_t seed) { return gen_gaussian_2d(m, seed); };
  proto.fit = [profile, sigma](const Dataset& train, std::uint64_t) {
    const AdaptiveConfig cfg = make_adaptive_config(train, profile, sigma);
    return solve_adaptive(train, cfg, default_start(train));
  };
  return proto;
}

inline std::vector<std::uint64_t> trial_seeds(std::uint64_t seed,
                                              Eigen::Index trials) {
  std::vector<std::uint64_t> seeds(trials);
  for (Eigen::Index i = 0; i < trials; ++i)
    seeds[i] = seed + static_cast<std::uint64_t>(i) + 1;
  return seeds;
}

}  // namespace nssvm

#endif  // NSSVM_BENCH_HPP
