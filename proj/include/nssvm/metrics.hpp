#ifndef NSSVM_METRICS_HPP
#define NSSVM_METRICS_HPP

#include <functional>
#include <future>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nssvm/adaptive.hpp"
#include "nssvm/newton.hpp"

// The reported quantities (ACC, TACC, NSV, TIME, ITER) and the repeated-trial
// benchmark protocol.

namespace nssvm {

struct BenchReport {
  double acc = 0.0;        // training accuracy, percent
  double tacc = 0.0;       // testing accuracy, percent
  Eigen::Index nsv = 0;    // exact nonzeros of alpha
  double nsv_ratio = 0.0;  // NSV / m
  double time_seconds = 0.0;
  Eigen::Index iters = 0;
  Eigen::Index trials = 1;
  Eigen::Index failures = 0;
  std::vector<BenchReport> per_trial;
};

inline BenchReport evaluate(const FitResult& fit, const Dataset& train,
                            const Dataset& test) {
  if (fit.alpha.size() != train.rows())
    throw std::invalid_argument("fit/train dimension mismatch");
  BenchReport r;
  r.acc = accuracy_w(train, fit.w, fit.b);
  r.tacc = test.rows() > 0 ? accuracy_w(test, fit.w, fit.b) : 0.0;
  r.nsv = zero_norm(fit.alpha);
  r.nsv_ratio = static_cast<double>(r.nsv) / static_cast<double>(train.rows());
  r.time_seconds = fit.wall_time;
  r.iters = fit.iters;
  return r;
}

inline BenchReport evaluate(const FitResult& fit, const Dataset& train) {
  BenchReport r;
  r.acc = accuracy_w(train, fit.w, fit.b);
  r.nsv = zero_norm(fit.alpha);
  r.nsv_ratio = static_cast<double>(r.nsv) / static_cast<double>(train.rows());
  r.time_seconds = fit.wall_time;
  r.iters = fit.iters;
  return r;
}

// One benchmark trial: produce data for a seed, fit, report. The fit callback
// is timed by the solver itself (wall time around the solve only).
struct TrialProtocol {
  std::function<SplitDataset(std::uint64_t seed)> make_data;
  std::function<FitResult(const Dataset& train, std::uint64_t seed)> fit;
};

namespace detail {

struct TrialOutcome {
  BenchReport report;
  FitResult fit;
  bool ok = false;
  std::string error;
};

inline TrialOutcome run_one_trial(const TrialProtocol& proto, std::uint64_t seed) {
  TrialOutcome out;
  try {
    SplitDataset data = proto.make_data(seed);
    out.fit = proto.fit(data.train, seed);
    out.report = data.has_test ? evaluate(out.fit, data.train, data.test)
                               : evaluate(out.fit, data.train);
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

inline std::size_t thread_budget() {
  if (const char* env = std::getenv("NSSVM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return 1;
}

}  // namespace detail

// Mean report over successful trials; per-trial entries kept in seed order.
// Failures are counted, never fatal (unless every trial fails).
inline BenchReport run_trials(const TrialProtocol& proto,
                              const std::vector<std::uint64_t>& seeds,
                              bool serial = true,
                              std::vector<FitResult>* fits_out = nullptr) {
  if (seeds.empty()) throw std::invalid_argument("trials must be >= 1");
  std::vector<detail::TrialOutcome> outcomes(seeds.size());
  const std::size_t threads =
      serial ? 1 : std::min(detail::thread_budget(), seeds.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      outcomes[i] = detail::run_one_trial(proto, seeds[i]);
  } else {
    std::vector<std::future<detail::TrialOutcome>> futs;
    futs.reserve(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i)
      futs.push_back(std::async(std::launch::async, detail::run_one_trial,
                                std::cref(proto), seeds[i]));
    for (std::size_t i = 0; i < seeds.size(); ++i) outcomes[i] = futs[i].get();
  }
  BenchReport mean;
  mean.trials = 0;
  for (auto& o : outcomes) {
    if (!o.ok) {
      ++mean.failures;
      continue;
    }
    mean.per_trial.push_back(o.report);
    if (fits_out) fits_out->push_back(std::move(o.fit));
    mean.acc += o.report.acc;
    mean.tacc += o.report.tacc;
    mean.nsv += o.report.nsv;
    mean.nsv_ratio += o.report.nsv_ratio;
    mean.time_seconds += o.report.time_seconds;
    mean.iters += o.report.iters;
    ++mean.trials;
  }
  if (mean.trials == 0) {
    std::string msg = "all trials failed";
    for (auto& o : outcomes)
      if (!o.error.empty()) msg += "; " + o.error;
    throw std::runtime_error(msg);
  }
  const double k = static_cast<double>(mean.trials);
  mean.acc /= k;
  mean.tacc /= k;
  mean.nsv_ratio /= k;
  mean.time_seconds /= k;
  mean.nsv = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(mean.nsv) / k));
  mean.iters = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(mean.iters) / k));
  return mean;
}

inline nlohmann::json report_json(const BenchReport& r) {
  nlohmann::json j{{"acc", r.acc},
                   {"tacc", r.tacc},
                   {"nsv", r.nsv},
                   {"nsv_ratio", r.nsv_ratio},
                   {"time_seconds", r.time_seconds},
                   {"iters", r.iters},
                   {"trials", r.trials},
                   {"failures", r.failures}};
  if (!r.per_trial.empty()) {
    j["per_trial"] = nlohmann::json::array();
    for (const auto& t : r.per_trial) j["per_trial"].push_back(report_json(t));
  }
  return j;
}

// CSV: one row per trial plus a final mean row.
inline void report_csv(const BenchReport& r, std::ostream& out) {
  out << "trial,acc,tacc,nsv,nsv_ratio,time_seconds,iters\n";
  char buf[256];
  auto row = [&](const std::string& name, const BenchReport& t) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%lld,%.17g,%.17g,%lld\n",
                  name.c_str(), t.acc, t.tacc, static_cast<long long>(t.nsv),
                  t.nsv_ratio, t.time_seconds, static_cast<long long>(t.iters));
    out << buf;
  };
  for (std::size_t i = 0; i < r.per_trial.size(); ++i)
    row(std::to_string(i), r.per_trial[i]);
  row("mean", r);
}

}  // namespace nssvm

#endif  // NSSVM_METRICS_HPP
