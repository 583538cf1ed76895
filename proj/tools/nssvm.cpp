// Command-line front end: train, predict, bench, synth, certify.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <nssvm/nssvm.hpp>

namespace {

using namespace nssvm;

struct CommonOpts {
  double C = 0.25;
  double c = -1.0;  // < 0 -> 0.01 * C
  double eta = -1.0;  // < 0 -> 1/m
  double eps = -1.0;  // < 0 -> max(sqrt(m), sqrt(n)) * 1e-6
  double beta = -1.0;  // < 0 -> from profile
  double sigma = 1.1;
  long s0 = -1;  // < 0 -> s(beta)
  long max_it = 1000;
  long fixed_s = -1;
  bool no_tune = false;
  bool no_binarize = false;
  bool no_scale = false;
  std::string profile = "real-default";
};

void add_solver_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--C", o.C, "penalty on margin violations (default 0.25)");
  cmd->add_option("--c", o.c, "penalty on satisfied margins (default 0.01*C)");
  cmd->add_option("--eta", o.eta, "stationarity step (default 1/m)");
  cmd->add_option("--eps", o.eps, "residual tolerance (default max(sqrt(m),sqrt(n))*1e-6)");
  cmd->add_option("--beta", o.beta, "sparsity initializer factor for s0 = s(beta)");
  cmd->add_option("--sigma", o.sigma, "sparsity growth factor (default 1.1)");
  cmd->add_option("--s0", o.s0, "initial sparsity level (overrides --beta)");
  cmd->add_option("--max-it", o.max_it, "iteration cap (default 1000)");
  cmd->add_option("--fixed-s", o.fixed_s, "sparsity level for the non-adaptive path");
  cmd->add_flag("--no-tune", o.no_tune, "disable sparsity tuning (requires --fixed-s or --s0)");
  cmd->add_option("--profile", o.profile,
                  "named preset: synth-small | synth-large | real-default | real-a | real-heavy");
}

Dataset load_data(const std::string& path, const CommonOpts& o) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  Dataset d = parse_libsvm(in);
  if (!o.no_binarize) d = binarize_labels(d);
  if (!o.no_scale) d = scale_features(d);
  if (!d.has_binary_labels())
    throw std::runtime_error("labels are not in {-1,+1}; drop --no-binarize");
  return d;
}

AdaptiveConfig build_config(const Dataset& train, const CommonOpts& o) {
  auto prof = lookup_profile(o.profile);
  if (!prof) throw std::runtime_error("unknown profile '" + o.profile + "'");
  Profile p = *prof;
  if (o.beta >= 0.0) p.beta = o.beta;
  AdaptiveConfig cfg = make_adaptive_config(train, p, o.sigma);
  double C = o.C, c = o.c < 0.0 ? 0.01 * o.C : o.c;
  cfg.base.penalties = Penalties(C, c);
  if (o.eta > 0.0) cfg.base.eta = o.eta;
  if (o.eps > 0.0) cfg.base.eps = o.eps;
  if (o.s0 > 0) cfg.base.s = o.s0;
  if (o.fixed_s > 0) cfg.base.s = o.fixed_s;
  cfg.base.max_iter = o.max_it;
  cfg.max_it = o.max_it;
  return cfg;
}

FitResult run_fit(const Dataset& train, const CommonOpts& o) {
  AdaptiveConfig cfg = build_config(train, o);
  if (o.no_tune || o.fixed_s > 0)
    return solve_fixed_s(train, cfg.base, default_start(train));
  return solve_adaptive(train, cfg, default_start(train));
}

void print_report(const BenchReport& r, bool with_test) {
  std::printf("ACC  %.2f%%\n", r.acc);
  if (with_test) std::printf("TACC %.2f%%\n", r.tacc);
  std::printf("NSV  %lld (NSV/m = %.3e)\n", static_cast<long long>(r.nsv), r.nsv_ratio);
  std::printf("TIME %.3fs\nITER %lld\n", r.time_seconds, static_cast<long long>(r.iters));
}

nlohmann::json config_json(const CommonOpts& o, const AdaptiveConfig& cfg,
                           bool scaled, bool binarized) {
  return nlohmann::json{{"C", cfg.base.penalties.C}, {"c", cfg.base.penalties.c},
                        {"eta", cfg.base.eta},       {"eps", cfg.base.eps},
                        {"s0", cfg.base.s},          {"sigma", cfg.sigma},
                        {"max_it", cfg.max_it},      {"profile", o.profile},
                        {"scaled", scaled},          {"binarized", binarized}};
}

int cmd_train(const std::string& data_path, const std::string& model_path,
              const CommonOpts& o) {
  Dataset train = load_data(data_path, o);
  FitResult fit = run_fit(train, o);
  AdaptiveConfig cfg = build_config(train, o);
  Model model = model_from_fit(fit, train.cols(),
                               config_json(o, cfg, !o.no_scale, !o.no_binarize));
  std::ofstream out(model_path);
  if (!out) throw std::runtime_error("cannot write '" + model_path + "'");
  save_model(model, out);
  print_report(evaluate(fit, train), false);
  if (!fit.converged)
    std::fprintf(stderr, "warning: not converged (residual %.3e)\n",
                 fit.residual_history.empty() ? 0.0 : fit.residual_history.back());
  return fit.converged ? 0 : 2;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, CommonOpts o) {
  std::ifstream min(model_path);
  if (!min) throw std::runtime_error("cannot open '" + model_path + "'");
  Model model = load_model(min);
  if (model.config.contains("scaled")) o.no_scale = !model.config["scaled"].get<bool>();
  if (model.config.contains("binarized")) o.no_binarize = !model.config["binarized"].get<bool>();
  Dataset d = load_data(data_path, o);
  if (d.cols() > model.n)
    throw std::runtime_error("feature dimension mismatch: data has " +
                             std::to_string(d.cols()) + " features, model has " +
                             std::to_string(model.n));
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write '" + out_path + "'");
    out = &file;
  }
  // data with fewer columns than the model just lacks trailing features
  const Eigen::VectorXd w = model.w.head(d.cols());
  Eigen::Index right = 0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    const double p = d.row_dot(i, w) + model.b > 0.0 ? 1.0 : -1.0;
    *out << (p > 0 ? "+1" : "-1") << '\n';
    if (p == d.label(i)) ++right;
  }
  std::printf("TACC %.2f%%\n",
              100.0 * static_cast<double>(right) / static_cast<double>(d.rows()));
  return 0;
}

void write_report(const BenchReport& report, const std::string& format,
                  const std::string& out_path) {
  std::ostringstream body;
  if (format == "csv")
    report_csv(report, body);
  else
    body << report_json(report).dump(2) << '\n';
  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << body.str();
  }
}

// Parameter grids for --sweep; one benchmark per value, CSV to stdout/file.
int cmd_bench_sweep(const std::string& param, bool synthetic, long m,
                    const std::string& data_path, long trials, std::uint64_t seed,
                    bool serial, const CommonOpts& base_opts,
                    const std::string& out_path) {
  std::vector<double> values;
  if (param == "eta")
    values = {1e-2, 1e-1, 1.0, 1e1, 1e2};  // multiples of the 1/m default
  else if (param == "C")
    values = {1.0 / 64, 1.0 / 16, 0.25, 1.0, 4.0, 16.0, 64.0};
  else if (param == "s0")
    values = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};  // beta values
  else if (param == "sigma")
    values = {1.05, 1.1, 1.2, 1.5, 2.0};
  else
    throw std::runtime_error("unknown sweep parameter '" + param +
                             "' (expected eta, C, s0 or sigma)");

  std::optional<Dataset> loaded;
  if (!synthetic) loaded = load_data(data_path, base_opts);
  std::ostringstream body;
  body << "param,value,acc,tacc,nsv,nsv_ratio,time_seconds,iters,failures\n";
  for (double v : values) {
    CommonOpts o = base_opts;
    if (param == "C") {
      o.C = v;
      o.c = -1.0;
    } else if (param == "s0") {
      o.beta = v;
    } else if (param == "sigma") {
      o.sigma = v;
    }
    TrialProtocol proto;
    if (synthetic) {
      proto.make_data = [m](std::uint64_t s) { return gen_gaussian_2d(m, s); };
    } else {
      Dataset d = *loaded;
      proto.make_data = [d](std::uint64_t s) { return split_train_test(d, 0.9, s); };
    }
    const double eta_mult = param == "eta" ? v : 1.0;
    proto.fit = [o, eta_mult](const Dataset& train, std::uint64_t) {
      CommonOpts local = o;
      AdaptiveConfig cfg = build_config(train, local);
      cfg.base.eta *= eta_mult;
      if (local.no_tune || local.fixed_s > 0)
        return solve_fixed_s(train, cfg.base, default_start(train));
      return solve_adaptive(train, cfg, default_start(train));
    };
    BenchReport r = run_trials(proto, trial_seeds(seed, trials), serial);
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%lld,%.17g,%.17g,%lld,%lld\n",
                  param.c_str(), v, r.acc, r.tacc, static_cast<long long>(r.nsv),
                  r.nsv_ratio, r.time_seconds, static_cast<long long>(r.iters),
                  static_cast<long long>(r.failures));
    body << buf;
  }
  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << body.str();
  }
  return 0;
}

int cmd_bench(bool synthetic, long m, const std::string& data_path,
              const std::string& test_path, long trials, std::uint64_t seed,
              bool serial, const std::string& format, const std::string& out_path,
              CommonOpts o, bool profile_given) {
  TrialProtocol proto;
  if (synthetic) {
    if (m < 1) throw std::runtime_error("--synthetic requires --m");
    if (!profile_given) o.profile = m > 10000 ? "synth-large" : "synth-small";
    proto.make_data = [m](std::uint64_t s) { return gen_gaussian_2d(m, s); };
  } else {
    Dataset d = load_data(data_path, o);
    if (!test_path.empty()) {
      Dataset t = load_data(test_path, o);
      proto.make_data = [d, t](std::uint64_t) {
        return SplitDataset{d, t, true};
      };
    } else {
      proto.make_data = [d](std::uint64_t s) { return split_train_test(d, 0.9, s); };
    }
  }
  proto.fit = [o](const Dataset& train, std::uint64_t) { return run_fit(train, o); };
  BenchReport report = run_trials(proto, trial_seeds(seed, trials), serial);
  write_report(report, format, out_path);
  return 0;  // run_trials throws when every trial fails
}

int cmd_synth(long m, std::uint64_t seed, const std::string& train_path,
              const std::string& test_path) {
  SplitDataset data = gen_gaussian_2d(m, seed);
  std::ofstream train_out(train_path);
  if (!train_out) throw std::runtime_error("cannot write '" + train_path + "'");
  serialize_libsvm(data.train, train_out);
  if (!test_path.empty()) {
    std::ofstream test_out(test_path);
    if (!test_out) throw std::runtime_error("cannot write '" + test_path + "'");
    serialize_libsvm(data.test, test_out);
  }
  return 0;
}

int cmd_certify(const std::string& data_path, const std::string& model_path,
                const CommonOpts& o) {
  Dataset d = load_data(data_path, o);
  DualIterate z;
  SolverConfig cfg;
  if (!model_path.empty()) {
    std::ifstream min(model_path);
    if (!min) throw std::runtime_error("cannot open '" + model_path + "'");
    Model model = load_model(min);
    z.alpha = Eigen::VectorXd::Zero(d.rows());
    for (std::size_t k = 0; k < model.support.size(); ++k) {
      if (model.support[k] >= d.rows())
        throw std::runtime_error("model support index out of range for this dataset");
      z.alpha[model.support[k]] = model.alpha[k];
    }
    z.b = model.b;
    CommonOpts local = o;
    AdaptiveConfig acfg = build_config(d, local);
    cfg = acfg.base;
    cfg.s = o.fixed_s > 0 ? o.fixed_s
                          : std::max<Eigen::Index>(1, zero_norm(z.alpha));
  } else {
    CommonOpts local = o;
    if (local.fixed_s <= 0 && local.s0 <= 0)
      local.fixed_s = std::min<long>(d.rows(), 2);
    AdaptiveConfig acfg = build_config(d, local);
    cfg = acfg.base;
    FitResult fit = solve_fixed_s(d, cfg, default_start(d));
    z.alpha = fit.alpha;
    z.b = fit.b;
  }

  StationarityReport r = check_eta_stationarity(d, z, cfg);
  const Eigen::VectorXd g = grad_g(d, z, cfg.penalties);
  std::printf("||g_S||                 = %.6e  (%s)\n", r.grad_support_norm,
              r.pass_grad ? "ok" : "VIOLATED");
  std::printf("eta*max|g_off|          = %.6e vs ||alpha||_[s] = %.6e  (%s)\n",
              r.scaled_offsupport_max, r.alpha_sth_magnitude,
              r.pass_threshold ? "ok" : "VIOLATED");
  std::printf("||alpha||_0             = %lld <= s = %lld  (%s)\n",
              static_cast<long long>(r.cardinality), static_cast<long long>(cfg.s),
              r.pass_sparsity ? "ok" : "VIOLATED");
  std::printf("<alpha,y>               = %.6e  (%s)\n", r.feasibility,
              r.pass_feasibility ? "ok" : "VIOLATED");
  std::printf("eta*                    = %.6e\n", eta_star(z, g, cfg.s));

  if (d.rows() <= 14 && cfg.s <= 4) {
    OracleResult oracle = enumerate_global(d, cfg.s, cfg.penalties);
    const double gap = dual_objective(d, z.alpha, cfg.penalties) - oracle.best_objective;
    std::printf("oracle objective gap    = %.6e (over %zu supports)\n", gap,
                oracle.evaluated_supports);
  } else {
    std::printf("oracle check skipped: instance too large (m=%lld, s=%lld)\n",
                static_cast<long long>(d.rows()), static_cast<long long>(cfg.s));
  }
  std::printf("eta-stationary: %s\n", r.pass() ? "PASS" : "FAIL");
  return r.pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-dual Newton SVM trainer"};
  app.require_subcommand(1);

  CommonOpts opt;
  std::string data_path, test_path, model_path = "model.json", out_path;
  std::string format = "json", sweep;
  long m = -1, trials = 1;
  std::uint64_t seed = 0;
  bool synthetic = false, serial = false;

  auto* train = app.add_subcommand("train", "fit a model on a libsvm file");
  train->add_option("--data", data_path, "training file (libsvm format)")->required();
  train->add_option("--model", model_path, "output model path (default model.json)");
  train->add_flag("--no-binarize", opt.no_binarize, "keep labels as-is");
  train->add_flag("--no-scale", opt.no_scale, "skip feature scaling to [-1,1]");
  add_solver_flags(train, opt);

  auto* predict = app.add_subcommand("predict", "predict labels with a saved model");
  predict->add_option("--model", model_path, "model path")->required();
  predict->add_option("--data", data_path, "input file (libsvm format)")->required();
  predict->add_option("--out", out_path, "write labels here instead of stdout");

  auto* bench = app.add_subcommand("bench", "repeated-trial benchmark");
  bench->add_flag("--synthetic", synthetic, "two-Gaussian synthetic protocol");
  bench->add_option("--m", m, "training samples per synthetic trial");
  bench->add_option("--data", data_path, "dataset file (libsvm format)");
  bench->add_option("--test", test_path, "held-out test file");
  bench->add_option("--trials", trials, "number of trials (default 1)");
  bench->add_option("--seed", seed, "base seed (trial i uses seed+i+1)");
  bench->add_option("--format", format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  bench->add_option("--out", out_path, "report path (default stdout)");
  bench->add_flag("--serial", serial, "force single-threaded, bit-reproducible trials");
  bench->add_option("--sweep", sweep, "emit a CSV sweep over eta | C | s0 | sigma");
  bench->add_flag("--no-binarize", opt.no_binarize, "keep labels as-is");
  bench->add_flag("--no-scale", opt.no_scale, "skip feature scaling to [-1,1]");
  add_solver_flags(bench, opt);

  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  synth->add_option("--m", m, "training samples (test half gets the same)")->required();
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--train-out", data_path, "training output path")->required();
  synth->add_option("--test-out", test_path, "test output path (optional)");

  auto* certify = app.add_subcommand("certify", "stationarity / oracle certification");
  certify->add_option("--data", data_path, "dataset file (libsvm format)")->required();
  certify->add_option("--model", model_path, "certify this model instead of solving")
      ->expected(1);
  certify->add_flag("--no-binarize", opt.no_binarize, "keep labels as-is");
  certify->add_flag("--no-scale", opt.no_scale, "skip feature scaling to [-1,1]");
  add_solver_flags(certify, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(data_path, model_path, opt);
    if (predict->parsed()) return cmd_predict(model_path, data_path, out_path, opt);
    if (bench->parsed()) {
      if (!synthetic && data_path.empty())
        throw std::runtime_error("bench needs --synthetic --m or --data");
      if (trials < 1) throw std::runtime_error("--trials must be >= 1");
      if (!sweep.empty())
        return cmd_bench_sweep(sweep, synthetic, m, data_path, trials, seed, serial,
                               opt, out_path);
      return cmd_bench(synthetic, m, data_path, test_path, trials, seed, serial,
                       format, out_path, opt, bench->count("--profile") > 0);
    }
    if (synth->parsed()) return cmd_synth(m, seed, data_path, test_path);
    if (certify->parsed()) {
      const bool model_given = certify->count("--model") > 0;
      return cmd_certify(data_path, model_given ? model_path : "", opt);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
