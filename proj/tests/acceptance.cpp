// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nssvm/nssvm.hpp>

using namespace nssvm;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) ++failures;
}

void report_skip(int id, const std::string& detail) {
  std::printf("criterion %2d: SKIP  %s\n", id, detail.c_str());
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// every fit kept for the cross-cutting stationarity/invariant criteria,
// alongside the recipe to regenerate its training data
struct KeptFit {
  FitResult fit;
  Eigen::Index m = 0;  // training rows ( = per-class draws of the generator)
  std::uint64_t seed = 0;
};

std::vector<KeptFit> kept;

Dataset regen(const KeptFit& k) { return gen_gaussian_2d(k.m, k.seed).train; }

Dataset random_instance(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x(m, n);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) x(i, j) = gauss(rng);
    y[i] = i % 2 == 0 ? 1.0 : -1.0;
  }
  for (Eigen::Index i = 2; i < m; ++i)
    if (rng() % 3 == 0) y[i] = -y[i];
  return Dataset::dense(std::move(x), std::move(y));
}

// --- criterion 1: synthetic benchmark reproduction -------------------------

void criterion_1_and_2() {
  const Profile prof = *lookup_profile("synth-large");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<FitResult> fits;
  TrialProtocol proto = synthetic_protocol(100000, prof);
  const auto seeds = trial_seeds(2026, 20);
  BenchReport r = run_trials(proto, seeds, true, &fits);
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (std::size_t i = 0; i < fits.size(); ++i)
    kept.push_back({fits[i], 100000, seeds[i]});

  const bool acc_ok = std::abs(r.acc - 96.95) <= 0.35;
  const bool tacc_ok = std::abs(r.tacc - 96.95) <= 0.35;
  const bool nsv_ok = r.nsv_ratio <= 1.2e-2;
  const bool time_ok = total < 60.0;
  report(1, acc_ok && tacc_ok && nsv_ok && time_ok,
         fmt("ACC %.2f (want 96.95+/-0.35: %s), TACC %.2f (%s), NSV/m %.3e "
             "(<=1.2e-2: %s), total %.1fs (<60s: %s), failures %lld",
             r.acc, acc_ok ? "ok" : "off", r.tacc, tacc_ok ? "ok" : "off",
             r.nsv_ratio, nsv_ok ? "ok" : "off", total, time_ok ? "ok" : "off",
             static_cast<long long>(r.failures)));

  // --- criterion 2: sparsity ratio shrinks with m --------------------------
  std::vector<FitResult> fits_small, fits_large;
  BenchReport small =
      run_trials(proto, trial_seeds(100, 5), true, &fits_small);
  TrialProtocol proto_large = synthetic_protocol(1000000, prof);
  BenchReport large =
      run_trials(proto_large, trial_seeds(200, 5), true, &fits_large);
  for (std::size_t i = 0; i < fits_small.size(); ++i)
    kept.push_back({fits_small[i], 100000, trial_seeds(100, 5)[i]});
  for (std::size_t i = 0; i < fits_large.size(); ++i)
    kept.push_back({fits_large[i], 1000000, trial_seeds(200, 5)[i]});
  report(2, large.nsv_ratio < small.nsv_ratio,
         fmt("NSV/m %.3e at m=1e5 vs %.3e at m=1e6", small.nsv_ratio,
             large.nsv_ratio));
}

// --- criterion 3: one-step reconvergence after a tiny perturbation ----------

void criterion_3() {
  int converged_runs = 0, one_step = 0;
  for (int k = 0; k < 100; ++k) {
    const std::uint64_t seed = 3000 + static_cast<std::uint64_t>(k);
    Dataset d = gen_gaussian_2d(2000, seed).train;
    AdaptiveConfig cfg = make_adaptive_config(d, *lookup_profile("synth-small"));
    FitResult fit = solve_adaptive(d, cfg, default_start(d));
    kept.push_back({fit, 2000, seed});
    if (!fit.converged) continue;
    ++converged_runs;

    DualIterate z{fit.alpha, fit.b};
    std::mt19937_64 rng(seed * 7 + 1);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd noise(d.rows() + 1);
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = unif(rng);
    const double znorm = std::sqrt(z.alpha.squaredNorm() + z.b * z.b);
    noise *= 1e-8 * (1.0 + znorm) / noise.norm();
    DualIterate zp = z;
    zp.alpha += noise.head(d.rows());
    zp.b += noise[d.rows()];

    SolverConfig scfg = cfg.base;
    scfg.s = std::max<Eigen::Index>(1, zero_norm(fit.alpha));
    FitResult refit = solve_fixed_s(d, scfg, zp);
    if (refit.converged && refit.iters <= 1) ++one_step;
  }
  report(3, converged_runs == 100 && one_step >= 99,
         fmt("%d/100 converged, %d/100 reconverged within one step",
             converged_runs, one_step));
}

// --- criterion 4: closed-form Newton direction vs dense Jacobian solve -----

void criterion_4() {
  int ok = 0;
  double worst = 0.0;
  std::mt19937_64 rng(4444);
  std::normal_distribution<double> gauss;
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index m = 6 + static_cast<Eigen::Index>(rng() % 45);     // <= 50
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 7);
    const Eigen::Index s =
        1 + static_cast<Eigen::Index>(rng() % std::min<Eigen::Index>(m, 10));
    Dataset d = random_instance(m, n, 40000 + static_cast<std::uint64_t>(rep));
    Penalties p(0.25, 0.0025);
    DualIterate z;
    z.alpha.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) z.alpha[i] = gauss(rng);
    z.b = gauss(rng);
    const Eigen::VectorXd g = grad_g(d, z, p);
    const ActiveSet T = top_s_indices(z.alpha - (0.5 / m) * g, s);
    NewtonState st{z, T, 0.0, 0, g};
    const Eigen::VectorXd dir = newton_direction(d, st, p);

    // dense Jacobian in the permuted order [T; off; b]
    Eigen::MatrixXd X = d.to_dense_matrix();
    Eigen::MatrixXd Q(n, m);
    for (Eigen::Index i = 0; i < m; ++i) Q.col(i) = d.label(i) * X.row(i).transpose();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (Eigen::Index r = 0; r < s; ++r) {
      const Eigen::Index i = T.indices[r];
      for (Eigen::Index c2 = 0; c2 < s; ++c2)
        J(r, c2) = Q.col(i).dot(Q.col(T.indices[c2]));
      J(r, r) += z.alpha[i] >= 0 ? 1 / p.C : 1 / p.c;
      J(r, m) = d.label(i);
      J(m, r) = d.label(i);
    }
    for (Eigen::Index r = s; r < m; ++r) J(r, r) = 1.0;

    const Eigen::VectorXd F = residual_F(d, z, T, p);
    Eigen::VectorXd dperm(m + 1);
    Eigen::Index pos = 0;
    for (Eigen::Index i : T.indices) dperm[pos++] = dir[i];
    std::size_t tpos = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tpos < T.indices.size() && T.indices[tpos] == i) {
        ++tpos;
        continue;
      }
      dperm[pos++] = dir[i];
    }
    dperm[m] = dir[m];
    const double res = (J * dperm + F).norm() / (1.0 + F.norm());
    worst = std::max(worst, res);
    if (res <= 1e-10) ++ok;
  }
  report(4, ok == 200, fmt("%d/200 within 1e-10, worst scaled residual %.3e", ok, worst));
}

// --- criterion 5: never beats the exhaustive oracle; ties it when certified -

// tight-margin instance: both clusters sit essentially on the margin, so the
// off-support gradient vanishes at the optimum and the strong (eta >= C)
// stationarity certificate is attainable
Dataset margin_instance(Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    y[i] = i % 2 == 0 ? 1.0 : -1.0;
    x(i, 0) = y[i] * (1.0 + 0.01 * gauss(rng));
    x(i, 1) = 0.01 * gauss(rng);
  }
  return Dataset::dense(std::move(x), std::move(y));
}

void criterion_5() {
  int lower_bound_ok = 0, certified = 0, certified_tight = 0;
  double worst_gap = -1e300;
  std::mt19937_64 rng(5555);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index m = 6 + static_cast<Eigen::Index>(rng() % 7);  // <= 12
    const Eigen::Index s = 1 + static_cast<Eigen::Index>(rng() % 3);  // <= 3
    Dataset d = random_instance(m, 2, 50000 + static_cast<std::uint64_t>(rep));
    SolverConfig cfg = default_config(d, s);
    cfg.eps = 1e-9;
    const OracleResult oracle = enumerate_global(d, s, cfg.penalties);
    FitResult fit = solve_fixed_s(d, cfg, default_start(d));
    const double obj = dual_objective(d, fit.alpha, cfg.penalties);
    if (obj >= oracle.best_objective - 1e-9) ++lower_bound_ok;

    // the strong clause on a tight-margin sibling: run with eta >= C forced;
    // whenever the result passes the stationarity check it must tie the oracle
    const Eigen::Index m2 = 6 + static_cast<Eigen::Index>(rng() % 7);
    const Eigen::Index s2 = 2 + static_cast<Eigen::Index>(rng() % 2);
    Dataset d2 = margin_instance(m2, 55000 + static_cast<std::uint64_t>(rep));
    SolverConfig big = default_config(d2, s2);
    big.eta = std::max(big.penalties.C, big.eta);
    FitResult fit2 = solve_fixed_s(d2, big, default_start(d2));
    StationarityReport rep2 = check_eta_stationarity(d2, {fit2.alpha, fit2.b}, big);
    if (rep2.pass()) {
      ++certified;
      const double gap = dual_objective(d2, fit2.alpha, big.penalties) -
                         enumerate_global(d2, s2, big.penalties).best_objective;
      worst_gap = std::max(worst_gap, gap);
      if (gap <= 1e-7) ++certified_tight;
    }
  }
  report(5, lower_bound_ok == 50 && certified > 0 && certified_tight == certified,
         fmt("%d/50 at or above the oracle optimum; %d certified with eta >= C, "
             "%d of those within 1e-7 (worst gap %.3e)",
             lower_bound_ok, certified, certified_tight, worst_gap));
}

// --- criterion 6 and 7: cross-cutting postconditions over every kept run ----

void criterion_6_and_7() {
  int converged = 0, stationary = 0;
  int invariant_ok = 0;
  for (const KeptFit& k : kept) {
    if (k.fit.sparsity_preserved && k.fit.max_feasibility_violation <= 1e-9)
      ++invariant_ok;
    if (!k.fit.converged) continue;
    ++converged;
    Dataset d = regen(k);
    SolverConfig cfg =
        default_config(d, std::max<Eigen::Index>(1, zero_norm(k.fit.alpha)));
    StationarityReport r = check_eta_stationarity(d, {k.fit.alpha, k.fit.b}, cfg);
    if (r.pass()) ++stationary;
  }
  report(6, converged > 0 && stationary == converged,
         fmt("%d/%d converged runs pass the stationarity check", stationary,
             converged));
  report(7, invariant_ok == static_cast<int>(kept.size()),
         fmt("%d/%zu runs kept ||alpha||_0 <= s and |<alpha,y>| <= 1e-9*(1+||alpha||) "
             "at every iteration",
             invariant_ok, kept.size()));
}

// --- criterion 8: gradient against central finite differences ---------------

void criterion_8() {
  int ok = 0;
  double worst = 0.0;
  std::mt19937_64 rng(8888);
  std::uniform_real_distribution<double> mag(0.05, 1.0);
  for (int pt = 0; pt < 100; ++pt) {
    Dataset d = random_instance(20, 4, 80000 + static_cast<std::uint64_t>(pt));
    Penalties p(0.25, 0.0025);
    DualIterate z;
    z.alpha.resize(20);
    for (int i = 0; i < 20; ++i) z.alpha[i] = (rng() % 2 ? 1.0 : -1.0) * mag(rng);
    z.b = mag(rng);
    const Eigen::VectorXd g = grad_g(d, z, p);
    auto L = [&](const Eigen::VectorXd& a) {
      return dual_objective(d, a, p) + z.b * a.dot(d.labels());
    };
    Eigen::VectorXd num(20);
    for (int i = 0; i < 20; ++i) {
      const double h = 1e-6 * (1.0 + std::abs(z.alpha[i]));
      Eigen::VectorXd ap = z.alpha, am = z.alpha;
      ap[i] += h;
      am[i] -= h;
      num[i] = (L(ap) - L(am)) / (2 * h);
    }
    const double rel = (num - g).norm() / std::max(1.0, g.norm());
    worst = std::max(worst, rel);
    if (rel <= 1e-5) ++ok;
  }
  report(8, ok == 100, fmt("%d/100 points within 1e-5, worst relative error %.3e",
                           ok, worst));
}

// --- criterion 9: quadratic-form objective vs elementwise piecewise form ----

void criterion_9() {
  int ok = 0;
  double worst = 0.0;
  std::mt19937_64 rng(9999);
  std::normal_distribution<double> gauss;
  for (int rep = 0; rep < 1000; ++rep) {
    Dataset d = random_instance(10, 3, 90000 + static_cast<std::uint64_t>(rep / 10));
    Penalties p(0.25, 0.0025);
    Eigen::VectorXd alpha(10);
    for (int i = 0; i < 10; ++i) alpha[i] = gauss(rng);
    const double got = dual_objective(d, alpha, p);
    // elementwise: 1/2||sum y_i a_i x_i||^2 + sum h(a_i) - sum a_i with
    // h(t) = t^2/(2C) for t >= 0 else t^2/(2c)
    Eigen::VectorXd w = Eigen::VectorXd::Zero(3);
    for (int i = 0; i < 10; ++i) w += d.label(i) * alpha[i] * d.row_dense(i);
    double want = 0.5 * w.squaredNorm() - alpha.sum();
    for (int i = 0; i < 10; ++i)
      want += alpha[i] >= 0 ? alpha[i] * alpha[i] / (2 * p.C)
                            : alpha[i] * alpha[i] / (2 * p.c);
    const double diff = std::abs(got - want) / (1.0 + std::abs(want));
    worst = std::max(worst, diff);
    if (diff <= 1e-12) ++ok;
  }
  report(9, ok == 1000, fmt("%d/1000 within 1e-12, worst scaled difference %.3e",
                            ok, worst));
}

// --- criterion 10: optional real-data spot check -----------------------------

void criterion_10() {
  std::string path;
  if (const char* env = std::getenv("NSSVM_A9A")) path = env;
  if (path.empty() && std::ifstream("data/a9a").good()) path = "data/a9a";
  if (path.empty()) {
    report_skip(10, "a9a dataset not provided (set NSSVM_A9A or place data/a9a)");
    return;
  }
  std::ifstream in(path);
  if (!in) {
    report_skip(10, "cannot open '" + path + "'");
    return;
  }
  Dataset d = scale_features(binarize_labels(parse_libsvm(in)));
  AdaptiveConfig cfg = make_adaptive_config(d, *lookup_profile("real-a"));
  FitResult fit = solve_adaptive(d, cfg, default_start(d));
  const double acc = accuracy_w(d, fit.w, fit.b);
  const Eigen::Index nsv = zero_norm(fit.alpha);
  const bool acc_ok = std::abs(acc - 84.04) <= 1.0;
  const bool nsv_ok = nsv >= 1200 && nsv <= 2500;
  report(10, acc_ok && nsv_ok,
         fmt("ACC %.2f (want 84.04+/-1.0), NSV %lld (want [1200,2500])", acc,
             static_cast<long long>(nsv)));
}

}  // namespace

int main() {
  criterion_1_and_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6_and_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
