// Acceptance checks. Each criterion prints one verdict line; detail lines
// start with "  ". The process exits 0 once the selected criteria have been
// evaluated, and with --strict it exits 1 when any verdict is FAIL.

#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "helpers.hpp"

#include "adev/cli.hpp"
#include "adev/cond_regression.hpp"
#include "adev/csv.hpp"
#include "adev/data_eval.hpp"
#include "adev/generator.hpp"
#include "adev/hrpcf.hpp"
#include "adev/stats_testing.hpp"
#include "adev/train.hpp"

using namespace adev;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void detail(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void detail(const char* fmt, ...) {
  std::fputs("  ", stdout);
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stdout, fmt, args);
  va_end(args);
  std::fputc('\n', stdout);
  std::fflush(stdout);
}

bool verdict(const std::string& id, const std::string& name, bool ok, const std::string& note) {
  std::printf("criterion %s [%s]: %s (%s)\n", id.c_str(), name.c_str(), ok ? "PASS" : "FAIL", note.c_str());
  std::fflush(stdout);
  return ok;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Two-path separation example

DevMap appendix_map() {
  CMatrix y(1, 1);
  y(0, 0) = Complex(0.0, std::numbers::pi / 2);
  return DevMap({AntiHermitian::zero(1), AntiHermitian(y)});
}

CMatrix mat_a() {
  CMatrix a(2, 2);
  a << 0, 1, -1, 0;
  return a;
}

CMatrix mat_b() {
  CMatrix b(2, 2);
  b << 0, Complex(0, 1), Complex(0, 1), 0;
  return b;
}

// The time channel of a conditional path runs 0, 1/2, 1, so the time
// generator 2A gives M2(t, y) = tA + Im(y) B on unit steps.
DevMap2 appendix_map2() {
  return make_dev_map2(1, true,
                       DevMap({AntiHermitian(CMatrix(2.0 * mat_a())), AntiHermitian::zero(2),
                               AntiHermitian(mat_b())}));
}

bool criterion1() {
  const auto t0 = Clock::now();
  const DevMap m = appendix_map();
  const Complex i(0.0, 1.0);
  bool ok = true;
  double worst = 0.0;

  const FiniteProcessSpec limit = time_augment(aldous_spec(0));
  const Dataset lx(limit.times, limit.paths);
  const CMatrix u1 = develop(m, lx.path(0));
  const CMatrix u2 = develop(m, lx.path(1));
  const CMatrix phi = pcf(m, lx);
  worst = std::max({worst, std::abs(u1(0, 0) - i), std::abs(u2(0, 0) + i), std::abs(phi(0, 0))});
  detail("U_M(x1) = %.3g%+.3gi, U_M(x2) = %.3g%+.3gi, Phi_X(M) = %.2g", u1(0, 0).real(), u1(0, 0).imag(),
         u2(0, 0).real(), u2(0, 0).imag(), std::abs(phi(0, 0)));

  const DevMap2 m2 = appendix_map2();
  const auto cond_x = oracle_cond_dev(limit, m);
  const CMatrix phi2_x = hrpcf(m2, cond_x);
  const CMatrix ea = testutil::taylor_exp(mat_a());
  const CMatrix eab = testutil::taylor_exp(mat_a() + mat_b());
  const CMatrix eamb = testutil::taylor_exp(mat_a() - mat_b());
  worst = std::max(worst, (phi2_x - 0.5 * ea * (eab + eamb)).norm());

  const MapEnsemble random_m = sample_map_ensemble(2, 3, 4, 0.5, 11);
  const MapEnsemble2 random_m2 = sample_map_ensemble2(3, 4, 4, true, 0.5, 12);
  CondPathsPerMap rx;
  for (const auto& mi : random_m) rx.push_back(oracle_cond_dev(limit, mi));

  std::vector<double> epcfd_random, dhs, ehr_random;
  for (int n : {10, 100, 1000}) {
    const FiniteProcessSpec fam = time_augment(aldous_spec(n));
    const Dataset fx(fam.times, fam.paths);
    const double e_fixed = epcfd({m}, fx, lx);
    worst = std::max(worst, e_fixed);
    epcfd_random.push_back(epcfd(random_m, fx, lx));
    const auto cond_n = oracle_cond_dev(fam, m);
    const CMatrix phi2_n = hrpcf(m2, cond_n);
    worst = std::max(worst, (phi2_n - 0.5 * (eab + eamb) * ea).norm());
    dhs.push_back(hs_distance(phi2_x, phi2_n));
    CondPathsPerMap ry;
    for (const auto& mi : random_m) ry.push_back(oracle_cond_dev(fam, mi));
    ehr_random.push_back(ehrpcfd(random_m2, rx, ry));
    detail("n = %4d: EPCFD_M = %.2g, EPCFD random maps = %.3e, d_HS(Phi2_X, Phi2_Xn) = %.2g, "
           "EHRPCFD random pairs = %.4f",
           n, e_fixed, epcfd_random.back(), dhs.back(), ehr_random.back());
  }
  const bool exact = worst < 1e-10;
  const bool weak = epcfd_random[2] < epcfd_random[1] && epcfd_random[1] < epcfd_random[0] &&
                    epcfd_random[2] < 1e-2;
  const bool separated = dhs[2] > 1e-6;
  const double secs = seconds_since(t0);
  detail("closed forms matched to %.2g; EPCFD decreasing to zero: %s; runtime %.3f s", worst, weak ? "yes" : "no",
         secs);
  detail("the exhibited pair gives d_HS = %.2g at every n: exp(A+B) + exp(A-B) commutes with exp(A), so the "
         "two averages coincide; random admissible pairs separate X^n from X (EHRPCFD %.3f at n = 1000)",
         dhs[2], ehr_random[2]);
  ok = exact && weak && separated && ehr_random[2] > 0.05 && secs < 1.0;
  return verdict("1", "two-path separation", ok,
                 separated ? "all sub-checks hold"
                           : "lim d_HS(Phi2_X, Phi2_Xn) > 0 fails for the exhibited pair; other sub-checks " +
                                 std::string(exact && weak ? "hold" : "also fail"));
}

// ---------------------------------------------------------------------------
// 2. Boundedness

bool criterion2() {
  const double bound = 2.0 * std::sqrt(13.0);
  double worst = 0.0;
  int violations = 0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    Rng rng = make_rng(2000, k);
    std::uniform_int_distribution<int> samples(2, 8), steps(2, 6), dims(1, 3), lie(1, 3);
    const int nx = samples(rng), ny = samples(rng), len = steps(rng) + 1, d = dims(rng), n = lie(rng);
    const double scale = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    const Dataset x = time_augment(testutil::random_dataset(nx, len, d, derive_seed(k, 1), scale));
    const Dataset y = time_augment(testutil::random_dataset(ny, len, d, derive_seed(k, 2), scale * 0.5));
    const auto m = sample_map_ensemble(d + 1, n, 1, scale, derive_seed(k, 3));
    const auto m2 = sample_map_ensemble2(n, 13, 2, k % 2 == 0, scale, derive_seed(k, 4));
    RegressionModel fx(n, d + 1, len, {4}), fy(n, d + 1, len, {4});
    Rng init = make_rng(k, 5);
    fx.net().initialize(init);
    fy.net().initialize(init);
    const CondPathsPerMap cx{predict_cond_dev(fx, x, m[0])};
    const CondPathsPerMap cy{predict_cond_dev(fy, y, m[0])};
    const double v = ehrpcfd(m2, cx, cy);
    worst = std::max(worst, v);
    violations += v > bound + 1e-9 ? 1 : 0;
  }
  detail("1000 random instances, largest EHRPCFD %.4f, bound %.4f", worst, bound);
  return verdict("2", "boundedness", violations == 0, std::to_string(violations) + " violations");
}

// ---------------------------------------------------------------------------
// 3. Gradient correctness

std::vector<CondDevPath> random_cond_paths(int count, int steps, int n, std::uint64_t seed) {
  std::vector<CondDevPath> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    for (int t = 0; t < steps; ++t)
      out[static_cast<std::size_t>(i)].steps.push_back(
          testutil::random_complex(n, seed * 1000 + static_cast<std::uint64_t>(i * steps + t), 0.4));
  return out;
}

bool criterion3() {
  const auto t0 = Clock::now();
  double worst1 = 0.0, worst2 = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const int n = 1 + static_cast<int>(s % 5);
    const int m = 2 + static_cast<int>(s % 7);
    const Dataset x = time_augment(testutil::random_dataset(5, 6, 2, 300 + s));
    const Dataset y = time_augment(testutil::random_dataset(4, 6, 2, 400 + s, 0.5));
    const auto r1 = check_epcfd_gradient(sample_map_ensemble(3, n, 2, 0.5, 500 + s), x, y);
    worst1 = std::max(worst1, r1.max_rel_error);
    const auto m2 = sample_map_ensemble2(std::min(n, 3), m, 2, s % 2 == 0, 0.4, 600 + s);
    const CondPathsPerMap cx{random_cond_paths(4, 5, std::min(n, 3), 700 + s)};
    const CondPathsPerMap cy{random_cond_paths(3, 5, std::min(n, 3), 800 + s)};
    const auto r2 = check_ehrpcfd_gradient(m2, cx, cy);
    worst2 = std::max(worst2, r2.max_rel_error);
  }
  const double secs = seconds_since(t0);
  detail("20 seeds, n <= 5, m <= 8: max relative error EPCFD^2 %.2e, EHRPCFD^2 %.2e, runtime %.1f s", worst1,
         worst2, secs);
  return verdict("3", "gradient correctness", worst1 < 1e-5 && worst2 < 1e-5 && secs < 30.0,
                 "max " + fmt("%.2e", std::max(worst1, worst2)));
}

// ---------------------------------------------------------------------------
// 4. Kernel identity

bool criterion4() {
  double worst_gap = 0.0, worst_eig = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const int k1 = 2, k2 = 3, n = 2, m = 3, steps = 4;
    const auto m2 = sample_map_ensemble2(n, m, k2, s % 2 == 0, 0.5, 900 + s);
    // per sample, one conditional path for each rank-1 map
    auto draw = [&](int count, std::uint64_t seed) {
      std::vector<std::vector<CondDevPath>> per_sample(static_cast<std::size_t>(count));
      CondPathsPerMap per_map(static_cast<std::size_t>(k1));
      for (int i = 0; i < k1; ++i) {
        const auto paths = random_cond_paths(count, steps, n, seed * 10 + static_cast<std::uint64_t>(i));
        per_map[static_cast<std::size_t>(i)] = paths;
        for (int j = 0; j < count; ++j) per_sample[static_cast<std::size_t>(j)].push_back(paths[static_cast<std::size_t>(j)]);
      }
      return std::make_pair(per_sample, per_map);
    };
    const auto [px, cx] = draw(4, 1000 + s);
    const auto [py, cy] = draw(5, 2000 + s);
    auto mean_kernel = [&](const auto& a, const auto& b) {
      double t = 0.0;
      for (const auto& p : a)
        for (const auto& q : b) t += hrpcf_kernel(m2, p, q);
      return t / static_cast<double>(a.size() * b.size());
    };
    const double mmd = mean_kernel(px, px) + mean_kernel(py, py) - 2.0 * mean_kernel(px, py);
    worst_gap = std::max(worst_gap, std::abs(ehrpcfd_squared(m2, cx, cy) - mmd));
    RMatrix gram(5, 5);
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) gram(a, b) = hrpcf_kernel(m2, py[static_cast<std::size_t>(a)], py[static_cast<std::size_t>(b)]);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(gram);
    worst_eig = std::min(worst_eig, es.eigenvalues().minCoeff());
  }
  detail("max |EHRPCFD^2 - kernel expansion| = %.2e, smallest Gram eigenvalue %.2e", worst_gap, worst_eig);
  return verdict("4", "kernel identity", worst_gap < 1e-8 && worst_eig >= -1e-8,
                 "gap " + fmt("%.2e", worst_gap));
}

// ---------------------------------------------------------------------------
// 5. Regression fidelity

bool criterion5() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int family : {0, 10}) {
    const FiniteProcessSpec spec = time_augment(aldous_spec(family));
    const DevMap m = sample_map_ensemble(2, 3, 1, 0.8, 50 + static_cast<std::uint64_t>(family)).front();
    const Dataset data = sample_finite(spec, 2000, 60 + static_cast<std::uint64_t>(family));
    RegressionConfig cfg;
    cfg.iterations = 1500;
    cfg.batch_size = 128;
    cfg.opt.lr = 5e-3;
    cfg.patience = 300;
    cfg.seed = 70 + static_cast<std::uint64_t>(family);
    const auto model = train_regression(data, m, cfg);
    const auto oracle = oracle_cond_dev(spec, m);
    const auto pred = predict_cond_dev(model, Dataset(spec.times, spec.paths), m);
    double err = 0.0;
    const std::size_t steps = oracle.front().steps.size();
    for (std::size_t k = 0; k < spec.paths.size(); ++k) {
      double e = 0.0;
      for (std::size_t t = 0; t < steps; ++t) e += hs_distance(pred[k].steps[t], oracle[k].steps[t]);
      err += spec.probs[k] * e / static_cast<double>(steps);
    }
    detail("%s: mean HS error %.4f", family == 0 ? "limit process" : "n = 10 process", err);
    worst = std::max(worst, err);
  }
  const double secs = seconds_since(t0);
  detail("runtime %.1f s", secs);
  return verdict("5", "regression fidelity", worst <= 0.05 && secs < 300.0, "worst " + fmt("%.4f", worst));
}

// ---------------------------------------------------------------------------
// 6. Permutation test power

TestReport run_power(double hurst, std::uint64_t seed) {
  PowerConfig pc;
  pc.runs = 5;
  pc.tests_per_run = 4;
  pc.train_size = 1000;
  pc.test_size = 200;
  pc.permutations = 200;
  pc.alpha = 0.05;
  pc.statistic = StatisticKind::hrpcfd;
  pc.disc.n = 3;
  pc.disc.m = 13;
  pc.disc.k1 = 1;
  pc.disc.k2 = 10;
  pc.disc.iter1 = 300;
  pc.disc.iter2 = 30;
  pc.disc.regression.iterations = 300;
  pc.seed = seed;
  return power_study(ProcessSpec::parse("bm", 3, 10), ProcessSpec::parse("fbm:" + format_double(hurst), 3, 10), pc);
}

bool criterion6(double hurst) {
  const auto t0 = Clock::now();
  const TestReport rep = run_power(hurst, 6000 + static_cast<std::uint64_t>(std::lround(hurst * 1000)));
  const double secs = seconds_since(t0);
  for (std::size_t r = 0; r < rep.runs.size(); ++r) {
    const auto& run = rep.runs[r];
    std::string h1, h0;
    for (const auto& p : run.h1) h1 += fmt(" %.3f", p.observed) + "/" + fmt("%.3f", p.quantile);
    for (const auto& p : run.h0) h0 += fmt(" %.3f", p.observed) + "/" + fmt("%.3f", p.quantile);
    detail("run %zu: power %.2f type-I %.2f | H1 observed/quantile%s | H0%s", r, run.power, run.type_i, h1.c_str(),
           h0.c_str());
  }
  detail("H = %.3f: power %.3f +- %.3f, type-I %.3f +- %.3f, runtime %.0f s", hurst, rep.power, rep.power_std,
         rep.type_i, rep.type_i_std, secs);
  const bool far = std::abs(hurst - 0.5) >= 0.09;
  const bool power_ok = far ? rep.power >= 0.8 : rep.power > rep.type_i;
  const bool ok = power_ok && rep.type_i <= 0.15 && secs < 1800.0;
  const std::string id = "6 H=" + format_double(hurst);
  return verdict(id, "permutation test", ok,
                 "power " + fmt("%.2f", rep.power) + (far ? " (need >= 0.80)" : " (need > type-I)") +
                     ", type-I " + fmt("%.2f", rep.type_i) + " (need <= 0.15)");
}

// ---------------------------------------------------------------------------
// 7. Conditional generator

bool criterion7() {
  const auto t0 = Clock::now();
  int wins = 0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const Dataset train = simulate_fbm(0.25, 3, 10, 1000, derive_seed(7000 + s, 1));
    const Dataset test = simulate_fbm(0.25, 3, 10, 200, derive_seed(7000 + s, 2));
    GanConfig cfg;
    cfg.shape.d = 3;
    cfg.shape.steps = 10;
    cfg.shape.past = 5;
    cfg.k1 = 2;
    cfg.n = 3;
    cfg.k2 = 4;
    cfg.m = 6;
    cfg.phase_a_iterations = 2000;
    cfg.phase_c_iterations = 1000;
    cfg.regression.hidden = {16};
    cfg.regression.iterations = 300;
    cfg.finetune_iterations = 50;
    cfg.seed = 7000 + s;
    const GanResult r = train_hrpcf_gan(train, cfg);
    auto scores = [&](const GeneratorModel& g) {
      const double ce = cond_exp_score(cond_exp_input(g, test, 100, derive_seed(cfg.seed, 12)));
      const double acf = acf_score(test, generate_like(g, test, derive_seed(cfg.seed, 11)));
      return std::make_pair(ce, acf);
    };
    const auto [ce_a, acf_a] = scores(r.phase_a);
    const auto [ce_c, acf_c] = scores(r.model);
    const bool win = ce_c < ce_a && acf_c < acf_a;
    wins += win ? 1 : 0;
    detail("seed %llu: phase A cond-exp %.4f acf %.4f | phase C cond-exp %.4f acf %.4f | %s",
           static_cast<unsigned long long>(s), ce_a, acf_a, ce_c, acf_c, win ? "better" : "not better");
  }
  const double secs = seconds_since(t0);
  detail("runtime %.0f s", secs);
  return verdict("7", "generator phase C vs phase A", wins >= 4 && secs < 7200.0,
                 std::to_string(wins) + " of 5 seeds improve both scores (need 4)");
}

// ---------------------------------------------------------------------------
// 8. fBM covariance

bool criterion8() {
  bool ok = true;
  for (double h : {0.25, 0.4, 0.5, 0.6}) {
    const Dataset data = simulate_fbm(h, 1, 10, 10000, 8000 + static_cast<std::uint64_t>(std::lround(h * 100)));
    const double z = testutil::fgn_autocovariance_zmax(data, h);
    detail("H = %.2f: largest autocovariance deviation %.2f sigma over lags 0-9, largest single matrix entry "
           "%.2f sigma of 55",
           h, z, testutil::fgn_covariance_zmax(data, h));
    ok = ok && z < 3.0;
  }
  return verdict("8", "fBM covariance", ok, "all lags within 3 sigma: " + std::string(ok ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// 9. CLI determinism

bool criterion9() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "adev_acceptance_cli";
  fs::remove_all(root);
  auto run = [&](std::vector<std::string> args, const std::string& out) {
    args.insert(args.begin(), "adev");
    args.push_back("--out");
    args.push_back((root / out).string());
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
  };
  const std::string x = (root / "x/data.csv").string();
  const std::string y = (root / "y/data.csv").string();
  const std::vector<std::string> small_disc = {"--k2", "2", "--m", "3", "--iter1", "5", "--iter2", "3",
                                               "--reg-iterations", "10", "--reg-hidden", "4"};
  auto with = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  bool ok = run({"gen-data", "--kind", "fbm", "--hurst", "0.3", "--d", "2", "--T", "6", "--samples", "30", "--seed",
                 "1"},
                "x") == kExitOk &&
            run({"gen-data", "--kind", "bm", "--d", "2", "--T", "6", "--samples", "30", "--seed", "2"}, "y") == kExitOk;
  const std::vector<std::string> gan = {"train-gan", "--data", x, "--past", "3", "--k1", "1", "--n", "2", "--k2",
                                        "1", "--m", "3", "--iters-a", "6", "--iters-c", "4", "--iter-r", "2",
                                        "--finetune-iters", "2", "--reg-iterations", "5", "--reg-hidden", "4",
                                        "--embed-hidden", "4", "--head-hidden", "4", "--latent", "3", "--seed", "5"};
  ok = ok && run(gan, "gan") == kExitOk;
  const std::string g = (root / "gan/generator.adev").string();
  const std::vector<std::vector<std::string>> commands = {
      {"gen-data", "--kind", "ar1", "--samples", "20", "--seed", "3"},
      {"develop", "--x", x, "--k1", "2", "--per-sample", "true", "--seed", "3"},
      {"pcfd", "--x", x, "--y", y, "--k1", "3", "--seed", "3"},
      with({"hrpcfd", "--x", x, "--y", y, "--seed", "3"}, {"--k2", "2", "--m", "3", "--reg-iterations", "10",
                                                           "--reg-hidden", "4"}),
      with({"train-disc", "--x", x, "--y", y, "--seed", "3"}, small_disc),
      with({"perm-test", "--x", x, "--y", y, "--perms", "30", "--seed", "3"}, small_disc),
      with({"power-study", "--d", "2", "--T", "6", "--runs", "2", "--train-size", "20", "--test-size", "10",
            "--perms", "20", "--seed", "3"},
           small_disc),
      gan,
      {"gen-data", "--generator", g, "--data", y, "--seed", "3"},
      {"eval", "--real", y, "--fake", x, "--generator", g, "--draws", "5", "--seed", "3"},
  };
  int identical = 0;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    const std::string a = "a" + std::to_string(k), b = "b" + std::to_string(k);
    if (run(commands[k], a) != kExitOk || run(commands[k], b) != kExitOk) {
      detail("%s failed to run", commands[k][0].c_str());
      ok = false;
      continue;
    }
    bool same = true;
    for (const auto& e : fs::directory_iterator(root / a)) {
      const std::string name = e.path().filename().string();
      const std::string left = read_text_file(e.path().string());
      const std::string right = read_text_file((root / b / name).string());
      if (name == "report.json" || name == "manifest.json")
        same = same && report_without_meta(left) == report_without_meta(right);
      else
        same = same && left == right;
    }
    detail("%-12s outputs identical: %s", commands[k][0].c_str(), same ? "yes" : "no");
    identical += same ? 1 : 0;
    ok = ok && same;
  }
  fs::remove_all(root);
  return verdict("9", "CLI determinism", ok,
                 std::to_string(identical) + " of " + std::to_string(commands.size()) + " runs identical");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int criterion = 0;
  double hurst = 0.0;
  bool strict = false;
  app.add_option("--criterion", criterion, "criterion to run (0 runs 1-5, 8 and 9)");
  app.add_option("--hurst", hurst, "Hurst parameter for criterion 6 (0 runs all four)");
  app.add_flag("--strict", strict, "exit 1 when any criterion fails");
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::function<bool()>> fast = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {8, criterion8}, {9, criterion9},
  };
  bool all = true;
  try {
    if (criterion == 0) {
      for (const auto& [k, f] : fast) all = f() && all;
    } else if (criterion == 6) {
      const std::vector<double> hs = hurst > 0.0 ? std::vector<double>{hurst} : std::vector<double>{0.4, 0.6, 0.475, 0.525};
      for (double h : hs) all = criterion6(h) && all;
    } else if (criterion == 7) {
      all = criterion7();
    } else if (fast.count(criterion) == 1) {
      all = fast.at(criterion)();
    } else {
      std::fprintf(stderr, "unknown criterion %d\n", criterion);
      return 2;
    }
  } catch (const std::exception& e) {
    std::printf("criterion %d: ERROR (%s)\n", criterion, e.what());
    return 2;
  }
  return strict && !all ? 1 : 0;
}
