// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include "gre/classical.hpp"
#include "gre/design.hpp"
#include "gre/gre.hpp"
#include "gre/multioutput.hpp"
#include "gre/order.hpp"
#include "gre/problems.hpp"
#include "gre/scalar.hpp"
#include "gre/workflow.hpp"
#include "oracles/dense_kronecker.hpp"
#include "oracles/finite_k0.hpp"
#include "oracles/naive_design.hpp"
#include "oracles/random_points.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace gre;
using gre::testing::rel_diff;

namespace {

// Pinned tolerances.
constexpr double kSlopeLo = 3.5, kSlopeHi = 4.5;
constexpr double kRawLo = 1.8, kRawHi = 2.2;
constexpr double kStudySeconds = 5.0;
constexpr double kMaxRelError = 10.0;
constexpr double kK0sq = 1e8;
constexpr double kMeanTol = 1e-5, kVarTol = 1e-4;
constexpr double kSigmaTol = 1e-8;
constexpr double kOrderHitFraction = 0.9, kOrderTrendFraction = 0.8;
constexpr double kDesignSeconds = 60.0;
constexpr double kExactTol = 1e-10;
constexpr double kWorkflowMeanTol = 1e-3;
constexpr double kWorkflowSeconds = 30.0;

const std::vector<std::vector<double>> kCdBase = {{0.2}, {0.4}, {0.6}, {0.8}, {1.0}};
const std::vector<double> kCdH = {1.0, 0.7, 0.5, 0.35, 0.25, 0.18};
const std::vector<std::vector<double>> kTrapBase = {{1.0}, {0.5}, {0.25}, {0.125}, {0.0625}};
const std::vector<double> kTrapH = {1.0, 0.5, 0.25};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

bool in(double v, double lo, double hi) { return v >= lo && v <= hi; }

// 1. Convergence acceleration on the central difference problem.
Outcome criterion1() {
  Outcome o;
  const std::vector<StudyMethod> methods = {StudyMethod::gre(KernelFamily::Matern, 2, 1.0), StudyMethod::raw()};
  const auto t0 = Clock::now();
  const auto dbl = run_convergence_study(central_difference_oracle(2), kCdBase, kCdH, methods);
  const double secs = seconds_since(t0);
  const double g = dbl.curves[0].slope, r = dbl.curves[1].slope;
  o.detail << "double: gre slope " << g << ", raw slope " << r << ", " << secs << " s";
  o.require(in(g, kSlopeLo, kSlopeHi), "gre slope in [3.5, 4.5]");
  o.require(in(r, kRawLo, kRawHi), "raw slope in [1.8, 2.2]");
  o.require(secs < kStudySeconds, "runtime < 5 s");

  std::vector<double> hs;
  for (int k = 0; k < 14; ++k) hs.push_back(std::pow(10.0, -2.0 * k / 13.0));
  const auto ext = run_convergence_study(central_difference_oracle(2), kCdBase, hs, methods,
                                         Precision::extended_digits(50));
  const double ge = ext.curves[0].slope, re = ext.curves[1].slope;
  o.detail << "; extended:50 down to h = 0.01: gre slope " << ge << ", raw slope " << re;
  o.require(in(ge, kSlopeLo, kSlopeHi), "extended gre slope in [3.5, 4.5]");
  o.require(in(re, kRawLo, kRawHi), "extended raw slope in [1.8, 2.2]");
  return o;
}

// 2. Trapezoid rule.
Outcome criterion2() {
  Outcome o;
  const std::vector<StudyMethod> methods = {StudyMethod::gre(KernelFamily::Matern, 2, 1.0)};
  const auto problem = trapezoid_oracle();
  const auto t0 = Clock::now();
  const auto res = run_convergence_study(problem, kTrapBase, kTrapH, methods);
  const double secs = seconds_since(t0);
  const double g = res.curves[0].slope;
  o.detail << "gre slope " << g << ", " << secs << " s";
  o.require(in(g, kSlopeLo, kSlopeHi), "gre slope in [3.5, 4.5]");
  o.require(secs < kStudySeconds, "runtime < 5 s");
  for (std::size_t i = 0; i < kTrapH.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : kTrapBase) {
      std::vector<double> x = {kTrapH[i] * b[0]};
      if (problem.snap) x = problem.snap(x);
      best = std::min(best, std::abs(problem.f(x) - problem.true_limit));
    }
    o.detail << "; h=" << kTrapH[i] << " gre " << res.curves[0].abs_error[i] << " vs best " << best;
    o.require(res.curves[0].abs_error[i] < best, "gre beats the best single value");
  }
  return o;
}

// 3. Calibration on criterion 1's study.
Outcome criterion3() {
  Outcome o;
  const std::vector<StudyMethod> methods = {
      StudyMethod::gre(KernelFamily::Matern, 1, 1.0), StudyMethod::gre(KernelFamily::Matern, 2, 1.0),
      StudyMethod::gre(KernelFamily::Wendland, 1, 1.0), StudyMethod::gre(KernelFamily::Wendland, 2, 1.0)};
  const auto res = run_convergence_study(central_difference_oracle(2), kCdBase, kCdH, methods);
  for (const auto& c : res.curves) {
    double worst = 0.0;
    for (double v : c.rel_error) worst = std::isnan(v) ? std::numeric_limits<double>::infinity() : std::max(worst, std::abs(v));
    o.detail << c.method << " max " << worst << "; ";
    o.require(worst <= kMaxRelError, c.method + " max |error|/sd <= 10");
  }
  return o;
}

struct RandomProblem {
  Dataset data;
  GreModel model;
};

RandomProblem random_problem(std::mt19937& rng, std::size_t n, std::size_t d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto pts = testing::random_points(rng, n, d, 0.05, 1.0, 0.6 / static_cast<double>(n + 4));
  std::vector<double> f;
  for (const auto& p : pts) {
    double v = 0.7;
    for (double c : p) v += 0.3 * c + u(rng) * c * c;
    f.push_back(v);
  }
  std::vector<double> orders;
  for (std::size_t k = 0; k < d; ++k) orders.push_back(1.0 + static_cast<double>(k));
  const ErrorBound b = d == 1 ? ErrorBound::monomial(1.5) : ErrorBound::additive(std::vector<double>(d, 1.0), orders);
  const int s = static_cast<int>(rng() % 3);
  return {Dataset::from_rows(pts, f), GreModel(b, KernelSpec::matern(s, LengthScales::uniform(d, 0.4)))};
}

// 4. Flat limit against finite k0.
Outcome criterion4() {
  Outcome o;
  std::mt19937 rng(404);
  double worst_mean = 0.0, worst_var = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + static_cast<std::size_t>(t) % 2;
    const std::size_t n = 2 + static_cast<std::size_t>(t) % 5;
    auto p = random_problem(rng, n, d);
    const auto post = fit(p.data, p.model);
    const double s2 = post.sigma2() > 0.0 ? post.sigma2() : 1.0;
    const testing::FiniteK0Posterior oracle(p.data, p.model, kK0sq, s2);
    std::vector<std::vector<double>> probes = {std::vector<double>(d, 0.0)};
    for (const auto& q : testing::random_points(rng, 3, d, 0.0, 1.2)) probes.push_back(q);
    const double scale = post.sigma2() > 0.0 ? 1.0 : s2;
    for (const auto& x : probes) {
      const auto pr = predict(post, x);
      worst_mean = std::max(worst_mean, rel_diff(pr.mean, oracle.mean(x), 1e-12));
      if (post.sigma2() > 0.0) {
        worst_var = std::max(worst_var, rel_diff(pr.variance * scale, oracle.covariance(x, x), 1e-10 * s2));
      }
    }
  }
  o.detail << "max mean rel diff " << worst_mean << ", max variance rel diff " << worst_var;
  o.require(worst_mean <= kMeanTol, "mean within 1e-5");
  o.require(worst_var <= kVarTol, "variance within 1e-4");
  return o;
}

// 5. sigma2 * n against the seminorm of the fitted mean, in 60 digits.
Outcome criterion5() {
  Outcome o;
  std::mt19937 rng(505);
  double worst = 0.0;
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + static_cast<std::size_t>(t) % 2;
    const std::size_t n = 2 + static_cast<std::size_t>(t) % 7;
    auto p = random_problem(rng, n, d);
    const auto post = fit(p.data, p.model);
    if (post.nugget_used() > 0.0) continue;

    const ScopedDigits digits(60);
    const auto de = p.data.cast<Extended>();
    const auto m = static_cast<Eigen::Index>(n);
    Mat<Extended> kb(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        kb(i, j) = p.model.bound(de.point(i)) * p.model.bound(de.point(j)) *
                   kernel_eval<Extended>(p.model.kernel, de.point(i), de.point(j));
      }
    }
    Vec<Extended> f(m), one = Vec<Extended>::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) f(i) = de.values()[static_cast<std::size_t>(i)];
    const Eigen::FullPivLU<Mat<Extended>> lu(kb);
    const Vec<Extended> kinv1 = lu.solve(one);
    const Extended mean = kinv1.dot(f) / kinv1.dot(one);
    const Vec<Extended> alpha = lu.solve(f - mean * one);
    const double semi = to_double(Extended(alpha.dot(kb * alpha)));
    worst = std::max(worst, rel_diff(static_cast<double>(n) * post.sigma2(), semi));
    ++checked;
  }
  o.detail << checked << " datasets, max rel diff " << worst;
  o.require(checked == 50, "all 50 datasets fitted without a nugget");
  o.require(worst <= kSigmaTol, "sigma2 * n within 1e-8");
  return o;
}

// 6. Order estimation on f = 1 + x^2 e(x).
Outcome criterion6() {
  Outcome o;
  std::mt19937 rng(606);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> lead(0.5, 2.0);
  const std::vector<double> base = {1.0, 0.5, 0.25, 0.125};
  OrderGrid grid;
  grid.r_values = {0.5, 1.0, 2.0};
  int hits = 0, monotone = 0;
  const int runs = 20;
  for (int run = 0; run < runs; ++run) {
    const double e0 = lead(rng) * (u(rng) < 0 ? -1.0 : 1.0), e1 = u(rng), e2 = u(rng);
    const auto e = [=](double y) { return e0 + e1 * std::sin(3 * y) + e2 * y * y; };
    std::vector<double> traj;
    for (double h : {1.0, 0.5, 0.25, 0.125}) {
      std::vector<std::vector<double>> rows;
      std::vector<double> vals;
      for (double x : base) {
        rows.push_back({h * x});
        vals.push_back(1.0 + h * x * h * x * e(h * x));
      }
      const auto data = Dataset::from_rows(rows, vals);
      traj.push_back(estimate_order(data, grid, BoundFamily::Monomial).r_hat.at(0));
    }
    if (traj.back() >= 2.0) ++hits;
    if (std::is_sorted(traj.begin(), traj.end())) ++monotone;
  }
  o.detail << "r_hat >= 2 at h = 1/8 in " << hits << "/" << runs << ", non-decreasing in " << monotone << "/" << runs;
  o.require(hits >= kOrderHitFraction * runs, "r_hat >= 2 in >= 90% of runs");
  o.require(monotone >= kOrderTrendFraction * runs, "non-decreasing trajectory in >= 80% of runs");
  return o;
}

// 7. Design search.
Outcome criterion7() {
  Outcome o;
  std::mt19937 rng(707);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  int agree = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t) % 9;
    const std::size_t d = 1 + static_cast<std::size_t>(t) % 2;
    DesignProblem p;
    p.candidates = testing::random_points(rng, n, d, 0.05, 1.0, 0.3 / static_cast<double>(n));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p.costs.push_back(u(rng));
      total += p.costs.back();
    }
    p.budget = (0.15 + 0.1 * (t % 7)) * total;
    p.bound = d == 1 ? ErrorBound::monomial(1.0) : ErrorBound::additive({1.0, 1.0}, {1.0, 2.0});
    p.kernel = KernelSpec::matern(static_cast<int>(rng() % 3), LengthScales::uniform(d, 0.3));
    const auto ex = optimize_design(p, {DesignMethod::Exhaustive});
    const auto naive = testing::naive_design(p);
    if (ex.selected == naive.selected && rel_diff(ex.objective, naive.objective, 1e-300) <= 1e-8) ++agree;
  }
  o.detail << "exhaustive == all-subsets on " << agree << "/200";
  o.require(agree == 200, "exhaustive equals all-subsets on every instance");

  DesignProblem g;
  for (int k = 1; k <= 20; ++k) {
    g.candidates.push_back({k / 20.0});
    g.costs.push_back(20.0 / k);
  }
  g.bound = ErrorBound::monomial(1.0);
  g.kernel = KernelSpec::matern(0, LengthScales({1.0}));
  int held = 0, budgets = 0;
  for (double budget : {1.0, 1.5, 2.5, 4.0, 6.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0}) {
    g.budget = budget;
    const auto s = optimize_design(g, {DesignMethod::Exhaustive});
    std::size_t smallest = g.costs.size();
    for (std::size_t i = 0; i < g.costs.size(); ++i) {
      if (g.costs[i] <= budget) {
        smallest = i;
        break;
      }
    }
    ++budgets;
    if (std::find(s.selected.begin(), s.selected.end(), smallest) != s.selected.end()) ++held;
  }
  o.detail << "; smallest affordable x selected for " << held << "/" << budgets << " budgets";
  o.require(held == budgets, "smallest affordable candidate always selected");

  double total = 0.0;
  for (double c : g.costs) total += c;
  g.budget = total;
  const auto t0 = Clock::now();
  const auto full = optimize_design(g, {DesignMethod::Exhaustive});
  const double secs = seconds_since(t0);
  o.detail << "; full 20-candidate search " << secs << " s (" << full.evaluated << " maximal subsets, " << full.selected.size() << " selected)";
  o.require(secs < kDesignSeconds, "full exhaustive search < 60 s");
  return o;
}

// 8. Kronecker grid against the dense oracle.
Outcome criterion8() {
  Outcome o;
  std::mt19937 rng(808);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_mean = 0.0, worst_cov = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n1 = t % 2 == 0 ? 3 : 4, n2 = t % 2 == 0 ? 2 : 3;
    const std::size_t d = 1 + static_cast<std::size_t>(t / 2) % 2;
    auto xs = testing::random_points(rng, n1, d, 0.05, 1.0, 0.5 / static_cast<double>(n1 + 3));
    std::vector<std::vector<double>> ts;
    for (std::size_t j = 0; j < n2; ++j) ts.push_back({static_cast<double>(j) + 0.3 * u(rng)});
    MatrixXd F(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2));
    for (std::size_t i = 0; i < n1; ++i) {
      double s = 0.0;
      for (double c : xs[i]) s += c;
      for (std::size_t j = 0; j < n2; ++j) {
        F(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::sin(ts[j][0]) + s * (1 + 0.5 * u(rng));
      }
    }
    const GreModel m(d == 1 ? ErrorBound::monomial(1.0)
                            : ErrorBound::additive(std::vector<double>(d, 1.0), std::vector<double>(d, 1.0)),
                     KernelSpec::matern(1, LengthScales::uniform(d, 0.4)));
    const Kernel kt = KernelSpec::matern(2, LengthScales({1.5}));
    const GridDataset grid(xs, ts, F);
    const MultiPosterior post(grid, m, kt);
    const testing::DenseKronecker dense(grid, m, kt, kK0sq);
    std::vector<std::vector<double>> probes = {std::vector<double>(d, 0.0), std::vector<double>(d, 0.3)};
    for (const auto& x : probes) {
      for (std::size_t j = 0; j < n2; ++j) {
        worst_mean = std::max(worst_mean, rel_diff(post.predict(x, j).mean, dense.mean(x, j), 1e-12));
      }
    }
    if (post.sigma2() > 0.0) {
      for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
          const auto& xi = xs[(i + 1) % n1];
          const std::size_t k = (j + 1) % n2;
          const double a = post.covariance(xs[i], j, xi, k) / post.sigma2();
          worst_cov = std::max(worst_cov, std::abs(a - dense.covariance(xs[i], j, xi, k)));
          const double b = post.covariance(std::vector<double>(d, 0.0), j, xs[i], k) / post.sigma2();
          worst_cov = std::max(worst_cov, rel_diff(b, dense.covariance(std::vector<double>(d, 0.0), j, xs[i], k), 1e-8));
        }
      }
    }
  }
  o.detail << "max mean rel diff " << worst_mean << ", max training covariance diff " << worst_cov;
  o.require(worst_mean <= kMeanTol, "mean within 1e-5");
  o.require(worst_cov <= kVarTol, "training covariance within 1e-4");

  // A single index column is scalar GRE.
  bool same = true;
  for (int t = 0; t < 10; ++t) {
    auto xs = testing::random_points(rng, 5, 1, 0.05, 1.0, 0.1);
    MatrixXd F(5, 1);
    std::vector<double> f;
    for (int i = 0; i < 5; ++i) {
      F(i, 0) = 1.0 + xs[static_cast<std::size_t>(i)][0] * (1 + u(rng));
      f.push_back(F(i, 0));
    }
    const GreModel m(ErrorBound::monomial(1.0), KernelSpec::matern(1, LengthScales({0.5})));
    const MultiPosterior post(GridDataset(xs, {{0.0}}, F), m, KernelSpec::gaussian(LengthScales({1.0})));
    const GrePosterior scalar(Dataset::from_rows(xs, f), m);
    same = same && rel_diff(post.mean_at_zero()(0), scalar.mean_at_zero()) <= 1e-14 &&
           rel_diff(post.var_at_zero()(0), scalar.var_at_zero(), 1e-300) <= 1e-12;
  }
  o.detail << "; n2 = 1 matches scalar: " << (same ? "yes" : "no");
  o.require(same, "n2 = 1 matches scalar GRE");
  return o;
}

// 9. Exactness of the classical transformations.
Outcome criterion9() {
  Outcome o;
  std::mt19937 rng(909);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.2, 2.0);
  double wr = 0, ws = 0, wt = 0, we = 0;
  for (int t = 0; t < 100; ++t) {
    // Polynomial of degree k in x; Richardson with powers 1..k.
    const std::size_t k = 1 + static_cast<std::size_t>(t) % 4;
    Sequence p;
    double x = 1.0;
    std::vector<double> c;
    for (std::size_t i = 0; i <= k; ++i) c.push_back(u(rng));
    for (std::size_t i = 0; i < k + 2; ++i) {
      p.x.push_back(x);
      double v = 0.0;
      for (std::size_t j = 0; j <= k; ++j) v += c[j] * std::pow(x, static_cast<double>(j));
      p.y.push_back(v);
      x *= 0.3 + 0.4 * pos(rng) / 2.0;
    }
    for (double v : richardson(p, 1.0, k).y) wr = std::max(wr, std::abs(v - c[0]) / std::max(1.0, std::abs(c[0])));

    // A + B q^m.
    const double A = u(rng), B = u(rng), q = (0.1 + 0.8 * pos(rng) / 2.0) * (t % 3 == 0 ? -1.0 : 1.0);
    Sequence g;
    for (int m = 0; m < 5; ++m) g.y.push_back(A + B * std::pow(q, m));
    for (double v : shanks(g).y) ws = std::max(ws, std::abs(v - A) / std::max(1.0, std::abs(A) + std::abs(B)));

    // (a0 + a1 x) / (1 + b1 x).
    const double a0 = pos(rng), a1 = pos(rng), b1 = pos(rng);
    Sequence r;
    x = 1.0;
    for (int i = 0; i < 3; ++i) {
      r.x.push_back(x);
      r.y.push_back((a0 + a1 * x) / (1 + b1 * x));
      x *= 0.5;
    }
    wt = std::max(wt, std::abs(thiele(r, 1) - a0) / std::max(1.0, std::abs(a0)));

    // y = S + sum a_j g_j(x) with a custom basis.
    const double S = u(rng), e1 = u(rng), e2 = u(rng);
    const auto basis = BasisSpec::custom({[](const Sequence& s, std::size_t m) { return std::sin(s.x[m]); },
                                          [](const Sequence& s, std::size_t m) { return s.x[m] * std::exp(s.x[m]); }});
    Sequence e;
    x = 1.0;
    for (int i = 0; i < 4; ++i) {
      e.x.push_back(x);
      e.y.push_back(S + e1 * std::sin(x) + e2 * x * std::exp(x));
      x *= 0.6;
    }
    we = std::max(we, std::abs(e_algorithm(e, basis, 0) - S) / std::max(1.0, std::abs(S)));
    we = std::max(we, std::abs(e_algorithm(e, basis, 1) - S) / std::max(1.0, std::abs(S)));
  }
  o.detail << "max errors: richardson " << wr << ", shanks " << ws << ", thiele " << wt << ", e-algorithm " << we;
  o.require(wr <= kExactTol, "richardson exact on polynomials");
  o.require(ws <= kExactTol, "shanks exact on A + B q^m");
  o.require(wt <= kExactTol, "thiele exact on degree-(1,1) rationals");
  o.require(we <= kExactTol, "e-algorithm exact under its ansatz");
  return o;
}

// 10. Workflow on an in-process separable simulator.
Outcome criterion10() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("gre_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path ledger = dir / "ledger.jsonl";
  fs::remove(ledger);

  WorkflowConfig cfg;
  cfg.lofi = {0.5, 0.5};
  cfg.sweeps = {{0.25, 0.125, 0.0625}, {0.25, 0.125, 0.0625}};
  for (double a : {0.5, 0.25, 0.125, 0.0625}) {
    for (double b : {0.5, 0.25, 0.125, 0.0625}) cfg.candidates.push_back({a, b});
  }
  cfg.budget = 300.0;
  cfg.ledger_path = ledger.string();
  const auto make = [] {
    return FunctionSimulator([](std::span<const double> x) { return 1.0 + x[0] + x[1] * x[1]; },
                             [](std::span<const double> x) { return 1.0 / (x[0] * x[1]); });
  };

  const auto t0 = Clock::now();
  auto sim = make();
  const auto rep = run_workflow(sim, cfg);
  auto again = make();
  const auto rep2 = run_workflow(again, cfg);
  const double secs = seconds_since(t0);

  std::vector<double> r;
  for (const auto& a : rep.axes.axes) r.push_back(a.r);
  o.detail << "r = (";
  for (std::size_t i = 0; i < r.size(); ++i) o.detail << (i ? ", " : "") << r[i];
  o.detail << "), mean " << rep.mean_at_zero << ", " << rep.design.selected.size() << " design points, "
           << rep2.simulator_calls << " calls on resume, " << secs << " s";
  o.require(r == std::vector<double>{1.0, 2.0}, "orders (1, 2)");
  o.require(std::abs(rep.mean_at_zero - 1.0) <= kWorkflowMeanTol, "|mean - 1| <= 1e-3");
  o.require(rep.design.selected.size() >= 4, ">= 4 design points");
  o.require(rep2.simulator_calls == 0 && again.calls() == 0, "resume makes no simulator calls");
  o.require(secs < kWorkflowSeconds, "runtime < 30 s");
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"convergence acceleration", criterion1}, {"trapezoid extrapolation", criterion2},
      {"calibration", criterion3},              {"flat limit", criterion4},
      {"sigma2 identity", criterion5},          {"order estimation", criterion6},
      {"design search", criterion7},            {"grid posterior", criterion8},
      {"classical exactness", criterion9},      {"workflow", criterion10}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
