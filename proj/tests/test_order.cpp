#include <doctest.h>

#include "gre/gre.hpp"
#include "gre/order.hpp"
#include "oracles/random_points.hpp"

#include <Eigen/LU>

#include <cmath>
#include <functional>
#include <random>

using namespace gre;

namespace {

// -f'A^{-1}f + (1'A^{-1}f)^2/(1'A^{-1}1) - log det A with a dense LU on K_b,
// carried out in 60-digit arithmetic.
double dense_log_ql(const Dataset& data, const ErrorBound& b, const Kernel& k) {
  ScopedDigits digits(60);
  const auto ext = data.cast<Extended>();
  const Mat<Extended> kb = build_kb(ext, GreModel(b, k)).kb;
  const Eigen::Index n = kb.rows();
  Vec<Extended> f(n);
  for (Eigen::Index i = 0; i < n; ++i) f(i) = ext.values()[static_cast<std::size_t>(i)];
  const Vec<Extended> one = Vec<Extended>::Ones(n);
  const Eigen::FullPivLU<Mat<Extended>> lu(kb);
  const Vec<Extended> af = lu.solve(f), a1 = lu.solve(one);
  const Extended okf = one.dot(af);
  const Extended v = -f.dot(af) + okf * okf / one.dot(a1) - log(lu.determinant());
  return to_double(v);
}

Dataset sample(const std::vector<double>& xs, double (*fn)(double)) {
  std::vector<std::vector<double>> rows;
  std::vector<double> vals;
  for (double x : xs) {
    rows.push_back({x});
    vals.push_back(fn(x));
  }
  return Dataset::from_rows(rows, vals);
}

}  // namespace

TEST_CASE("log quasi-likelihood: two-point closed form") {
  const auto data = Dataset::from_rows({{0.5}, {1.0}}, {1.5, 2.0});
  const ErrorBound b = ErrorBound::monomial(1.0);
  const Kernel k = KernelSpec::gaussian(LengthScales({1.0}));
  const double a = 0.25, d = 1.0, c = 0.5 * std::exp(-0.25);
  const double det = a * d - c * c;
  CHECK(det == doctest::Approx(0.098367).epsilon(1e-5));
  // Explicit 2x2 inverse.
  const double i00 = d / det, i11 = a / det, i01 = -c / det;
  const double f0 = 1.5, f1 = 2.0;
  const double fkf = f0 * f0 * i00 + 2 * f0 * f1 * i01 + f1 * f1 * i11;
  const double okf = f0 * (i00 + i01) + f1 * (i01 + i11);
  const double oko = i00 + 2 * i01 + i11;
  const double expect = -fkf + okf * okf / oko - std::log(det);
  CHECK(log_quasi_likelihood(data, b, k) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(log_quasi_likelihood(Dataset::from_rows({{0.5}}, {1.0}), b, k), InvalidArgument);
}

TEST_CASE("log quasi-likelihood: invariances and dense agreement") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 3 + trial % 6;
    const auto pts = testing::random_points(rng, n, 1, 0.05, 1.0, 0.5 / static_cast<double>(n + 2));
    std::vector<double> f;
    for (const auto& p : pts) f.push_back(1.0 + u(rng) * p[0] + p[0] * p[0]);
    const auto data = Dataset::from_rows(pts, f);
    const ErrorBound b = ErrorBound::monomial(0.5 + trial % 3);
    const Kernel k = KernelSpec::matern(trial % 3, LengthScales({0.3}));
    const double L = log_quasi_likelihood(data, b, k);
    CHECK(testing::rel_diff(L, dense_log_ql(data, b, k)) <= 1e-8);

    const double a = u(rng);
    std::vector<double> shifted, scaled;
    const double c = 0.5 + std::abs(u(rng));
    for (double v : f) {
      shifted.push_back(v + a);
      scaled.push_back(c * v);
    }
    CHECK(std::abs(log_quasi_likelihood(data.with_values(shifted), b, k) - L) <= 1e-8 * std::max(1.0, std::abs(L)));
    // L(cf) = -c^2 Q(f) - logdet with Q(f) = n sigma2.
    const GrePosterior post(data, GreModel(b, k));
    const double quad = static_cast<double>(n) * post.sigma2();
    const double Lc = log_quasi_likelihood(data.with_values(scaled), b, k);
    CHECK(Lc == doctest::Approx(L - (c * c - 1.0) * quad).epsilon(1e-9));
  }
}

TEST_CASE("estimate_order: quadratic data prefers r = 2") {
  const auto data = sample({1.0, 0.5, 0.25, 0.125}, [](double x) { return 1.0 + x * x; });
  OrderGrid grid = OrderGrid::defaults(fidelity_range(data));
  grid.r_values = {1.0, 2.0};
  const auto est = estimate_order(data, grid, BoundFamily::Monomial);
  CHECK(est.r_hat.at(0) == 2.0);

  // Brute-force argmax over the same grid with the dense evaluator.
  double best = -std::numeric_limits<double>::infinity();
  double best_r = 0.0;
  for (double r : grid.r_values) {
    for (int s : grid.s_values) {
      for (double ell : grid.ell_values) {
        const double L = dense_log_ql(data, ErrorBound::monomial(r), KernelSpec::matern(s, LengthScales({ell})));
        if (L > best) {
          best = L;
          best_r = r;
        }
      }
    }
  }
  CHECK(best_r == 2.0);
  CHECK(est.log_ql == doctest::Approx(best).epsilon(1e-8));
  CHECK(est.surface.size() == 2 * 3 * 9);
  for (const auto& row : est.surface) {
    if (row.feasible) CHECK(row.log_ql <= est.log_ql);
  }
}

TEST_CASE("estimate_order: constant data takes the smallest candidate") {
  const auto data = sample({1.0, 0.5, 0.25, 0.125}, [](double) { return 4.0; });
  const OrderGrid grid = OrderGrid::defaults(fidelity_range(data));
  const auto est = estimate_order(data, grid, BoundFamily::Monomial);
  CHECK(est.r_hat.at(0) == grid.r_values.front());
  CHECK(est.s_hat == grid.s_values.front());
  CHECK(est.ell_hat == grid.ell_values.front());
  CHECK_FALSE(est.warnings.empty());
}

TEST_CASE("estimate_order: parallel and serial agree, and reruns are identical") {
  std::mt19937 rng(31);
  const auto pts = testing::random_points(rng, 12, 2, 0.05, 1.0, 0.05);
  std::vector<double> f;
  for (const auto& p : pts) f.push_back(2.0 + p[0] + 3.0 * p[1] * p[1]);
  const auto data = Dataset::from_rows(pts, f);
  OrderGrid grid = OrderGrid::defaults(fidelity_range(data), 4);
  for (auto family : {BoundFamily::Additive, BoundFamily::Product}) {
    const auto a = estimate_order(data, grid, family);
    const auto b = estimate_order_serial(data, grid, family);
    const auto c = estimate_order(data, grid, family);
    CHECK(a.r_hat == b.r_hat);
    CHECK(a.s_hat == b.s_hat);
    CHECK(a.ell_hat == b.ell_hat);
    CHECK(a.log_ql == b.log_ql);
    CHECK(a.r_hat == c.r_hat);
    CHECK(a.surface.size() == 9 * 3 * 4);
    REQUIRE(a.surface.size() == b.surface.size());
    for (std::size_t i = 0; i < a.surface.size(); ++i) {
      CHECK((a.surface[i].log_ql == b.surface[i].log_ql || (!a.surface[i].feasible && !b.surface[i].feasible)));
    }
  }
  CHECK_THROWS_AS(estimate_order(data, grid, BoundFamily::Monomial), DimensionError);
  grid.r_values = {2.0, 1.0};
  CHECK_THROWS_AS(estimate_order(data, grid, BoundFamily::Additive), InvalidArgument);
}

namespace {

// r_hat on the scaled designs h * {1, 1/2, 1/4, 1/8}, h = 1, 1/2, 1/4, 1/8,
// for f(x) = 1 + x^{r0} e(x).
std::vector<double> order_trend(double r0, const std::function<double(double)>& e) {
  const std::vector<double> base = {1.0, 0.5, 0.25, 0.125};
  OrderGrid grid;
  std::vector<double> out;
  for (double h : {1.0, 0.5, 0.25, 0.125}) {
    std::vector<std::vector<double>> rows;
    std::vector<double> vals;
    for (double x : base) {
      const double y = h * x;
      rows.push_back({y});
      vals.push_back(1.0 + std::pow(y, r0) * e(y));
    }
    const auto data = Dataset::from_rows(rows, vals);
    grid.ell_values = OrderGrid::defaults(fidelity_range(data)).ell_values;
    out.push_back(estimate_order(data, grid, BoundFamily::Monomial).r_hat.at(0));
  }
  return out;
}

}  // namespace

TEST_CASE("estimate_order: trend under design refinement") {
  const std::vector<std::function<double(double)>> smooth = {
      [](double) { return 1.0; }, [](double y) { return 1.0 / (1.0 + y); }, [](double y) { return std::cos(y); }};
  for (double r0 : {0.5, 1.0, 2.0}) {
    for (const auto& e : smooth) {
      const auto t = order_trend(r0, e);
      CAPTURE(r0);
      CHECK(std::is_sorted(t.begin(), t.end()));
      CHECK(t.back() >= r0 - 0.5);
    }
  }
}

TEST_CASE("estimate_order: the estimate is asymptotically not below the true order") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> lead(0.5, 2.0);
  for (double r0 : {0.5, 1.0, 2.0}) {
    int hits = 0;
    for (int run = 0; run < 20; ++run) {
      const double e0 = lead(rng) * (u(rng) < 0 ? -1.0 : 1.0), e1 = u(rng), e2 = u(rng);
      const auto t = order_trend(r0, [=](double y) { return e0 + e1 * std::sin(3 * y) + e2 * y * y; });
      if (t.back() >= r0) ++hits;
    }
    CAPTURE(r0);
    CHECK(hits >= 18);
  }
}

TEST_CASE("estimate_axiswise") {
  const auto f = [](double x1, double x2) { return 1.0 + x1 + x2 * x2; };
  const std::vector<double> levels = {1.0, 0.5, 0.25, 0.125, 0.0625};
  std::vector<std::vector<double>> r1, r2;
  std::vector<double> v1, v2;
  for (double t : levels) {
    r1.push_back({t, 1.0});
    v1.push_back(f(t, 1.0));
    r2.push_back({1.0, t});
    v2.push_back(f(1.0, t));
  }
  const auto est = estimate_axiswise({Dataset::from_rows(r1, v1), Dataset::from_rows(r2, v2)});
  REQUIRE(est.axes.size() == 2);
  CHECK(est.axes[0].r == 1.0);
  CHECK(est.axes[1].r == 2.0);
  CHECK(est.axes[0].sigma_hat == doctest::Approx(std::sqrt(est.axes[0].estimate.sigma2)));
  const auto b = est.additive_bound();
  CHECK(b.required_dim() == 2);
  const auto k = est.product_kernel();
  CHECK(k.dim() == 2);

  // d = 1 reduces to estimate_order with the default grid.
  const auto one = Dataset::from_rows({{1.0}, {0.5}, {0.25}}, {1.2, 1.1, 1.04});
  const auto ax = estimate_axiswise({one});
  const auto direct = estimate_order(one, OrderGrid::defaults(fidelity_range(one)), BoundFamily::Monomial);
  CHECK(ax.axes[0].r == direct.r_hat[0]);
  CHECK(ax.axes[0].ell == direct.ell_hat);

  // Flat axis.
  std::vector<double> flat(levels.size(), 7.0);
  const auto fe = estimate_axiswise({Dataset::from_rows(r1, v1), Dataset::from_rows(r2, flat)});
  CHECK(fe.axes[1].r == 0.5);
  CHECK(fe.axes[1].sigma_hat > 0.0);
  CHECK(fe.warnings.size() >= 2);

  CHECK_THROWS_AS(estimate_axiswise({Dataset::from_rows({{0.3}}, {1.0})}), InvalidArgument);
  CHECK_THROWS_AS(estimate_axiswise({Dataset::from_rows(r2, v2), Dataset::from_rows(r2, v2)}), InvalidArgument);
}
