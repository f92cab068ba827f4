#include <doctest.h>

#include "gre/instrumentation.hpp"
#include "gre/multioutput.hpp"
#include "oracles/dense_kronecker.hpp"
#include "oracles/random_points.hpp"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace gre;
using gre::testing::rel_diff;

namespace {

struct RandomGrid {
  GridDataset grid;
  GreModel model;
  Kernel kt;
};

RandomGrid random_grid(std::mt19937& rng, std::size_t n1, std::size_t n2, std::size_t d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto xs = testing::random_points(rng, n1, d, 0.05, 1.0, 0.5 / static_cast<double>(n1 + 3));
  std::vector<std::vector<double>> ts;
  for (std::size_t j = 0; j < n2; ++j) ts.push_back({static_cast<double>(j) + 0.3 * u(rng)});
  MatrixXd F(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2));
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      double s = 0.0;
      for (double c : xs[i]) s += c;
      F(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::sin(ts[j][0]) + s * (1 + u(rng) * 0.5);
    }
  }
  GreModel m(d == 1 ? ErrorBound::monomial(1.0) : ErrorBound::additive(std::vector<double>(d, 1.0), std::vector<double>(d, 1.0)),
             KernelSpec::matern(1, LengthScales::uniform(d, 0.4)));
  Kernel kt = KernelSpec::matern(2, LengthScales({1.5}));
  return {GridDataset(xs, ts, F), m, kt};
}

}  // namespace

TEST_CASE("single index reduces to scalar GRE") {
  std::mt19937 rng(1);
  auto g = random_grid(rng, 5, 1, 1);
  const MultiPosterior post(g.grid, g.model, g.kt);
  const GrePosterior scalar(g.grid.column(0), g.model);
  CHECK(post.mean_at_zero()(0) == doctest::Approx(scalar.mean_at_zero()).epsilon(1e-14));
  CHECK(post.sigma2() == doctest::Approx(scalar.sigma2()).epsilon(1e-12));
  CHECK(post.var_at_zero()(0) == doctest::Approx(scalar.var_at_zero()).epsilon(1e-12));
  const std::vector<double> x = {0.37};
  CHECK(post.predict(x, 0).mean == doctest::Approx(scalar.predict(std::span<const double>(x)).mean).epsilon(1e-13));
  CHECK(post.predict(x, 0).variance == doctest::Approx(scalar.predict(std::span<const double>(x)).variance).epsilon(1e-12));
}

TEST_CASE("column means equal scalar GRE on each column") {
  std::mt19937 rng(2);
  for (int t = 0; t < 10; ++t) {
    auto g = random_grid(rng, 3 + t % 4, 2 + t % 3, 1 + t % 2);
    const MultiPosterior post(g.grid, g.model, g.kt);
    for (std::size_t j = 0; j < g.grid.n2(); ++j) {
      const GrePosterior col(g.grid.column(j), g.model);
      CHECK(post.mean_at_zero()(static_cast<Eigen::Index>(j)) == doctest::Approx(col.mean_at_zero()).epsilon(1e-12));
    }
  }

  // Separable data g(x) phi(t): each extrapolated value is m[g](0) phi(t_j).
  const std::vector<std::vector<double>> xs = {{1.0}, {0.5}, {0.25}, {0.125}};
  const std::vector<std::vector<double>> ts = {{0.0}, {1.0}, {2.0}};
  MatrixXd F(4, 3);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) F(i, j) = (2.0 + xs[i][0] + 0.3 * xs[i][0] * xs[i][0]) * std::cos(ts[j][0]);
  }
  const GreModel m(ErrorBound::monomial(1.0), KernelSpec::matern(1, LengthScales({1.0})));
  const MultiPosterior post(GridDataset(xs, ts, F), m, default_index_kernel(ts));
  std::vector<double> gv;
  for (int i = 0; i < 4; ++i) gv.push_back(2.0 + xs[i][0] + 0.3 * xs[i][0] * xs[i][0]);
  const double mg = GrePosterior(Dataset::from_rows(xs, gv), m).mean_at_zero();
  for (int j = 0; j < 3; ++j) CHECK(post.mean_at_zero()(j) == doctest::Approx(mg * std::cos(ts[j][0])).epsilon(1e-12));
}

TEST_CASE("grid posterior matches the dense finite-k0 Kronecker computation") {
  std::mt19937 rng(3);
  for (int t = 0; t < 8; ++t) {
    const std::size_t n1 = 2 + t % 3, n2 = 1 + t % 3;
    auto g = random_grid(rng, n1, n2, 1 + t % 2);
    const MultiPosterior post(g.grid, g.model, g.kt);
    const testing::DenseKronecker dense(g.grid, g.model, g.kt, 1e8);
    const std::size_t d = g.grid.dim();
    const std::vector<std::vector<double>> probes = {std::vector<double>(d, 0.0), std::vector<double>(d, 0.3),
                                                     std::vector<double>(d, 0.77)};
    for (const auto& x : probes) {
      for (std::size_t j = 0; j < n2; ++j) {
        const auto p = post.predict(x, j);
        CHECK(rel_diff(p.mean, dense.mean(x, j), 1e-12) <= 1e-5);
        if (post.sigma2() > 0.0) {
          const double unit = p.variance / post.sigma2();
          CHECK(rel_diff(unit, dense.covariance(x, j, x, j), 1e-10) <= 1e-5);
          const std::size_t k = (j + 1) % n2;
          CHECK(rel_diff(post.covariance(x, j, probes[1], k) / post.sigma2(), dense.covariance(x, j, probes[1], k),
                         1e-10) <= 1e-5);
        }
      }
    }
  }
}

TEST_CASE("3x2 grid example") {
  const std::vector<std::vector<double>> xs = {{1.0}, {0.5}, {0.25}};
  const std::vector<std::vector<double>> ts = {{0.0}, {1.0}};
  MatrixXd F(3, 2);
  F << 1.9, 3.1, 1.45, 2.62, 1.22, 2.33;
  const GreModel m(ErrorBound::monomial(1.0), KernelSpec::matern(0, LengthScales({1.0})));
  const Kernel kt = default_index_kernel(ts);
  const MultiPosterior post(GridDataset(xs, ts, F), m, kt);
  const testing::DenseKronecker dense(GridDataset(xs, ts, F), m, kt, 1e8);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(rel_diff(post.mean_at_zero()(static_cast<Eigen::Index>(j)), dense.mean({0.0}, j)) <= 1e-5);
    CHECK(rel_diff(post.var_at_zero()(static_cast<Eigen::Index>(j)) / post.sigma2(), dense.covariance({0.0}, j, {0.0}, j)) <= 1e-5);
  }
  CHECK(rel_diff(post.covariance(std::vector<double>{0.0}, 0, std::vector<double>{0.0}, 1) / post.sigma2(),
                 dense.covariance({0.0}, 0, {0.0}, 1)) <= 1e-5);
}

TEST_CASE("predict_grid examples and errors") {
  std::mt19937 rng(4);
  auto g = random_grid(rng, 4, 3, 2);
  const MultiPosterior post(g.grid, g.model, g.kt);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const auto p = post.predict(g.grid.x_points()[i], j);
      CHECK(p.mean == doctest::Approx(g.grid.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))).epsilon(1e-10));
      CHECK(std::abs(p.variance) <= 1e-10 * post.sigma2());
    }
  }
  const std::vector<double> off = {g.grid.t_points()[0][0] + 0.01};
  CHECK_THROWS_AS(post.predict_at(std::vector<double>{0.1, 0.1}, off), OffGridError);
  CHECK_THROWS_AS(post.predict(std::vector<double>{0.1, 0.1}, 3), OffGridError);
  CHECK(post.predict_at(std::vector<double>{0.1, 0.1}, g.grid.t_points()[1]).mean ==
        post.predict(std::vector<double>{0.1, 0.1}, 1).mean);

  // Column-constant data.
  MatrixXd C(4, 3);
  for (int i = 0; i < 4; ++i) C.row(i) << 1.5, -2.0, 7.25;
  const MultiPosterior pc(GridDataset(g.grid.x_points(), g.grid.t_points(), C), g.model, g.kt);
  CHECK(pc.predict(std::vector<double>{0.0, 0.0}, 0).mean == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(pc.predict(std::vector<double>{0.0, 0.0}, 1).mean == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(pc.predict(std::vector<double>{0.0, 0.0}, 2).mean == doctest::Approx(7.25).epsilon(1e-12));
}

TEST_CASE("covariance is symmetric") {
  std::mt19937 rng(5);
  auto g = random_grid(rng, 5, 3, 1);
  const MultiPosterior post(g.grid, g.model, g.kt);
  const std::vector<double> a = {0.2}, b = {0.66};
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(post.covariance(a, j, b, k) == doctest::Approx(post.covariance(b, k, a, j)).epsilon(1e-13));
    }
  }
}

TEST_CASE("fit_grid factors only n1 x n1 and n2 x n2 matrices") {
  std::mt19937 rng(6);
  auto g = random_grid(rng, 6, 4, 1);
  instrumentation::clear_factorization_log();
  instrumentation::enable_factorization_log(true);
  const auto post = fit_grid(g.grid, g.model.bound, g.model.kernel, g.kt);
  (void)post.predict(std::vector<double>{0.0}, 2);
  instrumentation::enable_factorization_log(false);
  const auto& log = instrumentation::factorization_log();
  REQUIRE_FALSE(log.empty());
  for (auto n : log) CHECK((n == 6 || n == 4));
  CHECK(std::set<std::size_t>(log.begin(), log.end()) == std::set<std::size_t>{4, 6});
}

TEST_CASE("grid CSV") {
  std::istringstream ok("x1,t,f\n1,0,1.0\n1,1,2.0\n0.5,0,1.5\n0.5,1,2.5\n");
  const auto g = parse_grid(csv::parse(ok));
  CHECK(g.n1() == 2);
  CHECK(g.n2() == 2);
  CHECK(g.values()(1, 1) == 2.5);
  std::istringstream missing("x1,t,f\n1,0,1.0\n1,1,2.0\n0.5,0,1.5\n");
  CHECK_THROWS_AS(parse_grid(csv::parse(missing)), InvalidArgument);
  std::istringstream bad("x1,f,t\n1,0,1.0\n");
  CHECK_THROWS_AS(parse_grid(csv::parse(bad)), ParseError);
}
