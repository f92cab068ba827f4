#pragma once

// All-subsets enumeration for small design problems, with the objective
// computed from a dense LU of K_b.

#include "gre/design.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <vector>

namespace gre::testing {

inline double dense_design_objective(const std::vector<std::vector<double>>& pts, const ErrorBound& b,
                                     const Kernel& k) {
  if (pts.empty()) return 0.0;
  const auto n = static_cast<Eigen::Index>(pts.size());
  MatrixXd kb(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& xi = pts[static_cast<std::size_t>(i)];
      const auto& xj = pts[static_cast<std::size_t>(j)];
      kb(i, j) = bound_eval(b, xi) * bound_eval(b, xj) * kernel_eval(k, xi, xj);
    }
  }
  const VectorXd one = VectorXd::Ones(n);
  return one.dot(kb.fullPivLu().solve(one));
}

struct NaiveDesign {
  std::vector<std::size_t> selected;
  double objective = 0.0;
};

inline NaiveDesign naive_design(const DesignProblem& p) {
  const std::size_t n = p.candidates.size();
  NaiveDesign best;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::size_t> set;
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) {
        set.push_back(i);
        cost += p.costs[i];
      }
    }
    if (cost > p.budget) continue;
    std::vector<std::vector<double>> pts;
    for (auto i : set) pts.push_back(p.candidates[i]);
    const double obj = dense_design_objective(pts, p.bound, p.kernel);
    if (obj > best.objective ||
        (obj == best.objective && std::lexicographical_compare(set.begin(), set.end(), best.selected.begin(),
                                                                best.selected.end()))) {
      best.objective = obj;
      best.selected = set;
    }
  }
  return best;
}

}  // namespace gre::testing
