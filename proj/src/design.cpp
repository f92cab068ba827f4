#include "gre/design.hpp"

#include "gre/gre.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gre {

std::string to_string(DesignMethod m) {
  switch (m) {
    case DesignMethod::Auto: return "auto";
    case DesignMethod::Exhaustive: return "exhaustive";
    case DesignMethod::Greedy: return "greedy";
  }
  return "?";
}

void DesignProblem::validate() const {
  if (candidates.empty()) throw InvalidArgument("design problem needs at least one candidate");
  if (costs.size() != candidates.size()) throw DimensionError("design problem: one cost per candidate required");
  if (!(budget > 0.0)) throw InvalidArgument("design budget must be positive");
  const std::size_t d = candidates.front().size();
  if (kernel_dim(kernel) != d || !bound.accepts_dim(d)) {
    throw DimensionError("design problem: model dimension disagrees with the candidates");
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].size() != d) throw DimensionError("design candidates differ in dimension");
    for (double v : candidates[i]) {
      if (!(v > 0.0)) throw InvalidArgument("design candidates must have every component strictly positive");
    }
    if (!(costs[i] > 0.0) || !std::isfinite(costs[i])) throw InvalidArgument("design costs must be positive and finite");
    for (std::size_t j = 0; j < i; ++j) {
      if (candidates[i] == candidates[j]) {
        throw InvalidArgument("design candidates " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
      }
    }
  }
  if (!(nugget_relative >= 0.0 && nugget_relative <= 1e-4)) {
    throw InvalidArgument("nugget_relative must lie in [0, 1e-4]");
  }
}

double design_objective(const std::vector<std::vector<double>>& points, const ErrorBound& bound,
                        const Kernel& kernel, double nugget_relative) {
  if (points.empty()) return 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (points[i] == points[j]) return kInfeasible;
    }
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  MatrixXd K(n, n);
  VectorXd binv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& xi = points[static_cast<std::size_t>(i)];
    binv(i) = 1.0 / bound_eval(bound, xi);
    for (Eigen::Index j = 0; j <= i; ++j) {
      K(i, j) = kernel_eval(kernel, xi, points[static_cast<std::size_t>(j)]);
      K(j, i) = K(i, j);
    }
  }
  const auto f = SpdFactor<double>::try_factorize(K, nugget_relative);
  if (!f) return kInfeasible;
  return f->whiten(binv).squaredNorm();
}

DesignState::DesignState(const ErrorBound& bound, const Kernel& kernel, double nugget_relative)
    : bound_(bound), kernel_(kernel), requested_nugget_(nugget_relative), nugget_(nugget_relative) {}

bool DesignState::contains(const std::vector<double>& x) const {
  return std::find(points_.begin(), points_.end(), x) != points_.end();
}

DesignState::Extension DesignState::extend(const std::vector<double>& x) const {
  const auto n = static_cast<Eigen::Index>(points_.size());
  VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k(i) = kernel_eval(kernel_, points_[static_cast<std::size_t>(i)], x);
  const double kxx = kernel_eval(kernel_, x, x) + jitter_;
  VectorXd l = n > 0 ? VectorXd(L_.triangularView<Eigen::Lower>().solve(k)) : VectorXd();
  const double p2 = kxx - l.squaredNorm();
  // Same acceptance as a full factorisation would give, with a margin.
  if (!(p2 > 1e-12 * kxx)) return {false, 0.0, 0.0, {}};
  const double pivot = std::sqrt(p2);
  const double alpha = (1.0 / bound_eval(bound_, x) - (n > 0 ? l.dot(a_) : 0.0)) / pivot;
  return {true, pivot, alpha, std::move(l)};
}

double DesignState::incremental_objective(const std::vector<double>& x) const {
  if (!feasible_ || contains(x)) return kInfeasible;
  const auto e = extend(x);
  if (e.ok) return objective_ + e.alpha * e.alpha;
  auto pts = points_;
  pts.push_back(x);
  return design_objective(pts, bound_, kernel_, std::max(requested_nugget_, nugget_));
}

bool DesignState::refactor(const std::vector<std::vector<double>>& pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  MatrixXd K(n, n);
  VectorXd binv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    binv(i) = 1.0 / bound_eval(bound_, pts[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j <= i; ++j) {
      K(i, j) = kernel_eval(kernel_, pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
      K(j, i) = K(i, j);
    }
  }
  const auto f = SpdFactor<double>::try_factorize(K, std::max(requested_nugget_, nugget_));
  if (!f) return false;
  points_ = pts;
  L_ = f->llt().matrixL();
  a_ = f->whiten(binv);
  objective_ = a_.squaredNorm();
  nugget_ = f->nugget();
  jitter_ = nugget_ > 0.0 ? nugget_ * K.diagonal().mean() : 0.0;
  return true;
}

bool DesignState::add(const std::vector<double>& x) {
  if (!feasible_ || contains(x)) return false;
  const auto e = extend(x);
  if (!e.ok) {
    auto pts = points_;
    pts.push_back(x);
    return refactor(pts);
  }
  const auto n = L_.rows();
  L_.conservativeResize(n + 1, n + 1);
  L_.row(n).head(n) = e.row.transpose();
  L_.col(n).head(n).setZero();
  L_(n, n) = e.pivot;
  a_.conservativeResize(n + 1);
  a_(n) = e.alpha;
  objective_ += e.alpha * e.alpha;
  points_.push_back(x);
  return true;
}

namespace {

// Budget checks sum costs in ascending index order so that every code path
// agrees on the 64-bit total.
double ascending_cost(const std::vector<std::size_t>& set, const std::vector<double>& costs) {
  std::vector<std::size_t> s(set);
  std::sort(s.begin(), s.end());
  double acc = 0.0;
  for (auto i : s) acc += costs[i];
  return acc;
}

double cost_with(const std::vector<std::size_t>& set, std::size_t j, const std::vector<double>& costs) {
  std::vector<std::size_t> s(set);
  s.push_back(j);
  return ascending_cost(s, costs);
}

struct Best {
  double objective = kInfeasible;
  std::vector<std::size_t> set;
  std::size_t evaluated = 0;

  void consider(double obj, const std::vector<std::size_t>& s) {
    if (obj == kInfeasible) return;
    if (obj > objective || (obj == objective && std::lexicographical_compare(s.begin(), s.end(), set.begin(), set.end()))) {
      objective = obj;
      set = s;
    }
  }
  void merge(const Best& other) {
    evaluated += other.evaluated;
    consider(other.objective, other.set);
  }
};

class Search {
 public:
  explicit Search(const DesignProblem& p) : p_(p) {}

  Best branch(std::size_t first) const {
    Best best;
    if (p_.costs[first] > p_.budget) return best;
    DesignState st(p_.bound, p_.kernel, p_.nugget_relative);
    if (!st.add(p_.candidates[first])) return best;
    std::vector<std::size_t> set = {first};
    dfs(st, set, best);
    return best;
  }

 private:
  void dfs(const DesignState& st, std::vector<std::size_t>& set, Best& best) const {
    const std::size_t n = p_.candidates.size();
    bool extendable = false;
    for (std::size_t j = set.back() + 1; j < n; ++j) {
      if (cost_with(set, j, p_.costs) > p_.budget) continue;
      DesignState child = st;
      if (!child.add(p_.candidates[j])) continue;
      extendable = true;
      set.push_back(j);
      dfs(child, set, best);
      set.pop_back();
    }
    if (extendable) return;
    // Supersets through smaller indices are visited in other branches; the
    // set is only evaluated when no affordable, feasible extension exists.
    for (std::size_t j = 0; j < set.back(); ++j) {
      if (std::find(set.begin(), set.end(), j) != set.end()) continue;
      if (cost_with(set, j, p_.costs) > p_.budget) continue;
      if (st.incremental_objective(p_.candidates[j]) != kInfeasible) return;
    }
    ++best.evaluated;
    best.consider(st.objective(), set);
  }

  const DesignProblem& p_;
};

template <bool Parallel>
Best exhaustive(const DesignProblem& p) {
  const Search search(p);
  const std::size_t n = p.candidates.size();
  std::vector<Best> branches(n);
  if constexpr (Parallel) {
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
      branches[static_cast<std::size_t>(i)] = search.branch(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) branches[i] = search.branch(i);
  }
  Best best;
  for (const auto& b : branches) best.merge(b);
  return best;
}

struct GreedyResult {
  std::vector<std::size_t> set;
  std::size_t evaluated = 0;
};

GreedyResult greedy(const DesignProblem& p, bool per_cost) {
  GreedyResult out;
  DesignState st(p.bound, p.kernel, p.nugget_relative);
  const std::size_t n = p.candidates.size();
  std::vector<bool> used(n, false);
  for (;;) {
    std::size_t pick = n;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || cost_with(out.set, j, p.costs) > p.budget) continue;
      const double obj = st.incremental_objective(p.candidates[j]);
      ++out.evaluated;
      if (obj == kInfeasible) continue;
      const double gain = per_cost ? (obj - st.objective()) / p.costs[j] : obj - st.objective();
      if (gain > best) {
        best = gain;
        pick = j;
      }
    }
    if (pick == n || !st.add(p.candidates[pick])) break;
    used[pick] = true;
    out.set.push_back(pick);
  }
  std::sort(out.set.begin(), out.set.end());
  return out;
}

std::vector<std::vector<double>> points_of(const DesignProblem& p, const std::vector<std::size_t>& set) {
  std::vector<std::vector<double>> pts;
  for (auto i : set) pts.push_back(p.candidates[i]);
  return pts;
}

template <bool Parallel>
DesignSolution solve(const DesignProblem& p, const DesignOptions& opts) {
  p.validate();
  DesignSolution sol;
  DesignMethod method = opts.method;
  if (method == DesignMethod::Auto) {
    method = p.candidates.size() <= opts.exhaustive_limit ? DesignMethod::Exhaustive : DesignMethod::Greedy;
  }
  if (method == DesignMethod::Exhaustive && p.candidates.size() > 30) {
    throw InvalidArgument("exhaustive design search is limited to 30 candidates");
  }
  sol.method = method;
  if (*std::min_element(p.costs.begin(), p.costs.end()) > p.budget) {
    sol.optimal = method == DesignMethod::Exhaustive;
    if (method == DesignMethod::Greedy) sol.per_cost_greedy_objective = 0.0;
    sol.warnings.push_back("budget is below the cheapest candidate; the design is empty");
    return sol;
  }
  if (method == DesignMethod::Exhaustive) {
    const Best best = exhaustive<Parallel>(p);
    sol.selected = best.set;
    sol.evaluated = best.evaluated;
    sol.optimal = true;
  } else {
    auto g = greedy(p, false);
    sol.selected = std::move(g.set);
    sol.evaluated = g.evaluated;
    sol.per_cost_greedy_objective =
        design_objective(points_of(p, greedy(p, true).set), p.bound, p.kernel, p.nugget_relative);
  }
  if (sol.selected.empty()) {
    sol.warnings.push_back("no affordable candidate set has a nonsingular kernel matrix; the design is empty");
    return sol;
  }
  sol.objective = design_objective(points_of(p, sol.selected), p.bound, p.kernel, p.nugget_relative);
  sol.total_cost = ascending_cost(sol.selected, p.costs);
  return sol;
}

}  // namespace

DesignSolution optimize_design(const DesignProblem& problem, const DesignOptions& opts) {
  return solve<true>(problem, opts);
}

DesignSolution optimize_design_serial(const DesignProblem& problem, const DesignOptions& opts) {
  return solve<false>(problem, opts);
}

}  // namespace gre
