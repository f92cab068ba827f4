#pragma once

#include "gre/bound.hpp"
#include "gre/factor.hpp"
#include "gre/kernels.hpp"

#include <limits>
#include <string>
#include <vector>

namespace gre {

struct DesignProblem {
  std::vector<std::vector<double>> candidates;
  std::vector<double> costs;
  double budget = std::numeric_limits<double>::infinity();
  ErrorBound bound = ErrorBound::monomial(1.0);
  Kernel kernel;
  double nugget_relative = 0.0;

  void validate() const;
};

enum class DesignMethod { Auto, Exhaustive, Greedy };

std::string to_string(DesignMethod m);

struct DesignOptions {
  DesignMethod method = DesignMethod::Auto;
  /// Auto switches from exhaustive search to greedy above this many candidates.
  std::size_t exhaustive_limit = 20;
};

struct DesignSolution {
  std::vector<std::size_t> selected;  ///< ascending candidate indices
  double objective = 0.0;             ///< 1'K_b^{-1}1 on the selection, sigma2 = 1
  double total_cost = 0.0;
  DesignMethod method = DesignMethod::Exhaustive;
  bool optimal = false;
  std::size_t evaluated = 0;  ///< subsets (exhaustive) or candidate gains (greedy) evaluated
  /// Objective reached by greedy selection on gain per unit cost, recorded
  /// alongside the absolute-gain greedy result.
  double per_cost_greedy_objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;
};

/// Marker for a subset whose kernel matrix stays singular under the nugget
/// schedule (or that repeats a point).
inline constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

/// 1'K_b^{-1}1 on the given points; 0 for the empty set.
double design_objective(const std::vector<std::vector<double>>& points, const ErrorBound& bound,
                        const Kernel& kernel, double nugget_relative = 0.0);

/// Cholesky factor of K_e on a growing point set together with the whitened
/// vector a = L^{-1} B^{-1} 1, so that the objective is |a|^2.
class DesignState {
 public:
  DesignState(const ErrorBound& bound, const Kernel& kernel, double nugget_relative = 0.0);

  const std::vector<std::vector<double>>& points() const { return points_; }
  double objective() const { return objective_; }
  double nugget() const { return nugget_; }
  bool feasible() const { return feasible_; }

  /// Objective after adding x, without modifying the state. Uses a rank-1
  /// extension of the factor and falls back to a full factorisation when the
  /// new pivot breaks down. Returns kInfeasible for repeats or singular sets.
  double incremental_objective(const std::vector<double>& x) const;
  /// Adds x; returns false (state unchanged) when the result is infeasible.
  bool add(const std::vector<double>& x);

 private:
  struct Extension {
    bool ok;
    double pivot;
    double alpha;
    Vec<double> row;
  };
  Extension extend(const std::vector<double>& x) const;
  bool contains(const std::vector<double>& x) const;
  bool refactor(const std::vector<std::vector<double>>& pts);

  ErrorBound bound_;
  Kernel kernel_;
  double requested_nugget_;
  std::vector<std::vector<double>> points_;
  MatrixXd L_;
  VectorXd a_;
  double objective_ = 0.0;
  double nugget_ = 0.0;
  double jitter_ = 0.0;  ///< nugget * mean diagonal currently applied
  bool feasible_ = true;
};

/// Budget-constrained maximisation of the design objective.
DesignSolution optimize_design(const DesignProblem& problem, const DesignOptions& opts = {});
/// Exhaustive search on a single thread, kept as a reference for the
/// parallel search.
DesignSolution optimize_design_serial(const DesignProblem& problem, const DesignOptions& opts = {});

}  // namespace gre
