#pragma once

#include "gre/bound.hpp"
#include "gre/design.hpp"
#include "gre/kernels.hpp"
#include "gre/scalar.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gre {

/// Test problem with a known limit f(0). The evaluator exists in double and
/// in extended precision; `snap` maps a requested fidelity to the one the
/// method can actually run at (identity when absent).
struct OracleProblem {
  std::string name;
  std::size_t dim = 1;
  std::function<double(std::span<const double>)> f;
  std::function<Extended(std::span<const Extended>)> f_extended;
  double true_limit = 0.0;
  std::function<Extended()> true_limit_extended;
  ErrorBound bound = ErrorBound::monomial(1.0);
  std::function<double(std::span<const double>)> cost;
  std::function<std::vector<double>(std::span<const double>)> snap;
  std::string notes;
};

/// Symmetric difference quotient of psi(t) = sin(10 t) + 1{t > 0} t^{s+4} at 0.
OracleProblem central_difference_oracle(int s_true);

/// n-panel trapezoid rule for the integral of sin(10 t) + t^2 over [0, 1],
/// indexed by x = 1/n.
OracleProblem trapezoid_oracle();

/// Candidate grid x = k / grid_size, k = 1..grid_size, with cost 1/x and
/// error bound x.
DesignProblem euler_design_problem(std::size_t grid_size, double budget = std::numeric_limits<double>::infinity(),
                                   Kernel kernel = KernelSpec::matern(0, LengthScales({1.0})));

struct StudyMethod {
  enum class Kind { Gre, Raw, Richardson, Shanks };
  Kind kind = Kind::Gre;
  KernelFamily family = KernelFamily::Matern;
  int smoothness = 0;
  double lengthscale = 1.0;
  double order = 1.0;  ///< leading order eliminated by Richardson

  static StudyMethod gre(KernelFamily family, int smoothness, double lengthscale = 1.0);
  static StudyMethod raw();
  static StudyMethod richardson(double order);
  static StudyMethod shanks();
  std::string name() const;
  static StudyMethod parse(const std::string& text);
};

struct Precision {
  bool extended = false;
  unsigned digits = 16;

  static Precision double_precision() { return {}; }
  static Precision extended_digits(unsigned digits) { return {true, digits}; }
  double epsilon() const;
  std::string name() const;
  static Precision parse(const std::string& text);
};

struct StudyCurve {
  std::string method;
  std::vector<double> abs_error;
  std::vector<double> rel_error;  ///< NaN for methods without a variance
  double slope = 0.0;             ///< NaN when fewer than two points clear the floor
  std::size_t window_begin = 0;   ///< fitted window [begin, end) into h_values
  std::size_t window_end = 0;
};

struct StudyResult {
  std::string problem;
  std::string precision;
  std::vector<double> h_values;
  std::vector<StudyCurve> curves;
  std::vector<std::string> warnings;

  const StudyCurve& curve(const std::string& method) const;
  /// Long-format table h,method,abs_error,rel_error.
  std::string to_csv() const;
};

/// Least-squares slope of log(error) against log(h) over the largest
/// contiguous run of entries with error >= floor.
struct SlopeFit {
  double slope;
  std::size_t begin;
  std::size_t end;
};
SlopeFit fit_loglog_slope(const std::vector<double>& h, const std::vector<double>& error, double floor);

StudyResult run_convergence_study(const OracleProblem& problem, const std::vector<std::vector<double>>& base_design,
                                  const std::vector<double>& h_values, const std::vector<StudyMethod>& methods,
                                  Precision precision = {});
StudyResult run_convergence_study_serial(const OracleProblem& problem,
                                         const std::vector<std::vector<double>>& base_design,
                                         const std::vector<double>& h_values,
                                         const std::vector<StudyMethod>& methods, Precision precision = {});

}  // namespace gre
