#include "gre/problems.hpp"

#include "gre/classical.hpp"
#include "gre/csv.hpp"
#include "gre/gre.hpp"

#include <cmath>
#include <sstream>

namespace gre {

namespace {

template <typename T>
T psi_cd(const T& t, int s) {
  using std::pow;
  using std::sin;
  T v = sin(T(10) * t);
  if (t > T(0)) v += pow(t, T(s + 4));
  return v;
}

template <typename T>
T central_difference(std::span<const T> x, int s) {
  if (x.size() != 1) throw DimensionError("central difference oracle is one-dimensional");
  const T& h = x[0];
  return (psi_cd(h, s) - psi_cd(T(-h), s)) / (T(2) * h);
}

long long panels(double x) {
  if (!(x > 0.0) || !(x <= 1.0)) throw InvalidArgument("trapezoid oracle: x must lie in (0, 1]");
  return std::max(1LL, std::llround(1.0 / x));
}

template <typename T>
T trapezoid(long long n) {
  using std::sin;
  auto psi = [](const T& t) { return sin(T(10) * t) + t * t; };
  T acc = (psi(T(0)) + psi(T(1))) / T(2);
  for (long long k = 1; k < n; ++k) acc += psi(T(k) / T(n));
  return acc / T(n);
}

}  // namespace

OracleProblem central_difference_oracle(int s_true) {
  if (s_true < 0) throw InvalidArgument("central difference oracle: s_true must be nonnegative");
  OracleProblem p;
  p.name = "central_difference_s" + std::to_string(s_true);
  p.dim = 1;
  p.f = [s_true](std::span<const double> x) { return central_difference<double>(x, s_true); };
  p.f_extended = [s_true](std::span<const Extended> x) { return central_difference<Extended>(x, s_true); };
  p.true_limit = 10.0;
  p.true_limit_extended = [] { return Extended(10); };
  p.bound = ErrorBound::monomial(2.0);
  p.notes = "(psi(x) - psi(-x)) / 2x, psi(t) = sin(10t) + 1{t>0} t^" + std::to_string(s_true + 4);
  return p;
}

OracleProblem trapezoid_oracle() {
  OracleProblem p;
  p.name = "trapezoid";
  p.dim = 1;
  p.f = [](std::span<const double> x) {
    if (x.size() != 1) throw DimensionError("trapezoid oracle is one-dimensional");
    return trapezoid<double>(panels(x[0]));
  };
  p.f_extended = [](std::span<const Extended> x) {
    if (x.size() != 1) throw DimensionError("trapezoid oracle is one-dimensional");
    return trapezoid<Extended>(panels(static_cast<double>(x[0])));
  };
  p.true_limit = (1.0 - std::cos(10.0)) / 10.0 + 1.0 / 3.0;
  p.true_limit_extended = [] {
    using std::cos;
    return (Extended(1) - cos(Extended(10))) / Extended(10) + Extended(1) / Extended(3);
  };
  p.bound = ErrorBound::monomial(2.0);
  p.cost = [](std::span<const double> x) { return static_cast<double>(panels(x[0]) + 1); };
  p.snap = [](std::span<const double> x) {
    if (x.size() != 1) throw DimensionError("trapezoid oracle is one-dimensional");
    return std::vector<double>{1.0 / static_cast<double>(panels(x[0]))};
  };
  p.notes = "n-panel trapezoid rule for sin(10t) + t^2 on [0, 1], x = 1/n";
  return p;
}

DesignProblem euler_design_problem(std::size_t grid_size, double budget, Kernel kernel) {
  if (grid_size < 2) throw InvalidArgument("euler design problem: grid size must be at least 2");
  DesignProblem p;
  for (std::size_t k = 1; k <= grid_size; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(grid_size);
    p.candidates.push_back({x});
    p.costs.push_back(1.0 / x);
  }
  p.budget = budget;
  p.bound = ErrorBound::monomial(1.0);
  p.kernel = std::move(kernel);
  return p;
}

StudyMethod StudyMethod::gre(KernelFamily family, int smoothness, double lengthscale) {
  StudyMethod m;
  m.kind = Kind::Gre;
  m.family = family;
  m.smoothness = family == KernelFamily::Gaussian ? 0 : smoothness;
  m.lengthscale = lengthscale;
  return m;
}

StudyMethod StudyMethod::raw() {
  StudyMethod m;
  m.kind = Kind::Raw;
  return m;
}

StudyMethod StudyMethod::richardson(double order) {
  StudyMethod m;
  m.kind = Kind::Richardson;
  m.order = order;
  return m;
}

StudyMethod StudyMethod::shanks() {
  StudyMethod m;
  m.kind = Kind::Shanks;
  return m;
}

std::string StudyMethod::name() const {
  switch (kind) {
    case Kind::Gre: {
      std::string s = "gre:" + to_string(family);
      if (family != KernelFamily::Gaussian) s += ":" + std::to_string(smoothness);
      if (lengthscale != 1.0) s += ":ell=" + csv::format(lengthscale);
      return s;
    }
    case Kind::Raw: return "raw";
    case Kind::Richardson: return "richardson:" + csv::format(order);
    case Kind::Shanks: return "shanks";
  }
  return "?";
}

StudyMethod StudyMethod::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw InvalidArgument("empty study method");
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InvalidArgument("study method '" + text + "': bad number '" + s + "'");
    }
  };
  if (parts[0] == "raw" && parts.size() == 1) return raw();
  if (parts[0] == "shanks" && parts.size() == 1) return shanks();
  if (parts[0] == "richardson" && parts.size() == 2) return richardson(number(parts[1]));
  if (parts[0] == "gre" && parts.size() >= 2) {
    const KernelFamily fam = kernel_family_from_string(parts[1]);
    std::size_t i = 2;
    int s = 0;
    if (fam != KernelFamily::Gaussian) {
      if (parts.size() < 3) throw InvalidArgument("study method '" + text + "': smoothness missing");
      s = static_cast<int>(number(parts[2]));
      i = 3;
    }
    double ell = 1.0;
    if (i < parts.size()) {
      if (parts[i].rfind("ell=", 0) != 0 || i + 1 != parts.size()) {
        throw InvalidArgument("study method '" + text + "': unexpected '" + parts[i] + "'");
      }
      ell = number(parts[i].substr(4));
    }
    return gre(fam, s, ell);
  }
  throw InvalidArgument("unknown study method '" + text + "'");
}

double Precision::epsilon() const {
  return extended ? std::pow(10.0, 1.0 - static_cast<double>(digits)) : machine_epsilon<double>();
}

std::string Precision::name() const { return extended ? "extended:" + std::to_string(digits) : "double"; }

Precision Precision::parse(const std::string& text) {
  if (text == "double") return double_precision();
  const std::string prefix = "extended:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string tail = text.substr(prefix.size());
    if (!tail.empty() && tail.find_first_not_of("0123456789") == std::string::npos) {
      const unsigned long d = std::stoul(tail);
      if (d >= 16 && d <= 1000) return extended_digits(static_cast<unsigned>(d));
    }
    throw InvalidArgument("extended precision needs between 16 and 1000 digits, got '" + tail + "'");
  }
  throw InvalidArgument("precision must be 'double' or 'extended:<digits>'");
}

const StudyCurve& StudyResult::curve(const std::string& method) const {
  for (const auto& c : curves) {
    if (c.method == method) return c;
  }
  throw InvalidArgument("study has no method '" + method + "'");
}

std::string StudyResult::to_csv() const {
  std::ostringstream out;
  out << "h,method,abs_error,rel_error\n";
  for (std::size_t i = 0; i < h_values.size(); ++i) {
    for (const auto& c : curves) {
      out << csv::format(h_values[i]) << ',' << c.method << ',' << csv::format(c.abs_error[i]) << ','
          << csv::format(c.rel_error[i]) << '\n';
    }
  }
  return out.str();
}

SlopeFit fit_loglog_slope(const std::vector<double>& h, const std::vector<double>& error, double floor) {
  if (h.size() != error.size()) throw DimensionError("slope fit: h and error differ in length");
  std::size_t best_b = 0, best_e = 0;
  for (std::size_t b = 0; b < h.size();) {
    if (!(error[b] >= floor) || !std::isfinite(error[b]) || error[b] <= 0.0) {
      ++b;
      continue;
    }
    std::size_t e = b;
    while (e < h.size() && error[e] >= floor && std::isfinite(error[e]) && error[e] > 0.0) ++e;
    if (e - b > best_e - best_b) {
      best_b = b;
      best_e = e;
    }
    b = e;
  }
  if (best_e - best_b < 2) return {std::numeric_limits<double>::quiet_NaN(), best_b, best_e};
  double mx = 0, my = 0;
  const double n = static_cast<double>(best_e - best_b);
  for (std::size_t i = best_b; i < best_e; ++i) {
    mx += std::log(h[i]);
    my += std::log(error[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = best_b; i < best_e; ++i) {
    const double dx = std::log(h[i]) - mx;
    sxy += dx * (std::log(error[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) return {std::numeric_limits<double>::quiet_NaN(), best_b, best_e};
  return {sxy / sxx, best_b, best_e};
}

namespace {

struct Cell {
  double abs_error = std::numeric_limits<double>::quiet_NaN();
  double rel_error = std::numeric_limits<double>::quiet_NaN();
};

struct Level {
  std::vector<Cell> cells;
  std::vector<std::string> warnings;
};

Sequence descending_sequence(const std::vector<std::vector<double>>& pts, const std::vector<double>& vals) {
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a][0] > pts[b][0]; });
  Sequence seq;
  for (auto i : order) {
    seq.x.push_back(pts[i][0]);
    seq.y.push_back(vals[i]);
  }
  return seq;
}

template <typename T>
Level run_level(const OracleProblem& problem, const std::vector<std::vector<double>>& base, double h,
                const std::vector<StudyMethod>& methods) {
  Level level;
  level.cells.resize(methods.size());
  auto note = [&](const std::string& m) {
    level.warnings.push_back("h=" + csv::format(h) + ": " + m);
  };

  std::vector<std::vector<double>> pts;
  for (const auto& b : base) {
    std::vector<double> x(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) x[k] = h * b[k];
    if (problem.snap) {
      auto s = problem.snap(x);
      bool moved = false;
      for (std::size_t k = 0; k < x.size(); ++k) moved = moved || std::abs(s[k] - x[k]) > 1e-12 * std::abs(x[k]);
      if (moved) note("fidelity " + csv::format(x[0]) + " snapped to " + csv::format(s[0]));
      x = std::move(s);
    }
    pts.push_back(std::move(x));
  }

  const std::size_t d = problem.dim;
  std::vector<T> coords, values;
  std::vector<double> values_d;
  T f0;
  if constexpr (std::is_same_v<T, double>) {
    f0 = problem.true_limit;
  } else {
    f0 = problem.true_limit_extended ? problem.true_limit_extended() : T(problem.true_limit);
  }
  for (const auto& x : pts) {
    std::vector<T> xt(x.begin(), x.end());
    coords.insert(coords.end(), xt.begin(), xt.end());
    T v;
    if constexpr (std::is_same_v<T, double>) {
      v = problem.f(std::span<const double>(xt));
    } else {
      v = problem.f_extended(std::span<const T>(xt));
    }
    values.push_back(v);
    values_d.push_back(to_double(v));
  }

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const StudyMethod& m = methods[mi];
    Cell& cell = level.cells[mi];
    try {
      switch (m.kind) {
        case StudyMethod::Kind::Gre: {
          const Kernel kernel = KernelSpec(m.family, m.smoothness, LengthScales::uniform(d, m.lengthscale));
          const GreModel model(problem.bound, kernel);
          const BasicPosterior<T> post(BasicDataset<T>(d, coords, values), model);
          using std::abs;
          using std::sqrt;
          const T err = f0 - post.mean_at_zero();
          cell.abs_error = to_double(abs(err));
          if (post.var_at_zero() > T(0)) cell.rel_error = to_double(err / sqrt(post.var_at_zero()));
          if (post.nugget_used() > 0.0) note(m.name() + " needed nugget " + csv::format(post.nugget_used()));
          break;
        }
        case StudyMethod::Kind::Raw: {
          std::size_t finest = 0;
          for (std::size_t i = 1; i < pts.size(); ++i) {
            double a = 0, b = 0;
            for (std::size_t k = 0; k < d; ++k) {
              a += pts[i][k] * pts[i][k];
              b += pts[finest][k] * pts[finest][k];
            }
            if (a < b) finest = i;
          }
          using std::abs;
          cell.abs_error = to_double(abs(f0 - values[finest]));
          break;
        }
        case StudyMethod::Kind::Richardson:
        case StudyMethod::Kind::Shanks: {
          if (d != 1) throw DimensionError(m.name() + " needs one-dimensional fidelities");
          const Sequence seq = descending_sequence(pts, values_d);
          const Transformed t =
              m.kind == StudyMethod::Kind::Richardson ? richardson(seq, m.order, seq.size() - 1) : shanks(seq);
          if (t.y.empty()) throw DegenerateBasisError(m.name() + " is undefined on this sequence");
          cell.abs_error = std::abs(to_double(f0) - t.y.back());
          break;
        }
      }
    } catch (const Error& e) {
      note(m.name() + " failed: " + e.what());
    }
  }
  return level;
}

StudyResult run_study(const OracleProblem& problem, const std::vector<std::vector<double>>& base,
                      const std::vector<double>& hs, const std::vector<StudyMethod>& methods, Precision precision,
                      bool parallel) {
  if (methods.empty()) throw InvalidArgument("convergence study needs at least one method");
  if (base.empty()) throw InvalidArgument("convergence study needs a nonempty base design");
  if (hs.empty()) throw InvalidArgument("convergence study needs at least one h value");
  for (double h : hs) {
    if (!(h > 0.0 && h <= 1.0)) throw InvalidArgument("h values must lie in (0, 1]");
  }
  for (const auto& b : base) {
    if (b.size() != problem.dim) throw DimensionError("base design dimension disagrees with the problem");
    for (double v : b) {
      if (!(v > 0.0 && v <= 1.0)) throw InvalidArgument("base design points must lie in (0, 1]");
    }
  }
  if (precision.extended && !problem.f_extended) {
    throw InvalidArgument("problem '" + problem.name + "' has no extended-precision evaluator");
  }

  std::vector<Level> levels(hs.size());
  const auto n = static_cast<long long>(hs.size());
  if (precision.extended) {
    // Extended precision is set per thread, so this path runs serially.
    ScopedDigits digits(precision.digits);
    for (long long i = 0; i < n; ++i) levels[i] = run_level<Extended>(problem, base, hs[i], methods);
  } else {
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long long i = 0; i < n; ++i) levels[i] = run_level<double>(problem, base, hs[i], methods);
  }

  StudyResult r;
  r.problem = problem.name;
  r.precision = precision.name();
  r.h_values = hs;
  const double floor = 100.0 * precision.epsilon() * std::abs(problem.true_limit);
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    StudyCurve c;
    c.method = methods[mi].name();
    for (const auto& lv : levels) {
      c.abs_error.push_back(lv.cells[mi].abs_error);
      c.rel_error.push_back(lv.cells[mi].rel_error);
    }
    const SlopeFit fit = fit_loglog_slope(hs, c.abs_error, floor);
    c.slope = fit.slope;
    c.window_begin = fit.begin;
    c.window_end = fit.end;
    r.curves.push_back(std::move(c));
  }
  for (const auto& lv : levels) r.warnings.insert(r.warnings.end(), lv.warnings.begin(), lv.warnings.end());
  return r;
}

}  // namespace

StudyResult run_convergence_study(const OracleProblem& problem, const std::vector<std::vector<double>>& base_design,
                                  const std::vector<double>& h_values, const std::vector<StudyMethod>& methods,
                                  Precision precision) {
  return run_study(problem, base_design, h_values, methods, precision, true);
}

StudyResult run_convergence_study_serial(const OracleProblem& problem,
                                         const std::vector<std::vector<double>>& base_design,
                                         const std::vector<double>& h_values,
                                         const std::vector<StudyMethod>& methods, Precision precision) {
  return run_study(problem, base_design, h_values, methods, precision, false);
}

}  // namespace gre
