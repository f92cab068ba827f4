#include "gre/order.hpp"

#include "gre/gre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gre {

OrderGrid OrderGrid::defaults(double range, std::size_t points) {
  if (!(range > 0.0)) throw InvalidArgument("default length-scale grid needs a positive data range");
  if (points == 0) throw InvalidArgument("length-scale grid needs at least one point");
  OrderGrid g;
  const double lo = std::log(0.1 * range), hi = std::log(10.0 * range);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(points - 1);
    g.ell_values.push_back(std::exp(lo + t * (hi - lo)));
  }
  return g;
}

void OrderGrid::validate(bool require_ell) const {
  const auto ascending = [](const auto& v) { return std::is_sorted(v.begin(), v.end()) && std::adjacent_find(v.begin(), v.end()) == v.end(); };
  if (r_values.empty() || s_values.empty() || (require_ell && ell_values.empty())) {
    throw InvalidArgument("order grid lists must be nonempty");
  }
  if (!ascending(r_values) || !ascending(s_values) || !ascending(ell_values)) {
    throw InvalidArgument("order grid lists must be strictly ascending");
  }
  if (!(r_values.front() > 0.0)) throw InvalidArgument("order grid r values must be positive");
  if (s_values.front() < 0) throw InvalidArgument("order grid s values must be nonnegative");
  if (!ell_values.empty() && !(ell_values.front() > 0.0)) throw InvalidArgument("order grid length-scales must be positive");
}

OrderGrid OrderGrid::resolved(const Dataset& data) const {
  if (!ell_values.empty()) return *this;
  OrderGrid g = *this;
  g.ell_values = defaults(fidelity_range(data)).ell_values;
  return g;
}

double fidelity_range(const Dataset& data) {
  double spread = 0.0, top = 0.0;
  for (std::size_t k = 0; k < data.dim(); ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < data.size(); ++i) {
      lo = std::min(lo, data.point(i)[k]);
      hi = std::max(hi, data.point(i)[k]);
    }
    spread = std::max(spread, hi - lo);
    top = std::max(top, hi);
  }
  return spread > 0.0 ? spread : top;
}

std::string to_string(BoundFamily family) {
  switch (family) {
    case BoundFamily::Monomial: return "monomial";
    case BoundFamily::Additive: return "additive";
    case BoundFamily::Product: return "product";
  }
  return "?";
}

BoundFamily bound_family_from_string(const std::string& name) {
  if (name == "monomial") return BoundFamily::Monomial;
  if (name == "additive") return BoundFamily::Additive;
  if (name == "product") return BoundFamily::Product;
  throw InvalidArgument("unknown bound family '" + name + "'");
}

namespace {

ErrorBound make_bound(BoundFamily family, const std::vector<double>& r) {
  switch (family) {
    case BoundFamily::Monomial: return ErrorBound::monomial(r.front());
    case BoundFamily::Additive: return ErrorBound::additive(std::vector<double>(r.size(), 1.0), r);
    case BoundFamily::Product: return ErrorBound::product(r);
  }
  throw InvalidArgument("unknown bound family");
}

Kernel make_kernel(KernelFamily family, int s, double ell, std::size_t dim) {
  const auto ls = LengthScales::uniform(dim, ell);
  switch (family) {
    case KernelFamily::Matern: return KernelSpec::matern(s, ls);
    case KernelFamily::Wendland: return KernelSpec::wendland(s, ls);
    case KernelFamily::Gaussian: return KernelSpec::gaussian(ls);
  }
  throw InvalidArgument("unknown kernel family");
}

struct Candidate {
  std::vector<double> r;
  int s;
  double ell;
};

std::vector<Candidate> enumerate(const OrderGrid& grid, BoundFamily family, std::size_t dim) {
  const std::size_t axes = family == BoundFamily::Monomial ? 1 : dim;
  std::vector<std::vector<double>> rs = {{}};
  for (std::size_t k = 0; k < axes; ++k) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : rs) {
      for (double r : grid.r_values) {
        auto v = prefix;
        v.push_back(r);
        next.push_back(std::move(v));
      }
    }
    rs = std::move(next);
  }
  std::vector<Candidate> out;
  for (const auto& r : rs) {
    for (int s : grid.s_values) {
      for (double ell : grid.ell_values) out.push_back({r, s, ell});
    }
  }
  return out;
}

struct Evaluated {
  double log_ql;
  double sigma2;
  bool feasible;
};

Evaluated evaluate(const Dataset& data, const Candidate& c, BoundFamily family, const EstimateOptions& opts) {
  try {
    const GreModel model(make_bound(family, c.r), make_kernel(opts.kernel_family, c.s, c.ell, data.dim()),
                         opts.nugget_relative);
    const GrePosterior post(data, model);
    const double ql = -static_cast<double>(data.size()) * post.sigma2() - post.logdet_kb();
    if (!std::isfinite(ql)) return {std::numeric_limits<double>::quiet_NaN(), 0.0, false};
    return {ql, post.sigma2(), true};
  } catch (const IllConditionedError&) {
    return {std::numeric_limits<double>::quiet_NaN(), 0.0, false};
  }
}

bool is_constant(const Dataset& data) {
  const auto& f = data.values();
  double scale = 0.0, dev = 0.0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  for (double v : f) dev = std::max(dev, std::abs(v - f.front()));
  return dev <= 1e-14 * scale;
}

void check_inputs(const Dataset& data, const OrderGrid& grid, BoundFamily family) {
  grid.validate();
  if (data.size() < 2) throw InvalidArgument("order estimation needs at least two points");
  if (family == BoundFamily::Monomial && data.dim() != 1) {
    throw DimensionError("the monomial bound family estimates one axis; use additive or product for d > 1");
  }
}

OrderEstimate reduce(const Dataset& data, const std::vector<Candidate>& cands, const std::vector<Evaluated>& evals) {
  OrderEstimate est;
  est.surface.reserve(cands.size());
  const bool flat = is_constant(data);
  std::size_t best = cands.size();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    est.surface.push_back({cands[i].r, cands[i].s, cands[i].ell, evals[i].log_ql, evals[i].feasible});
    if (!evals[i].feasible) continue;
    // Candidates are enumerated in lexicographic order, so a strict
    // comparison keeps the smallest (r, s, ell) among ties.
    if (best == cands.size() || (!flat && evals[i].log_ql > evals[best].log_ql)) best = i;
  }
  if (best == cands.size()) throw IllConditionedError("every candidate in the order grid is infeasible", 0, 0);
  est.r_hat = cands[best].r;
  est.s_hat = cands[best].s;
  est.ell_hat = cands[best].ell;
  est.log_ql = evals[best].log_ql;
  est.sigma2 = evals[best].sigma2;
  if (data.size() < 3) est.warnings.push_back("fewer than three points; the order estimate is weakly identified");
  if (flat) est.warnings.push_back("data are constant; returning the smallest grid candidate");
  const auto infeasible = std::count_if(evals.begin(), evals.end(), [](const Evaluated& e) { return !e.feasible; });
  if (infeasible > 0) {
    est.warnings.push_back(std::to_string(infeasible) + " grid candidates were skipped as ill-conditioned");
  }
  return est;
}

}  // namespace

ErrorBound OrderEstimate::bound(BoundFamily family) const { return make_bound(family, r_hat); }

Kernel OrderEstimate::kernel(KernelFamily family, std::size_t dim) const {
  return make_kernel(family, s_hat, ell_hat, dim);
}

double log_quasi_likelihood(const Dataset& data, const ErrorBound& bound, const Kernel& kernel,
                            double nugget_relative) {
  if (data.size() < 2) throw InvalidArgument("the quasi-likelihood needs at least two points");
  const GrePosterior post(data, GreModel(bound, kernel, nugget_relative));
  return -static_cast<double>(data.size()) * post.sigma2() - post.logdet_kb();
}

OrderEstimate estimate_order(const Dataset& data, const OrderGrid& grid_in, BoundFamily family,
                             const EstimateOptions& opts) {
  const OrderGrid grid = grid_in.resolved(data);
  check_inputs(data, grid, family);
  const auto cands = enumerate(grid, family, data.dim());
  std::vector<Evaluated> evals(cands.size());
  const auto count = static_cast<std::int64_t>(cands.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    evals[static_cast<std::size_t>(i)] = evaluate(data, cands[static_cast<std::size_t>(i)], family, opts);
  }
  return reduce(data, cands, evals);
}

OrderEstimate estimate_order_serial(const Dataset& data, const OrderGrid& grid_in, BoundFamily family,
                                    const EstimateOptions& opts) {
  const OrderGrid grid = grid_in.resolved(data);
  check_inputs(data, grid, family);
  const auto cands = enumerate(grid, family, data.dim());
  std::vector<Evaluated> evals;
  evals.reserve(cands.size());
  for (const auto& c : cands) evals.push_back(evaluate(data, c, family, opts));
  return reduce(data, cands, evals);
}

ErrorBound AxiswiseEstimate::additive_bound() const {
  std::vector<double> w, r;
  for (const auto& a : axes) {
    w.push_back(a.sigma_hat);
    r.push_back(a.r);
  }
  return ErrorBound::additive(std::move(w), std::move(r));
}

ProductKernel AxiswiseEstimate::product_kernel(KernelFamily family) const {
  std::vector<KernelSpec> factors;
  for (const auto& a : axes) {
    const auto ls = LengthScales({a.ell});
    switch (family) {
      case KernelFamily::Matern: factors.push_back(KernelSpec::matern(a.s, ls)); break;
      case KernelFamily::Wendland: factors.push_back(KernelSpec::wendland(a.s, ls)); break;
      case KernelFamily::Gaussian: factors.push_back(KernelSpec::gaussian(ls)); break;
    }
  }
  return ProductKernel(std::move(factors));
}

namespace {

Dataset axis_slice(const Dataset& data, std::size_t axis, std::size_t dims) {
  if (data.dim() == 1) return data;
  if (data.dim() != dims) throw DimensionError("axis datasets disagree in dimension");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t k = 0; k < dims; ++k) {
      if (k != axis && data.point(i)[k] != data.point(0)[k]) {
        throw InvalidArgument("axis " + std::to_string(axis + 1) + " dataset varies coordinate " +
                              std::to_string(k + 1));
      }
    }
    rows.push_back({data.point(i)[axis]});
  }
  return Dataset::from_rows(rows, data.values());
}

}  // namespace

AxiswiseEstimate estimate_axiswise(const std::vector<Dataset>& datasets, const std::vector<OrderGrid>& grids,
                                   const EstimateOptions& opts) {
  if (datasets.empty()) throw InvalidArgument("axiswise estimation needs one dataset per axis");
  const std::size_t d = datasets.size();
  if (!grids.empty() && grids.size() != 1 && grids.size() != d) {
    throw DimensionError("axiswise estimation needs one grid per axis or a single shared grid");
  }
  AxiswiseEstimate out;
  for (std::size_t i = 0; i < d; ++i) {
    const Dataset slice = axis_slice(datasets[i], i, d);
    if (slice.size() < 2) {
      throw InvalidArgument("axis " + std::to_string(i + 1) + " dataset needs at least two points");
    }
    const OrderGrid grid = grids.empty() ? OrderGrid::defaults(fidelity_range(slice))
                                         : grids[grids.size() == 1 ? 0 : i];
    auto est = estimate_order(slice, grid, BoundFamily::Monomial, opts);
    for (const auto& w : est.warnings) out.warnings.push_back("axis " + std::to_string(i + 1) + ": " + w);
    const double r = est.r_hat.front();
    const int s = est.s_hat;
    const double ell = est.ell_hat;
    const double sd = std::sqrt(std::max(est.sigma2, 0.0));
    out.axes.push_back({i, r, s, ell, sd, std::move(est)});
  }
  // A flat axis has sigma_hat = 0, which would drop it from the additive bound.
  double top = 1.0;
  for (const auto& a : out.axes) top = std::max(top, a.sigma_hat);
  for (auto& a : out.axes) {
    if (!(a.sigma_hat > 1e-12 * top)) {
      a.sigma_hat = 1e-12 * top;
      out.warnings.push_back("axis " + std::to_string(a.axis + 1) +
                             ": scale estimate is zero; using a floor weight in the additive bound");
    }
  }
  return out;
}

}  // namespace gre
