#include "gre/diagnostics.hpp"

#include "gre/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gre {

namespace {

void validate(const std::vector<std::vector<double>>& points, std::size_t dim) {
  if (dim == 0) throw InvalidArgument("box fill distance needs a positive dimension");
  for (const auto& p : points) {
    if (p.size() != dim) throw DimensionError("box fill distance: point dimension disagrees");
    for (double v : p) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("box fill distance: points must lie in [0,1]^d");
    }
  }
}

BoxFill exact_1d(const std::vector<std::vector<double>>& points) {
  std::vector<double> xs;
  xs.reserve(points.size() + 2);
  xs.push_back(0.0);
  for (const auto& p : points) xs.push_back(p[0]);
  xs.push_back(1.0);
  std::sort(xs.begin(), xs.end());
  double gap = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) gap = std::max(gap, xs[i] - xs[i - 1]);
  return {gap, false, 0};
}

// Largest empty box anchored at x.
double anchored(const double* x, const std::vector<std::vector<double>>& points, std::size_t dim) {
  double nu = 1.0;
  for (std::size_t k = 0; k < dim; ++k) nu = std::min(nu, 1.0 - x[k]);
  for (const auto& p : points) {
    double reach = 0.0;
    bool ahead = true;
    for (std::size_t k = 0; k < dim && ahead; ++k) {
      if (p[k] < x[k]) ahead = false;
      reach = std::max(reach, p[k] - x[k]);
    }
    if (ahead) nu = std::min(nu, reach);
  }
  return nu;
}

std::size_t per_axis(std::size_t dim, const BoxFillOptions& opts) {
  std::size_t m = std::max<std::size_t>(opts.lattice_per_axis, 2);
  for (;;) {
    double total = std::pow(static_cast<double>(m), static_cast<double>(dim));
    if (total <= static_cast<double>(opts.max_lattice_anchors) || m == 2) return m;
    --m;
  }
}

std::vector<double> random_anchor_table(std::size_t dim, const BoxFillOptions& opts) {
  std::vector<double> out(opts.random_anchors * dim);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : out) v = u(rng);
  return out;
}

template <bool Parallel>
BoxFill lattice_search(const std::vector<std::vector<double>>& points, std::size_t dim, const BoxFillOptions& opts) {
  validate(points, dim);
  if (dim == 1) return exact_1d(points);
  const std::size_t m = per_axis(dim, opts);
  std::size_t total = 1;
  for (std::size_t k = 0; k < dim; ++k) total *= m;
  const std::vector<double> extra = random_anchor_table(dim, opts);
  const std::size_t n_extra = opts.random_anchors;
  const auto count = static_cast<std::int64_t>(total + n_extra);
  double best = 0.0;

  const auto body = [&](std::int64_t idx, std::vector<double>& x) {
    if (static_cast<std::size_t>(idx) < total) {
      std::size_t rem = static_cast<std::size_t>(idx);
      for (std::size_t k = 0; k < dim; ++k) {
        x[k] = static_cast<double>(rem % m) / static_cast<double>(m);
        rem /= m;
      }
    } else {
      const std::size_t r = static_cast<std::size_t>(idx) - total;
      std::copy_n(extra.begin() + static_cast<std::ptrdiff_t>(r * dim), dim, x.begin());
    }
    return anchored(x.data(), points, dim);
  };

  if constexpr (Parallel) {
#pragma omp parallel
    {
      std::vector<double> x(dim);
      double local = 0.0;
#pragma omp for schedule(static)
      for (std::int64_t idx = 0; idx < count; ++idx) local = std::max(local, body(idx, x));
#pragma omp critical
      best = std::max(best, local);
    }
  } else {
    std::vector<double> x(dim);
    for (std::int64_t idx = 0; idx < count; ++idx) best = std::max(best, body(idx, x));
  }
  return {best, true, total + n_extra};
}

}  // namespace

BoxFill box_fill_distance(const std::vector<std::vector<double>>& points, std::size_t dim,
                          const BoxFillOptions& opts) {
  return lattice_search<true>(points, dim, opts);
}

BoxFill box_fill_distance_serial(const std::vector<std::vector<double>>& points, std::size_t dim,
                                 const BoxFillOptions& opts) {
  return lattice_search<false>(points, dim, opts);
}

std::int64_t gamma_constant(int d) {
  if (d < 1) throw InvalidArgument("gamma constant needs d >= 1");
  std::int64_t g = 2;
  for (int k = 2; k <= d; ++k) g = 2 * k * (1 + g);
  return g;
}

double fill_threshold(int d, double r, int s) {
  if (!(r > 0.0) || s < 0) throw InvalidArgument("fill threshold needs r > 0 and s >= 0");
  return 1.0 / (static_cast<double>(gamma_constant(d)) * (r + 2.0 * s));
}

}  // namespace gre
