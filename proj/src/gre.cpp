#include "gre/gre.hpp"

#include "gre/normal.hpp"

#include <cmath>

namespace gre {

GreModel::GreModel(ErrorBound b, Kernel k, double nugget)
    : bound(std::move(b)), kernel(std::move(k)), nugget_relative(nugget) {
  if (!(nugget_relative >= 0.0 && nugget_relative <= 1e-4)) {
    throw InvalidArgument("nugget_relative must lie in [0, 1e-4]");
  }
}

void GreModel::check_dim(std::size_t d) const {
  if (kernel_dim(kernel) != d) {
    throw DimensionError("kernel dimension " + std::to_string(kernel_dim(kernel)) +
                         " disagrees with fidelity dimension " + std::to_string(d));
  }
  if (!bound.accepts_dim(d)) {
    throw DimensionError("error bound is not defined on fidelity dimension " + std::to_string(d));
  }
}

CredibleInterval credible_interval(double mean, double variance, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
  if (!(variance > 0.0)) return {alpha, mean, mean, true};
  const double q = alpha == 1.0 ? 0.0 : normal_quantile(1.0 - alpha / 2.0);
  const double sd = std::sqrt(variance);
  return {alpha, mean - q * sd, mean + q * sd, false};
}

CredibleInterval credible_interval(const GrePosterior& post, double alpha) {
  return credible_interval(post.mean_at_zero(), post.var_at_zero(), alpha);
}

}  // namespace gre
