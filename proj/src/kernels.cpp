#include "gre/kernels.hpp"

#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace gre {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Matern: return "matern";
    case KernelFamily::Wendland: return "wendland";
    case KernelFamily::Gaussian: return "gaussian";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "matern") return KernelFamily::Matern;
  if (name == "wendland") return KernelFamily::Wendland;
  if (name == "gaussian") return KernelFamily::Gaussian;
  throw InvalidArgument("unknown kernel family '" + name + "'");
}

LengthScales::LengthScales(std::vector<double> ell) : ell_(std::move(ell)) {
  if (ell_.empty()) throw InvalidArgument("length-scales must be nonempty");
  for (double v : ell_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("length-scales must be finite and strictly positive");
    }
  }
}

LengthScales LengthScales::uniform(std::size_t dim, double ell) {
  return LengthScales(std::vector<double>(dim, ell));
}

const PiecewisePolynomial& wendland_polynomial(int d, int s) {
  if (d < 1 || s < 0) throw InvalidArgument("Wendland kernel needs d >= 1 and s >= 0");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<PiecewisePolynomial>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{d, s}];
  if (!slot) {
    auto p = PiecewisePolynomial::truncated_power(d / 2 + s + 1);
    for (int i = 0; i < s; ++i) p = p.integrate_tail();
    slot = std::make_unique<PiecewisePolynomial>(std::move(p));
  }
  return *slot;
}

KernelSpec::KernelSpec(KernelFamily family, int smoothness, LengthScales lengthscales)
    : family_(family), smoothness_(smoothness), ell_(std::move(lengthscales)) {
  if (ell_.size() == 0) throw InvalidArgument("kernel needs at least one axis");
  if (smoothness_ < 0) throw InvalidArgument("kernel smoothness must be nonnegative");
  if (family_ == KernelFamily::Gaussian) smoothness_ = 0;
  if (family_ == KernelFamily::Wendland) {
    wendland_ = &wendland_polynomial(static_cast<int>(ell_.size()), smoothness_);
  }
}

ProductKernel::ProductKernel(std::vector<KernelSpec> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InvalidArgument("product kernel needs at least one factor");
  for (const auto& f : factors_) {
    if (f.dim() != 1) throw DimensionError("product kernel factors must be one-dimensional");
  }
}

int kernel_smoothness(const Kernel& k) {
  const auto one = [](const KernelSpec& s) {
    return s.family() == KernelFamily::Gaussian ? std::numeric_limits<int>::max() : s.smoothness();
  };
  if (const auto* r = std::get_if<KernelSpec>(&k)) return one(*r);
  int best = std::numeric_limits<int>::max();
  for (const auto& f : std::get<ProductKernel>(k).factors()) best = std::min(best, one(f));
  return best;
}

}  // namespace gre
