#pragma once

#include "gre/error.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gre {

/// Fidelity points (rows of a row-major n x d table) with the simulator
/// values observed there. Points lie in (0, inf)^d and are pairwise distinct.
template <typename T>
class BasicDataset {
 public:
  BasicDataset() = default;
  BasicDataset(std::size_t dim, std::vector<T> coordinates, std::vector<T> values,
               std::optional<std::vector<double>> costs = std::nullopt)
      : dim_(dim), coords_(std::move(coordinates)), values_(std::move(values)), costs_(std::move(costs)) {
    validate();
  }

  static BasicDataset from_rows(const std::vector<std::vector<double>>& points, const std::vector<double>& values,
                                std::optional<std::vector<double>> costs = std::nullopt) {
    if (points.empty()) throw InvalidArgument("dataset must contain at least one point");
    const std::size_t d = points.front().size();
    std::vector<T> coords;
    coords.reserve(points.size() * d);
    for (const auto& p : points) {
      if (p.size() != d) throw DimensionError("dataset rows differ in dimension");
      for (double v : p) coords.emplace_back(v);
    }
    std::vector<T> vals(values.begin(), values.end());
    return BasicDataset(d, std::move(coords), std::move(vals), std::move(costs));
  }

  std::size_t size() const { return values_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const T> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  const std::vector<T>& coordinates() const { return coords_; }
  const std::vector<T>& values() const { return values_; }
  const std::optional<std::vector<double>>& costs() const { return costs_; }

  /// Same points with new values (used by invariance checks and resampling).
  BasicDataset with_values(std::vector<T> values) const {
    return BasicDataset(dim_, coords_, std::move(values), costs_);
  }

  template <typename U>
  BasicDataset<U> cast() const {
    std::vector<U> c(coords_.begin(), coords_.end());
    std::vector<U> v(values_.begin(), values_.end());
    return BasicDataset<U>(dim_, std::move(c), std::move(v), costs_);
  }

 private:
  void validate() const {
    if (dim_ == 0) throw InvalidArgument("dataset dimension must be positive");
    if (values_.empty()) throw InvalidArgument("dataset must contain at least one point");
    if (coords_.size() != values_.size() * dim_) throw DimensionError("dataset coordinate table has wrong size");
    if (costs_ && costs_->size() != values_.size()) throw DimensionError("dataset costs differ in length from values");
    for (const auto& c : coords_) {
      if (!(c > T(0))) throw InvalidArgument("dataset points must have every component strictly positive");
    }
    if (costs_) {
      for (double c : *costs_) {
        if (!(c > 0.0)) throw InvalidArgument("dataset costs must be positive");
      }
    }
    for (std::size_t i = 0; i < size(); ++i) {
      for (std::size_t j = i + 1; j < size(); ++j) {
        bool same = true;
        for (std::size_t k = 0; k < dim_ && same; ++k) same = coords_[i * dim_ + k] == coords_[j * dim_ + k];
        if (same) {
          throw InvalidArgument("dataset points " + std::to_string(i) + " and " + std::to_string(j) +
                                " coincide");
        }
      }
    }
  }

  std::size_t dim_ = 0;
  std::vector<T> coords_;
  std::vector<T> values_;
  std::optional<std::vector<double>> costs_;
};

using Dataset = BasicDataset<double>;

}  // namespace gre
