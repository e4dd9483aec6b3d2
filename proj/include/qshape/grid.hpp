#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace qshape {

/// Sample points in D = [-1/2, 1/2]^dim.
///
/// The point count is padded to the next power of two by repeating the last
/// point; `real_size()` is the number of points supplied by the caller.
class Grid {
 public:
  static Grid univariate(std::vector<double> points);
  static Grid multivariate(std::size_t dim, const std::vector<std::vector<double>>& points);
  /// n equally spaced points from -1/2 to 1/2 inclusive (n >= 2).
  static Grid uniform(std::size_t n);
  /// Tensor grid of n = 2^B points, axis bit counts split as evenly as possible.
  static Grid uniform_tensor(std::size_t dim, std::size_t n);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return size_; }
  std::size_t real_size() const { return real_size_; }
  bool padded() const { return size_ != real_size_; }

  double at(std::size_t i, std::size_t axis = 0) const { return coords_[i * dim_ + axis]; }
  std::vector<double> point(std::size_t i) const;
  /// Coordinates along one axis over all (padded) points.
  std::vector<double> axis(std::size_t j) const;
  /// True when the caller-supplied univariate points are strictly increasing.
  bool strictly_increasing() const;

  const std::optional<std::vector<std::pair<double, double>>>& source_domain() const { return source_domain_; }
  Grid with_source_domain(std::vector<std::pair<double, double>> domain) const;

 private:
  Grid(std::size_t dim, std::vector<double> coords, std::size_t real_size);

  std::size_t dim_ = 1;
  std::size_t size_ = 0;
  std::size_t real_size_ = 0;
  std::vector<double> coords_;
  std::optional<std::vector<std::pair<double, double>>> source_domain_;
};

/// Convex weights: nonnegative, summing to one within 1e-12.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> lambdas);
  static WeightVector uniform(std::size_t n);

  const std::vector<double>& values() const { return lambdas_; }
  std::size_t size() const { return lambdas_.size(); }
  /// Zero-extended to `n` entries (for padded grids).
  std::vector<double> padded(std::size_t n) const;

 private:
  std::vector<double> lambdas_;
};

/// sum_i lambda_i x_i over the caller-supplied points.
std::vector<double> weighted_mean(const Grid& grid, const WeightVector& w);

}  // namespace qshape
