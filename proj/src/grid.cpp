#include "qshape/grid.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "qshape/poly.hpp"

namespace qshape {

namespace {

constexpr double kHalf = 0.5;
constexpr double kDomainTol = 1e-12;

void check_coord(double x) {
  if (!std::isfinite(x) || std::abs(x) > kHalf + kDomainTol)
    throw PreconditionError("grid coordinate outside [-1/2, 1/2]");
}

}  // namespace

Grid::Grid(std::size_t dim, std::vector<double> coords, std::size_t real_size)
    : dim_(dim), real_size_(real_size), coords_(std::move(coords)) {
  if (dim_ == 0) throw PreconditionError("grid dimension must be positive");
  if (real_size_ == 0) throw PreconditionError("grid needs at least one point");
  if (coords_.size() != dim_ * real_size_) throw PreconditionError("grid coordinate count mismatch");
  for (double x : coords_) check_coord(x);
  size_ = std::bit_ceil(real_size_);
  for (std::size_t i = real_size_; i < size_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) coords_.push_back(coords_[(real_size_ - 1) * dim_ + j]);
}

Grid Grid::univariate(std::vector<double> points) {
  const std::size_t n = points.size();
  return Grid(1, std::move(points), n);
}

Grid Grid::multivariate(std::size_t dim, const std::vector<std::vector<double>>& points) {
  std::vector<double> coords;
  coords.reserve(dim * points.size());
  for (const auto& p : points) {
    if (p.size() != dim) throw PreconditionError("grid point has wrong dimension");
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return Grid(dim, std::move(coords), points.size());
}

Grid Grid::uniform(std::size_t n) {
  if (n < 2) throw PreconditionError("uniform grid needs n >= 2");
  std::vector<double> pts(n);
  for (std::size_t i = 0; i < n; ++i)
    pts[i] = -kHalf + static_cast<double>(i) / static_cast<double>(n - 1);
  pts.back() = kHalf;
  return univariate(std::move(pts));
}

Grid Grid::uniform_tensor(std::size_t dim, std::size_t n) {
  if (dim == 0) throw PreconditionError("grid dimension must be positive");
  if (dim == 1) return uniform(n);
  if (!std::has_single_bit(n)) throw PreconditionError("tensor grid size must be a power of two");
  const unsigned bits = static_cast<unsigned>(std::countr_zero(n));
  if (bits < dim) throw PreconditionError("tensor grid needs at least two points per axis");
  std::vector<std::size_t> per_axis(dim);
  for (std::size_t j = 0; j < dim; ++j)
    per_axis[j] = std::size_t{1} << (bits / dim + (j < bits % dim ? 1 : 0));
  std::vector<double> coords;
  coords.reserve(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (std::size_t j = 0; j < dim; ++j) {
      const std::size_t k = rest % per_axis[j];
      rest /= per_axis[j];
      coords.push_back(-kHalf + static_cast<double>(k) / static_cast<double>(per_axis[j] - 1));
    }
  }
  return Grid(dim, std::move(coords), n);
}

std::vector<double> Grid::point(std::size_t i) const {
  return {coords_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
          coords_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_)};
}

std::vector<double> Grid::axis(std::size_t j) const {
  std::vector<double> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = coords_[i * dim_ + j];
  return out;
}

bool Grid::strictly_increasing() const {
  if (dim_ != 1) return false;
  for (std::size_t i = 1; i < real_size_; ++i)
    if (!(coords_[i] > coords_[i - 1])) return false;
  return true;
}

Grid Grid::with_source_domain(std::vector<std::pair<double, double>> domain) const {
  if (domain.size() != dim_) throw PreconditionError("source domain needs one interval per axis");
  Grid g = *this;
  g.source_domain_ = std::move(domain);
  return g;
}

WeightVector::WeightVector(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
  if (lambdas_.empty()) throw PreconditionError("weights must be nonempty");
  double sum = 0.0;
  for (double l : lambdas_) {
    if (!std::isfinite(l) || l < 0.0) throw PreconditionError("weights must be nonnegative");
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw PreconditionError("weights must sum to one");
}

WeightVector WeightVector::uniform(std::size_t n) {
  if (n == 0) throw PreconditionError("weights must be nonempty");
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::vector<double> WeightVector::padded(std::size_t n) const {
  if (n < lambdas_.size()) throw PreconditionError("cannot pad weights to a shorter length");
  std::vector<double> out = lambdas_;
  out.resize(n, 0.0);
  return out;
}

std::vector<double> weighted_mean(const Grid& grid, const WeightVector& w) {
  if (w.size() != grid.real_size()) throw PreconditionError("one weight per grid point required");
  std::vector<double> mean(grid.dim(), 0.0);
  for (std::size_t i = 0; i < grid.real_size(); ++i)
    for (std::size_t j = 0; j < grid.dim(); ++j) mean[j] += w.values()[i] * grid.at(i, j);
  for (double m : mean) check_coord(m);
  return mean;
}

}  // namespace qshape
