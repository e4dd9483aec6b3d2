#pragma once

#include <cstddef>
#include <optional>

#include "qshape/grid.hpp"
#include "qshape/poly.hpp"
#include "qshape/verdict.hpp"

namespace qshape {

/// Brute-force reference values on a grid. Only caller-supplied points are
/// inspected; padding is ignored.
struct OracleConvex {
  Outcome outcome = Outcome::kConvexOnGrid;
  std::optional<Witness> witness;
  /// Smallest f'' over the grid and its index.
  double min_d2 = 0.0;
  std::size_t argmin_d2 = 0;
  /// Smallest f'(x_{i+1}) - f'(x_i) and its left index (0 when n < 2).
  double min_d1_diff = 0.0;
  std::size_t argmin_d1_diff = 0;
  /// Exact Jensen pair when weights were supplied.
  std::optional<double> lhs;
  std::optional<double> rhs;
};

/// Criterion used to turn the reference values into an outcome.
enum class ConvexCriterion { kSecondDerivative, kFirstDerivative, kJensen };

OracleConvex oracle_convex(const Poly& f, const Grid& grid,
                           const std::optional<WeightVector>& w = std::nullopt,
                           ConvexCriterion criterion = ConvexCriterion::kSecondDerivative);
/// Jensen pair only; outcome is NotConvex iff lhs > rhs.
OracleConvex oracle_convex(const MultiPoly& f, const Grid& grid, const WeightVector& w);

struct OracleMonotone {
  Outcome outcome = Outcome::kMonotoneIncreasing;
  std::optional<Witness> witness;
  /// Extreme f' in the violating direction (min for increasing, max for decreasing).
  double extreme_d1 = 0.0;
};

/// Reports the first grid point whose f' has the wrong sign.
OracleMonotone oracle_monotone(const Poly& f, const Grid& grid, Direction direction);

}  // namespace qshape
