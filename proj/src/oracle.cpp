#include "qshape/oracle.hpp"

#include <algorithm>
#include <limits>

namespace qshape {

OracleConvex oracle_convex(const Poly& f, const Grid& grid, const std::optional<WeightVector>& w,
                           ConvexCriterion criterion) {
  if (grid.dim() != 1) throw PreconditionError("oracle_convex: univariate grid required");
  const Poly d1 = derivative(f, 1);
  const Poly d2 = derivative(f, 2);
  const std::size_t n = grid.real_size();

  OracleConvex r;
  r.min_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = d2(grid.at(i));
    if (v < r.min_d2) {
      r.min_d2 = v;
      r.argmin_d2 = i;
    }
  }
  r.min_d1_diff = n < 2 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double v = d1(grid.at(i + 1)) - d1(grid.at(i));
    if (v < r.min_d1_diff) {
      r.min_d1_diff = v;
      r.argmin_d1_diff = i;
    }
  }
  if (w) {
    const double mean = weighted_mean(grid, *w)[0];
    double rhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) rhs += w->values()[i] * f(grid.at(i));
    r.lhs = f(mean);
    r.rhs = rhs;
  }

  switch (criterion) {
    case ConvexCriterion::kSecondDerivative:
      if (r.min_d2 < 0.0) {
        r.outcome = Outcome::kNotConvex;
        r.witness = Witness{Witness::Kind::kPoint, r.argmin_d2, 0, {grid.at(r.argmin_d2)}, r.min_d2};
      }
      break;
    case ConvexCriterion::kFirstDerivative:
      if (r.min_d1_diff < 0.0) {
        const std::size_t i = r.argmin_d1_diff;
        r.outcome = Outcome::kNotConvex;
        r.witness = Witness{Witness::Kind::kAdjacentPair, i, i + 1, {grid.at(i), grid.at(i + 1)},
                            r.min_d1_diff};
      }
      break;
    case ConvexCriterion::kJensen:
      if (!w) throw PreconditionError("oracle_convex: Jensen criterion needs weights");
      if (*r.lhs > *r.rhs) {
        r.outcome = Outcome::kNotConvex;
        r.witness = Witness{Witness::Kind::kJensen, 0, 0, weighted_mean(grid, *w), *r.lhs - *r.rhs};
      }
      break;
  }
  return r;
}

OracleConvex oracle_convex(const MultiPoly& f, const Grid& grid, const WeightVector& w) {
  if (grid.dim() != f.dim()) throw PreconditionError("oracle_convex: grid/polynomial dimension mismatch");
  OracleConvex r;
  const std::vector<double> mean = weighted_mean(grid, w);
  double rhs = 0.0;
  for (std::size_t i = 0; i < grid.real_size(); ++i) rhs += w.values()[i] * f(grid.point(i));
  r.lhs = f(mean);
  r.rhs = rhs;
  if (*r.lhs > *r.rhs) {
    r.outcome = Outcome::kNotConvex;
    r.witness = Witness{Witness::Kind::kJensen, 0, 0, mean, *r.lhs - *r.rhs};
  }
  return r;
}

OracleMonotone oracle_monotone(const Poly& f, const Grid& grid, Direction direction) {
  if (grid.dim() != 1) throw PreconditionError("oracle_monotone: univariate grid required");
  const Poly d1 = derivative(f, 1);
  const bool inc = direction == Direction::kIncreasing;
  OracleMonotone r;
  r.outcome = inc ? Outcome::kMonotoneIncreasing : Outcome::kMonotoneDecreasing;
  r.extreme_d1 = inc ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.real_size(); ++i) {
    const double v = d1(grid.at(i));
    r.extreme_d1 = inc ? std::min(r.extreme_d1, v) : std::max(r.extreme_d1, v);
    const bool bad = inc ? v < 0.0 : v > 0.0;
    if (bad && !r.witness) {
      r.outcome = Outcome::kNotMonotone;
      r.witness = Witness{Witness::Kind::kPoint, i, 0, {grid.at(i)}, v};
    }
  }
  return r;
}

}  // namespace qshape
