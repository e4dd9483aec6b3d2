#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qshape/blockenc.hpp"
#include "qshape/estimate.hpp"
#include "qshape/grid.hpp"
#include "qshape/poly.hpp"
#include "qshape/verdict.hpp"

namespace qshape {

/// Diagonal (1, a, 0) encoding of the given coordinates: amplitude encoding
/// of x/|x|, diag_from_state, then removal of the 1/|x| subnormalization.
BlockEnc encode_grid_axis(std::span<const double> coords, const AmplifySettings& settings = {});

/// Threshold test on lambda_max((I - M2)/2) against 1/2.
Verdict test_convex_second_derivative(const Poly& f, const Grid& grid, const EstimatorConfig& cfg);

struct M3Encoding {
  /// enc.op() * factor is diag(f'(x_{i+1}) - f'(x_i)) / (sqrt(N) P) with the
  /// wrap-around entry and padded entries set to zero.
  BlockEnc enc;
  double factor = 2.0;
  double d1_norm = 0.0;
  std::vector<std::size_t> masked;
  /// Encoding of the complement projector used for the mask.
  BlockEnc mask;
};

/// Shift-difference circulant applied to M1 H|0>, loaded on the diagonal.
M3Encoding build_M3(const Poly& f, const Grid& grid);

/// Threshold test on lambda_max((I - M3)/(2 sqrt N)) against 1/(2 sqrt N).
Verdict test_convex_first_derivative(const Poly& f, const Grid& grid, const EstimatorConfig& cfg);

/// Compares estimates of f(sum l_i x_i) and sum l_i f(x_i).
Verdict test_convex_jensen(const Poly& f, const Grid& grid, const WeightVector& w,
                           const EstimatorConfig& cfg);
Verdict test_convex_jensen(const MultiPoly& f, const Grid& grid, const WeightVector& w,
                           const EstimatorConfig& cfg);

struct MultivariateM {
  /// Diagonal with entries f(x_j) / (K C).
  BlockEnc enc;
  double K = 1.0;
  double C = 1.0;
};

inline constexpr std::size_t kMaxMonomialDegree = 16;

/// Monomials as products of per-axis diagonal encodings, scaled by |a_k|/C
/// and summed by a signed linear combination.
MultivariateM build_multivariate_M(const MultiPoly& f, std::span<const BlockEnc> axes,
                                   std::size_t degree_cap = kMaxMonomialDegree);

/// Threshold test on M1 (increasing) or -M1 (decreasing).
Verdict test_monotone(const Poly& f, const Grid& grid, Direction direction,
                      const EstimatorConfig& cfg);

}  // namespace qshape
