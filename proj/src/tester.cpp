#include "qshape/tester.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "qshape/qsvt.hpp"

namespace qshape {

namespace {

double output_scale(double sup) { return sup > 0.0 ? 2.0 * sup : 1.0; }

void require_univariate(const Grid& grid, const char* what) {
  if (grid.dim() != 1) throw PreconditionError(std::string(what) + ": univariate grid required");
}

void require_increasing(const Grid& grid, const char* what) {
  require_univariate(grid, what);
  if (!grid.strictly_increasing()) throw PreconditionError(std::string(what) + ": grid must be strictly increasing");
}

Verdict inconclusive(std::string method, const Grid& grid, std::string reason) {
  Verdict v;
  v.method = std::move(method);
  v.n = grid.size();
  v.outcome = Outcome::kInconclusive;
  v.reason = std::move(reason);
  return v;
}

/// Band decision around a threshold: -1 below, +1 above, 0 inside.
int side_of(double estimate, double threshold, double band) {
  if (estimate < threshold - band) return -1;
  if (estimate > threshold + band) return 1;
  return 0;
}

BlockEnc zero_encoding(const BlockEnc& like) {
  return BlockEnc(Operator::zero(like.dim()), 1.0, like.ancillas() + 2, 0.0, ResourceLedger{});
}

/// Point of extreme g over the caller-supplied points.
std::pair<std::size_t, double> scan(const Poly& g, const Grid& grid, bool want_min) {
  std::size_t best = 0;
  double val = g(grid.at(0));
  for (std::size_t i = 1; i < grid.real_size(); ++i) {
    const double v = g(grid.at(i));
    if (want_min ? v < val : v > val) {
      best = i;
      val = v;
    }
  }
  return {best, val};
}

StatePrep sqrt_weights(const WeightVector& w, std::size_t n) {
  std::vector<double> amp = w.padded(n);
  for (double& a : amp) a = std::sqrt(a);
  double norm = 0.0;
  for (double a : amp) norm += a * a;
  norm = std::sqrt(norm);
  for (double& a : amp) a /= norm;
  return encode_state(amp);
}

/// diag(x, -x) for x = sum l_i c_i, from the overlap gadget amplified by 4.
BlockEnc mean_encoding(const BlockEnc& axis_enc, const StatePrep& weights) {
  const BlockEnc gadget = overlap_gadget(apply_to_state(axis_enc, weights), weights);
  const AmplifySettings s;
  return amplify(gadget, 4.0, s.delta, s.eps_amp).enc;
}

struct JensenPair {
  double lhs_norm = 0.0;
  double rhs_norm = 0.0;
  double lhs_exact = 0.0;
  double rhs_exact = 0.0;
  ResourceLedger ledger;
};

Verdict jensen_verdict(const JensenPair& p, double scale, const std::vector<double>& mean,
                       const Grid& grid, const EstimatorConfig& cfg) {
  Verdict v;
  v.method = "jensen";
  v.n = grid.size();
  v.ledger = p.ledger;
  v.margin = 2.0 * cfg.eps * scale;
  v.estimates["lhs"] = p.lhs_norm * scale;
  v.estimates["rhs"] = p.rhs_norm * scale;
  v.estimates["lhs_normalized"] = p.lhs_norm;
  v.estimates["rhs_normalized"] = p.rhs_norm;
  v.estimates["scale"] = scale;
  v.estimates["gadget_factor"] = 0.25;
  switch (side_of(p.lhs_norm - p.rhs_norm, 0.0, 2.0 * cfg.eps)) {
    case 1:
      v.outcome = Outcome::kNotConvex;
      v.witness = Witness{Witness::Kind::kJensen, 0, 0, mean, (p.lhs_exact - p.rhs_exact) * scale};
      break;
    case -1:
      v.outcome = Outcome::kConvexOnGrid;
      break;
    default:
      v.outcome = Outcome::kInconclusive;
      v.reason = "Jensen estimates within the margin of each other";
  }
  return v;
}

}  // namespace

BlockEnc encode_grid_axis(std::span<const double> coords, const AmplifySettings& settings) {
  double norm = 0.0;
  for (double c : coords) norm += c * c;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw PreconditionError("grid coordinates are all zero");
  std::vector<double> unit(coords.begin(), coords.end());
  for (double& c : unit) c /= norm;
  return normalize_subnormalization(diag_from_state(encode_state(unit)), norm, settings);
}

Verdict test_convex_second_derivative(const Poly& f, const Grid& grid, const EstimatorConfig& cfg) {
  require_univariate(grid, "test_convex_second_derivative");
  const std::string method = "second-deriv";
  if (f.degree() < 2) return inconclusive(method, grid, "second derivative is identically zero");

  const double scale = output_scale(certified_sup(f));
  const Poly q = f.scaled(1.0 / scale);
  const BlockEnc grid_enc = encode_grid_axis(grid.axis(0));
  const MFamily fam = build_M_family(q, grid_enc, compute_bounds(q));

  const BlockEnc parts[] = {identity(grid_enc.dim()), fam.m2};
  const int signs[] = {1, -1};
  const EigenEstimate est = largest_eigenvalue(lcu(parts, signs), cfg.derive(method));

  Verdict v;
  v.method = method;
  v.n = grid.size();
  v.ledger = est.ledger;
  v.gap_flag = est.gap_flag;
  v.margin = 2.0 * cfg.eps;
  v.estimates["lambda_max"] = est.estimate;
  v.estimates["threshold"] = 0.5;
  v.estimates["min_m2"] = 1.0 - 2.0 * est.estimate;
  v.estimates["normalizer"] = fam.d2_norm;
  v.estimates["scale"] = scale;
  switch (side_of(est.estimate, 0.5, v.margin)) {
    case -1:
      v.outcome = Outcome::kConvexOnGrid;
      break;
    case 1: {
      v.outcome = Outcome::kNotConvex;
      const auto [i, val] = scan(derivative(f, 2), grid, true);
      v.witness = Witness{Witness::Kind::kPoint, i, 0, {grid.at(i)}, val};
      break;
    }
    default:
      v.outcome = Outcome::kInconclusive;
      v.reason = "eigenvalue estimate within the margin of the threshold";
  }
  return v;
}

M3Encoding build_M3(const Poly& f, const Grid& grid) {
  require_increasing(grid, "build_M3");
  const std::size_t n = grid.size();
  const Index dim = static_cast<Index>(n);
  const BlockEnc grid_enc = encode_grid_axis(grid.axis(0));

  const Poly d1 = derivative(f, 1);
  const double d1_norm = d1.is_zero() ? 0.0 : 2.0 * certified_sup(d1);
  const BlockEnc m1 = d1.is_zero() ? zero_encoding(grid_enc) : transform(grid_enc, d1.scaled(1.0 / d1_norm));

  const BlockEnc shift_parts[] = {cyclic_shift(dim), identity(dim)};
  const int shift_signs[] = {1, -1};
  const BlockEnc half_l = lcu(shift_parts, shift_signs);
  const BlockEnc column_circuit = product(half_l, product(m1, hadamard_layer(dim)));

  std::vector<double> zero_state(n, 0.0);
  zero_state[0] = 1.0;
  const BlockEnc e3 = diag_from_state(apply_to_state(column_circuit, encode_state(zero_state)));

  std::vector<std::size_t> masked;
  for (std::size_t i = grid.real_size() - 1; i < n; ++i) masked.push_back(i);
  BlockEnc mask = complement_projector(masked, n);
  BlockEnc enc = product(mask, e3);
  return M3Encoding{std::move(enc), 2.0, d1_norm, std::move(masked), std::move(mask)};
}

Verdict test_convex_first_derivative(const Poly& f, const Grid& grid, const EstimatorConfig& cfg) {
  require_increasing(grid, "test_convex_first_derivative");
  const std::string method = "first-deriv";
  if (f.degree() < 1) return inconclusive(method, grid, "first derivative is identically zero");
  if (grid.real_size() < 2) return inconclusive(method, grid, "grid has no adjacent pairs");

  const double scale = output_scale(certified_sup(f));
  const M3Encoding m3 = build_M3(f.scaled(1.0 / scale), grid);
  const double root_n = std::sqrt(static_cast<double>(grid.size()));
  const double threshold = 1.0 / (2.0 * root_n);
  const double eps_prime = cfg.eps / (2.0 * root_n);

  const BlockEnc parts[] = {scale_down(m3.mask, 2.0 * root_n), m3.enc};
  const int signs[] = {1, -1};
  const EstimatorConfig inner = cfg.derive(method).with_eps(eps_prime / m3.factor);
  const EigenEstimate est = largest_eigenvalue(lcu(parts, signs), inner);
  const double lambda = m3.factor * est.estimate;

  Verdict v;
  v.method = method;
  v.n = grid.size();
  v.ledger = est.ledger;
  v.gap_flag = est.gap_flag;
  v.margin = 2.0 * eps_prime;
  v.estimates["lambda_max"] = lambda;
  v.estimates["threshold"] = threshold;
  v.estimates["min_m3"] = 1.0 - 2.0 * root_n * lambda;
  v.estimates["normalizer"] = m3.d1_norm;
  v.estimates["scale"] = scale;
  switch (side_of(lambda, threshold, v.margin)) {
    case -1:
      v.outcome = Outcome::kConvexOnGrid;
      break;
    case 1: {
      v.outcome = Outcome::kNotConvex;
      const Poly d1 = derivative(f, 1);
      std::size_t best = 0;
      double val = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i + 1 < grid.real_size(); ++i) {
        const double diff = d1(grid.at(i + 1)) - d1(grid.at(i));
        if (diff < val) {
          best = i;
          val = diff;
        }
      }
      v.witness = Witness{Witness::Kind::kAdjacentPair, best, best + 1,
                          {grid.at(best), grid.at(best + 1)}, val};
      break;
    }
    default:
      v.outcome = Outcome::kInconclusive;
      v.reason = "eigenvalue estimate within the margin of the threshold";
  }
  return v;
}

Verdict test_convex_jensen(const Poly& f, const Grid& grid, const WeightVector& w,
                           const EstimatorConfig& cfg) {
  require_univariate(grid, "test_convex_jensen");
  const std::vector<double> mean = weighted_mean(grid, w);
  const double scale = output_scale(certified_sup(f));
  const Poly q = f.scaled(1.0 / scale);

  const BlockEnc grid_enc = encode_grid_axis(grid.axis(0));
  const StatePrep weights = sqrt_weights(w, grid.size());
  const double eps_lhs = cfg.eps * std::min(1.0, 1.0 / scale);

  const BlockEnc lhs_enc = transform(mean_encoding(grid_enc, weights), q);
  const AmplitudeEstimate lhs = amplitude_estimate(lhs_enc, cfg.derive("jensen-lhs").with_eps(eps_lhs));

  const BlockEnc m = transform(grid_enc, q);
  const BlockEnc rhs_enc = overlap_gadget(apply_to_state(m, weights), weights);
  const AmplitudeEstimate rhs = amplitude_estimate(rhs_enc, cfg.derive("jensen-rhs").with_eps(eps_lhs / 4.0));

  JensenPair p{lhs.estimate, 4.0 * rhs.estimate, lhs.exact, 4.0 * rhs.exact, lhs.ledger + rhs.ledger};
  return jensen_verdict(p, scale, mean, grid, cfg);
}

MultivariateM build_multivariate_M(const MultiPoly& f, std::span<const BlockEnc> axes,
                                   std::size_t degree_cap) {
  if (axes.size() != f.dim()) throw PreconditionError("build_multivariate_M: one encoding per axis required");
  if (f.term_count() == 0) throw PreconditionError("build_multivariate_M: zero polynomial");
  if (f.max_axis_degree() > degree_cap) throw PreconditionError("build_multivariate_M: monomial degree exceeds cap");
  const Index dim = axes.front().dim();
  for (const BlockEnc& a : axes) {
    if (a.dim() != dim) throw PreconditionError("build_multivariate_M: axis encodings differ in size");
    if (std::abs(a.alpha() - 1.0) > 1e-12) throw PreconditionError("build_multivariate_M: axis encodings need alpha 1");
  }

  const double c = f.max_abs_coeff();
  std::vector<BlockEnc> terms;
  std::vector<int> signs;
  for (const Monomial& mono : f.terms()) {
    std::optional<BlockEnc> acc;
    for (std::size_t j = 0; j < mono.exponents.size(); ++j)
      for (unsigned k = 0; k < mono.exponents[j]; ++k) acc = acc ? product(*acc, axes[j]) : axes[j];
    BlockEnc term = acc ? *acc : identity(dim);
    const double ratio = c / std::abs(mono.coeff);
    if (ratio > 1.0) term = scale_down(term, ratio);
    terms.push_back(std::move(term));
    signs.push_back(mono.coeff < 0.0 ? -1 : 1);
  }
  return MultivariateM{lcu(terms, signs), static_cast<double>(f.term_count()), c};
}

Verdict test_convex_jensen(const MultiPoly& f, const Grid& grid, const WeightVector& w,
                           const EstimatorConfig& cfg) {
  if (grid.dim() != f.dim()) throw PreconditionError("test_convex_jensen: grid/polynomial dimension mismatch");
  const std::vector<double> mean = weighted_mean(grid, w);
  if (f.term_count() == 0) return inconclusive("jensen", grid, "zero polynomial");

  const StatePrep weights = sqrt_weights(w, grid.size());
  std::vector<BlockEnc> axes;
  std::vector<BlockEnc> means;
  for (std::size_t j = 0; j < grid.dim(); ++j) {
    axes.push_back(encode_grid_axis(grid.axis(j)));
    means.push_back(mean_encoding(axes.back(), weights));
  }

  const MultivariateM lhs_m = build_multivariate_M(f, means);
  const MultivariateM rhs_m = build_multivariate_M(f, axes);
  const double scale = lhs_m.K * lhs_m.C;
  const double eps_lhs = cfg.eps * std::min(1.0, 1.0 / scale);

  const AmplitudeEstimate lhs = amplitude_estimate(lhs_m.enc, cfg.derive("jensen-lhs").with_eps(eps_lhs));
  const BlockEnc rhs_enc = overlap_gadget(apply_to_state(rhs_m.enc, weights), weights);
  const AmplitudeEstimate rhs = amplitude_estimate(rhs_enc, cfg.derive("jensen-rhs").with_eps(eps_lhs / 4.0));

  JensenPair p{lhs.estimate, 4.0 * rhs.estimate, lhs.exact, 4.0 * rhs.exact, lhs.ledger + rhs.ledger};
  Verdict v = jensen_verdict(p, scale, mean, grid, cfg);
  v.estimates["K"] = lhs_m.K;
  v.estimates["C"] = lhs_m.C;
  return v;
}

Verdict test_monotone(const Poly& f, const Grid& grid, Direction direction, const EstimatorConfig& cfg) {
  require_univariate(grid, "test_monotone");
  const std::string method = "monotone";
  if (f.degree() < 1) return inconclusive(method, grid, "first derivative is identically zero");

  const bool inc = direction == Direction::kIncreasing;
  const double scale = output_scale(certified_sup(f));
  const Poly q = f.scaled(1.0 / scale);
  const BlockEnc grid_enc = encode_grid_axis(grid.axis(0));
  const Poly d1 = derivative(q, 1);
  const double d1_norm = 2.0 * certified_sup(d1);
  const BlockEnc m1 = transform(grid_enc, d1.scaled(1.0 / d1_norm));

  const BlockEnc parts[] = {identity(grid_enc.dim()), m1};
  const int signs[] = {1, inc ? -1 : 1};
  const EigenEstimate est = largest_eigenvalue(lcu(parts, signs), cfg.derive(method));

  Verdict v;
  v.method = method;
  v.n = grid.size();
  v.ledger = est.ledger;
  v.gap_flag = est.gap_flag;
  v.margin = 2.0 * cfg.eps;
  v.estimates["lambda_max"] = est.estimate;
  v.estimates["threshold"] = 0.5;
  v.estimates["normalizer"] = d1_norm;
  v.estimates["scale"] = scale;
  switch (side_of(est.estimate, 0.5, v.margin)) {
    case -1:
      v.outcome = inc ? Outcome::kMonotoneIncreasing : Outcome::kMonotoneDecreasing;
      break;
    case 1: {
      v.outcome = Outcome::kNotMonotone;
      const auto [i, val] = scan(derivative(f, 1), grid, inc);
      v.witness = Witness{Witness::Kind::kPoint, i, 0, {grid.at(i)}, val};
      break;
    }
    default:
      v.outcome = Outcome::kInconclusive;
      v.reason = "eigenvalue estimate within the margin of the threshold";
  }
  return v;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::kConvexOnGrid: return "ConvexOnGrid";
    case Outcome::kNotConvex: return "NotConvex";
    case Outcome::kMonotoneIncreasing: return "MonotoneIncreasing";
    case Outcome::kMonotoneDecreasing: return "MonotoneDecreasing";
    case Outcome::kNotMonotone: return "NotMonotone";
    case Outcome::kInconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string to_string(Witness::Kind k) {
  switch (k) {
    case Witness::Kind::kPoint: return "point";
    case Witness::Kind::kAdjacentPair: return "adjacent_pair";
    case Witness::Kind::kJensen: return "jensen";
  }
  return "point";
}

}  // namespace qshape
