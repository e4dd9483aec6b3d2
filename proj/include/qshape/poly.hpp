#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace qshape {

/// Raised when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense univariate polynomial c0 + c1 x + ... + cD x^D.
///
/// Trailing zero coefficients are stripped on construction, so the leading
/// coefficient is nonzero unless the polynomial is constant.
class Poly {
 public:
  Poly() : coeffs_{0.0} {}
  explicit Poly(std::vector<double> coeffs);

  static Poly monomial(std::size_t power, double coeff = 1.0);

  std::size_t degree() const { return coeffs_.size() - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

  double operator()(double x) const;

  /// Sum of absolute coefficient values; bounds |p| on [-1, 1].
  double coeff_abs_sum() const;

  Poly scaled(double factor) const;
  /// Returns t -> p(center + width * t).
  Poly compose_affine(double center, double width) const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) = default;

 private:
  std::vector<double> coeffs_;
};

/// Exact coefficient-level derivative. Orders above the degree give zero.
Poly derivative(const Poly& p, unsigned order = 1);

struct Monomial {
  double coeff = 0.0;
  std::vector<unsigned> exponents;
};

/// Sparse multivariate polynomial sum_k a_k x1^k1 ... xd^kd.
///
/// Construction merges monomials with identical exponent vectors and drops
/// zero coefficients; terms are kept in lexicographic exponent order.
class MultiPoly {
 public:
  MultiPoly(std::size_t dim, std::vector<Monomial> terms);
  static MultiPoly from_univariate(const Poly& p);

  std::size_t dim() const { return dim_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  /// Largest total degree over all monomials.
  std::size_t total_degree() const;
  /// Largest exponent of any single variable.
  std::size_t max_axis_degree() const;
  double max_abs_coeff() const;
  double coeff_abs_sum() const;

  double operator()(std::span<const double> x) const;

  MultiPoly scaled(double factor) const;
  /// Returns t -> p(center_j + width_j * t_j) per axis.
  MultiPoly compose_affine(std::span<const double> centers,
                           std::span<const double> widths) const;
  /// Partial derivative with respect to variable `axis`.
  MultiPoly partial(std::size_t axis) const;

 private:
  std::size_t dim_;
  std::vector<Monomial> terms_;
};

/// Certified suprema of |f| and its derivatives over [-1, 1] (or [-1, 1]^d).
struct Bounds {
  double f_sup = 0.0;
  double d1_sup = 0.0;
  double d2_sup = 0.0;
  double grad_sup = 0.0;
};

/// Upper bound B on sup |p| over [-1, 1], with B <= coefficient sum.
///
/// Dense sampling gives a lower bound; a branch-and-bound pass with
/// second-order Taylor enclosures certifies the upper bound. Falls back to
/// the coefficient sum when the refinement budget runs out.
double certified_sup(const Poly& p);

/// Upper bound on sup |p| over [-1, 1]^d. Same contract as the univariate
/// overload; uses first-order box enclosures.
double certified_sup(const MultiPoly& p);

Bounds compute_bounds(const Poly& f);
Bounds compute_bounds(const MultiPoly& f);

struct Remapped {
  Poly poly;
  double scale = 1.0;
  double center = 0.0;
  double width = 1.0;
};

/// Maps f on [a, b] to q(t) = f(c + w t) / s on t in [-1/2, 1/2] with
/// c = (a+b)/2, w = b - a and s = 2 * certified_sup(f(c + w t)) so that
/// |q| <= 1/2 on all of [-1, 1].
Remapped remap_domain(const Poly& f, double a, double b);

struct RemappedMulti {
  MultiPoly poly;
  double scale = 1.0;
  std::vector<double> centers;
  std::vector<double> widths;
};

RemappedMulti remap_domain(const MultiPoly& f,
                           std::span<const std::pair<double, double>> domain);

/// JSON forms: {"kind":"uni","coeffs":[...]} and
/// {"kind":"multi","dim":d,"terms":[{"a":..,"k":[..]},...]}.
nlohmann::json to_json(const Poly& p);
nlohmann::json to_json(const MultiPoly& p);
bool is_univariate_json(const nlohmann::json& j);
Poly poly_from_json(const nlohmann::json& j);
MultiPoly multipoly_from_json(const nlohmann::json& j);

}  // namespace qshape
