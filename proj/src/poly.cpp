#include "qshape/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace qshape {

namespace {

constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

// Slack covering rounding in Horner evaluation of a degree-D polynomial.
double rounding_slack(std::size_t degree, double coeff_abs_sum) {
  return 4.0 * static_cast<double>(degree + 1) * kMachineEps * coeff_abs_sum;
}

Poly power_of(const Poly& base, unsigned k) {
  Poly out({1.0});
  for (unsigned i = 0; i < k; ++i) out = out * base;
  return out;
}

}  // namespace

Poly::Poly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw PreconditionError("polynomial coefficient is not finite");
  }
}

Poly Poly::monomial(std::size_t power, double coeff) {
  std::vector<double> c(power + 1, 0.0);
  c[power] = coeff;
  return Poly(std::move(c));
}

double Poly::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Poly::coeff_abs_sum() const {
  double s = 0.0;
  for (double c : coeffs_) s += std::abs(c);
  return s;
}

Poly Poly::scaled(double factor) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= factor;
  return Poly(std::move(c));
}

Poly Poly::compose_affine(double center, double width) const {
  const Poly inner({center, width});
  Poly acc({0.0});
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * inner + Poly({*it});
  return acc;
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
  return Poly(std::move(c));
}

Poly operator-(const Poly& a, const Poly& b) { return a + b.scaled(-1.0); }

Poly operator*(const Poly& a, const Poly& b) {
  std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Poly(std::move(c));
}

Poly derivative(const Poly& p, unsigned order) {
  std::vector<double> c = p.coeffs();
  for (unsigned o = 0; o < order; ++o) {
    if (c.size() <= 1) return Poly({0.0});
    std::vector<double> next(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) next[k - 1] = static_cast<double>(k) * c[k];
    c = std::move(next);
  }
  return Poly(std::move(c));
}

// ---------------------------------------------------------------------------
// MultiPoly

MultiPoly::MultiPoly(std::size_t dim, std::vector<Monomial> terms) : dim_(dim) {
  if (dim == 0) throw PreconditionError("multivariate polynomial needs dim >= 1");
  std::map<std::vector<unsigned>, double> merged;
  for (auto& t : terms) {
    if (t.exponents.size() != dim)
      throw PreconditionError("monomial exponent count does not match dim");
    if (!std::isfinite(t.coeff)) throw PreconditionError("monomial coefficient is not finite");
    merged[t.exponents] += t.coeff;
  }
  for (auto& [k, a] : merged) {
    if (a != 0.0) terms_.push_back(Monomial{a, k});
  }
}

MultiPoly MultiPoly::from_univariate(const Poly& p) {
  std::vector<Monomial> terms;
  for (std::size_t k = 0; k < p.coeffs().size(); ++k)
    terms.push_back(Monomial{p.coeffs()[k], {static_cast<unsigned>(k)}});
  return MultiPoly(1, std::move(terms));
}

std::size_t MultiPoly::total_degree() const {
  std::size_t best = 0;
  for (const auto& t : terms_) {
    std::size_t s = 0;
    for (unsigned k : t.exponents) s += k;
    best = std::max(best, s);
  }
  return best;
}

std::size_t MultiPoly::max_axis_degree() const {
  std::size_t best = 0;
  for (const auto& t : terms_)
    for (unsigned k : t.exponents) best = std::max<std::size_t>(best, k);
  return best;
}

double MultiPoly::max_abs_coeff() const {
  double best = 0.0;
  for (const auto& t : terms_) best = std::max(best, std::abs(t.coeff));
  return best;
}

double MultiPoly::coeff_abs_sum() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coeff);
  return s;
}

double MultiPoly::operator()(std::span<const double> x) const {
  if (x.size() != dim_) throw PreconditionError("evaluation point has wrong dimension");
  double acc = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (std::size_t j = 0; j < dim_; ++j) v *= std::pow(x[j], static_cast<int>(t.exponents[j]));
    acc += v;
  }
  return acc;
}

MultiPoly MultiPoly::scaled(double factor) const {
  std::vector<Monomial> terms = terms_;
  for (auto& t : terms) t.coeff *= factor;
  return MultiPoly(dim_, std::move(terms));
}

MultiPoly MultiPoly::compose_affine(std::span<const double> centers,
                                    std::span<const double> widths) const {
  if (centers.size() != dim_ || widths.size() != dim_)
    throw PreconditionError("affine map has wrong dimension");
  std::vector<Monomial> out;
  for (const auto& t : terms_) {
    // Expand prod_j (c_j + w_j t_j)^{k_j} as a cartesian product of the
    // per-axis binomial expansions.
    std::vector<Monomial> partial{Monomial{t.coeff, std::vector<unsigned>(dim_, 0)}};
    for (std::size_t j = 0; j < dim_; ++j) {
      const Poly axis = power_of(Poly({centers[j], widths[j]}), t.exponents[j]);
      std::vector<Monomial> next;
      for (const auto& m : partial) {
        for (std::size_t k = 0; k < axis.coeffs().size(); ++k) {
          if (axis.coeffs()[k] == 0.0) continue;
          Monomial nm = m;
          nm.coeff *= axis.coeffs()[k];
          nm.exponents[j] = static_cast<unsigned>(k);
          next.push_back(std::move(nm));
        }
      }
      partial = std::move(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
  }
  return MultiPoly(dim_, std::move(out));
}

MultiPoly MultiPoly::partial(std::size_t axis) const {
  if (axis >= dim_) throw PreconditionError("partial derivative axis out of range");
  std::vector<Monomial> out;
  for (const auto& t : terms_) {
    if (t.exponents[axis] == 0) continue;
    Monomial m = t;
    m.coeff *= static_cast<double>(m.exponents[axis]);
    m.exponents[axis] -= 1;
    out.push_back(std::move(m));
  }
  return MultiPoly(dim_, std::move(out));
}

// ---------------------------------------------------------------------------
// Sup-norm certification

double certified_sup(const Poly& p) {
  const double fallback = p.coeff_abs_sum();
  if (p.degree() == 0) return fallback;

  const Poly d1 = derivative(p, 1);
  const double d2_bound = derivative(p, 2).coeff_abs_sum();
  const std::size_t cells = std::max<std::size_t>(10 * p.degree(), 64);

  double lower = 0.0;
  for (std::size_t i = 0; i <= cells; ++i) {
    const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(cells);
    lower = std::max(lower, std::abs(p(x)));
  }

  struct Interval {
    double lo, hi;
  };
  std::vector<Interval> stack;
  stack.reserve(256);
  for (std::size_t i = 0; i < cells; ++i) {
    stack.push_back({-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(cells),
                     -1.0 + 2.0 * static_cast<double>(i + 1) / static_cast<double>(cells)});
  }

  double upper = lower;
  std::size_t budget = 200000;
  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (iv.lo + iv.hi);
    const double r = 0.5 * (iv.hi - iv.lo);
    const double pm = std::abs(p(mid));
    lower = std::max(lower, pm);
    // Taylor enclosure about the midpoint with a Lagrange remainder.
    const double enclosure = pm + std::abs(d1(mid)) * r + 0.5 * d2_bound * r * r;
    if (enclosure <= lower) continue;
    if (enclosure - lower <= 1e-13 * std::max(1.0, lower) || r < 1e-12) {
      upper = std::max(upper, enclosure);
      continue;
    }
    if (--budget == 0) return fallback;
    stack.push_back({iv.lo, mid});
    stack.push_back({mid, iv.hi});
  }
  upper = std::max(upper, lower) + rounding_slack(p.degree(), fallback);
  return std::min(upper, fallback);
}

double certified_sup(const MultiPoly& p) {
  const double fallback = p.coeff_abs_sum();
  const std::size_t dim = p.dim();
  if (p.total_degree() == 0) return fallback;

  std::vector<MultiPoly> grads;
  for (std::size_t j = 0; j < dim; ++j) grads.push_back(p.partial(j));

  // Sampling lower bound on a tensor grid, thinned to keep the point count
  // manageable in higher dimensions.
  std::size_t per_axis = std::max<std::size_t>(10 * p.total_degree() + 1, 3);
  while (per_axis > 3 && std::pow(static_cast<double>(per_axis), static_cast<double>(dim)) > 2e5)
    --per_axis;
  double lower = 0.0;
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> x(dim);
  while (true) {
    for (std::size_t j = 0; j < dim; ++j)
      x[j] = -1.0 + 2.0 * static_cast<double>(idx[j]) / static_cast<double>(per_axis - 1);
    lower = std::max(lower, std::abs(p(x)));
    std::size_t j = 0;
    while (j < dim && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == dim) break;
  }

  // Bound on |d_j p| over a box: sum |a| prod max|x_i|^k_i.
  auto grad_bound = [&](std::size_t j, const std::vector<double>& max_abs) {
    double s = 0.0;
    for (const auto& t : grads[j].terms()) {
      double v = std::abs(t.coeff);
      for (std::size_t i = 0; i < dim; ++i) v *= std::pow(max_abs[i], static_cast<int>(t.exponents[i]));
      s += v;
    }
    return s;
  };

  struct Box {
    std::vector<double> lo, hi;
  };
  std::vector<Box> stack{Box{std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0)}};
  double upper = lower;
  std::size_t budget = 200000;
  std::vector<double> mid(dim), max_abs(dim);
  while (!stack.empty()) {
    Box box = std::move(stack.back());
    stack.pop_back();
    double widest = 0.0;
    std::size_t split = 0;
    for (std::size_t j = 0; j < dim; ++j) {
      mid[j] = 0.5 * (box.lo[j] + box.hi[j]);
      max_abs[j] = std::max(std::abs(box.lo[j]), std::abs(box.hi[j]));
      if (box.hi[j] - box.lo[j] > widest) {
        widest = box.hi[j] - box.lo[j];
        split = j;
      }
    }
    const double pm = std::abs(p(mid));
    lower = std::max(lower, pm);
    double enclosure = pm;
    for (std::size_t j = 0; j < dim; ++j)
      enclosure += grad_bound(j, max_abs) * 0.5 * (box.hi[j] - box.lo[j]);
    if (enclosure <= lower) continue;
    if (enclosure - lower <= 1e-6 * std::max(1.0, lower) || widest < 1e-9) {
      upper = std::max(upper, enclosure);
      continue;
    }
    if (--budget == 0) return fallback;
    Box left = box, right = std::move(box);
    left.hi[split] = mid[split];
    right.lo[split] = mid[split];
    stack.push_back(std::move(left));
    stack.push_back(std::move(right));
  }
  upper = std::max(upper, lower) + rounding_slack(p.total_degree(), fallback);
  return std::min(upper, fallback);
}

Bounds compute_bounds(const Poly& f) {
  Bounds b;
  b.f_sup = certified_sup(f);
  b.d1_sup = certified_sup(derivative(f, 1));
  b.d2_sup = certified_sup(derivative(f, 2));
  b.grad_sup = b.d1_sup;
  return b;
}

Bounds compute_bounds(const MultiPoly& f) {
  Bounds b;
  b.f_sup = certified_sup(f);
  double g2 = 0.0;
  for (std::size_t j = 0; j < f.dim(); ++j) {
    const double g = certified_sup(f.partial(j));
    g2 += g * g;
  }
  b.grad_sup = std::sqrt(g2);
  if (f.dim() == 1) {
    b.d1_sup = certified_sup(f.partial(0));
    b.d2_sup = certified_sup(f.partial(0).partial(0));
  }
  return b;
}

Remapped remap_domain(const Poly& f, double a, double b) {
  if (!(a < b)) throw PreconditionError("remap_domain needs a < b");
  Remapped out;
  out.center = 0.5 * (a + b);
  out.width = b - a;
  const Poly composed = f.compose_affine(out.center, out.width);
  const double sup = certified_sup(composed);
  out.scale = sup > 0.0 ? 2.0 * sup : 1.0;
  out.poly = composed.scaled(1.0 / out.scale);
  return out;
}

RemappedMulti remap_domain(const MultiPoly& f,
                           std::span<const std::pair<double, double>> domain) {
  if (domain.size() != f.dim()) throw PreconditionError("domain has wrong dimension");
  RemappedMulti out{f, 1.0, {}, {}};
  for (const auto& [a, b] : domain) {
    if (!(a < b)) throw PreconditionError("remap_domain needs a < b on every axis");
    out.centers.push_back(0.5 * (a + b));
    out.widths.push_back(b - a);
  }
  const MultiPoly composed = f.compose_affine(out.centers, out.widths);
  const double sup = certified_sup(composed);
  out.scale = sup > 0.0 ? 2.0 * sup : 1.0;
  out.poly = composed.scaled(1.0 / out.scale);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const Poly& p) {
  return {{"kind", "uni"}, {"coeffs", p.coeffs()}};
}

nlohmann::json to_json(const MultiPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : p.terms()) terms.push_back({{"a", t.coeff}, {"k", t.exponents}});
  return {{"kind", "multi"}, {"dim", p.dim()}, {"terms", terms}};
}

bool is_univariate_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("polynomial needs a string \"kind\" field");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "uni") return true;
  if (kind == "multi") return false;
  throw std::invalid_argument("unknown polynomial kind: " + kind);
}

Poly poly_from_json(const nlohmann::json& j) {
  if (!is_univariate_json(j)) throw std::invalid_argument("expected a univariate polynomial");
  if (!j.contains("coeffs") || !j["coeffs"].is_array() || j["coeffs"].empty())
    throw std::invalid_argument("univariate polynomial needs a non-empty \"coeffs\" array");
  std::vector<double> c;
  for (const auto& v : j["coeffs"]) {
    if (!v.is_number()) throw std::invalid_argument("polynomial coefficient is not a number");
    c.push_back(v.get<double>());
  }
  return Poly(std::move(c));
}

MultiPoly multipoly_from_json(const nlohmann::json& j) {
  if (is_univariate_json(j)) return MultiPoly::from_univariate(poly_from_json(j));
  if (!j.contains("dim") || !j["dim"].is_number_unsigned())
    throw std::invalid_argument("multivariate polynomial needs a positive integer \"dim\"");
  if (!j.contains("terms") || !j["terms"].is_array())
    throw std::invalid_argument("multivariate polynomial needs a \"terms\" array");
  const auto dim = j["dim"].get<std::size_t>();
  std::vector<Monomial> terms;
  for (const auto& t : j["terms"]) {
    if (!t.is_object() || !t.contains("a") || !t["a"].is_number() || !t.contains("k") ||
        !t["k"].is_array())
      throw std::invalid_argument("each term needs numeric \"a\" and array \"k\"");
    Monomial m;
    m.coeff = t["a"].get<double>();
    for (const auto& k : t["k"]) {
      if (!k.is_number_unsigned()) throw std::invalid_argument("exponents must be nonnegative integers");
      m.exponents.push_back(k.get<unsigned>());
    }
    terms.push_back(std::move(m));
  }
  return MultiPoly(dim, std::move(terms));
}

}  // namespace qshape
