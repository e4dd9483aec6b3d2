#include "qshape/qsvt.hpp"

#include <cmath>

namespace qshape {

namespace {

constexpr double kSupTolerance = 1e-12;

BlockEnc zero_like(const BlockEnc& e) {
  return BlockEnc(Operator::zero(e.dim()), 1.0, e.ancillas() + 2, 0.0, ResourceLedger{});
}

}  // namespace

BlockEnc transform(const BlockEnc& e, const Poly& p) {
  if (!e.op().is_symmetric(1e-10)) throw PreconditionError("transform needs a Hermitian operator");
  if (certified_sup(p) > 0.5 + kSupTolerance)
    throw PreconditionError("transform polynomial exceeds 1/2 in magnitude on [-1, 1]");
  const std::uint64_t d = p.degree();
  const std::uint64_t uses = d == 0 ? 0 : d + 1;

  ResourceLedger l = e.ledger().repeated(uses);
  l.add(ledger_keys::kBaseQuery, d);
  if (d > 0) l.add(ledger_keys::kControlledBaseQuery, 1);
  l.add_depth(d * (e.ancillas() + 1));

  const double eps = 4.0 * static_cast<double>(d) * std::sqrt(e.eps() / e.alpha());
  return BlockEnc(e.encoded_block().apply_polynomial(p), 1.0, e.ancillas() + 2, eps, std::move(l));
}

MFamily build_M_family(const Poly& f, const BlockEnc& grid_enc, const Bounds& bounds) {
  if (std::abs(grid_enc.alpha() - 1.0) > 1e-12)
    throw PreconditionError("grid encoding must have unit subnormalization");

  const Poly d1 = derivative(f, 1);
  const Poly d2 = derivative(f, 2);
  const bool m1_degenerate = d1.is_zero();
  const bool m2_degenerate = d2.is_zero();
  const double d1_norm = m1_degenerate ? 0.0 : 2.0 * bounds.d1_sup;
  const double d2_norm = m2_degenerate ? 0.0 : 2.0 * bounds.d2_sup;

  BlockEnc m = transform(grid_enc, f);
  BlockEnc m1 = m1_degenerate ? zero_like(grid_enc) : transform(grid_enc, d1.scaled(1.0 / d1_norm));
  BlockEnc m2 = m2_degenerate ? zero_like(grid_enc) : transform(grid_enc, d2.scaled(1.0 / d2_norm));
  return MFamily{std::move(m), std::move(m1), std::move(m2), d1_norm, d2_norm, m1_degenerate, m2_degenerate};
}

}  // namespace qshape
