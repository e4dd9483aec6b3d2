#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qshape/blockenc.hpp"
#include "qshape/poly.hpp"
#include "qshape/qsvt.hpp"
#include "qshape/tester.hpp"

using namespace qshape;

namespace {

BlockEnc diag_enc(const Eigen::VectorXd& d, double alpha = 1.0) {
  return BlockEnc(Operator::diagonal(d), alpha, 1, 0.0, ResourceLedger{});
}

Poly random_bounded_poly(std::mt19937_64& rng, std::size_t degree) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::vector<double> coeffs(degree + 1);
  for (double& x : coeffs) x = c(rng);
  coeffs.back() = coeffs.back() >= 0 ? coeffs.back() + 0.1 : coeffs.back() - 0.1;
  const Poly p(coeffs);
  return p.scaled(0.5 / certified_sup(p));
}

}  // namespace

TEST(Transform, LinearPolynomial) {
  const BlockEnc out = transform(diag_enc(Eigen::Vector2d(0.6, -0.8)), Poly({0.0, 0.5}));
  EXPECT_NEAR(out.op().entry(0, 0), 0.3, 1e-15);
  EXPECT_NEAR(out.op().entry(1, 1), -0.4, 1e-15);
  EXPECT_EQ(out.alpha(), 1.0);
  EXPECT_EQ(out.ancillas(), 3u);
}

TEST(Transform, RootsAtHalf) {
  // x^2 - 1/4 reaches 3/4 at x = +-1, so only a rescaled copy is admissible.
  const BlockEnc in = diag_enc(Eigen::Vector2d(0.5, -0.5));
  EXPECT_THROW(transform(in, Poly({-0.25, 0.0, 1.0})), PreconditionError);
  const BlockEnc out = transform(in, Poly({-0.25, 0.0, 1.0}).scaled(2.0 / 3.0));
  EXPECT_NEAR(out.op().entry(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(out.op().entry(1, 1), 0.0, 1e-15);
}

TEST(Transform, UsesSubnormalizedBlock) {
  const BlockEnc out = transform(diag_enc(Eigen::Vector2d(1.2, -0.8), 2.0), Poly({0.0, 0.5}));
  EXPECT_NEAR(out.op().entry(0, 0), 0.3, 1e-15);
}

TEST(Transform, RejectsLargePolynomial) {
  EXPECT_THROW(transform(diag_enc(Eigen::Vector2d(0.1, 0.2)), Poly({0.0, 1.0})), PreconditionError);
}

TEST(Transform, RemappedReferenceCubicOnGrid) {
  const Remapped r = remap_domain(Poly({1.0, -2.0, 0.0, 1.0}), 0.6, 1.4);
  const Grid grid = Grid::uniform(16);
  const BlockEnc out = transform(encode_grid_axis(grid.axis(0)), r.poly);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = r.center + r.width * grid.at(i);
    EXPECT_NEAR(out.op().entry(static_cast<Index>(i), static_cast<Index>(i)),
                (x * x * x - 2.0 * x + 1.0) / r.scale, 1e-12);
  }
}

TEST(Transform, SpectralFidelity) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const Poly p = random_bounded_poly(rng, 1 + t % 9);
    Eigen::VectorXd d(8);
    for (Index i = 0; i < 8; ++i) d(i) = u(rng);
    const double alpha = 1.0 + u(rng) * u(rng);
    const BlockEnc out = transform(diag_enc(d * alpha, alpha), p);
    for (Index i = 0; i < 8; ++i) ASSERT_NEAR(out.op().entry(i, i), p(d(i)), 1e-10);
  }
}

TEST(Transform, QueryContract) {
  std::mt19937_64 rng(1);
  for (std::size_t d = 1; d <= 10; ++d) {
    const BlockEnc base = diag_from_state(encode_state(std::vector<double>{0.6, 0.8}));
    const BlockEnc out = transform(base, random_bounded_poly(rng, d));
    EXPECT_EQ(out.ledger().count(ledger_keys::kBaseQuery), d);
    EXPECT_EQ(out.ledger().count(ledger_keys::kControlledBaseQuery), 1u);
  }
}

TEST(Transform, ErrorContractUnderInjectedNoise) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> g;
  for (double eta : {1e-4, 1e-6}) {
    for (int t = 0; t < 1000; ++t) {
      const std::size_t degree = 1 + t % 10;
      const Poly p = random_bounded_poly(rng, degree);
      const double alpha = 1.5 + 0.5 * u(rng);
      Eigen::VectorXd d(4);
      for (Index i = 0; i < 4; ++i) d(i) = 0.9 * alpha * u(rng);
      Eigen::MatrixXd noise(4, 4);
      for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) noise(i, j) = g(rng);
      noise = ((noise + noise.transpose()) / 2.0).eval();
      noise *= eta / Operator::dense(noise).spectral_norm();

      const BlockEnc ideal = diag_enc(d, alpha);
      const BlockEnc noisy = ideal.with_op(Operator::dense(Eigen::MatrixXd(d.asDiagonal()) + noise), eta);
      const BlockEnc a = transform(ideal, p);
      const BlockEnc b = transform(noisy, p);
      const double dev = (a.op() - b.op()).spectral_norm();
      ASSERT_LE(dev, b.eps()) << "degree " << degree << " eta " << eta;
      ASSERT_NEAR(b.eps(), 4.0 * static_cast<double>(degree) * std::sqrt(eta / alpha), 1e-15);
    }
  }
}

TEST(MFamily, QuarterSquareOnThreePoints) {
  const Poly f({0.0, 0.0, 0.25});
  const Grid grid = Grid::univariate({-0.4, 0.0, 0.4});
  const BlockEnc enc = encode_grid_axis(grid.axis(0));
  const MFamily fam = build_M_family(f, enc, compute_bounds(f));
  const double m_want[] = {0.04, 0.0, 0.04, 0.04};
  for (Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(fam.m.op().entry(i, i), m_want[i], 1e-12);
    EXPECT_NEAR(fam.m2.op().entry(i, i), 0.5 / fam.d2_norm, 1e-12);
  }
  EXPECT_FALSE(fam.m2_degenerate);
}

TEST(MFamily, LinearIsDegenerate) {
  const Poly f({0.1, 0.2});
  const BlockEnc enc = encode_grid_axis(Grid::uniform(4).axis(0));
  const MFamily fam = build_M_family(f, enc, compute_bounds(f));
  EXPECT_TRUE(fam.m2_degenerate);
  EXPECT_EQ(fam.m2.op().spectral_norm(), 0.0);
}

TEST(MFamily, CubicFirstDerivative) {
  const Poly f({0.0, 0.0, 0.0, 0.1});
  const BlockEnc enc = encode_grid_axis(Grid::univariate({-0.4, 0.4}).axis(0));
  const MFamily fam = build_M_family(f, enc, compute_bounds(f));
  for (Index i = 0; i < 2; ++i) EXPECT_NEAR(fam.m1.op().entry(i, i), 0.3 * 0.16 / fam.d1_norm, 1e-12);
  EXPECT_NEAR(fam.d1_norm, 2.0 * 0.3, 1e-9);
}
