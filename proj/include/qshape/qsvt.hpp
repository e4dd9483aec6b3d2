#pragma once

#include "qshape/blockenc.hpp"
#include "qshape/poly.hpp"

namespace qshape {

/// Eigenvalue transformation P(A/alpha) of a block-encoded symmetric operator.
///
/// Requires |P| <= 1/2 on [-1, 1] (checked with certified_sup). The result
/// is a (1, a+2, 4d sqrt(eps/alpha)) encoding whose ledger charges d uses of
/// the input plus one controlled use.
BlockEnc transform(const BlockEnc& e, const Poly& p);

/// Diagonal encodings of f, f'/P and f''/Q at the grid points.
///
/// The normalizers are twice the certified derivative bounds so that each
/// transformed polynomial satisfies the |P| <= 1/2 precondition.
struct MFamily {
  BlockEnc m;
  BlockEnc m1;
  BlockEnc m2;
  double d1_norm = 0.0;
  double d2_norm = 0.0;
  bool m1_degenerate = false;
  bool m2_degenerate = false;
};

MFamily build_M_family(const Poly& f, const BlockEnc& grid_enc, const Bounds& bounds);

}  // namespace qshape
