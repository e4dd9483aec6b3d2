#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qshape/blockenc.hpp"

namespace qshape {

enum class Outcome {
  kConvexOnGrid,
  kNotConvex,
  kMonotoneIncreasing,
  kMonotoneDecreasing,
  kNotMonotone,
  kInconclusive,
};

std::string to_string(Outcome o);

enum class Direction { kIncreasing, kDecreasing };

/// A directly checkable counterexample.
struct Witness {
  enum class Kind { kPoint, kAdjacentPair, kJensen };
  Kind kind = Kind::kPoint;
  std::size_t index = 0;
  /// Second index for adjacent pairs.
  std::size_t index2 = 0;
  std::vector<double> point;
  /// The violating quantity: f'', a consecutive f' difference, f', or LHS - RHS.
  double value = 0.0;
};

std::string to_string(Witness::Kind k);

/// Result of one testing pipeline. Positive outcomes are evidence at the
/// sampled points only; negative outcomes carry a witness.
struct Verdict {
  std::string method;
  Outcome outcome = Outcome::kInconclusive;
  std::optional<Witness> witness;
  std::map<std::string, double> estimates;
  /// Half-width of the Inconclusive band around the threshold.
  double margin = 0.0;
  ResourceLedger ledger;
  std::size_t n = 0;
  bool gap_flag = false;
  std::string reason;
};

inline constexpr const char* kGridSemantics = "evidence at sampled points";

}  // namespace qshape
