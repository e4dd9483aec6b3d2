#pragma once

#include <cstdint>
#include <string_view>

#include "qshape/blockenc.hpp"

namespace qshape {

enum class NoiseMode { kExact, kUniform };

/// Accuracy and noise model for the measurement layer.
///
/// In uniform mode every estimate is the exact value plus a seeded draw from
/// [-eps, +eps]; the draw depends only on `seed`.
struct EstimatorConfig {
  double eps = 0.01;
  std::uint64_t seed = 0;
  NoiseMode noise = NoiseMode::kExact;
  /// Spectral gap below which the top-two-eigenvalue assumption is flagged.
  double gap_threshold = 0.01;

  /// Same settings with an independent seed stream for a named sub-estimate.
  EstimatorConfig derive(std::string_view tag) const;
  EstimatorConfig with_eps(double new_eps) const;
};

/// The seeded perturbation applied in uniform mode (zero in exact mode).
double noise_draw(const EstimatorConfig& cfg);

struct EigenEstimate {
  double estimate = 0.0;
  double exact = 0.0;
  double gap = 0.0;
  bool gap_flag = false;
  std::uint64_t queries = 0;
  ResourceLedger ledger;
};

/// ceil((1/eps) (log2 N + log2(1/eps))), at least one.
std::uint64_t eigenvalue_queries(Index dim, double eps);

/// Largest eigenvalue of the encoded block op/alpha of a PSD encoding.
EigenEstimate largest_eigenvalue(const BlockEnc& e, const EstimatorConfig& cfg);

/// 2x2 encoding diag(w/4, -w/4) with w the real overlap of the two states.
///
/// Builds (|00>(Phi1+Phi2) + |11>(Phi1-Phi2))/2, block-encodes the reduced
/// state of the first qubit and subtracts I/2 by a linear combination.
BlockEnc overlap_gadget(const StatePrep& prep1, const StatePrep& prep2);

struct AmplitudeEstimate {
  double estimate = 0.0;
  double exact = 0.0;
  std::uint64_t queries = 0;
  ResourceLedger ledger;
};

/// ceil(1/eps), at least one.
std::uint64_t amplitude_queries(double eps);

/// Amplitude of the flagged branch when e acts on the all-zeros state,
/// i.e. the (0,0) entry of op/alpha.
AmplitudeEstimate amplitude_estimate(const BlockEnc& e, const EstimatorConfig& cfg);

}  // namespace qshape
