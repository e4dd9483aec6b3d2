#include "qshape/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qshape {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("estimator accuracy must be positive");
}

}  // namespace

EstimatorConfig EstimatorConfig::derive(std::string_view tag) const {
  // FNV-1a over the tag, folded into the seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  EstimatorConfig out = *this;
  out.seed = splitmix64(seed ^ h);
  return out;
}

EstimatorConfig EstimatorConfig::with_eps(double new_eps) const {
  EstimatorConfig out = *this;
  out.eps = new_eps;
  return out;
}

double noise_draw(const EstimatorConfig& cfg) {
  if (cfg.noise == NoiseMode::kExact) return 0.0;
  std::mt19937_64 gen(splitmix64(cfg.seed));
  // 53-bit uniform in [0, 1) independent of the standard library's
  // distribution implementation.
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return cfg.eps * (2.0 * u - 1.0);
}

std::uint64_t eigenvalue_queries(Index dim, double eps) {
  require_eps(eps);
  const double q = (1.0 / eps) * (std::log2(static_cast<double>(dim)) + std::log2(1.0 / eps));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(q)));
}

EigenEstimate largest_eigenvalue(const BlockEnc& e, const EstimatorConfig& cfg) {
  require_eps(cfg.eps);
  if (!e.op().is_symmetric(1e-10)) throw PreconditionError("largest_eigenvalue needs a Hermitian operator");
  const Eigen::VectorXd eig = e.encoded_block().eigenvalues();
  if (eig(0) < -cfg.eps) throw PreconditionError("largest_eigenvalue needs a positive-semidefinite operator");

  EigenEstimate out;
  const Index n = eig.size();
  out.exact = eig(n - 1);
  out.gap = n > 1 ? eig(n - 1) - eig(n - 2) : 1.0;
  out.gap_flag = out.gap < cfg.gap_threshold;
  out.estimate = out.exact + noise_draw(cfg);
  out.queries = eigenvalue_queries(e.dim(), cfg.eps);
  out.ledger = e.ledger().repeated(out.queries);
  out.ledger.add(ledger_keys::kEigenQuery, out.queries);
  return out;
}

BlockEnc overlap_gadget(const StatePrep& prep1, const StatePrep& prep2) {
  if (prep1.dim() != prep2.dim()) throw PreconditionError("overlap gadget needs states of equal dimension");
  const Index d = prep1.dim();
  log2_exact(static_cast<std::size_t>(d));
  // Each state lives in a 4d space: system amplitudes first, then one slot
  // per state for its garbage branch, so garbage never overlaps.
  const Index phi_dim = 4 * d;
  Eigen::VectorXd phi1 = Eigen::VectorXd::Zero(phi_dim);
  Eigen::VectorXd phi2 = Eigen::VectorXd::Zero(phi_dim);
  phi1.head(d) = prep1.system;
  phi1(d) = prep1.garbage_norm;
  phi2.head(d) = prep2.system;
  phi2(d + 1) = prep2.garbage_norm;

  // Index layout: kept qubit (most significant), flag qubit, state register.
  Eigen::VectorXd state = Eigen::VectorXd::Zero(4 * phi_dim);
  state.segment(0, phi_dim) = 0.5 * (phi1 + phi2);
  state.segment(3 * phi_dim, phi_dim) = 0.5 * (phi1 - phi2);
  state /= state.norm();

  ResourceLedger prep_ledger = prep1.ledger + prep2.ledger;
  prep_ledger.add_depth(3);  // Hadamard, controlled X, Hadamard on the flags.
  const BlockEnc rho = density_encode(state, 2, prep_ledger, std::max(prep1.ancillas, prep2.ancillas));
  const BlockEnc half = scale_down(identity(2), 2.0);
  const BlockEnc parts[] = {rho, half};
  const int signs[] = {+1, -1};
  return lcu(parts, signs);
}

std::uint64_t amplitude_queries(double eps) {
  require_eps(eps);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(1.0 / eps)));
}

AmplitudeEstimate amplitude_estimate(const BlockEnc& e, const EstimatorConfig& cfg) {
  require_eps(cfg.eps);
  AmplitudeEstimate out;
  out.exact = e.op().entry(0, 0) / e.alpha();
  out.estimate = out.exact + noise_draw(cfg);
  out.queries = amplitude_queries(cfg.eps);
  out.ledger = e.ledger().repeated(out.queries);
  out.ledger.add(ledger_keys::kAmplitudeQuery, out.queries);
  return out;
}

}  // namespace qshape
