#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qshape/poly.hpp"

namespace qshape {

using Index = Eigen::Index;

/// Largest dimension for which a dense operator is materialized.
inline constexpr Index kMaxDenseDim = 4096;

bool is_power_of_two(std::size_t n);
unsigned log2_exact(std::size_t n);

/// Real square operator with a diagonal fast path.
///
/// Most operators in the testing pipelines are diagonal; the first-derivative
/// construction is the only place dense matrices (Hadamard layer, circulant
/// shift) appear.
class Operator {
 public:
  static Operator diagonal(Eigen::VectorXd entries);
  static Operator dense(Eigen::MatrixXd m);
  static Operator identity(Index n);
  static Operator zero(Index n);

  Index dim() const { return dim_; }
  bool is_diagonal() const { return diagonal_; }
  /// Diagonal entries; valid for any operator.
  Eigen::VectorXd diagonal_entries() const;
  Eigen::MatrixXd to_dense() const;
  double entry(Index i, Index j) const;
  Eigen::VectorXd column(Index j) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

  double spectral_norm() const;
  bool is_symmetric(double tol = 1e-12) const;
  /// Eigenvalues in ascending order; requires a symmetric operator.
  Eigen::VectorXd eigenvalues() const;
  /// Applies a polynomial to a symmetric operator through its spectrum.
  Operator apply_polynomial(const Poly& p) const;

  Operator operator*(const Operator& rhs) const;
  Operator operator+(const Operator& rhs) const;
  Operator operator-(const Operator& rhs) const;
  Operator operator*(double s) const;
  Operator kron(const Operator& rhs) const;

 private:
  Operator(Index dim, bool diagonal, Eigen::VectorXd d, Eigen::MatrixXd m)
      : dim_(dim), diagonal_(diagonal), diag_(std::move(d)), dense_(std::move(m)) {}

  Index dim_ = 0;
  bool diagonal_ = true;
  Eigen::VectorXd diag_;
  Eigen::MatrixXd dense_;
};

/// Well-known ledger entry names.
namespace ledger_keys {
inline constexpr const char* kStatePrep = "state_prep";
inline constexpr const char* kStatePrepInverse = "state_prep_inverse";
inline constexpr const char* kControlledStatePrep = "controlled_state_prep";
inline constexpr const char* kBaseQuery = "base_encoding_query";
inline constexpr const char* kControlledBaseQuery = "controlled_base_encoding_query";
inline constexpr const char* kProduct = "product";
inline constexpr const char* kLcu = "lcu";
inline constexpr const char* kRotation = "rotation";
inline constexpr const char* kSwap = "swap";
inline constexpr const char* kAmplificationQuery = "amplification_query";
inline constexpr const char* kProjector = "projector";
inline constexpr const char* kUnitary = "unitary_layer";
inline constexpr const char* kEigenQuery = "eigenvalue_query";
inline constexpr const char* kAmplitudeQuery = "amplitude_estimation_query";
}  // namespace ledger_keys

/// Query counts per primitive plus accumulated symbolic circuit depth.
class ResourceLedger {
 public:
  void add(const std::string& key, std::uint64_t count = 1);
  void add_depth(std::uint64_t units) { depth_units_ += units; }
  void set_depth_units(std::uint64_t units) { depth_units_ = units; }
  std::uint64_t count(const std::string& key) const;
  const std::map<std::string, std::uint64_t>& counts() const { return counts_; }
  std::uint64_t depth_units() const { return depth_units_; }

  ResourceLedger& operator+=(const ResourceLedger& other);
  /// Cost of `uses` sequential uses of whatever this ledger describes.
  ResourceLedger repeated(std::uint64_t uses) const;

  friend ResourceLedger operator+(ResourceLedger a, const ResourceLedger& b) { return a += b; }
  friend bool operator==(const ResourceLedger&, const ResourceLedger&) = default;

 private:
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t depth_units_ = 0;
};

/// A simulated (alpha, a, eps) block encoding: the unitary's top-left block
/// is op / alpha up to eps.
class BlockEnc {
 public:
  BlockEnc(Operator op, double alpha, unsigned ancillas, double eps, ResourceLedger ledger);

  const Operator& op() const { return op_; }
  double alpha() const { return alpha_; }
  unsigned ancillas() const { return ancillas_; }
  double eps() const { return eps_; }
  const ResourceLedger& ledger() const { return ledger_; }
  Index dim() const { return op_.dim(); }
  unsigned system_qubits() const { return log2_exact(static_cast<std::size_t>(op_.dim())); }

  /// The block actually seen by a circuit: op / alpha.
  Operator encoded_block() const { return op_ * (1.0 / alpha_); }

  /// Same metadata with a replaced operator; used for noise injection.
  BlockEnc with_op(Operator op, double eps) const;

 private:
  Operator op_;
  double alpha_;
  unsigned ancillas_;
  double eps_;
  ResourceLedger ledger_;
};

/// Output of a state-preparation circuit.
///
/// `system` holds the amplitudes of the flagged (all-ancilla-zero) branch;
/// `garbage_norm` is the norm of the remaining branch, taken to be orthogonal
/// to every other state it is compared with.
struct StatePrep {
  Eigen::VectorXd system;
  double garbage_norm = 0.0;
  unsigned ancillas = 0;
  ResourceLedger ledger;

  Index dim() const { return system.size(); }
};

/// Amplitude-encodes a unit vector of power-of-two length.
StatePrep encode_state(std::span<const double> amplitudes);
/// Runs a block encoding on a prepared state: system <- (op/alpha) system.
StatePrep apply_to_state(const BlockEnc& e, const StatePrep& prep);

/// A unitary encodes itself (alpha 1, no ancillas).
BlockEnc unitary(Operator u);
/// Identity via sigma_z (x) I: one ancilla.
BlockEnc identity(Index n);
/// Sylvester-ordered Hadamard layer H^{(x) log2 n}.
BlockEnc hadamard_layer(Index n);
/// Cyclic shift S with (S v)_i = v_{(i+1) mod n}.
BlockEnc cyclic_shift(Index n);

BlockEnc diag_from_state(const StatePrep& prep);
BlockEnc product(const BlockEnc& e1, const BlockEnc& e2);
BlockEnc lcu(std::span<const BlockEnc> encodings, std::span<const int> signs);
BlockEnc scale_down(const BlockEnc& e, double p);

struct AmplifyResult {
  BlockEnc enc;
  std::uint64_t uses;
};
/// Uses m = ceil((gamma/delta) ln(gamma/eps_amp)) applications of e.
AmplifyResult amplify(const BlockEnc& e, double gamma, double delta, double eps_amp);
std::uint64_t amplification_uses(double gamma, double delta, double eps_amp);

BlockEnc tensor(const BlockEnc& e1, const BlockEnc& e2);
/// |j-1><j-1| for 1-based j.
BlockEnc projector(std::size_t j, std::size_t n);
/// I minus the basis projectors on the given 0-based indices; one ancilla
/// flagged by a multi-controlled X on the masked indices.
BlockEnc complement_projector(std::span<const std::size_t> masked, std::size_t n);
/// Reduced state Tr_A |Phi><Phi| with |Phi> stored as index b * dim_a + a.
BlockEnc density_encode(const Eigen::VectorXd& bipartite_state, Index dim_b,
                        const ResourceLedger& prep_ledger, unsigned prep_ancillas = 0);

struct AmplifySettings {
  double delta = 0.25;
  double eps_amp = 1e-6;
};
/// Treats e as an encoding of (natural_alpha * op) and removes the factor:
/// scale_down when natural_alpha < 1, amplify when > 1, no-op when equal.
BlockEnc normalize_subnormalization(const BlockEnc& e, double natural_alpha,
                                    const AmplifySettings& settings = {});

}  // namespace qshape
