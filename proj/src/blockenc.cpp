#include "qshape/blockenc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace qshape {

bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

unsigned log2_exact(std::size_t n) {
  if (!is_power_of_two(n)) throw PreconditionError("dimension is not a power of two");
  return static_cast<unsigned>(std::countr_zero(n));
}

namespace {

unsigned ceil_log2(std::size_t m) {
  return m <= 1 ? 0u : static_cast<unsigned>(std::bit_width(m - 1));
}

void require_dense_dim(Index n) {
  if (n > kMaxDenseDim) throw PreconditionError("dense operator exceeds the supported dimension");
}

}  // namespace

// ---------------------------------------------------------------------------
// Operator

Operator Operator::diagonal(Eigen::VectorXd entries) {
  const Index n = entries.size();
  return Operator(n, true, std::move(entries), {});
}

Operator Operator::dense(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) throw PreconditionError("operator must be square");
  require_dense_dim(m.rows());
  const Index n = m.rows();
  return Operator(n, false, {}, std::move(m));
}

Operator Operator::identity(Index n) { return diagonal(Eigen::VectorXd::Ones(n)); }
Operator Operator::zero(Index n) { return diagonal(Eigen::VectorXd::Zero(n)); }

Eigen::VectorXd Operator::diagonal_entries() const {
  return diagonal_ ? diag_ : Eigen::VectorXd(dense_.diagonal());
}

Eigen::MatrixXd Operator::to_dense() const {
  if (!diagonal_) return dense_;
  require_dense_dim(dim_);
  return diag_.asDiagonal();
}

double Operator::entry(Index i, Index j) const {
  if (diagonal_) return i == j ? diag_(i) : 0.0;
  return dense_(i, j);
}

Eigen::VectorXd Operator::column(Index j) const {
  if (!diagonal_) return dense_.col(j);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim_);
  c(j) = diag_(j);
  return c;
}

Eigen::VectorXd Operator::apply(const Eigen::VectorXd& v) const {
  if (v.size() != dim_) throw PreconditionError("vector dimension does not match operator");
  if (diagonal_) return diag_.cwiseProduct(v);
  return dense_ * v;
}

double Operator::spectral_norm() const {
  if (dim_ == 0) return 0.0;
  if (diagonal_) return diag_.cwiseAbs().maxCoeff();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense_);
  return svd.singularValues()(0);
}

bool Operator::is_symmetric(double tol) const {
  if (diagonal_) return true;
  return (dense_ - dense_.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Eigen::VectorXd Operator::eigenvalues() const {
  if (!is_symmetric(1e-10)) throw PreconditionError("eigenvalues requested for a non-symmetric operator");
  if (diagonal_) {
    Eigen::VectorXd v = diag_;
    std::sort(v.data(), v.data() + v.size());
    return v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

Operator Operator::apply_polynomial(const Poly& p) const {
  if (diagonal_) return diagonal(diag_.unaryExpr([&p](double x) { return p(x); }));
  if (!is_symmetric(1e-10)) throw PreconditionError("polynomial transform needs a symmetric operator");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_);
  const Eigen::VectorXd mapped = solver.eigenvalues().unaryExpr([&p](double x) { return p(x); });
  return dense(solver.eigenvectors() * mapped.asDiagonal() * solver.eigenvectors().transpose());
}

Operator Operator::operator*(const Operator& rhs) const {
  if (dim_ != rhs.dim_) throw PreconditionError("operator dimensions do not match");
  if (diagonal_ && rhs.diagonal_) return diagonal(diag_.cwiseProduct(rhs.diag_));
  if (diagonal_) return dense(diag_.asDiagonal() * rhs.dense_);
  if (rhs.diagonal_) return dense(dense_ * rhs.diag_.asDiagonal());
  return dense(dense_ * rhs.dense_);
}

Operator Operator::operator+(const Operator& rhs) const {
  if (dim_ != rhs.dim_) throw PreconditionError("operator dimensions do not match");
  if (diagonal_ && rhs.diagonal_) return diagonal(diag_ + rhs.diag_);
  return dense(to_dense() + rhs.to_dense());
}

Operator Operator::operator-(const Operator& rhs) const { return *this + rhs * -1.0; }

Operator Operator::operator*(double s) const {
  if (diagonal_) return diagonal(diag_ * s);
  return dense(dense_ * s);
}

Operator Operator::kron(const Operator& rhs) const {
  const Index n = dim_ * rhs.dim_;
  if (diagonal_ && rhs.diagonal_) {
    Eigen::VectorXd d(n);
    for (Index i = 0; i < dim_; ++i) d.segment(i * rhs.dim_, rhs.dim_) = diag_(i) * rhs.diag_;
    return diagonal(std::move(d));
  }
  require_dense_dim(n);
  const Eigen::MatrixXd a = to_dense();
  const Eigen::MatrixXd b = rhs.to_dense();
  Eigen::MatrixXd m(n, n);
  for (Index i = 0; i < dim_; ++i)
    for (Index j = 0; j < dim_; ++j) m.block(i * rhs.dim_, j * rhs.dim_, rhs.dim_, rhs.dim_) = a(i, j) * b;
  return dense(std::move(m));
}

// ---------------------------------------------------------------------------
// ResourceLedger

void ResourceLedger::add(const std::string& key, std::uint64_t count) { counts_[key] += count; }

std::uint64_t ResourceLedger::count(const std::string& key) const {
  const auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

ResourceLedger& ResourceLedger::operator+=(const ResourceLedger& other) {
  for (const auto& [k, v] : other.counts_) counts_[k] += v;
  depth_units_ += other.depth_units_;
  return *this;
}

ResourceLedger ResourceLedger::repeated(std::uint64_t uses) const {
  ResourceLedger out;
  for (const auto& [k, v] : counts_) out.counts_[k] = v * uses;
  out.depth_units_ = depth_units_ * uses;
  return out;
}

// ---------------------------------------------------------------------------
// BlockEnc

BlockEnc::BlockEnc(Operator op, double alpha, unsigned ancillas, double eps, ResourceLedger ledger)
    : op_(std::move(op)), alpha_(alpha), ancillas_(ancillas), eps_(eps), ledger_(std::move(ledger)) {
  if (!is_power_of_two(static_cast<std::size_t>(op_.dim())))
    throw PreconditionError("block encoding dimension must be a power of two");
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw PreconditionError("subnormalization must be positive");
  if (!(eps_ >= 0.0)) throw PreconditionError("error bound must be nonnegative");
}

BlockEnc BlockEnc::with_op(Operator op, double eps) const {
  if (op.dim() != op_.dim()) throw PreconditionError("replacement operator has wrong dimension");
  return BlockEnc(std::move(op), alpha_, ancillas_, eps, ledger_);
}

// ---------------------------------------------------------------------------
// States

StatePrep encode_state(std::span<const double> amplitudes) {
  if (!is_power_of_two(amplitudes.size()))
    throw PreconditionError("state length must be a power of two (pad first)");
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(amplitudes.data(), static_cast<Index>(amplitudes.size()));
  const double norm = v.norm();
  if (norm == 0.0) throw PreconditionError("cannot encode the zero vector");
  if (std::abs(norm - 1.0) > 1e-10) throw PreconditionError("amplitudes must have unit Euclidean norm");
  StatePrep prep;
  prep.system = v / norm;
  prep.ledger.add(ledger_keys::kStatePrep);
  prep.ledger.add_depth(log2_exact(amplitudes.size()));
  return prep;
}

StatePrep apply_to_state(const BlockEnc& e, const StatePrep& prep) {
  if (prep.dim() != e.dim()) throw PreconditionError("state and encoding dimensions differ");
  StatePrep out;
  out.system = e.op().apply(prep.system) / e.alpha();
  out.garbage_norm = std::sqrt(std::max(0.0, 1.0 - out.system.squaredNorm()));
  out.ancillas = prep.ancillas + e.ancillas();
  out.ledger = prep.ledger + e.ledger();
  out.ledger.add(ledger_keys::kBaseQuery);
  return out;
}

// ---------------------------------------------------------------------------
// Elementary encodings

BlockEnc unitary(Operator u) {
  if (!u.is_diagonal() && u.dim() <= 512) {
    const Eigen::MatrixXd m = u.to_dense();
    if (!(m.transpose() * m).isIdentity(1e-10)) throw PreconditionError("operator is not orthogonal");
  }
  ResourceLedger l;
  l.add(ledger_keys::kUnitary);
  l.add_depth(1);
  return BlockEnc(std::move(u), 1.0, 0, 0.0, std::move(l));
}

BlockEnc identity(Index n) {
  ResourceLedger l;
  l.add_depth(1);
  return BlockEnc(Operator::identity(n), 1.0, 1, 0.0, std::move(l));
}

BlockEnc hadamard_layer(Index n) {
  log2_exact(static_cast<std::size_t>(n));
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd h(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      h(i, j) = (std::popcount(static_cast<std::uint64_t>(i & j)) % 2 == 0) ? s : -s;
  ResourceLedger l;
  l.add(ledger_keys::kUnitary);
  l.add_depth(1);
  return BlockEnc(Operator::dense(std::move(h)), 1.0, 0, 0.0, std::move(l));
}

BlockEnc cyclic_shift(Index n) {
  const unsigned q = log2_exact(static_cast<std::size_t>(n));
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) s(i, (i + 1) % n) = 1.0;
  ResourceLedger l;
  l.add(ledger_keys::kUnitary);
  l.add_depth(std::max(1u, q));
  return BlockEnc(Operator::dense(std::move(s)), 1.0, 0, 0.0, std::move(l));
}

BlockEnc diag_from_state(const StatePrep& prep) {
  const unsigned q = log2_exact(static_cast<std::size_t>(prep.dim()));
  ResourceLedger l = prep.ledger;
  l.add(ledger_keys::kControlledStatePrep);
  l.add_depth(q);
  return BlockEnc(Operator::diagonal(prep.system), 1.0, prep.ancillas + q + 3, 0.0, std::move(l));
}

// ---------------------------------------------------------------------------
// Composition

BlockEnc product(const BlockEnc& e1, const BlockEnc& e2) {
  if (e1.dim() != e2.dim()) throw PreconditionError("product of encodings with different dimensions");
  ResourceLedger l = e1.ledger() + e2.ledger();
  l.add(ledger_keys::kProduct);
  // Sound bound including the second-order term.
  const double eps = e1.alpha() * e2.eps() + e2.alpha() * e1.eps() + e1.eps() * e2.eps();
  return BlockEnc(e1.op() * e2.op(), e1.alpha() * e2.alpha(), e1.ancillas() + e2.ancillas(), eps,
                  std::move(l));
}

BlockEnc lcu(std::span<const BlockEnc> encodings, std::span<const int> signs) {
  if (encodings.empty()) throw PreconditionError("lcu of an empty sequence");
  if (signs.size() != encodings.size()) throw PreconditionError("lcu needs one sign per encoding");
  const double alpha = encodings.front().alpha();
  const Index n = encodings.front().dim();
  const std::size_t m = encodings.size();
  Operator sum = Operator::zero(n);
  ResourceLedger l;
  double eps = 0.0;
  unsigned ancillas = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const BlockEnc& e = encodings[i];
    if (e.dim() != n) throw PreconditionError("lcu of encodings with different dimensions");
    if (std::abs(e.alpha() - alpha) > 1e-12 * std::max(1.0, alpha))
      throw PreconditionError("lcu needs equal subnormalizations (rescale first)");
    if (signs[i] != 1 && signs[i] != -1) throw PreconditionError("lcu signs must be +1 or -1");
    sum = sum + e.op() * static_cast<double>(signs[i]);
    l += e.ledger();
    eps = std::max(eps, e.eps());
    ancillas = std::max(ancillas, e.ancillas());
  }
  const unsigned select = ceil_log2(m);
  l.add(ledger_keys::kLcu);
  l.add_depth(2 * select);
  return BlockEnc(sum * (1.0 / static_cast<double>(m)), alpha, ancillas + select, eps, std::move(l));
}

BlockEnc scale_down(const BlockEnc& e, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("scale_down needs a finite factor p > 1");
  // R_Y(theta) (x) I with cos(theta/2) = 1/p, composed by a product.
  ResourceLedger l = e.ledger();
  l.add(ledger_keys::kRotation);
  l.add(ledger_keys::kProduct);
  l.add_depth(1);
  return BlockEnc(e.op() * (1.0 / p), e.alpha(), e.ancillas() + 1, e.eps() / p, std::move(l));
}

std::uint64_t amplification_uses(double gamma, double delta, double eps_amp) {
  return static_cast<std::uint64_t>(std::ceil((gamma / delta) * std::log(gamma / eps_amp)));
}

AmplifyResult amplify(const BlockEnc& e, double gamma, double delta, double eps_amp) {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw PreconditionError("amplify needs gamma > 1");
  if (!(delta > 0.0 && delta < 0.5)) throw PreconditionError("amplify needs delta in (0, 1/2)");
  if (!(eps_amp > 0.0 && eps_amp < 0.5)) throw PreconditionError("amplify needs eps in (0, 1/2)");
  const double norm = e.op().spectral_norm();
  if (norm / e.alpha() > (1.0 - delta) / gamma * (1.0 + 1e-12))
    throw PreconditionError("singular value too large to amplify");
  const std::uint64_t m = amplification_uses(gamma, delta, eps_amp);
  ResourceLedger l = e.ledger().repeated(m);
  l.add(ledger_keys::kAmplificationQuery, m);
  l.add_depth(m);
  const double eps = gamma * e.eps() + gamma * norm * eps_amp;
  return {BlockEnc(e.op() * gamma, e.alpha(), e.ancillas() + 1, eps, std::move(l)), m};
}

BlockEnc tensor(const BlockEnc& e1, const BlockEnc& e2) {
  ResourceLedger l = e1.ledger() + e2.ledger();
  // Parallel uses: depth is the deeper branch plus the swap layer.
  l.set_depth_units(std::max(e1.ledger().depth_units(), e2.ledger().depth_units()) + 1);
  l.add(ledger_keys::kSwap);
  const double eps = e1.alpha() * e2.eps() + e2.alpha() * e1.eps() + e1.eps() * e2.eps();
  return BlockEnc(e1.op().kron(e2.op()), e1.alpha() * e2.alpha(), e1.ancillas() + e2.ancillas(), eps,
                  std::move(l));
}

BlockEnc projector(std::size_t j, std::size_t n) {
  const unsigned q = log2_exact(n);
  if (j < 1 || j > n) throw PreconditionError("projector index out of range");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Index>(n));
  d(static_cast<Index>(j - 1)) = 1.0;
  ResourceLedger l;
  l.add(ledger_keys::kProjector);
  l.add(ledger_keys::kStatePrep);
  l.add(ledger_keys::kStatePrepInverse);
  l.add_depth(std::max(1u, q));
  return BlockEnc(Operator::diagonal(std::move(d)), 1.0, q, 0.0, std::move(l));
}

BlockEnc complement_projector(std::span<const std::size_t> masked, std::size_t n) {
  const unsigned q = log2_exact(n);
  Eigen::VectorXd d = Eigen::VectorXd::Ones(static_cast<Index>(n));
  for (std::size_t i : masked) {
    if (i >= n) throw PreconditionError("masked index out of range");
    d(static_cast<Index>(i)) = 0.0;
  }
  ResourceLedger l;
  l.add(ledger_keys::kProjector, masked.size());
  l.add_depth(std::max(1u, q));
  return BlockEnc(Operator::diagonal(std::move(d)), 1.0, 1, 0.0, std::move(l));
}

BlockEnc density_encode(const Eigen::VectorXd& bipartite_state, Index dim_b,
                        const ResourceLedger& prep_ledger, unsigned prep_ancillas) {
  if (dim_b <= 0 || bipartite_state.size() % dim_b != 0)
    throw PreconditionError("state length is not a multiple of the kept dimension");
  const Index dim_a = bipartite_state.size() / dim_b;
  const unsigned qa = log2_exact(static_cast<std::size_t>(dim_a));
  const unsigned qb = log2_exact(static_cast<std::size_t>(dim_b));
  if (std::abs(bipartite_state.norm() - 1.0) > 1e-10) throw PreconditionError("bipartite state is not normalized");
  const Eigen::Map<const Eigen::MatrixXd> psi(bipartite_state.data(), dim_a, dim_b);
  const Eigen::MatrixXd rho = psi.transpose() * psi;
  const Eigen::MatrixXd off = rho - Eigen::MatrixXd(rho.diagonal().asDiagonal());
  Operator op = off.cwiseAbs().maxCoeff() == 0.0 ? Operator::diagonal(rho.diagonal()) : Operator::dense(rho);
  ResourceLedger l = prep_ledger.repeated(2);
  l.add(ledger_keys::kStatePrepInverse);
  l.add_depth(1);
  return BlockEnc(std::move(op), 1.0, prep_ancillas + qa + qb, 0.0, std::move(l));
}

BlockEnc normalize_subnormalization(const BlockEnc& e, double natural_alpha, const AmplifySettings& settings) {
  if (!(natural_alpha > 0.0) || !std::isfinite(natural_alpha))
    throw PreconditionError("natural subnormalization must be positive");
  if (natural_alpha == 1.0) return e;
  if (natural_alpha < 1.0) return scale_down(e, 1.0 / natural_alpha);
  return amplify(e, natural_alpha, settings.delta, settings.eps_amp).enc;
}

}  // namespace qshape
