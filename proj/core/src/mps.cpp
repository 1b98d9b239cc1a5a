#include "ampforge/mps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "ampforge/error.hpp"
#include "eigen_bridge.hpp"

namespace ampforge {

namespace {

bool is_power_of_two(std::size_t n) { return n >= 1 && std::has_single_bit(n); }

std::size_t log2_exact(std::size_t n) { return static_cast<std::size_t>(std::countr_zero(n)); }

// Slice p of a (l, 2, r) site as an l x r matrix.
detail::RowMatrix slice(const ComplexTensor& site, std::size_t p) {
  const std::size_t l = site.dim(0), r = site.dim(2);
  detail::RowMatrix out(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r));
  for (std::size_t a = 0; a < l; ++a)
    for (std::size_t b = 0; b < r; ++b)
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = site[(a * 2 + p) * r + b];
  return out;
}

void move_centre_right(std::vector<ComplexTensor>& sites, std::size_t i) {
  const std::size_t l = sites[i].dim(0), r = sites[i].dim(2);
  auto [q, rfac] = qr(reshape(sites[i], {l * 2, r}));
  const std::size_t k = q.cols();
  sites[i] = reshape(q, {l, 2, k});
  const std::size_t r2 = sites[i + 1].dim(2);
  const ComplexTensor next = matmul(rfac, reshape(sites[i + 1], {r, 2 * r2}));
  sites[i + 1] = reshape(next, {k, 2, r2});
}

void move_centre_left(std::vector<ComplexTensor>& sites, std::size_t i) {
  const std::size_t l = sites[i].dim(0), r = sites[i].dim(2);
  // M = L Q with orthonormal rows, via QR of M^dagger.
  auto [q, rfac] = qr(reshape(sites[i], {l, 2 * r}).adjoint());
  const std::size_t k = q.cols();
  sites[i] = reshape(q.adjoint(), {k, 2, r});
  const std::size_t l2 = sites[i - 1].dim(0);
  const ComplexTensor prev = matmul(reshape(sites[i - 1], {l2 * 2, l}), rfac.adjoint());
  sites[i - 1] = reshape(prev, {l2, 2, k});
}

// Contracts sites [first, first + k) into an (l, 2^k, r) tensor.
ComplexTensor contract_window(const std::vector<ComplexTensor>& sites, std::size_t first, std::size_t k) {
  const std::size_t l = sites[first].dim(0);
  ComplexTensor acc = reshape(sites[first], {l * 2, sites[first].dim(2)});
  std::size_t phys = 2;
  for (std::size_t s = first + 1; s < first + k; ++s) {
    const std::size_t bond = sites[s].dim(0), r = sites[s].dim(2);
    acc = matmul(acc, reshape(sites[s], {bond, 2 * r}));
    phys *= 2;
    acc = reshape(acc, {l * phys, r});
  }
  const std::size_t r = sites[first + k - 1].dim(2);
  return reshape(acc, {l, phys, r});
}

// Splits an (l, 2^k, r) window tensor into k sites by successive truncated
// SVDs, absorbing singular values rightward. Returns the relative discarded
// weight accumulated.
double split_window(const ComplexTensor& window, std::size_t k, const TruncationConfig& cfg,
                    std::vector<ComplexTensor>& out_sites) {
  const std::size_t l0 = window.dim(0), r = window.dim(2);
  double discarded = 0.0;
  std::size_t left = l0;
  std::size_t rest_phys = window.dim(1);
  ComplexTensor rem = reshape(window, {l0, rest_phys * r});
  for (std::size_t j = 0; j + 1 < k; ++j) {
    rest_phys /= 2;
    auto dec = svd(reshape(rem, {left * 2, rest_phys * r}), cfg.max_bond, cfg.tol);
    double kept = 0.0;
    for (double s : dec.s) kept += s * s;
    const double total = kept + dec.discarded_weight;
    if (total > 0.0) discarded += dec.discarded_weight / total;
    const std::size_t bond = dec.s.size();
    out_sites.push_back(reshape(dec.u, {left, 2, bond}));
    const double scale = kept > 0.0 ? 1.0 / std::sqrt(kept) : 1.0;
    ComplexTensor next = dec.vdag;
    for (std::size_t a = 0; a < bond; ++a)
      for (std::size_t b = 0; b < next.cols(); ++b) next(a, b) *= dec.s[a] * scale;
    rem = std::move(next);
    left = bond;
  }
  out_sites.push_back(reshape(rem, {left, 2, r}));
  return discarded;
}

}  // namespace

// ---------------------------------------------------------------------------
// Statevector

Statevector::Statevector(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 2 || !is_power_of_two(amplitudes_.size())) {
    fail(ErrorCode::ShapeMismatch,
         "statevector length " + std::to_string(amplitudes_.size()) + " is not a power of two >= 2");
  }
  n_qubits_ = log2_exact(amplitudes_.size());
}

Statevector Statevector::zero(std::size_t n_qubits) { return basis(n_qubits, 0); }

Statevector Statevector::basis(std::size_t n_qubits, std::uint64_t index) {
  if (n_qubits == 0 || n_qubits > 30) fail(ErrorCode::TooLarge, "unsupported qubit count");
  std::vector<Complex> amps(std::size_t{1} << n_qubits);
  amps.at(index) = 1.0;
  return Statevector(std::move(amps));
}

Statevector Statevector::ghz(std::size_t n_qubits) {
  Statevector v = zero(n_qubits);
  v[0] = v[v.dimension() - 1] = 1.0 / std::sqrt(2.0);
  return v;
}

double Statevector::norm() const {
  double acc = 0.0;
  for (const auto& z : amplitudes_) acc += std::norm(z);
  return std::sqrt(acc);
}

Statevector Statevector::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) fail(ErrorCode::AllZeroInput, "cannot normalise a zero vector");
  Statevector out = *this;
  for (auto& z : out.amplitudes_) z /= n;
  return out;
}

Complex inner_product(const Statevector& a, const Statevector& b) {
  if (a.dimension() != b.dimension()) fail(ErrorCode::SizeMismatch, "inner product of different sizes");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double fidelity(const Statevector& a, const Statevector& b) { return std::norm(inner_product(a, b)); }

// ---------------------------------------------------------------------------
// Mps

Mps::Mps(std::vector<ComplexTensor> sites, std::optional<std::size_t> ortho_centre, double discarded_weight)
    : sites_(std::move(sites)), centre_(ortho_centre), discarded_weight_(discarded_weight) {
  if (sites_.empty()) fail(ErrorCode::ShapeMismatch, "an MPS needs at least one site");
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const auto& t = sites_[i];
    if (t.rank() != 3 || t.dim(1) != 2) fail(ErrorCode::ShapeMismatch, "site tensors must be (l, 2, r)");
    if (i == 0 && t.dim(0) != 1) fail(ErrorCode::ShapeMismatch, "left boundary bond must be 1");
    if (i + 1 == sites_.size() && t.dim(2) != 1) fail(ErrorCode::ShapeMismatch, "right boundary bond must be 1");
    if (i > 0 && sites_[i - 1].dim(2) != t.dim(0)) fail(ErrorCode::ShapeMismatch, "bond dimensions do not chain");
  }
  if (centre_ && *centre_ >= sites_.size()) fail(ErrorCode::IndexOutOfRange, "orthogonality centre out of range");
}

Mps Mps::product(const std::vector<std::array<Complex, 2>>& qubits) {
  std::vector<ComplexTensor> sites;
  for (const auto& q : qubits) sites.emplace_back(Shape{1, 2, 1}, std::vector<Complex>{q[0], q[1]});
  return Mps(std::move(sites));
}

std::vector<std::size_t> Mps::bond_dims() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < sites_.size(); ++i) out.push_back(sites_[i].dim(2));
  return out;
}

std::size_t Mps::max_bond() const {
  const auto dims = bond_dims();
  return dims.empty() ? 1 : *std::max_element(dims.begin(), dims.end());
}

Complex Mps::amplitude(std::uint64_t basis_index) const {
  const std::size_t n = sites_.size();
  detail::RowMatrix row = detail::RowMatrix::Ones(1, 1);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t bit = (basis_index >> (n - 1 - s)) & 1U;
    row = row * slice(sites_[s], bit);
  }
  return row(0, 0);
}

double Mps::norm() const {
  if (centre_) return sites_[*centre_].frobenius_norm();
  return std::sqrt(std::abs(overlap(*this, *this)));
}

Mps from_statevector(const Statevector& v, const TruncationConfig& cfg) {
  const Statevector psi = v.normalized();
  const std::size_t n = psi.n_qubits();
  std::vector<ComplexTensor> sites;
  sites.reserve(n);
  ComplexTensor rem({1, psi.dimension()}, psi.amplitudes());
  std::size_t left = 1;
  std::size_t rest = psi.dimension();
  double discarded = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    rest /= 2;
    auto dec = svd(reshape(rem, {left * 2, rest}), cfg.max_bond, cfg.tol);
    double kept = 0.0;
    for (double s : dec.s) kept += s * s;
    const double total = kept + dec.discarded_weight;
    if (total > 0.0) discarded += dec.discarded_weight / total;
    const std::size_t bond = dec.s.size();
    sites.push_back(reshape(dec.u, {left, 2, bond}));
    const double scale = 1.0 / std::sqrt(kept);
    for (std::size_t a = 0; a < bond; ++a)
      for (std::size_t b = 0; b < rest; ++b) dec.vdag(a, b) *= dec.s[a] * scale;
    rem = std::move(dec.vdag);
    left = bond;
  }
  sites.push_back(reshape(rem, {left, 2, 1}));
  return Mps(std::move(sites), n - 1, discarded);
}

Statevector to_statevector(const Mps& m, std::size_t max_qubits) {
  const std::size_t n = m.n_qubits();
  if (n > max_qubits) {
    fail(ErrorCode::TooLarge, "refusing to expand " + std::to_string(n) + " qubits (cap " +
                                  std::to_string(max_qubits) + ")");
  }
  ComplexTensor acc = reshape(m.site(0), {2, m.site(0).dim(2)});
  std::size_t phys = 2;
  for (std::size_t s = 1; s < n; ++s) {
    const auto& site = m.site(s);
    acc = matmul(acc, reshape(site, {site.dim(0), 2 * site.dim(2)}));
    phys *= 2;
    acc = reshape(acc, {phys, site.dim(2)});
  }
  return Statevector(acc.storage());
}

Mps canonicalize(const Mps& m, std::size_t centre) {
  const std::size_t n = m.n_qubits();
  if (centre >= n) fail(ErrorCode::IndexOutOfRange, "canonical centre out of range");
  std::vector<ComplexTensor> sites = m.sites();
  std::size_t current;
  if (m.ortho_centre()) {
    current = *m.ortho_centre();
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) move_centre_right(sites, i);
    current = n - 1;
  }
  for (; current < centre; ++current) move_centre_right(sites, current);
  for (; current > centre; --current) move_centre_left(sites, current);
  return Mps(std::move(sites), centre, m.discarded_weight());
}

namespace {

void check_window(const Mps& m, std::size_t first, std::size_t k) {
  if (k == 0 || first + k > m.n_qubits()) {
    fail(ErrorCode::WindowOutOfRange, "window [" + std::to_string(first) + ", " + std::to_string(first + k) +
                                          ") outside " + std::to_string(m.n_qubits()) + " sites");
  }
}

Mps centre_in_window(const Mps& m, std::size_t first, std::size_t k) {
  const auto c = m.ortho_centre();
  if (!c || *c < first) return canonicalize(m, first);
  if (*c >= first + k) return canonicalize(m, first + k - 1);
  return m;
}

}  // namespace

ComplexTensor reduced_density_matrix(const Mps& m, std::size_t first, std::size_t k) {
  check_window(m, first, k);
  const Mps c = centre_in_window(m, first, k);
  const ComplexTensor t = contract_window(c.sites(), first, k);
  const std::size_t l = t.dim(0), d = t.dim(1), r = t.dim(2);
  detail::RowMatrix x(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(l * r));
  for (std::size_t a = 0; a < l; ++a)
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t b = 0; b < r; ++b)
        x(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(a * r + b)) = t[(a * d + p) * r + b];
  detail::RowMatrix rho = x * x.adjoint();
  const double tr = rho.trace().real();
  if (tr > 0.0) rho /= tr;
  return detail::to_tensor(rho);
}

Mps apply_window_unitary(const Mps& m, const ComplexTensor& u, std::size_t first, const TruncationConfig& cfg) {
  if (u.rank() != 2 || u.rows() != u.cols() || !is_power_of_two(u.rows()) || u.rows() < 2) {
    fail(ErrorCode::ShapeMismatch, "window unitary must be 2^k x 2^k");
  }
  const std::size_t k = log2_exact(u.rows());
  check_window(m, first, k);
  if (!is_unitary(u, 1e-10)) fail(ErrorCode::NotUnitary, "window operator is not unitary");

  const Mps c = centre_in_window(m, first, k);
  ComplexTensor t = contract_window(c.sites(), first, k);
  const std::size_t l = t.dim(0), d = t.dim(1), r = t.dim(2);
  const auto um = detail::as_matrix(u);
  for (std::size_t a = 0; a < l; ++a) {
    Eigen::Map<detail::RowMatrix> block(t.storage().data() + a * d * r, static_cast<Eigen::Index>(d),
                                        static_cast<Eigen::Index>(r));
    block = (um * block).eval();
  }

  std::vector<ComplexTensor> window_sites;
  const double discarded = split_window(t, k, cfg, window_sites);
  std::vector<ComplexTensor> sites = c.sites();
  for (std::size_t j = 0; j < k; ++j) sites[first + j] = std::move(window_sites[j]);
  return Mps(std::move(sites), first + k - 1, c.discarded_weight() + discarded);
}

Complex overlap(const Mps& a, const Mps& b) {
  if (a.n_qubits() != b.n_qubits()) fail(ErrorCode::SizeMismatch, "overlap of MPS with different sizes");
  detail::RowMatrix env = detail::RowMatrix::Ones(1, 1);
  for (std::size_t s = 0; s < a.n_qubits(); ++s) {
    detail::RowMatrix next = detail::RowMatrix::Zero(static_cast<Eigen::Index>(a.site(s).dim(2)),
                                                     static_cast<Eigen::Index>(b.site(s).dim(2)));
    for (std::size_t p = 0; p < 2; ++p) next += slice(a.site(s), p).adjoint() * (env * slice(b.site(s), p));
    env = std::move(next);
  }
  return env(0, 0);
}

double canonical_form_error(const Mps& m) {
  const auto c = m.ortho_centre();
  if (!c) return INFINITY;
  double err = 0.0;
  for (std::size_t s = 0; s < m.n_qubits(); ++s) {
    if (s == *c) continue;
    const auto& t = m.site(s);
    const std::size_t l = t.dim(0), r = t.dim(2);
    detail::RowMatrix g;
    if (s < *c) {
      const ComplexTensor mat = reshape(t, {l * 2, r});
      const auto mm = detail::as_matrix(mat);
      g = mm.adjoint() * mm;
    } else {
      const ComplexTensor mat = reshape(t, {l, 2 * r});
      const auto mm = detail::as_matrix(mat);
      g = mm * mm.adjoint();
    }
    g -= detail::RowMatrix::Identity(g.rows(), g.cols());
    err = std::max(err, g.cwiseAbs().maxCoeff());
  }
  return err;
}

nlohmann::json mps_debug_json(const Mps& m) {
  nlohmann::json j;
  j["n_qubits"] = m.n_qubits();
  j["bond_dims"] = m.bond_dims();
  j["max_bond"] = m.max_bond();
  j["ortho_centre"] = m.ortho_centre() ? nlohmann::json(*m.ortho_centre()) : nlohmann::json(nullptr);
  std::vector<double> norms;
  for (const auto& s : m.sites()) norms.push_back(s.frobenius_norm());
  j["site_norms"] = norms;
  j["discarded_weight"] = m.discarded_weight();
  return j;
}

}  // namespace ampforge
