// Two-qubit unitary synthesis via the magic-basis (KAK) decomposition.
//
// u = g (L) exp(i (c1 XX + c2 YY + c3 ZZ)) (R), with L, R local. The raw
// coefficients are then folded into the Weyl chamber with explicitly tracked
// local corrections so that special classes (0, 1 or 2 CNOTs) can be matched
// to short cores. The generic core is the 3-CNOT circuit of Vatan and Williams.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "ampforge/circuit.hpp"
#include "ampforge/error.hpp"
#include "eigen_bridge.hpp"

namespace ampforge {

namespace {

using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4cd;
using std::numbers::pi;

constexpr double kClassTol = 1e-9;
const Complex kI(0.0, 1.0);

M2 pauli_x() { return (M2() << 0, 1, 1, 0).finished(); }
M2 pauli_y() { return (M2() << 0, -kI, kI, 0).finished(); }
M2 pauli_z() { return (M2() << 1, 0, 0, -1).finished(); }
M2 hadamard() { return (M2() << 1, 1, 1, -1).finished() / std::sqrt(2.0); }
M2 phase_s() { return (M2() << 1, 0, 0, kI).finished(); }
M2 rx2(double t) { return (M2() << std::cos(t / 2), -kI * std::sin(t / 2), -kI * std::sin(t / 2), std::cos(t / 2)).finished(); }
M2 rz2(double t) { return (M2() << std::exp(-kI * (t / 2)), 0, 0, std::exp(kI * (t / 2))).finished(); }

M4 kron2(const M2& a, const M2& b) {
  M4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

M4 magic_basis() {
  M4 b;
  b << 1, 0, 0, kI,
       0, kI, 1, 0,
       0, kI, -1, 0,
       1, 0, 0, -kI;
  return b / std::sqrt(2.0);
}

// Diagonal of XX, YY, ZZ in the magic basis.
constexpr std::array<std::array<double, 4>, 3> kMagicSigns{{
    {1, 1, -1, -1},
    {-1, 1, -1, 1},
    {1, -1, -1, 1},
}};

M4 sigma_sigma(int axis) {
  switch (axis) {
    case 0: return kron2(pauli_x(), pauli_x());
    case 1: return kron2(pauli_y(), pauli_y());
    default: return kron2(pauli_z(), pauli_z());
  }
}

struct Kak {
  M4 left = M4::Identity();
  M4 right = M4::Identity();
  std::array<double, 3> c{0.0, 0.0, 0.0};
};

Kak raw_kak(const M4& u) {
  const Complex det = u.determinant();
  const M4 su = u / std::pow(det, 0.25);
  const M4 b = magic_basis();
  const M4 ub = b.adjoint() * su * b;
  const M4 m = ub.transpose() * ub;

  // Re(m) and Im(m) are commuting real symmetric matrices; a generic real
  // combination shares their eigenvectors.
  constexpr std::array<double, 6> weights{0.5377, 1.8339, -2.2588, 0.8622, 0.3188, -1.3077};
  Eigen::Matrix4d p;
  bool found = false;
  for (double w : weights) {
    const Eigen::Matrix4d s = m.real() + w * m.imag();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(s);
    p = solver.eigenvectors();
    const M4 d = p.transpose().cast<Complex>() * m * p.cast<Complex>();
    const double off = (d - M4(d.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
    if (off < 1e-10) {
      found = true;
      break;
    }
  }
  if (!found) fail(ErrorCode::NumericalFailure, "could not diagonalise the magic-basis Gram matrix");
  if (p.determinant() < 0) p.col(3) *= -1.0;

  const Eigen::Vector4cd d = (p.transpose().cast<Complex>() * m * p.cast<Complex>()).diagonal();
  std::array<double, 4> theta{};
  for (int j = 0; j < 4; ++j) theta[j] = std::arg(d(j)) / 2.0;
  const double sum = theta[0] + theta[1] + theta[2] + theta[3];
  if (std::cos(sum) < 0.0) theta[0] += pi;

  Eigen::Vector4cd inv_phase;
  for (int j = 0; j < 4; ++j) inv_phase(j) = std::exp(-kI * theta[j]);
  const Eigen::Matrix4d o1 = (ub * p.cast<Complex>() * inv_phase.asDiagonal()).real();

  Kak k;
  k.left = b * o1.cast<Complex>() * b.adjoint();
  k.right = b * p.transpose().cast<Complex>() * b.adjoint();
  for (int axis = 0; axis < 3; ++axis) {
    double acc = 0.0;
    for (int j = 0; j < 4; ++j) acc += kMagicSigns[axis][j] * theta[j];
    k.c[axis] = acc / 4.0;
  }
  return k;
}

// Folds the coefficients into pi/4 >= c1 >= c2 >= |c3|, updating the local
// factors so that left * Ud(c) * right is unchanged up to phase.
void to_weyl_chamber(Kak& k) {
  // exp(i c P) = exp(i (c - n pi/2) P) (i P)^n and (i P)^n commutes with Ud.
  for (int axis = 0; axis < 3; ++axis) {
    const double n = std::round(k.c[axis] / (pi / 2));
    k.c[axis] -= n * pi / 2;
    const auto steps = static_cast<int>(std::fmod(std::fmod(n, 4.0) + 4.0, 4.0));
    for (int s = 0; s < steps; ++s) k.right = (kI * sigma_sigma(axis)) * k.right;
  }

  auto swap_axes = [&](int a, int b) {
    M4 conj;
    if ((a == 0 && b == 1) || (a == 1 && b == 0)) {
      conj = kron2(phase_s(), phase_s());
    } else if ((a == 1 && b == 2) || (a == 2 && b == 1)) {
      conj = kron2(rx2(pi / 2), rx2(pi / 2));
    } else {
      conj = kron2(hadamard(), hadamard());
    }
    // Ud(c) = C Ud(c with a, b swapped) C^dagger
    k.left = k.left * conj;
    k.right = conj.adjoint() * k.right;
    std::swap(k.c[a], k.c[b]);
  };
  // Sort by magnitude, descending.
  if (std::abs(k.c[0]) < std::abs(k.c[1])) swap_axes(0, 1);
  if (std::abs(k.c[1]) < std::abs(k.c[2])) swap_axes(1, 2);
  if (std::abs(k.c[0]) < std::abs(k.c[1])) swap_axes(0, 1);

  auto flip = [&](const M2& pauli, int a, int b) {
    const M4 conj = kron2(pauli, M2::Identity());
    k.left = k.left * conj;
    k.right = conj * k.right;
    k.c[a] = -k.c[a];
    k.c[b] = -k.c[b];
  };
  if (k.c[0] < 0) flip(pauli_y(), 0, 2);
  if (k.c[1] < 0) flip(pauli_x(), 1, 2);
}

// a (x) b = k up to phase; both factors returned in U(2).
std::pair<M2, M2> kron_factor(const M4& k) {
  Eigen::Matrix4cd r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int kk = 0; kk < 2; ++kk)
        for (int l = 0; l < 2; ++l) r(2 * i + kk, 2 * j + l) = k(2 * i + j, 2 * kk + l);
  Eigen::JacobiSVD<Eigen::Matrix4cd> dec(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double s = dec.singularValues()(0);
  const Eigen::Vector4cd av = std::sqrt(s) * dec.matrixU().col(0);
  const Eigen::Vector4cd bv = std::sqrt(s) * dec.matrixV().col(0).conjugate();
  M2 a, b;
  a << av(0), av(1), av(2), av(3);
  b << bv(0), bv(1), bv(2), bv(3);
  if (std::abs(s - 2.0) > 1e-6 || dec.singularValues()(1) > 1e-6) fail(ErrorCode::NumericalFailure, "local factor is not a product operator");
  return {a, b};
}

ComplexTensor to_tensor2(const M2& m) {
  return ComplexTensor::from_rows({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}});
}

M4 as_m4(const ComplexTensor& u) {
  if (u.rank() != 2 || u.rows() != 4 || u.cols() != 4) fail(ErrorCode::ShapeMismatch, "expected a 4x4 unitary");
  if (!is_unitary(u, 1e-10)) fail(ErrorCode::NotUnitary, "two-qubit block is not unitary");
  M4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = u(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return m;
}

int classify(const std::array<double, 3>& c) {
  if (c[0] <= kClassTol) return 0;
  if (std::abs(c[0] - pi / 4) <= kClassTol && c[1] <= kClassTol && std::abs(c[2]) <= kClassTol) return 1;
  if (std::abs(c[2]) <= kClassTol) return 2;
  return 3;
}

void drop_trivial(std::vector<Gate>& gates) {
  std::erase_if(gates, [](const Gate& g) { return g.is_rotation() && std::abs(g.angle) < 1e-14; });
}

}  // namespace

CanonicalCoordinates canonical_coordinates(const ComplexTensor& u) {
  Kak k = raw_kak(as_m4(u));
  to_weyl_chamber(k);
  return {k.c[0], k.c[1], k.c[2]};
}

int minimal_cnot_count(const ComplexTensor& u) {
  Kak k = raw_kak(as_m4(u));
  to_weyl_chamber(k);
  return classify(k.c);
}

std::vector<Gate> decompose_single_qubit(const ComplexTensor& u, std::size_t q) {
  if (u.rank() != 2 || u.rows() != 2 || u.cols() != 2) fail(ErrorCode::ShapeMismatch, "expected a 2x2 unitary");
  if (!is_unitary(u, 1e-10)) fail(ErrorCode::NotUnitary, "single-qubit block is not unitary");
  const Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  const Complex s = std::sqrt(det);
  const Complex a = u(0, 0) / s;
  const Complex b = u(1, 0) / s;
  const double gamma = 2.0 * std::atan2(std::abs(b), std::abs(a));
  double sum = 0.0, diff = 0.0;  // beta + delta, beta - delta
  if (std::abs(a) > 1e-14) sum = -2.0 * std::arg(a);
  if (std::abs(b) > 1e-14) diff = 2.0 * std::arg(b);
  const double beta = (sum + diff) / 2.0;
  const double delta = (sum - diff) / 2.0;
  std::vector<Gate> gates{Gate::rz(q, delta), Gate::ry(q, gamma), Gate::rz(q, beta)};
  drop_trivial(gates);
  return gates;
}

std::vector<Gate> decompose_two_qubit(const ComplexTensor& u, std::size_t q0, std::size_t q1) {
  Kak k = raw_kak(as_m4(u));
  to_weyl_chamber(k);
  const auto [a, b, c] = k.c;
  const int cls = classify(k.c);

  std::vector<Gate> core;
  M4 left = k.left;
  M4 right = k.right;
  switch (cls) {
    case 0:
      break;
    case 1:
      // exp(i pi/4 XX) ~ (H Rz(-pi/2) x H Rz(-pi/2) H) CX (H x I)
      left = left * kron2(hadamard() * rz2(-pi / 2), hadamard() * rz2(-pi / 2) * hadamard());
      right = kron2(hadamard(), M2::Identity()) * right;
      core.push_back(Gate::cnot(q0, q1));
      break;
    case 2: {
      // exp(i (a XX + b YY)) ~ W CX (Rx(-2a) x Rz(-2b)) CX W^dagger, W = Rx(pi/2)^{x2}
      const M4 w = kron2(rx2(pi / 2), rx2(pi / 2));
      left = left * w;
      right = w.adjoint() * right;
      core.push_back(Gate::cnot(q0, q1));
      core.push_back(Gate::rx(q0, -2.0 * a));
      core.push_back(Gate::rz(q1, -2.0 * b));
      core.push_back(Gate::cnot(q0, q1));
      break;
    }
    default: {
      const double t1 = pi / 2 - 2.0 * c;
      const double t2 = 2.0 * a - pi / 2;
      const double t3 = pi / 2 - 2.0 * b;
      left = left * kron2(rz2(pi / 2), M2::Identity());
      right = kron2(M2::Identity(), rz2(-pi / 2)) * right;
      core.push_back(Gate::cnot(q1, q0));
      core.push_back(Gate::rz(q0, t1));
      core.push_back(Gate::ry(q1, t2));
      core.push_back(Gate::cnot(q0, q1));
      core.push_back(Gate::ry(q1, t3));
      core.push_back(Gate::cnot(q1, q0));
      break;
    }
  }

  const auto [l0, l1] = kron_factor(left);
  const auto [r0, r1] = kron_factor(right);
  std::vector<Gate> out;
  auto append = [&out](std::vector<Gate> gs) { out.insert(out.end(), gs.begin(), gs.end()); };
  append(decompose_single_qubit(to_tensor2(r0), q0));
  append(decompose_single_qubit(to_tensor2(r1), q1));
  append(core);
  append(decompose_single_qubit(to_tensor2(l0), q0));
  append(decompose_single_qubit(to_tensor2(l1), q1));
  drop_trivial(out);
  return out;
}

}  // namespace ampforge
