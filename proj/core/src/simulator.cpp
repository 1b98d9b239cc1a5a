#include "ampforge/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "ampforge/error.hpp"

namespace ampforge {

SimState::SimState(std::size_t n_qubits) {
  if (n_qubits == 0 || n_qubits > kSimulatorMaxQubits) {
    fail(ErrorCode::TooLarge, "simulator supports 1.." + std::to_string(kSimulatorMaxQubits) + " qubits");
  }
  state_ = Statevector::zero(n_qubits);
}

SimState::SimState(Statevector v) : state_(std::move(v)) {
  if (state_.n_qubits() > kSimulatorMaxQubits) {
    fail(ErrorCode::TooLarge, "simulator supports up to " + std::to_string(kSimulatorMaxQubits) + " qubits");
  }
}

namespace {

void apply_single(std::vector<Complex>& a, std::size_t n, std::size_t q, const ComplexTensor& m) {
  const std::size_t stride = std::size_t{1} << (n - 1 - q);
  const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
  for (std::size_t base = 0; base < a.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Complex x = a[i], y = a[i + stride];
      a[i] = m00 * x + m01 * y;
      a[i + stride] = m10 * x + m11 * y;
    }
  }
}

void apply_cnot(std::vector<Complex>& a, std::size_t n, std::size_t control, std::size_t target) {
  const std::size_t cmask = std::size_t{1} << (n - 1 - control);
  const std::size_t tmask = std::size_t{1} << (n - 1 - target);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((i & cmask) && !(i & tmask)) std::swap(a[i], a[i | tmask]);
  }
}

void apply_dense(std::vector<Complex>& a, std::size_t n, const std::vector<std::size_t>& qubits,
                 const ComplexTensor& m) {
  const std::size_t k = qubits.size();
  const std::size_t dim = std::size_t{1} << k;
  std::vector<std::size_t> offsets(dim, 0);
  std::size_t mask = 0;
  for (std::size_t local = 0; local < dim; ++local) {
    for (std::size_t b = 0; b < k; ++b) {
      if (local & (std::size_t{1} << (k - 1 - b))) offsets[local] |= std::size_t{1} << (n - 1 - qubits[b]);
    }
  }
  for (auto q : qubits) mask |= std::size_t{1} << (n - 1 - q);
  std::vector<Complex> in(dim), out(dim);
  for (std::size_t base = 0; base < a.size(); ++base) {
    if (base & mask) continue;
    for (std::size_t r = 0; r < dim; ++r) in[r] = a[base | offsets[r]];
    for (std::size_t r = 0; r < dim; ++r) {
      Complex acc = 0.0;
      for (std::size_t c = 0; c < dim; ++c) acc += m(r, c) * in[c];
      out[r] = acc;
    }
    for (std::size_t r = 0; r < dim; ++r) a[base | offsets[r]] = out[r];
  }
}

}  // namespace

void apply_gate_inplace(SimState& s, const Gate& g) {
  const std::size_t n = s.n_qubits();
  for (auto q : g.qubits) {
    if (q >= n) {
      fail(ErrorCode::IndexOutOfRange,
           "gate on qubit " + std::to_string(q) + " of a " + std::to_string(n) + "-qubit state");
    }
  }
  auto& a = s.amplitudes();
  switch (g.kind) {
    case GateKind::CNOT:
      apply_cnot(a, n, g.qubits[0], g.qubits[1]);
      return;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
      apply_single(a, n, g.qubits[0], g.local_matrix());
      return;
    case GateKind::Unitary:
      if (g.qubits.size() == 1) {
        apply_single(a, n, g.qubits[0], g.matrix);
      } else {
        apply_dense(a, n, g.qubits, g.matrix);
      }
      return;
  }
}

SimState apply_gate(SimState s, const Gate& g) {
  apply_gate_inplace(s, g);
  return s;
}

SimState run(const Circuit& c) { return run(c, SimState(std::max<std::size_t>(c.n_qubits(), 1))); }

SimState run(const Circuit& c, SimState initial) {
  if (initial.n_qubits() != c.n_qubits()) {
    fail(ErrorCode::SizeMismatch, "circuit has " + std::to_string(c.n_qubits()) + " qubits, state has " +
                                      std::to_string(initial.n_qubits()));
  }
  for (const auto& g : c.gates()) apply_gate_inplace(initial, g);
  return initial;
}

Observable Observable::z_string(std::vector<std::size_t> qubits, double coefficient) {
  Observable o;
  o.kind_ = Kind::ZString;
  o.qubits_ = std::move(qubits);
  o.coefficient_ = coefficient;
  return o;
}

Observable Observable::projector(std::size_t qubit, int bit) {
  if (bit != 0 && bit != 1) fail(ErrorCode::InvalidArgument, "projector bit must be 0 or 1");
  Observable o;
  o.kind_ = Kind::Projector;
  o.qubits_ = {qubit};
  o.bit_ = bit;
  return o;
}

Observable Observable::dense(ComplexTensor matrix) {
  if (matrix.rank() != 2 || matrix.rows() != matrix.cols()) fail(ErrorCode::ShapeMismatch, "observable must be square");
  const double scale = std::max(1.0, matrix.frobenius_norm());
  if ((matrix - matrix.adjoint()).frobenius_norm() > 1e-10 * scale) {
    fail(ErrorCode::NotHermitian, "observable is not Hermitian");
  }
  Observable o;
  o.kind_ = Kind::Dense;
  o.matrix_ = std::move(matrix);
  return o;
}

double Observable::expectation(const SimState& s) const {
  const std::size_t n = s.n_qubits();
  const auto& a = s.amplitudes();
  for (auto q : qubits_) {
    if (q >= n) fail(ErrorCode::IndexOutOfRange, "observable acts on qubit " + std::to_string(q));
  }
  switch (kind_) {
    case Kind::ZString: {
      std::size_t mask = 0;
      for (auto q : qubits_) mask ^= std::size_t{1} << (n - 1 - q);
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double p = std::norm(a[i]);
        acc += (std::popcount(i & mask) % 2 == 0) ? p : -p;
      }
      return coefficient_ * acc;
    }
    case Kind::Projector: {
      const std::size_t mask = std::size_t{1} << (n - 1 - qubits_[0]);
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (((i & mask) != 0) == (bit_ == 1)) acc += std::norm(a[i]);
      }
      return acc;
    }
    case Kind::Dense: {
      if (matrix_.rows() != a.size()) fail(ErrorCode::DimensionMismatch, "observable dimension differs from state");
      Complex acc = 0.0;
      for (std::size_t r = 0; r < a.size(); ++r) {
        Complex row = 0.0;
        for (std::size_t c = 0; c < a.size(); ++c) row += matrix_(r, c) * a[c];
        acc += std::conj(a[r]) * row;
      }
      return acc.real();
    }
  }
  return 0.0;
}

double expectation(const SimState& s, const Observable& obs) { return obs.expectation(s); }

ComplexTensor circuit_unitary(const Circuit& c) {
  const std::size_t n = c.n_qubits();
  if (n == 0 || n > 10) fail(ErrorCode::TooLarge, "circuit_unitary supports 1..10 qubits");
  const std::size_t dim = std::size_t{1} << n;
  ComplexTensor u = ComplexTensor::zeros(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    SimState s(Statevector::basis(n, col));
    s = run(c, std::move(s));
    for (std::size_t r = 0; r < dim; ++r) u(r, col) = s.amplitudes()[r];
  }
  return u;
}

}  // namespace ampforge
