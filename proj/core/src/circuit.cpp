#include "ampforge/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ampforge/error.hpp"

namespace ampforge {

const char* to_string(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::CNOT: return "cx";
    case GateKind::Unitary: return "unitary";
  }
  return "?";
}

ComplexTensor rx_matrix(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return ComplexTensor::from_rows({{c, Complex(0, -s)}, {Complex(0, -s), c}});
}

ComplexTensor ry_matrix(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return ComplexTensor::from_rows({{c, -s}, {s, c}});
}

ComplexTensor rz_matrix(double t) {
  return ComplexTensor::from_rows({{std::polar(1.0, -t / 2), 0.0}, {0.0, std::polar(1.0, t / 2)}});
}

ComplexTensor cnot_matrix() {
  return ComplexTensor::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}});
}

Gate Gate::rx(std::size_t q, double theta) { return {GateKind::RX, {q}, theta, {}}; }
Gate Gate::ry(std::size_t q, double theta) { return {GateKind::RY, {q}, theta, {}}; }
Gate Gate::rz(std::size_t q, double theta) { return {GateKind::RZ, {q}, theta, {}}; }
Gate Gate::cnot(std::size_t control, std::size_t target) { return {GateKind::CNOT, {control, target}, 0.0, {}}; }

Gate Gate::unitary(ComplexTensor u, std::vector<std::size_t> qubits) {
  if (qubits.empty() || qubits.size() > 20) fail(ErrorCode::InvalidArgument, "unitary block needs 1..20 qubits");
  const std::size_t dim = std::size_t{1} << qubits.size();
  if (u.rank() != 2 || u.rows() != dim || u.cols() != dim) {
    fail(ErrorCode::ShapeMismatch, "unitary block dimension does not match its qubit count");
  }
  if (!is_unitary(u, 1e-10)) fail(ErrorCode::NotUnitary, "gate matrix is not unitary");
  return {GateKind::Unitary, std::move(qubits), 0.0, std::move(u)};
}

ComplexTensor Gate::local_matrix() const {
  switch (kind) {
    case GateKind::RX: return rx_matrix(angle);
    case GateKind::RY: return ry_matrix(angle);
    case GateKind::RZ: return rz_matrix(angle);
    case GateKind::CNOT: return cnot_matrix();
    case GateKind::Unitary: return matrix;
  }
  return matrix;
}

Gate Gate::adjoint() const {
  Gate g = *this;
  if (is_rotation()) g.angle = -angle;
  if (kind == GateKind::Unitary) g.matrix = matrix.adjoint();
  return g;
}

Circuit& Circuit::add(Gate g) {
  for (std::size_t i = 0; i < g.qubits.size(); ++i) {
    if (g.qubits[i] >= n_qubits_) {
      fail(ErrorCode::IndexOutOfRange, "qubit " + std::to_string(g.qubits[i]) + " outside a " +
                                           std::to_string(n_qubits_) + "-qubit circuit");
    }
    for (std::size_t j = 0; j < i; ++j)
      if (g.qubits[j] == g.qubits[i]) fail(ErrorCode::InvalidArgument, "gate acts twice on one qubit");
  }
  if (g.is_rotation() && !std::isfinite(g.angle)) fail(ErrorCode::InvalidArgument, "non-finite rotation angle");
  if (g.kind == GateKind::CNOT && g.qubits.size() != 2) fail(ErrorCode::InvalidArgument, "cx needs two qubits");
  if (g.is_rotation() && g.qubits.size() != 1) fail(ErrorCode::InvalidArgument, "rotations act on one qubit");
  gates_.push_back(std::move(g));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_qubits_ > n_qubits_) fail(ErrorCode::SizeMismatch, "appending a wider circuit");
  for (const auto& g : other.gates_) add(g);
  return *this;
}

Circuit Circuit::adjoint() const {
  Circuit out(n_qubits_);
  out.metadata = metadata;
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.gates_.push_back(it->adjoint());
  return out;
}

Circuit decompose(const Circuit& c) {
  Circuit out(c.n_qubits());
  out.metadata = c.metadata;
  for (const auto& g : c.gates()) {
    if (g.kind != GateKind::Unitary) {
      out.add(g);
      continue;
    }
    std::vector<Gate> parts;
    if (g.qubits.size() == 1) {
      parts = decompose_single_qubit(g.matrix, g.qubits[0]);
    } else if (g.qubits.size() == 2) {
      parts = decompose_two_qubit(g.matrix, g.qubits[0], g.qubits[1]);
    } else {
      fail(ErrorCode::UndecomposedBlock,
           std::to_string(g.qubits.size()) + "-qubit blocks cannot be decomposed into elementary gates");
    }
    for (auto& p : parts) out.add(std::move(p));
  }
  return out;
}

std::size_t shannon_cnot_bound(std::size_t n_qubits) {
  if (n_qubits <= 1) return 0;
  // (23/48) 4^n - (3/2) 2^n + 4/3, integral for n >= 2.
  const std::size_t four = std::size_t{1} << (2 * n_qubits);
  const std::size_t two = std::size_t{1} << n_qubits;
  return (23 * four - 72 * two + 64) / 48;
}

std::size_t cnot_count(const Circuit& c) {
  std::size_t count = 0;
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::CNOT) {
      ++count;
    } else if (g.kind == GateKind::Unitary) {
      if (g.qubits.size() == 2) {
        count += static_cast<std::size_t>(minimal_cnot_count(g.matrix));
      } else if (g.qubits.size() > 2) {
        count += shannon_cnot_bound(g.qubits.size());
      }
    }
  }
  return count;
}

namespace {

// Appends a uniformly controlled rotation: for each control pattern j (with
// controls[0] the most significant bit) the target sees R(angles[j]).
void append_multiplexed_rotation(Circuit& c, GateKind axis, std::size_t target,
                                 const std::vector<std::size_t>& controls, const std::vector<double>& angles) {
  auto rot = [&](double theta) {
    if (std::abs(theta) < 1e-14) return;
    c.add(axis == GateKind::RY ? Gate::ry(target, theta) : Gate::rz(target, theta));
  };
  const std::size_t k = controls.size();
  if (k == 0) {
    rot(angles[0]);
    return;
  }
  const std::size_t n = std::size_t{1} << k;
  auto gray = [](std::size_t i) { return i ^ (i >> 1); };
  for (std::size_t i = 0; i < n; ++i) {
    double theta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const bool odd = std::popcount(j & gray(i)) % 2 == 1;
      theta += odd ? -angles[j] : angles[j];
    }
    rot(theta / static_cast<double>(n));
    const std::size_t changed = gray(i) ^ gray((i + 1) % n);
    const auto bit = static_cast<std::size_t>(std::countr_zero(changed));
    c.add(Gate::cnot(controls[k - 1 - bit], target));
  }
}

}  // namespace

Circuit exact_prep_baseline(const Statevector& v) {
  const std::size_t n = v.n_qubits();
  if (n > kBaselineMaxQubits) {
    fail(ErrorCode::TooLarge, "exact preparation baseline is limited to " + std::to_string(kBaselineMaxQubits) +
                                  " qubits");
  }
  std::vector<Complex> amps = v.normalized().amplitudes();
  Circuit disentangle(n);
  for (std::size_t level = n; level-- > 0;) {
    const std::size_t pairs = std::size_t{1} << level;
    std::vector<double> phase_angles(pairs), tilt_angles(pairs);
    std::vector<Complex> next(pairs);
    bool any_phase = false, any_tilt = false;
    const bool real_level = std::all_of(amps.begin(), amps.end(), [](Complex a) { return a.imag() == 0.0; });
    for (std::size_t j = 0; j < pairs; ++j) {
      const Complex a0 = amps[2 * j], a1 = amps[2 * j + 1];
      if (real_level) {
        // A signed tilt maps a real pair onto a non-negative amplitude.
        tilt_angles[j] = -2.0 * std::atan2(a1.real(), a0.real());
        phase_angles[j] = 0.0;
        next[j] = std::hypot(a0.real(), a1.real());
        any_tilt = any_tilt || std::abs(tilt_angles[j]) > 1e-14;
        continue;
      }
      const double r0 = std::abs(a0), r1 = std::abs(a1);
      const double p0 = r0 > 0 ? std::arg(a0) : 0.0;
      const double p1 = r1 > 0 ? std::arg(a1) : (r0 > 0 ? p0 : 0.0);
      const double q0 = r0 > 0 ? p0 : p1;
      phase_angles[j] = q0 - p1;
      tilt_angles[j] = -2.0 * std::atan2(r1, r0);
      next[j] = std::polar(std::hypot(r0, r1), (q0 + p1) / 2.0);
      any_phase = any_phase || std::abs(phase_angles[j]) > 1e-14;
      any_tilt = any_tilt || std::abs(tilt_angles[j]) > 1e-14;
    }
    std::vector<std::size_t> controls(level);
    for (std::size_t q = 0; q < level; ++q) controls[q] = q;
    if (any_phase) append_multiplexed_rotation(disentangle, GateKind::RZ, level, controls, phase_angles);
    if (any_tilt) append_multiplexed_rotation(disentangle, GateKind::RY, level, controls, tilt_angles);
    amps = std::move(next);
  }
  Circuit prep = disentangle.adjoint();
  prep.metadata.source_fidelity = 1.0;
  return prep;
}

std::size_t exact_prep_cnot_formula(std::size_t n_qubits, bool complex_amplitudes) {
  if (n_qubits <= 1) return 0;
  const std::size_t per_axis = (std::size_t{1} << n_qubits) - 2;
  return complex_amplitudes ? 2 * per_axis : per_axis;
}

std::string export_qasm(const Circuit& c) {
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << c.n_qubits() << "];\n";
  char angle[64];
  for (const auto& g : c.gates()) {
    switch (g.kind) {
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ:
        std::snprintf(angle, sizeof(angle), "%.17g", g.angle);
        out << to_string(g.kind) << "(" << angle << ") q[" << g.qubits[0] << "];\n";
        break;
      case GateKind::CNOT:
        out << "cx q[" << g.qubits[0] << "],q[" << g.qubits[1] << "];\n";
        break;
      case GateKind::Unitary:
        fail(ErrorCode::UndecomposedBlock, "decompose unitary blocks before exporting QASM");
    }
  }
  return out.str();
}

namespace {

[[noreturn]] void qasm_error(std::size_t line, const std::string& what) {
  fail(ErrorCode::ParseError, "qasm line " + std::to_string(line) + ": " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_qubit(const std::string& tok, std::size_t line) {
  const std::string t = trim(tok);
  if (t.size() < 4 || t.rfind("q[", 0) != 0 || t.back() != ']') qasm_error(line, "bad qubit operand '" + t + "'");
  try {
    std::size_t used = 0;
    const auto v = std::stoul(t.substr(2, t.size() - 3), &used);
    if (used != t.size() - 3) qasm_error(line, "bad qubit index");
    return v;
  } catch (const std::logic_error&) {
    qasm_error(line, "bad qubit index");
  }
}

}  // namespace

Circuit parse_qasm(std::string_view text) {
  std::optional<Circuit> circuit;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string line = trim(raw);
    if (const auto cm = line.find("//"); cm != std::string::npos) line = trim(line.substr(0, cm));
    if (line.empty()) continue;
    if (line.back() != ';') qasm_error(line_no, "missing ';'");
    line.pop_back();
    line = trim(line);

    if (line == "OPENQASM 2.0") {
      saw_header = true;
      continue;
    }
    if (!saw_header) qasm_error(line_no, "expected 'OPENQASM 2.0;' header");
    if (line == "include \"qelib1.inc\"") continue;
    if (line.rfind("qreg ", 0) == 0) {
      if (circuit) qasm_error(line_no, "only one register is supported");
      circuit.emplace(parse_qubit(line.substr(5), line_no));
      continue;
    }
    if (!circuit) qasm_error(line_no, "gate before qreg declaration");

    if (line.rfind("cx ", 0) == 0) {
      const std::string args = line.substr(3);
      const auto comma = args.find(',');
      if (comma == std::string::npos) qasm_error(line_no, "cx needs two operands");
      circuit->add(Gate::cnot(parse_qubit(args.substr(0, comma), line_no), parse_qubit(args.substr(comma + 1), line_no)));
      continue;
    }
    const auto open = line.find('(');
    const auto close = line.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      qasm_error(line_no, "unsupported statement '" + line + "'");
    }
    const std::string name = trim(line.substr(0, open));
    const std::string angle_text = trim(line.substr(open + 1, close - open - 1));
    char* end = nullptr;
    const double angle = std::strtod(angle_text.c_str(), &end);
    if (angle_text.empty() || end != angle_text.c_str() + angle_text.size()) {
      qasm_error(line_no, "bad angle '" + angle_text + "'");
    }
    const std::size_t q = parse_qubit(line.substr(close + 1), line_no);
    if (name == "rx") {
      circuit->add(Gate::rx(q, angle));
    } else if (name == "ry") {
      circuit->add(Gate::ry(q, angle));
    } else if (name == "rz") {
      circuit->add(Gate::rz(q, angle));
    } else {
      qasm_error(line_no, "unsupported gate '" + name + "'");
    }
  }
  if (!circuit) fail(ErrorCode::ParseError, "no qreg declaration");
  return *circuit;
}

nlohmann::json gate_count_json(const Circuit& c) {
  std::size_t rotations = 0, blocks = 0, cx = 0;
  for (const auto& g : c.gates()) {
    if (g.is_rotation()) ++rotations;
    if (g.kind == GateKind::Unitary) ++blocks;
    if (g.kind == GateKind::CNOT) ++cx;
  }
  return {{"n_qubits", c.n_qubits()},
          {"gates", c.size()},
          {"rotations", rotations},
          {"cx_gates", cx},
          {"unitary_blocks", blocks},
          {"cnot_count", cnot_count(c)}};
}

}  // namespace ampforge
