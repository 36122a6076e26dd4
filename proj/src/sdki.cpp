#include "holoq/sdki.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace holoq {

namespace {
constexpr double kPi4 = std::numbers::pi / 4.0;

Mat4 v_core(double J) {
  // exp[-i(pi/4 XX + pi/4 YY + J ZZ)]; the three terms commute.
  return expi_pauli_pair(PauliAxis::X, -kPi4) * expi_pauli_pair(PauliAxis::Y, -kPi4) *
         expi_pauli_pair(PauliAxis::Z, -J);
}
}  // namespace

void validate_params(const SdkiParams& p) {
  if (p.t < 0) throw std::invalid_argument("t must be non-negative");
  if (p.two_L <= 0 || p.two_L % 2 != 0)
    throw std::invalid_argument("two_L must be a positive even integer");
}

SolvableMps SolvableMps::from_kicks(double kx, double ky, double kz) {
  SolvableMps mps;
  mps.chi = 2;
  mps.W = expi_pauli_pair(PauliAxis::X, -kx) * expi_pauli_pair(PauliAxis::Y, -ky) *
          expi_pauli_pair(PauliAxis::Z, -kz);
  mps.kick_params = {{kx, ky, kz}};
  mps.boundary = VecX::Zero(2);
  mps.boundary(0) = 1.0;
  return mps;
}

SolvableMps SolvableMps::from_unitary(const MatX& w) {
  if (w.rows() != w.cols() || w.rows() < 2 || w.rows() % 2 != 0)
    throw std::invalid_argument("W must be square of size 2*chi");
  if (unitarity_defect(w) > 1e-12) throw std::invalid_argument("W is not unitary");
  SolvableMps mps;
  mps.chi = static_cast<int>(w.rows() / 2);
  if ((mps.chi & (mps.chi - 1)) != 0)
    throw std::invalid_argument("bond dimension must be a power of two");
  mps.W = w;
  mps.boundary = VecX::Zero(mps.chi);
  mps.boundary(0) = 1.0;
  return mps;
}

int SolvableMps::bond_qubits() const {
  int n = 0;
  while ((1 << n) < chi) ++n;
  return n;
}

CellTensor mps_tensor(const SolvableMps& mps) {
  CellTensor t;
  t.chi = mps.chi;
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) {
      MatX block(mps.chi, mps.chi);
      for (int i = 0; i < mps.chi; ++i)
        for (int j = 0; j < mps.chi; ++j) block(i, j) = mps.W(j * 2 + sp, i * 2 + s);
      t.n[s * 2 + sp] = std::move(block);
    }
  return t;
}

TransferSpectrum transfer_spectrum(const SolvableMps& mps) {
  const CellTensor t = mps_tensor(mps);
  const int chi = mps.chi;
  const int d = chi * chi;
  MatX m = MatX::Zero(d, d);
  // rho'_{jj'} = sum_{ss'} sum_{ii'} N_{ij} rho_{ii'} conj(N_{i'j'}) / 2
  for (int s = 0; s < 4; ++s) {
    const MatX& n = t.n[s];
    for (int j = 0; j < chi; ++j)
      for (int jp = 0; jp < chi; ++jp)
        for (int i = 0; i < chi; ++i)
          for (int ip = 0; ip < chi; ++ip)
            m(j * chi + jp, i * chi + ip) += n(i, j) * std::conj(n(ip, jp)) / 2.0;
  }
  Eigen::ComplexEigenSolver<MatX> solver(m, /*computeEigenvectors=*/false);
  std::vector<double> mods;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k)
    mods.push_back(std::abs(solver.eigenvalues()(k)));
  std::sort(mods.rbegin(), mods.rend());
  TransferSpectrum spec;
  spec.leading = mods[0];
  spec.second = mods.size() > 1 ? mods[1] : 0.0;
  spec.injective = spec.second < 1.0 - 1e-8;
  return spec;
}

DualUnitaryGate dressed_dual_unitary(const Mat2& u_plus, const Mat2& u_minus, const Mat2& v_plus,
                                     const Mat2& v_minus, double J) {
  DualUnitaryGate g;
  g.u_plus = u_plus;
  g.u_minus = u_minus;
  g.v_plus = v_plus;
  g.v_minus = v_minus;
  g.J = J;
  g.matrix = kron(u_plus, u_minus) * v_core(J) * kron(v_minus, v_plus);
  return g;
}

DualUnitaryGate sdki_gate(double h) {
  const Mat2 u_plus = expi_pauli(PauliAxis::Z, -h) * expi_pauli(PauliAxis::X, kPi4) *
                      expi_pauli(PauliAxis::Y, -kPi4);
  const Mat2 u_minus = expi_pauli(PauliAxis::X, kPi4) * expi_pauli(PauliAxis::Y, -kPi4);
  const Mat2 v_minus = expi_pauli(PauliAxis::Y, kPi4) * expi_pauli(PauliAxis::Z, -h);
  const Mat2 v_plus = expi_pauli(PauliAxis::Y, kPi4);
  return dressed_dual_unitary(u_plus, u_minus, v_plus, v_minus, 0.0);
}

Mat4 dual_of(const Mat4& u) {
  Mat4 out;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out(k * 2 + l, i * 2 + j) = u(j * 2 + l, i * 2 + k);
  return out;
}

Mat4 ms_gate() { return expi_pauli_pair(PauliAxis::Z, kPi4); }

Mat4 cnot_gate() {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

Mat4 swap_gate() {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  return m;
}

std::vector<int> layer_left_sites(int layer, int num_sites) {
  std::vector<int> lefts;
  const int start = (layer % 2 == 1) ? 2 : 1;
  for (int left = start; left + 1 <= num_sites; left += 2) lefts.push_back(left);
  return lefts;
}

DualUnitaryGate sdki_layer_gate(double h, int layer, int t, bool temporal_boundary) {
  DualUnitaryGate g = sdki_gate(h);
  if (temporal_boundary) return g;
  Mat2 u_plus = g.u_plus, u_minus = g.u_minus, v_plus = g.v_plus, v_minus = g.v_minus;
  if (layer == 1) {
    v_plus = Mat2::Identity();
    v_minus = Mat2::Identity();
  }
  if (layer == t) {
    u_plus = Mat2::Identity();
    u_minus = Mat2::Identity();
  }
  return dressed_dual_unitary(u_plus, u_minus, v_plus, v_minus, 0.0);
}

Circuit floquet_circuit(const SdkiParams& params, bool temporal_boundary) {
  validate_params(params);
  Circuit c;
  for (int layer = 1; layer <= params.t; ++layer) {
    const DualUnitaryGate g = sdki_layer_gate(params.h, layer, params.t, temporal_boundary);
    for (int left : layer_left_sites(layer, params.two_L)) {
      auto in = Instruction::gate2(left - 1, left, g.matrix,
                                   "layer " + std::to_string(layer));
      in.du_tag = g.tag();
      c.push(in);
    }
  }
  return c;
}

long floquet_gate_count(int t, int num_sites) {
  long n = 0;
  for (int layer = 1; layer <= t; ++layer)
    n += static_cast<long>(layer_left_sites(layer, num_sites).size());
  return n;
}

void append_unit_cell(Circuit& circuit, const SolvableMps& mps, int bond_wire, int wire_first,
                      int wire_second, const std::string& label) {
  if (mps.chi != 2)
    throw std::invalid_argument("circuit preparation supports chi = 2 only");
  circuit.push(Instruction::allocate(wire_first));
  circuit.push(Instruction::allocate(wire_second));
  // Bell pair feeds the tensor's incoming spin index; W then emits the
  // outgoing spin on the second wire while updating the bond register.
  circuit.push(Instruction::gate1(wire_first, hadamard(), label));
  circuit.push(Instruction::gate2(wire_first, wire_second, cnot_gate(), label));
  circuit.push(Instruction::gate2(bond_wire, wire_second, Mat4(mps.W), label));
}

Circuit qmps_unit_cell_circuit(const SolvableMps& mps) {
  Circuit c;
  // Touch the bond wire so it is live from circuit start even for W = id.
  append_unit_cell(c, mps, 0, 1, 2, "unit cell");
  return c;
}

CellTensor extract_cell_tensor(const Circuit& fragment, int chi) {
  if (chi != 2) throw std::invalid_argument("extraction supports chi = 2 only");
  const MatX u = unitary_of(fragment);
  if (u.rows() != 8) throw std::invalid_argument("fragment must act on 3 wires");
  CellTensor t;
  t.chi = chi;
  const double root2 = std::sqrt(2.0);
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) {
      MatX block(chi, chi);
      // Wire order (bond, first, second): row index b'*4 + s*2 + s',
      // column (input) index b*4 for system wires starting in |00>.
      for (int b = 0; b < chi; ++b)
        for (int bp = 0; bp < chi; ++bp) block(b, bp) = root2 * u(bp * 4 + s * 2 + sp, b * 4);
      t.n[s * 2 + sp] = std::move(block);
    }
  return t;
}

int flat_padding_cells(int t) { return (t + 1) / 2; }

Circuit flat_reference_circuit(const SdkiParams& params, const SolvableMps& mps, int window_cells,
                               bool temporal_boundary, int qubit_cap) {
  validate_params(params);
  if (window_cells <= 0) throw std::invalid_argument("window_cells must be positive");
  const int cells = window_cells + flat_padding_cells(params.t);
  const int num_sites = 2 * cells;
  const int n_b = mps.bond_qubits();
  if (num_sites + n_b > qubit_cap)
    throw std::length_error("flat reference circuit needs " + std::to_string(num_sites + n_b) +
                            " qubits, cap is " + std::to_string(qubit_cap));

  Circuit c;
  const int bond = 0;
  c.push(Instruction::allocate(bond));
  for (int cell = 1; cell <= cells; ++cell) {
    const int first = 1 + 2 * (cell - 1);
    append_unit_cell(c, mps, bond, first, first + 1, "prep cell " + std::to_string(cell));
  }
  SdkiParams evolution = params;
  evolution.two_L = num_sites;
  const Circuit brick = floquet_circuit(evolution, temporal_boundary);
  for (auto in : brick.instructions) {
    in.q0 += 1;  // site s lives on wire s here (wire 0 is the bond)
    in.q1 += 1;
    c.push(std::move(in));
  }
  for (int site = 1; site <= 2 * window_cells; ++site) {
    const int bit = c.add_classical_bit(site);
    c.push(Instruction::measure(site, bit, Basis::X));
  }
  return c;
}

}  // namespace holoq
