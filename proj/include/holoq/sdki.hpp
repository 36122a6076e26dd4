#pragma once

#include <array>
#include <optional>
#include <vector>

#include "holoq/circuit.hpp"
#include "holoq/linalg.hpp"

namespace holoq {

/// Model parameters: longitudinal field h (radians), number of brick-wall
/// layers t, and measurement window of two_L sites (two-site unit cells).
struct SdkiParams {
  double h = 0.2;
  int t = 0;
  int two_L = 32;
};

void validate_params(const SdkiParams& p);

/// Matrix-product initial state over a two-site unit cell, defined by a
/// unitary W on (bond x spin):  N^{(s,s')}_{i,j} = <j s'|W|i s>.
/// The boundary vector is the all-zeros bond state.
struct SolvableMps {
  int chi = 2;
  MatX W;  // (2*chi) x (2*chi), bond index most significant
  std::optional<std::array<double, 3>> kick_params;  // (Kx,Ky,Kz) when chi==2
  VecX boundary;

  static SolvableMps from_kicks(double kx, double ky, double kz);
  static SolvableMps from_unitary(const MatX& w);
  int bond_qubits() const;  // ceil(log2 chi)
};

/// Unit-cell tensor, one chi x chi matrix per spin pair (s, s');
/// rows are the incoming bond index, columns the outgoing one.
struct CellTensor {
  int chi = 2;
  std::array<MatX, 4> n;  // indexed s*2 + s'
  const MatX& block(int s, int sp) const { return n[s * 2 + sp]; }
};

CellTensor mps_tensor(const SolvableMps& mps);

/// Spectral data of the unit-cell transfer channel (Kraus N/sqrt(2)).
/// The state is injective with finite correlation length when the channel's
/// second eigenvalue modulus is strictly below one.
struct TransferSpectrum {
  double leading = 0.0;
  double second = 0.0;
  bool injective = false;
};

TransferSpectrum transfer_spectrum(const SolvableMps& mps);

/// Two-qubit gate in the dressed dual-unitary normal form
///   U = (u_plus (x) u_minus) * V[J] * (v_minus (x) v_plus),
/// V[J] = exp[-i(pi/4 XX + pi/4 YY + J ZZ)].
struct DualUnitaryGate {
  Mat4 matrix;
  Mat2 u_plus, u_minus, v_plus, v_minus;
  double J = 0.0;
  DualUnitaryTag tag() const { return {u_plus, u_minus, v_plus, v_minus, J}; }
};

/// The kicked-Ising brick-wall gate for longitudinal field h (J = 0 class).
DualUnitaryGate sdki_gate(double h);

/// Arbitrary dressed gate of the normal form above.
DualUnitaryGate dressed_dual_unitary(const Mat2& u_plus, const Mat2& u_minus, const Mat2& v_plus,
                                     const Mat2& v_minus, double J);

/// Space-time dual of a two-qubit gate: <k|<l|dual(U)|i>|j> = <j|<l|U|i>|k>.
Mat4 dual_of(const Mat4& u);

// Named constructors for common gates.
Mat4 ms_gate();    // exp[i (pi/4) ZZ]
Mat4 cnot_gate();  // control on the first (most significant) wire
Mat4 swap_gate();

/// Brick-wall layer geometry over sites 1..num_sites (open boundary).
/// Odd layers straddle unit cells: pairs (2k, 2k+1); even layers act inside
/// cells: pairs (2k-1, 2k).  This parity, combined with per-site causal-cone
/// retirement, is what yields the n_b + 2*ceil(t/2) + 2 qubit budget.
std::vector<int> layer_left_sites(int layer, int num_sites);

/// Gate used at `layer` of a t-layer circuit.  With temporal_boundary off,
/// the incoming v-dressing of the first layer and the outgoing u-dressing of
/// the final layer are stripped.
DualUnitaryGate sdki_layer_gate(double h, int layer, int t, bool temporal_boundary);

/// Brick-wall circuit of t layers over params.two_L sites; wire s-1 carries
/// site s.  All two-qubit gates carry dual-unitary tags.
Circuit floquet_circuit(const SdkiParams& params, bool temporal_boundary = true);

/// Number of two-qubit gates floquet_circuit emits.
long floquet_gate_count(int t, int num_sites);

/// Appends one unit-cell preparation to `circuit`: allocates the two system
/// wires, entangles them as a Bell pair, then applies W between the bond
/// wire and the second system wire.  Produces the cell tensor contracted
/// with the incoming bond state, scaled by 1/sqrt(2) per cell.
/// Only chi = 2 is supported in circuit form.
void append_unit_cell(Circuit& circuit, const SolvableMps& mps, int bond_wire, int wire_first,
                      int wire_second, const std::string& label = {});

/// Standalone unit-cell fragment: wire 0 = bond (live from start), wires
/// 1 and 2 = the emitted pair of sites.
Circuit qmps_unit_cell_circuit(const SolvableMps& mps);

/// Reads the realized cell tensor back off a fragment (input bond b, system
/// wires in |00>), undoing the 1/sqrt(2) Bell normalization.
CellTensor extract_cell_tensor(const Circuit& fragment, int chi);

/// Non-holographic baseline: qMPS preparation of window + padding cells,
/// the full brick wall over every prepared site, then X-basis measurement of
/// all window sites.  Padding of ceil(t/2) cells keeps truncation effects
/// outside every measured light cone.  Wire 0 is the bond.
Circuit flat_reference_circuit(const SdkiParams& params, const SolvableMps& mps, int window_cells,
                               bool temporal_boundary = true, int qubit_cap = 24);

int flat_padding_cells(int t);

}  // namespace holoq
