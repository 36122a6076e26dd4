#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "holoq/linalg.hpp"

namespace holoq {

/// A logical qubit wire. `index` is the stable wire label; `generation`
/// counts how many resets-for-reuse the wire has been through, so
/// (index, generation) names one lifetime of a physical qubit.
struct QubitId {
  int index = 0;
  int generation = 0;
  friend bool operator==(const QubitId&, const QubitId&) = default;
};

enum class Basis { Z, X };

enum class InstrKind { Gate1, Gate2, Measure, Reset, Allocate, CondGate1 };

/// Tag carried by two-qubit gates of the dressed dual-unitary form
///   U = (u_plus (x) u_minus) * V[J] * (v_minus (x) v_plus),
/// with V[J] = exp[-i(pi/4 XX + pi/4 YY + J ZZ)].  The SWAP-factoring
/// rewrite only fires on tagged gates.
struct DualUnitaryTag {
  Mat2 u_plus, u_minus, v_plus, v_minus;
  double J = 0.0;
};

struct Instruction {
  InstrKind kind = InstrKind::Gate1;
  int q0 = -1;               // target wire (first/most-significant for Gate2)
  int q1 = -1;               // second wire for Gate2
  int cbit = -1;             // classical bit for Measure/CondGate1
  int cond_value = 0;        // CondGate1 fires when cbit == cond_value
  Basis basis = Basis::Z;
  Mat2 u1 = Mat2::Identity();
  Mat4 u2 = Mat4::Identity();
  std::optional<DualUnitaryTag> du_tag;
  std::string label;         // free-form note (e.g. "prep cell 3")

  static Instruction gate1(int q, const Mat2& m, std::string label = {});
  static Instruction gate2(int a, int b, const Mat4& m, std::string label = {});
  static Instruction measure(int q, int cbit, Basis basis);
  static Instruction reset(int q);
  static Instruction allocate(int q);
  static Instruction cond_gate1(int q, const Mat2& m, int cbit, int cond_value);
};

/// Ordered instruction list over integer wire labels, with classical bits,
/// a tracked global phase (rewrites preserve equivalence only up to phase,
/// so it is carried explicitly), and per-bit site labels for measurements
/// that sample lattice sites.
struct Circuit {
  std::vector<Instruction> instructions;
  int num_classical_bits = 0;
  Cx global_phase = 1.0;
  std::optional<int> herald_bit;        // leakage-herald classical bit
  std::vector<int> site_of_bit;         // -1 when a bit is not a site readout

  int add_classical_bit(int site = -1);
  void push(Instruction instr);

  /// Largest wire index referenced, plus one.
  int num_wires() const;

  /// Maximum number of simultaneously live wires over all program points.
  /// A wire is live from its Allocate (or first use at circuit start, for
  /// circuits written without explicit allocation) to its Reset.
  int max_live_qubits() const;
};

struct Violation {
  std::size_t instr_index = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Static checks: gate unitarity (1e-12 max-norm), wire liveness
/// (use between Allocate and Reset, no double-allocate), classical bits
/// declared before use.  All findings are report entries, never throws.
ValidationReport validate(const Circuit& circuit);

struct ResourceReport {
  int qubits = 0;
  long single_qubit_gates = 0;
  long two_qubit_gates = 0;
  long measurements = 0;
  long resets = 0;
  friend bool operator==(const ResourceReport&, const ResourceReport&) = default;
};

/// Instruction tally over a well-formed circuit; ConditionalGate1 counts as
/// a single-qubit gate. Throws std::invalid_argument on a malformed circuit.
ResourceReport count_resources(const Circuit& circuit);

inline constexpr int kDefaultUnitaryCap = 14;

/// Composes the full 2^n x 2^n unitary (including tracked global phase) of a
/// measurement/reset-free circuit.  Wire w maps to bit (n-1-w): wire 0 is the
/// most significant index, matching kron(gate_on_0, gate_on_1, ...).
/// Throws std::invalid_argument for non-unitary content and std::length_error
/// above the size cap.
MatX unitary_of(const Circuit& circuit, int max_qubits = kDefaultUnitaryCap);

/// Per-wire generation of each instruction's targets, in instruction order;
/// generation increments at each Reset of that wire.
std::vector<QubitId> qubit_id_of_targets(const Circuit& circuit, std::size_t instr_index);

// ---- line-oriented text serialization (grammar in README) ----

std::string serialize(const Circuit& circuit);
Circuit parse_circuit(const std::string& text);
void write_circuit_file(const Circuit& circuit, const std::string& path);
Circuit read_circuit_file(const std::string& path);

}  // namespace holoq
