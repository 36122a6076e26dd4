#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "holoq/circuit.hpp"
#include "holoq/linalg.hpp"
#include "holoq/rng.hpp"

namespace holoq {

struct lifetime_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct leak_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Invariant violations inside the engine (norm drift, impossible branch).
struct internal_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MeasurementOutcome {
  int bit = 0;
  Basis basis = Basis::Z;
  QubitId qubit;
  double probability = 0.0;  // pre-measurement Born probability of `bit`
};

struct ShotRecord {
  std::uint64_t shot_index = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> classical_bits;
  std::vector<MeasurementOutcome> outcomes;
  int herald = -1;  // value of the circuit's herald bit; -1 if none declared
  std::vector<QubitId> leaked_wires;  // wires still flagged at circuit end
  int peak_live = 0;
};

class SimState;

/// Per-shot callbacks; the noise model hangs off these. Hooks may mutate the
/// state (inject Paulis, leak slots) using the state's own rng stream.
class ExecutionHooks {
 public:
  virtual ~ExecutionHooks() = default;
  virtual void after_gate2(SimState&, int /*q0*/, int /*q1*/) {}
  virtual void after_measure(SimState&, int /*q*/) {}
  virtual void after_reset(SimState&, int /*q*/) {}
};

/// Dense state over the live qubit slots. Local dimension is 2 plus an
/// implicit absorbing leaked level per slot: a flagged slot holds all its
/// weight on |L> and its stored qubit content is a |0> placeholder, so the
/// amplitude vector length stays 2^(live slot count).
class SimState {
 public:
  SimState(int num_classical_bits, std::uint64_t seed, ExecutionHooks* hooks = nullptr,
           int leaked_readout_bit = 0);

  void allocate(int wire);
  void apply_gate1(int wire, const Mat2& m);
  void apply_gate2(int wire_hi, int wire_lo, const Mat4& m);
  MeasurementOutcome measure(int wire, Basis basis, int cbit = -1);
  void reset(int wire);

  /// <psi|P|psi> for a Pauli string; all referenced wires must be live and
  /// unleaked (the expectation is undefined on |L>).
  double expectation(const std::map<int, PauliAxis>& pauli_string) const;

  /// Trajectory leakage event: collapses the slot (Born sample in Z,
  /// discarded), parks the stored content in |0>, and sets the flag.
  void leak(int wire);

  bool is_live(int wire) const;
  bool is_leaked(int wire) const;
  int generation(int wire) const;
  int live_count() const { return static_cast<int>(slot_to_wire_.size()); }
  int peak_live() const { return peak_live_; }
  const std::vector<std::uint8_t>& classical_bits() const { return cbits_; }
  std::vector<int> live_wires() const { return slot_to_wire_; }

  /// Amplitudes reordered so wire_order.front() is the most significant
  /// index; wire_order must list exactly the live wires.
  VecX statevector(const std::vector<int>& wire_order) const;

  RandomStream& rng() { return rng_; }

  /// Executes one instruction, firing hooks and the norm check.
  void execute(const Instruction& in);

 private:
  int require_live(int wire) const;
  MeasurementOutcome measure_z_slot(int slot, int wire);
  void remove_slot(int slot, int keep_bit);
  void check_norm() const;

  std::vector<Cx> amp_;
  std::vector<int> wire_to_slot_;  // -1 when dead
  std::vector<int> slot_to_wire_;
  std::vector<std::uint8_t> leak_flag_;    // per slot
  std::vector<int> generation_;            // per wire, bumped at reset
  std::vector<std::uint8_t> cbits_;
  RandomStream rng_;
  ExecutionHooks* hooks_ = nullptr;
  int leaked_readout_bit_ = 0;
  int peak_live_ = 0;
  std::vector<MeasurementOutcome> outcomes_;

  friend ShotRecord run_shot(const Circuit&, std::uint64_t, ExecutionHooks*, int);
};

/// Runs one trajectory of the circuit. Deterministic given (circuit, seed).
ShotRecord run_shot(const Circuit& circuit, std::uint64_t seed, ExecutionHooks* hooks = nullptr,
                    int leaked_readout_bit = 0);

/// Factory so each parallel worker can own an independent hook object.
using HooksFactory = std::function<std::unique_ptr<ExecutionHooks>()>;

/// Runs `num_shots` trajectories with per-shot seeds derived from
/// master_seed; results are independent of `workers`.
std::vector<ShotRecord> run_shots(const Circuit& circuit, std::uint64_t num_shots,
                                  std::uint64_t master_seed, int workers = 1,
                                  const HooksFactory& hooks_factory = {},
                                  int leaked_readout_bit = 0);

/// Wires used by some instruction but never explicitly allocated; these are
/// treated as live from circuit start.
std::vector<int> implicit_start_wires(const Circuit& circuit);

}  // namespace holoq
