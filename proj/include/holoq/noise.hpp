#pragma once

#include <vector>

#include "holoq/circuit.hpp"
#include "holoq/statevector.hpp"

namespace holoq {

/// Trajectory noise parameters. Depolarizing noise models generic gate
/// error; the leakage channels feed the herald/post-selection machinery.
/// The measurement/reset crosstalk split is deliberately left as two free
/// parameters.
struct NoiseParams {
  double p_depol_tq = 0.0;             // per two-qubit gate
  double p_leak_tq = 0.0;              // per participant per two-qubit gate
  double p_leak_meas_crosstalk = 0.0;  // per live spectator per measurement
  double p_leak_reset_crosstalk = 0.0; // per live spectator per reset
  int leaked_readout_bit = 0;

  void validate() const;
  bool enabled() const {
    return p_depol_tq > 0 || p_leak_tq > 0 || p_leak_meas_crosstalk > 0 ||
           p_leak_reset_crosstalk > 0;
  }
};

/// Execution hooks realizing NoiseParams. Zero-probability channels draw
/// nothing from the rng, so an all-zero model reproduces the noiseless
/// stream bit for bit.
class NoiseModel : public ExecutionHooks {
 public:
  explicit NoiseModel(NoiseParams params);
  void after_gate2(SimState& state, int q0, int q1) override;
  void after_measure(SimState& state, int q) override;
  void after_reset(SimState& state, int q) override;

 private:
  void crosstalk(SimState& state, int q, double p);
  NoiseParams p_;
};

HooksFactory make_noise_factory(const NoiseParams& params);

enum class GadgetMode { Destructive, Qnd };

/// Appends the two-MS leakage detection gadget on `target`: a fresh ancilla
/// heralds 1 exactly when the target has leaked (the doubled MS acts as
/// identity on a leaked qubit, as sigma^z (x) sigma^z otherwise).  In Qnd
/// mode a classically conditioned sigma^z undoes the back-action on an
/// unleaked target.  Sets the circuit's herald bit.
Circuit leakage_gadget(const Circuit& circuit, int target_wire, GadgetMode mode);

struct HeraldResult {
  bool leaked = false;
  int ancilla_bit = 0;
  bool corrected = false;  // whether the conditional sigma^z fired
};

struct PostSelection {
  std::vector<ShotRecord> kept;
  double discard_fraction = 0.0;
  std::size_t total = 0;
};

/// Keeps shots whose herald bit is 0. Kept records are unmodified copies.
/// Throws std::invalid_argument if any shot lacks a herald bit.
PostSelection post_select(const std::vector<ShotRecord>& shots);

}  // namespace holoq
