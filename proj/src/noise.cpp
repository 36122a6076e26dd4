#include "holoq/noise.hpp"

#include <set>
#include <stdexcept>

#include "holoq/sdki.hpp"

namespace holoq {

void NoiseParams::validate() const {
  for (double p : {p_depol_tq, p_leak_tq, p_leak_meas_crosstalk, p_leak_reset_crosstalk})
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("noise probability outside [0,1]");
  if (leaked_readout_bit != 0 && leaked_readout_bit != 1)
    throw std::invalid_argument("leaked_readout_bit must be 0 or 1");
}

NoiseModel::NoiseModel(NoiseParams params) : p_(params) { p_.validate(); }

void NoiseModel::after_gate2(SimState& state, int q0, int q1) {
  if (p_.p_depol_tq > 0 && state.rng().uniform() < p_.p_depol_tq) {
    // Uniformly random non-identity two-qubit Pauli.
    const int k = static_cast<int>(state.rng().uniform_int(15)) + 1;
    const int pa = k / 4, pb = k % 4;
    static const PauliAxis axes[3] = {PauliAxis::X, PauliAxis::Y, PauliAxis::Z};
    if (pa > 0) state.apply_gate1(q0, pauli(axes[pa - 1]));
    if (pb > 0) state.apply_gate1(q1, pauli(axes[pb - 1]));
  }
  if (p_.p_leak_tq > 0) {
    for (int q : {q0, q1})
      if (state.rng().uniform() < p_.p_leak_tq) state.leak(q);
  }
}

void NoiseModel::crosstalk(SimState& state, int q, double p) {
  if (p <= 0) return;
  for (int w : state.live_wires()) {
    if (w == q) continue;
    if (state.rng().uniform() < p) state.leak(w);
  }
}

void NoiseModel::after_measure(SimState& state, int q) {
  crosstalk(state, q, p_.p_leak_meas_crosstalk);
}

void NoiseModel::after_reset(SimState& state, int q) {
  crosstalk(state, q, p_.p_leak_reset_crosstalk);
}

HooksFactory make_noise_factory(const NoiseParams& params) {
  if (!params.enabled()) return {};
  return [params]() { return std::make_unique<NoiseModel>(params); };
}

Circuit leakage_gadget(const Circuit& circuit, int target_wire, GadgetMode mode) {
  Circuit out = circuit;

  // Ancilla reuses the lowest wire that is dead at circuit end.
  std::set<int> live;
  for (int w : implicit_start_wires(out)) live.insert(w);
  std::set<int> ever;
  for (const auto& in : out.instructions) {
    if (in.kind == InstrKind::Allocate) live.insert(in.q0);
    if (in.kind == InstrKind::Reset) live.erase(in.q0);
    for (int q : {in.q0, in.q1})
      if (q >= 0) ever.insert(q);
  }
  if (!live.count(target_wire))
    throw lifetime_error("leakage gadget target q" + std::to_string(target_wire) +
                         " is not live at circuit end");
  int ancilla = out.num_wires();
  for (int w : ever)
    if (!live.count(w)) {
      ancilla = w;
      break;
    }

  const int herald = out.add_classical_bit();
  out.herald_bit = herald;
  out.push(Instruction::allocate(ancilla));
  out.push(Instruction::gate1(ancilla, hadamard(), "leak gadget"));
  out.push(Instruction::gate2(target_wire, ancilla, ms_gate(), "leak gadget"));
  out.push(Instruction::gate2(target_wire, ancilla, ms_gate(), "leak gadget"));
  out.push(Instruction::gate1(ancilla, hadamard(), "leak gadget"));
  out.push(Instruction::gate1(ancilla, pauli_x(), "leak gadget"));
  out.push(Instruction::measure(ancilla, herald, Basis::Z));
  if (mode == GadgetMode::Qnd)
    out.push(Instruction::cond_gate1(target_wire, pauli_z(), herald, 0));
  return out;
}

PostSelection post_select(const std::vector<ShotRecord>& shots) {
  PostSelection sel;
  sel.total = shots.size();
  std::size_t discarded = 0;
  for (const auto& s : shots) {
    if (s.herald < 0)
      throw std::invalid_argument("shot " + std::to_string(s.shot_index) + " has no herald bit");
    if (s.herald == 0)
      sel.kept.push_back(s);
    else
      ++discarded;
  }
  sel.discard_fraction =
      shots.empty() ? 0.0 : static_cast<double>(discarded) / static_cast<double>(shots.size());
  return sel;
}

}  // namespace holoq
