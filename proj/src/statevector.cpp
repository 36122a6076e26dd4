#include "holoq/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

namespace holoq {

namespace {
constexpr double kNormTol = 1e-10;
constexpr double kBranchFloor = 1e-15;
}  // namespace

SimState::SimState(int num_classical_bits, std::uint64_t seed, ExecutionHooks* hooks,
                   int leaked_readout_bit)
    : cbits_(num_classical_bits, 0),
      rng_(seed),
      hooks_(hooks),
      leaked_readout_bit_(leaked_readout_bit) {
  amp_.assign(1, Cx{1.0, 0.0});
}

int SimState::require_live(int wire) const {
  if (wire < 0 || wire >= static_cast<int>(wire_to_slot_.size()) || wire_to_slot_[wire] < 0)
    throw lifetime_error("dead qubit target q" + std::to_string(wire));
  return wire_to_slot_[wire];
}

bool SimState::is_live(int wire) const {
  return wire >= 0 && wire < static_cast<int>(wire_to_slot_.size()) && wire_to_slot_[wire] >= 0;
}

bool SimState::is_leaked(int wire) const { return leak_flag_[require_live(wire)] != 0; }

int SimState::generation(int wire) const {
  if (wire < 0 || wire >= static_cast<int>(generation_.size())) return 0;
  return generation_[wire];
}

void SimState::allocate(int wire) {
  if (wire < 0) throw lifetime_error("negative wire index");
  if (wire >= static_cast<int>(wire_to_slot_.size())) {
    wire_to_slot_.resize(wire + 1, -1);
    generation_.resize(wire + 1, 0);
  }
  if (wire_to_slot_[wire] >= 0)
    throw lifetime_error("allocate of live wire q" + std::to_string(wire));
  const int slot = live_count();
  wire_to_slot_[wire] = slot;
  slot_to_wire_.push_back(wire);
  leak_flag_.push_back(0);
  amp_.resize(amp_.size() * 2, Cx{0.0, 0.0});  // new slot is the top bit, starts in |0>
  peak_live_ = std::max(peak_live_, live_count());
}

void SimState::apply_gate1(int wire, const Mat2& m) {
  const int slot = require_live(wire);
  if (leak_flag_[slot]) return;  // gates act as identity on a leaked slot
  apply_gate1_bits(amp_, slot, m);
}

void SimState::apply_gate2(int wire_hi, int wire_lo, const Mat4& m) {
  const int slot_hi = require_live(wire_hi);
  const int slot_lo = require_live(wire_lo);
  if (leak_flag_[slot_hi] || leak_flag_[slot_lo]) return;  // identity on both targets
  apply_gate2_bits(amp_, slot_hi, slot_lo, m);
}

MeasurementOutcome SimState::measure_z_slot(int slot, int wire) {
  const std::size_t mask = std::size_t{1} << slot;
  double p0 = 0.0;
  for (std::size_t i = 0; i < amp_.size(); ++i)
    if (!(i & mask)) p0 += std::norm(amp_[i]);
  const double u = rng_.uniform();
  const int bit = (u < p0) ? 0 : 1;
  const double p = (bit == 0) ? p0 : 1.0 - p0;
  if (p < kBranchFloor)
    throw internal_error("sampled zero-probability branch on q" + std::to_string(wire));
  const double scale = 1.0 / std::sqrt(p);
  for (std::size_t i = 0; i < amp_.size(); ++i) {
    if (((i & mask) != 0) != (bit == 1))
      amp_[i] = 0.0;
    else
      amp_[i] *= scale;
  }
  return {bit, Basis::Z, {wire, generation_[wire]}, p};
}

MeasurementOutcome SimState::measure(int wire, Basis basis, int cbit) {
  const int slot = require_live(wire);
  MeasurementOutcome out;
  if (leak_flag_[slot]) {
    // A leaked qubit reads out deterministically as the configured bit.
    out = {leaked_readout_bit_, basis, {wire, generation_[wire]}, 1.0};
  } else if (basis == Basis::Z) {
    out = measure_z_slot(slot, wire);
  } else {
    // X basis via H conjugation; post-measurement state is |+> or |->.
    apply_gate1_bits(amp_, slot, hadamard());
    out = measure_z_slot(slot, wire);
    apply_gate1_bits(amp_, slot, hadamard());
    out.basis = Basis::X;
  }
  if (cbit >= 0) {
    if (cbit >= static_cast<int>(cbits_.size()))
      throw internal_error("classical bit out of range");
    cbits_[cbit] = static_cast<std::uint8_t>(out.bit);
  }
  outcomes_.push_back(out);
  return out;
}

void SimState::remove_slot(int slot, int keep_bit) {
  const std::size_t mask = std::size_t{1} << slot;
  const std::size_t low_mask = mask - 1;
  std::vector<Cx> next(amp_.size() / 2);
  for (std::size_t j = 0; j < next.size(); ++j) {
    const std::size_t src =
        ((j & ~low_mask) << 1) | (static_cast<std::size_t>(keep_bit) << slot) | (j & low_mask);
    next[j] = amp_[src];
  }
  amp_ = std::move(next);
  const int wire = slot_to_wire_[slot];
  wire_to_slot_[wire] = -1;
  slot_to_wire_.erase(slot_to_wire_.begin() + slot);
  leak_flag_.erase(leak_flag_.begin() + slot);
  for (int s = slot; s < live_count(); ++s) wire_to_slot_[slot_to_wire_[s]] = s;
}

void SimState::reset(int wire) {
  const int slot = require_live(wire);
  int keep_bit = 0;
  if (leak_flag_[slot]) {
    // Stored content of a leaked slot is already the |0> placeholder;
    // reset clears the flag, which is how reuse fixes leakage.
    keep_bit = 0;
  } else {
    keep_bit = measure_z_slot(slot, wire).bit;  // trace out: sample and discard
  }
  remove_slot(slot, keep_bit);
  ++generation_[wire];
}

void SimState::leak(int wire) {
  const int slot = require_live(wire);
  if (leak_flag_[slot]) return;
  // Collapse the slot in Z so the remaining qubits are left in a definite
  // trajectory branch, then park the stored content in |0>.
  const auto out = measure_z_slot(slot, wire);
  if (out.bit == 1) apply_gate1_bits(amp_, slot, pauli_x());
  leak_flag_[slot] = 1;
}

double SimState::expectation(const std::map<int, PauliAxis>& pauli_string) const {
  std::vector<Cx> work = amp_;
  for (const auto& [wire, axis] : pauli_string) {
    const int slot = require_live(wire);
    if (leak_flag_[slot])
      throw leak_error("expectation undefined on leaked qubit q" + std::to_string(wire));
    apply_gate1_bits(work, slot, pauli(axis));
  }
  Cx acc = 0.0;
  for (std::size_t i = 0; i < amp_.size(); ++i) acc += std::conj(amp_[i]) * work[i];
  if (std::abs(acc.imag()) > kNormTol)
    throw internal_error("pauli expectation has imaginary residue");
  return acc.real();
}

VecX SimState::statevector(const std::vector<int>& wire_order) const {
  if (static_cast<int>(wire_order.size()) != live_count())
    throw std::invalid_argument("wire_order must list exactly the live wires");
  const int n = live_count();
  VecX out(amp_.size());
  std::vector<int> slot_of(n);
  for (int k = 0; k < n; ++k) slot_of[k] = require_live(wire_order[k]);
  for (std::size_t i = 0; i < amp_.size(); ++i) {
    std::size_t j = 0;
    for (int k = 0; k < n; ++k)
      if (i & (std::size_t{1} << slot_of[k])) j |= std::size_t{1} << (n - 1 - k);
    out(j) = amp_[i];
  }
  return out;
}

void SimState::check_norm() const {
  double s = 0.0;
  for (const Cx& a : amp_) s += std::norm(a);
  if (std::abs(s - 1.0) > kNormTol)
    throw internal_error("state norm drifted to " + std::to_string(s));
}

void SimState::execute(const Instruction& in) {
  switch (in.kind) {
    case InstrKind::Allocate:
      allocate(in.q0);
      break;
    case InstrKind::Gate1:
      apply_gate1(in.q0, in.u1);
      break;
    case InstrKind::Gate2:
      apply_gate2(in.q0, in.q1, in.u2);
      if (hooks_) hooks_->after_gate2(*this, in.q0, in.q1);
      break;
    case InstrKind::CondGate1:
      if (in.cbit < 0 || in.cbit >= static_cast<int>(cbits_.size()))
        throw internal_error("conditional gate references undeclared bit");
      if (cbits_[in.cbit] == in.cond_value) apply_gate1(in.q0, in.u1);
      break;
    case InstrKind::Measure:
      measure(in.q0, in.basis, in.cbit);
      if (hooks_) hooks_->after_measure(*this, in.q0);
      break;
    case InstrKind::Reset:
      reset(in.q0);
      if (hooks_) hooks_->after_reset(*this, in.q0);
      break;
  }
  check_norm();
}

ShotRecord run_shot(const Circuit& circuit, std::uint64_t seed, ExecutionHooks* hooks,
                    int leaked_readout_bit) {
  SimState state(circuit.num_classical_bits, seed, hooks, leaked_readout_bit);
  for (int w : implicit_start_wires(circuit)) state.allocate(w);
  for (const auto& in : circuit.instructions) state.execute(in);

  ShotRecord rec;
  rec.seed = seed;
  rec.classical_bits = state.classical_bits();
  rec.outcomes = std::move(state.outcomes_);
  rec.peak_live = state.peak_live();
  if (circuit.herald_bit) rec.herald = rec.classical_bits.at(*circuit.herald_bit);
  for (int w : state.live_wires())
    if (state.is_leaked(w)) rec.leaked_wires.push_back({w, state.generation(w)});
  return rec;
}

std::vector<ShotRecord> run_shots(const Circuit& circuit, std::uint64_t num_shots,
                                  std::uint64_t master_seed, int workers,
                                  const HooksFactory& hooks_factory, int leaked_readout_bit) {
  std::vector<ShotRecord> out(num_shots);
  workers = std::max(1, workers);
  auto work = [&](int worker_id) {
    std::unique_ptr<ExecutionHooks> hooks;
    if (hooks_factory) hooks = hooks_factory();
    for (std::uint64_t i = worker_id; i < num_shots; i += workers) {
      const std::uint64_t seed = derive_shot_seed(master_seed, i);
      out[i] = run_shot(circuit, seed, hooks.get(), leaked_readout_bit);
      out[i].shot_index = i;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  return out;
}

std::vector<int> implicit_start_wires(const Circuit& circuit) {
  std::set<int> allocated;
  for (const auto& in : circuit.instructions)
    if (in.kind == InstrKind::Allocate) allocated.insert(in.q0);
  std::set<int> used;
  for (const auto& in : circuit.instructions)
    for (int q : {in.q0, in.q1})
      if (q >= 0 && !allocated.count(q)) used.insert(q);
  return {used.begin(), used.end()};
}

}  // namespace holoq
