#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "holoq/circuit.hpp"
#include "holoq/sdki.hpp"

namespace holoq {

struct configuration_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScheduledGate {
  int layer = 0;
  int left_site = 0;  // acts on sites (left_site, left_site + 1)
  friend bool operator==(const ScheduledGate&, const ScheduledGate&) = default;
};

/// One slice retires one unit cell: the preps newly required by its causal
/// cone, the evolution gates whose cones close here, then two measurements
/// and two resets.
struct Slice {
  int cell = 0;  // 1-based retired cell
  std::vector<int> prep_cells;
  std::vector<ScheduledGate> gates;
  std::array<int, 2> measured_sites{};
  std::array<int, 2> reset_sites{};
  std::size_t first_instr = 0, end_instr = 0;  // [first, end) in the circuit
};

struct SliceSchedule {
  std::vector<Slice> slices;
  int qubit_budget = 0;  // n_b + 2*ceil(t/2) + 2
  int total_cells = 0;
  int n_b = 1;
  int t = 0;
  int num_sites = 0;  // measured window
};

struct ScheduleResult {
  Circuit circuit;
  SliceSchedule schedule;
};

/// Compiles qMPS preparation + brick wall + X-basis readout into the sliced
/// mid-circuit-measurement form by backward causal-cone analysis with greedy
/// earliest retirement.  Measured bits are labeled with their site index;
/// the bond wire is left live at the end for the leakage gadget.
ScheduleResult schedule(const SdkiParams& params, const SolvableMps& mps, int num_slices,
                        bool temporal_boundary = true);

/// Backward light cone of `site` measured after `t` layers: the evolution
/// gates it depends on plus the largest site index it reaches.
struct ConeInfo {
  std::vector<ScheduledGate> gates;
  int max_site = 0;
  int min_site = 0;
};
ConeInfo backward_cone(int site, int t, int lattice_limit);

struct CausalityViolation {
  int slice = 0;
  int site = 0;
  std::string missing;
};

struct CausalityReport {
  std::vector<CausalityViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Independent check that every measured site's backward cone (computed by
/// dependency-DAG reachability over preps and gates, not by the scheduler's
/// interval construction) lies in slices at or before the measuring one.
CausalityReport verify_causality(const SliceSchedule& schedule);

/// Human-readable slice dump (slice -> preps, gates, measures, resets).
std::string schedule_report(const SliceSchedule& schedule);

struct SwapFactorResult {
  Circuit circuit;
  std::vector<int> wire_permutation;  // original wire -> final wire
  long rewritten = 0;
  long refused = 0;
  std::vector<std::size_t> refused_indices;
};

/// Factors the SWAP out of every tagged dual-unitary gate:
///   U = e^{-i pi/4} (u+ (x) u-) e^{i(pi/4 - J) ZZ} (v+ (x) v-) SWAP,
/// keeping the ZZ core as the one entangling gate and absorbing the SWAP
/// into a wire relabeling applied to all later instructions.  Untagged
/// two-qubit gates are left intact and reported.  The result satisfies
///   unitary_of(input) = P^dagger * unitary_of(output)
/// up to the tracked global phase, with P the permutation operator moving
/// wire w to wire_permutation[w].
SwapFactorResult swap_factor(const Circuit& circuit);

/// Permutation operator for equivalence checks: basis state with bit of
/// wire w moves to wire perm[w].
MatX permutation_operator(const std::vector<int>& perm);

/// Native two-qubit cost of a gate in a fixed-MS basis (MS = e^{i pi/4 ZZ}),
/// via the canonical-class invariants: 0, 1, 2 or 3 entangling gates.
int ms_count_of(const Mat4& u);

struct NativeGateReport {
  long explicit_sq = 0;       // Gate1 + ConditionalGate1 instructions
  long explicit_tq = 0;       // Gate2 instructions
  long ms_native_tq = 0;      // sum of per-gate MS counts
  long sq_rotation_estimate = 0;  // 2*(ms+1) per two-qubit gate + explicit
  std::array<long, 4> tq_by_class{};
};

NativeGateReport native_gate_count(const Circuit& circuit);

}  // namespace holoq
