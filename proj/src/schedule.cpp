#include "holoq/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <set>
#include <sstream>

namespace holoq {

namespace {

bool layer_has_gate_at(int layer, int left, int lattice_limit) {
  if (left < 1 || left + 1 > lattice_limit) return false;
  const bool straddle = (layer % 2 == 1);  // odd layers: pairs (2k, 2k+1)
  return straddle ? (left % 2 == 0) : (left % 2 == 1);
}

}  // namespace

ConeInfo backward_cone(int site, int t, int lattice_limit) {
  ConeInfo cone;
  int lo = site, hi = site;
  for (int layer = t; layer >= 1; --layer) {
    // Gates of this layer overlapping [lo, hi]; the interval grows by at
    // most one site on each side per layer.
    int new_lo = lo, new_hi = hi;
    for (int left = std::max(1, lo - 1); left <= hi; ++left) {
      if (!layer_has_gate_at(layer, left, lattice_limit)) continue;
      if (left + 1 < lo || left > hi) continue;
      cone.gates.push_back({layer, left});
      new_lo = std::min(new_lo, left);
      new_hi = std::max(new_hi, left + 1);
    }
    lo = new_lo;
    hi = new_hi;
  }
  cone.min_site = lo;
  cone.max_site = hi;
  return cone;
}

ScheduleResult schedule(const SdkiParams& params, const SolvableMps& mps, int num_slices,
                        bool temporal_boundary) {
  validate_params(params);
  const int t = params.t;
  const int half_cone = (t + 1) / 2;
  if (num_slices < half_cone + 1)
    throw configuration_error("num_slices must be at least ceil(t/2)+1 = " +
                              std::to_string(half_cone + 1) + " to fit one light cone");
  if (params.two_L != 2 * num_slices)
    throw configuration_error("two_L must equal 2*num_slices");
  if (mps.chi != 2)
    throw configuration_error("scheduling supports chi = 2 initial states");

  const int num_sites = 2 * num_slices;
  const int lattice_limit = num_sites + 2 * t + 4;  // generous; cones are smaller

  // Backward cones of every measured site.
  std::vector<ConeInfo> cones(num_sites + 1);
  int max_cell = num_slices;
  for (int s = 1; s <= num_sites; ++s) {
    cones[s] = backward_cone(s, t, lattice_limit);
    max_cell = std::max(max_cell, (cones[s].max_site + 1) / 2);
  }

  SliceSchedule sched;
  sched.n_b = mps.bond_qubits();
  sched.t = t;
  sched.num_sites = num_sites;
  sched.total_cells = max_cell;
  sched.qubit_budget = sched.n_b + 2 * half_cone + 2;

  Circuit circuit;
  const int bond = 0;
  circuit.push(Instruction::allocate(bond));

  // Wire pool: freed wires are reused smallest-index first.
  std::priority_queue<int, std::vector<int>, std::greater<int>> pool;
  int next_wire = 1;
  auto take_wire = [&]() {
    if (!pool.empty()) {
      const int w = pool.top();
      pool.pop();
      return w;
    }
    return next_wire++;
  };

  std::vector<int> wire_of_site(2 * max_cell + 1, -1);
  std::vector<bool> prep_done(max_cell + 1, false);
  std::set<std::pair<int, int>> gates_done;  // (layer, left)

  // Gate matrices per layer (temporal-boundary dressing applies to the
  // first and last layer only).
  std::vector<DualUnitaryGate> layer_gate(t + 1, sdki_gate(params.h));
  for (int layer = 1; layer <= t; ++layer)
    layer_gate[layer] = sdki_layer_gate(params.h, layer, t, temporal_boundary);

  for (int cell = 1; cell <= num_slices; ++cell) {
    Slice slice;
    slice.cell = cell;
    slice.first_instr = circuit.instructions.size();
    const int site_a = 2 * cell - 1;
    const int site_b = 2 * cell;

    // New work needed to close this cell's cones.
    std::set<std::pair<int, int>> new_gates;
    std::set<int> new_cells{cell};
    for (int s : {site_a, site_b}) {
      for (const auto& g : cones[s].gates) {
        if (gates_done.count({g.layer, g.left_site})) continue;
        new_gates.insert({g.layer, g.left_site});
        new_cells.insert((g.left_site + 1) / 2);
        new_cells.insert((g.left_site + 2) / 2);
      }
    }
    // Preps in bond order.
    for (int c : new_cells) {
      if (prep_done[c]) continue;
      prep_done[c] = true;
      const int w1 = take_wire();
      const int w2 = take_wire();
      wire_of_site[2 * c - 1] = w1;
      wire_of_site[2 * c] = w2;
      append_unit_cell(circuit, mps, bond, w1, w2, "prep cell " + std::to_string(c));
      slice.prep_cells.push_back(c);
    }
    // Gates in layer order close the cones; within a layer, left to right.
    for (const auto& [layer, left] : new_gates) {
      gates_done.insert({layer, left});
      auto in = Instruction::gate2(wire_of_site[left], wire_of_site[left + 1],
                                   layer_gate[layer].matrix, "layer " + std::to_string(layer));
      in.du_tag = layer_gate[layer].tag();
      circuit.push(in);
      slice.gates.push_back({layer, left});
    }
    // Retire the cell: measure both sites in X, then reset both wires.
    for (int s : {site_a, site_b}) {
      const int bit = circuit.add_classical_bit(s);
      circuit.push(Instruction::measure(wire_of_site[s], bit, Basis::X));
    }
    for (int s : {site_a, site_b}) {
      circuit.push(Instruction::reset(wire_of_site[s]));
      pool.push(wire_of_site[s]);
    }
    slice.measured_sites = {site_a, site_b};
    slice.reset_sites = {site_a, site_b};
    slice.end_instr = circuit.instructions.size();
    sched.slices.push_back(std::move(slice));
  }

  return {std::move(circuit), std::move(sched)};
}

namespace {

// Latest gate strictly below `below_layer` touching `site`; in a brick wall
// at most one gate per layer touches a given site.
std::optional<ScheduledGate> prev_gate_on_site(int site, int below_layer, int lattice_limit) {
  for (int layer = below_layer - 1; layer >= 1; --layer)
    for (int left : {site - 1, site})
      if (layer_has_gate_at(layer, left, lattice_limit) && left >= 1)
        if (left == site - 1 || left == site) return ScheduledGate{layer, left};
  return std::nullopt;
}

}  // namespace

CausalityReport verify_causality(const SliceSchedule& schedule) {
  CausalityReport report;

  std::map<int, int> prep_slice;                       // cell -> slice index
  std::map<std::pair<int, int>, int> gate_slice;       // (layer,left) -> slice
  for (std::size_t k = 0; k < schedule.slices.size(); ++k) {
    for (int c : schedule.slices[k].prep_cells) prep_slice[c] = static_cast<int>(k);
    for (const auto& g : schedule.slices[k].gates)
      gate_slice[{g.layer, g.left_site}] = static_cast<int>(k);
  }

  const int limit = schedule.num_sites + 2 * schedule.t + 4;
  auto require = [&](int needed_slice, int at_slice, int site, const std::string& what) {
    if (needed_slice < 0)
      report.violations.push_back({at_slice, site, what + " missing from schedule"});
    else if (needed_slice > at_slice)
      report.violations.push_back(
          {at_slice, site, what + " scheduled in later slice " + std::to_string(needed_slice)});
  };

  for (std::size_t k = 0; k < schedule.slices.size(); ++k) {
    for (int site : schedule.slices[k].measured_sites) {
      // Dependency-DAG reachability: a measurement depends on the latest
      // gate on its wire; a gate depends on the latest gate below it on
      // each of its two wires, and on the preps of the cells it touches.
      std::set<std::pair<int, int>> gates_needed;
      std::set<int> cells_needed{(site + 1) / 2};
      std::queue<ScheduledGate> frontier;
      if (auto g = prev_gate_on_site(site, schedule.t + 1, limit)) frontier.push(*g);
      while (!frontier.empty()) {
        const ScheduledGate g = frontier.front();
        frontier.pop();
        if (!gates_needed.insert({g.layer, g.left_site}).second) continue;
        for (int s : {g.left_site, g.left_site + 1}) {
          cells_needed.insert((s + 1) / 2);
          if (auto d = prev_gate_on_site(s, g.layer, limit)) frontier.push(*d);
        }
      }
      // Preps are chained through the bond register.
      const int max_cell = *cells_needed.rbegin();
      for (int c = 1; c <= max_cell; ++c) cells_needed.insert(c);

      for (const auto& [layer, left] : gates_needed) {
        auto it = gate_slice.find({layer, left});
        require(it == gate_slice.end() ? -1 : it->second, static_cast<int>(k), site,
                "gate layer " + std::to_string(layer) + " at site " + std::to_string(left));
      }
      for (int c : cells_needed) {
        auto it = prep_slice.find(c);
        require(it == prep_slice.end() ? -1 : it->second, static_cast<int>(k), site,
                "prep of cell " + std::to_string(c));
      }
    }
  }
  return report;
}

std::string schedule_report(const SliceSchedule& schedule) {
  std::ostringstream os;
  os << "slices " << schedule.slices.size() << " qubit_budget " << schedule.qubit_budget
     << " total_cells " << schedule.total_cells << " t " << schedule.t << "\n";
  for (const auto& s : schedule.slices) {
    os << "slice " << s.cell << ":";
    for (int c : s.prep_cells) os << " prep" << c;
    for (const auto& g : s.gates) os << " g(L" << g.layer << "," << g.left_site << ")";
    os << " measure " << s.measured_sites[0] << "," << s.measured_sites[1];
    os << " reset " << s.reset_sites[0] << "," << s.reset_sites[1] << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// SWAP factoring
// ---------------------------------------------------------------------------

SwapFactorResult swap_factor(const Circuit& circuit) {
  SwapFactorResult result;
  result.circuit.num_classical_bits = circuit.num_classical_bits;
  result.circuit.site_of_bit = circuit.site_of_bit;
  result.circuit.herald_bit = circuit.herald_bit;
  result.circuit.global_phase = circuit.global_phase;

  const int n = circuit.num_wires();
  std::vector<int> m(n);  // original wire -> current physical wire
  for (int i = 0; i < n; ++i) m[i] = i;

  const Cx swap_phase = std::exp(Cx(0, -std::numbers::pi / 4.0));

  for (std::size_t idx = 0; idx < circuit.instructions.size(); ++idx) {
    Instruction in = circuit.instructions[idx];
    if (in.kind == InstrKind::Gate2 && in.du_tag) {
      const DualUnitaryTag tag = *in.du_tag;
      const int a = m[in.q0];
      const int b = m[in.q1];
      // Absorb the trailing SWAP into the relabeling: future references to
      // the first wire land on b, to the second on a.
      m[in.q0] = b;
      m[in.q1] = a;
      result.circuit.push(Instruction::gate1(b, tag.v_plus, in.label));
      result.circuit.push(Instruction::gate1(a, tag.v_minus, in.label));
      result.circuit.push(Instruction::gate2(
          b, a, expi_pauli_pair(PauliAxis::Z, std::numbers::pi / 4.0 - tag.J), in.label));
      result.circuit.push(Instruction::gate1(b, tag.u_plus, in.label));
      result.circuit.push(Instruction::gate1(a, tag.u_minus, in.label));
      result.circuit.global_phase *= swap_phase;
      ++result.rewritten;
      continue;
    }
    if (in.kind == InstrKind::Gate2) {
      ++result.refused;
      result.refused_indices.push_back(idx);
    }
    if (in.q0 >= 0) in.q0 = m[in.q0];
    if (in.q1 >= 0) in.q1 = m[in.q1];
    result.circuit.push(std::move(in));
  }
  result.wire_permutation = std::move(m);
  return result;
}

MatX permutation_operator(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  const std::size_t dim = std::size_t{1} << n;
  MatX p = MatX::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t j = 0;
    for (int w = 0; w < n; ++w) {
      if (i & (std::size_t{1} << (n - 1 - w))) j |= std::size_t{1} << (n - 1 - perm[w]);
    }
    p(j, i) = 1.0;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Native gate accounting
// ---------------------------------------------------------------------------

namespace {

// Magic (Bell) basis change; canonical-class invariants of U are read off
// gamma = M M^T with M the magic-basis form of the SU(4) representative.
const Mat4& magic_basis() {
  static const Mat4 q = [] {
    Mat4 m;
    const double s = 1.0 / std::sqrt(2.0);
    m << Cx(s, 0), Cx(0, 0), Cx(0, 0), Cx(0, s),
        Cx(0, 0), Cx(0, s), Cx(s, 0), Cx(0, 0),
        Cx(0, 0), Cx(0, s), Cx(-s, 0), Cx(0, 0),
        Cx(s, 0), Cx(0, 0), Cx(0, 0), Cx(0, -s);
    return m;
  }();
  return q;
}

}  // namespace

int ms_count_of(const Mat4& u) {
  if (unitarity_defect(u) > 1e-9) throw std::invalid_argument("ms_count_of: non-unitary gate");
  const Cx det = u.determinant();
  const Mat4 su = u / std::pow(det, 0.25);
  const Mat4 m = magic_basis().adjoint() * su * magic_basis();
  const Mat4 gamma = m * m.transpose();
  const Cx tr = gamma.trace();
  const double tol = 1e-7;
  // gamma = +/-I is the local class; gamma = +/-iI (|tr| = 4 but imaginary)
  // is the SWAP class and needs 3 entangling gates.
  if (std::abs(tr.imag()) < tol && std::abs(std::abs(tr.real()) - 4.0) < tol) return 0;
  if (std::abs(tr) < tol && std::abs((gamma * gamma).trace() + 4.0) < tol) return 1;
  if (std::abs(tr.imag()) < tol) return 2;
  return 3;
}

NativeGateReport native_gate_count(const Circuit& circuit) {
  NativeGateReport rep;
  for (const auto& in : circuit.instructions) {
    switch (in.kind) {
      case InstrKind::Gate1:
      case InstrKind::CondGate1:
        ++rep.explicit_sq;
        break;
      case InstrKind::Gate2: {
        ++rep.explicit_tq;
        const int k = ms_count_of(in.u2);
        rep.ms_native_tq += k;
        ++rep.tq_by_class[k];
        break;
      }
      default:
        break;
    }
  }
  rep.sq_rotation_estimate = rep.explicit_sq;
  for (int k = 0; k < 4; ++k)
    rep.sq_rotation_estimate += rep.tq_by_class[k] * 2 * (k + 1);
  return rep;
}

}  // namespace holoq
