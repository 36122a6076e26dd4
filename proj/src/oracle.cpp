#include "holoq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "holoq/statevector.hpp"

namespace holoq {

namespace {

int required_bond_qubits(const InitialState& init) {
  return init.product ? 0 : init.mps.bond_qubits();
}

}  // namespace

DenseState dense_evolve(const SdkiParams& params, const InitialState& init, int total_sites,
                        bool temporal_boundary, int qubit_cap) {
  validate_params(params);
  const int n_b = required_bond_qubits(init);
  if (total_sites + n_b > qubit_cap)
    throw std::length_error("dense oracle needs " + std::to_string(total_sites + n_b) +
                            " qubits, cap is " + std::to_string(qubit_cap));
  if (total_sites % 2 != 0) throw std::invalid_argument("total_sites must be even");

  DenseState state;
  state.n_sites = total_sites;
  state.n_b = n_b;

  if (init.product) {
    state.amp.assign(std::size_t{1} << total_sites, Cx{0.0, 0.0});
    state.amp[0] = 1.0;
  } else {
    const CellTensor cell = mps_tensor(init.mps);
    const int chi = init.mps.chi;
    const double cell_norm = 1.0 / std::sqrt(2.0);
    // Grow cell by cell: index = (site bits) * chi + bond.
    std::vector<Cx> amp(init.mps.boundary.data(),
                        init.mps.boundary.data() + init.mps.boundary.size());
    for (int c = 0; c < total_sites / 2; ++c) {
      std::vector<Cx> next(amp.size() * 4, Cx{0.0, 0.0});
      const std::size_t blocks = amp.size() / chi;
      for (std::size_t blk = 0; blk < blocks; ++blk) {
        for (int i = 0; i < chi; ++i) {
          const Cx v = amp[blk * chi + i];
          if (v == Cx(0.0)) continue;
          for (int ss = 0; ss < 4; ++ss) {
            const MatX& n = cell.n[ss];
            for (int j = 0; j < chi; ++j) {
              next[(blk * 4 + ss) * chi + j] += v * n(i, j) * cell_norm;
            }
          }
        }
      }
      amp = std::move(next);
    }
    state.amp = std::move(amp);
  }

  for (int layer = 1; layer <= params.t; ++layer) {
    const Mat4 gate = sdki_layer_gate(params.h, layer, params.t, temporal_boundary).matrix;
    for (int left : layer_left_sites(layer, total_sites))
      apply_gate2_bits(state.amp, state.bit_of_site(left), state.bit_of_site(left + 1), gate);
  }
  return state;
}

namespace {

double dense_expect_ops(const DenseState& state, const std::vector<std::pair<int, Mat2>>& ops) {
  std::vector<Cx> work = state.amp;
  for (const auto& [site, op] : ops) apply_gate1_bits(work, state.bit_of_site(site), op);
  Cx acc = 0.0;
  for (std::size_t i = 0; i < work.size(); ++i) acc += std::conj(state.amp[i]) * work[i];
  if (std::abs(acc.imag()) > 1e-10)
    throw std::runtime_error("dense expectation has imaginary residue");
  return acc.real();
}

}  // namespace

double dense_expect1(const DenseState& state, int site, PauliAxis axis) {
  return dense_expect_ops(state, {{site, pauli(axis)}});
}

double dense_expect2(const DenseState& state, int site_a, PauliAxis axis_a, int site_b,
                     PauliAxis axis_b) {
  if (site_a == site_b)
    return dense_expect_ops(state, {{site_a, Mat2(pauli(axis_a) * pauli(axis_b))}});
  return dense_expect_ops(state, {{site_a, pauli(axis_a)}, {site_b, pauli(axis_b)}});
}

CorrelatorTable dense_correlators(const SdkiParams& params, const InitialState& init,
                                  const WindowSpec& window, PauliAxis alpha, PauliAxis beta,
                                  bool temporal_boundary, int qubit_cap) {
  const int total_sites = window.two_L + 2 * flat_padding_cells(params.t);
  const DenseState state = dense_evolve(params, init, total_sites, temporal_boundary, qubit_cap);

  CorrelatorTable table;
  const char ca = "xyz"[static_cast<int>(alpha)];
  const char cb = "xyz"[static_cast<int>(beta)];
  for (int r = 0; r <= window.max_r(); ++r) {
    if (window.empty_for(r)) {
      table.omitted.push_back({r, params.t, "empty averaging window"});
      continue;
    }
    const auto pairs = window.pairs(r);
    double acc = 0.0;
    for (const auto& [j, k] : pairs) acc += dense_expect2(state, j, alpha, k, beta);
    CorrelatorEntry e;
    e.alpha = ca;
    e.beta = cb;
    e.r = r;
    e.t = params.t;
    e.value = acc / static_cast<double>(pairs.size());
    e.n_terms = static_cast<long>(pairs.size());
    table.entries.push_back(e);
  }
  return table;
}

// ---------------------------------------------------------------------------
// TEBD route
// ---------------------------------------------------------------------------

FiniteMps tebd_evolve(const SdkiParams& params, const InitialState& init, const TebdConfig& config,
                      bool temporal_boundary) {
  validate_params(params);
  const int padding_cells = config.padding_cells > 0 ? config.padding_cells : params.t + 2;
  int l_sites = config.l_sites > 0 ? config.l_sites : params.two_L + 2 * padding_cells;
  if (l_sites % 2 != 0) ++l_sites;

  FiniteMps mps = init.product
                      ? FiniteMps::product_state(l_sites)
                      : FiniteMps::from_cells(mps_tensor(init.mps), init.mps.boundary, l_sites / 2);
  const double cutoff = config.svd_cutoff > 0 ? config.svd_cutoff : 1e-15;
  for (int layer = 1; layer <= params.t; ++layer) {
    const Mat4 gate = sdki_layer_gate(params.h, layer, params.t, temporal_boundary).matrix;
    for (int left : layer_left_sites(layer, l_sites))
      mps.apply_gate2(left - 1, gate, config.max_bond, cutoff);
  }
  if (config.exact_mode && mps.max_discarded() > 1e-14)
    throw precision_error("exact-mode TEBD discarded weight " +
                          std::to_string(mps.max_discarded()));
  return mps;
}

TebdResult tebd_correlators(const SdkiParams& params, const InitialState& init,
                            const TebdConfig& config, const WindowSpec& window, PauliAxis alpha,
                            PauliAxis beta, bool temporal_boundary) {
  FiniteMps mps = tebd_evolve(params, init, config, temporal_boundary);

  TebdResult result;
  result.max_discarded = mps.max_discarded();
  result.max_bond_reached = mps.max_bond_dim();
  result.l_sites_used = init.product ? mps.n_sites() : mps.n_sites() - 1;

  const Mat2& op_a = pauli(alpha);
  const Mat2& op_b = pauli(beta);
  const char ca = "xyz"[static_cast<int>(alpha)];
  const char cb = "xyz"[static_cast<int>(beta)];

  // All pair expectations <op_a(j) op_b(k)> for j < k in one sweep per j.
  const int max_r = window.max_r();
  std::map<std::pair<int, int>, double> pair_value;
  for (int j = window.j_min; j <= window.two_L; ++j) {
    std::vector<int> ks;
    for (int k = j + 1; k <= std::min(window.two_L, j + max_r + 1); ++k) ks.push_back(k);
    if (ks.empty()) continue;
    std::vector<int> ks0(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) ks0[i] = ks[i] - 1;  // 0-based sites
    const auto row = mps.expect_pair_row(j - 1, op_a, ks0, op_b);
    for (std::size_t i = 0; i < ks.size(); ++i) pair_value[{j, ks[i]}] = row[i];
  }
  const double same_site =
      (alpha == beta) ? 1.0 : 0.0;  // sigma^a sigma^a = 1; cross terms unused

  for (int r = 0; r <= max_r; ++r) {
    if (window.empty_for(r)) {
      result.table.omitted.push_back({r, params.t, "empty averaging window"});
      continue;
    }
    const auto pairs = window.pairs(r);
    double acc = 0.0;
    for (const auto& [j, k] : pairs) acc += (j == k) ? same_site : pair_value.at({j, k});
    CorrelatorEntry e;
    e.alpha = ca;
    e.beta = cb;
    e.r = r;
    e.t = params.t;
    e.value = acc / static_cast<double>(pairs.size());
    e.n_terms = static_cast<long>(pairs.size());
    result.table.entries.push_back(e);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Exact branch enumeration
// ---------------------------------------------------------------------------

namespace {

/// Minimal executor for enumeration; deliberately a second implementation
/// of the instruction semantics (no rng, branches instead of samples).
struct EnumState {
  std::vector<Cx> amp{Cx{1.0, 0.0}};
  std::vector<int> wire_to_slot;
  std::vector<int> slot_to_wire;
  std::vector<std::uint8_t> cbits;

  int slot(int wire) const {
    if (wire < 0 || wire >= static_cast<int>(wire_to_slot.size()) || wire_to_slot[wire] < 0)
      throw std::invalid_argument("enumerator: dead wire q" + std::to_string(wire));
    return wire_to_slot[wire];
  }

  void allocate(int wire) {
    if (wire >= static_cast<int>(wire_to_slot.size())) wire_to_slot.resize(wire + 1, -1);
    if (wire_to_slot[wire] >= 0) throw std::invalid_argument("enumerator: double allocate");
    wire_to_slot[wire] = static_cast<int>(slot_to_wire.size());
    slot_to_wire.push_back(wire);
    amp.resize(amp.size() * 2, Cx{0.0, 0.0});
  }

  double branch_weight(int s, int bit) const {
    const std::size_t mask = std::size_t{1} << s;
    double p = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i)
      if (((i & mask) != 0) == (bit == 1)) p += std::norm(amp[i]);
    return p;
  }

  void project(int s, int bit, double p) {
    const std::size_t mask = std::size_t{1} << s;
    const double scale = 1.0 / std::sqrt(p);
    for (std::size_t i = 0; i < amp.size(); ++i) {
      if (((i & mask) != 0) != (bit == 1))
        amp[i] = 0.0;
      else
        amp[i] *= scale;
    }
  }

  void drop_slot(int s, int bit) {
    const std::size_t mask = std::size_t{1} << s;
    const std::size_t low = mask - 1;
    std::vector<Cx> next(amp.size() / 2);
    for (std::size_t j = 0; j < next.size(); ++j)
      next[j] = amp[((j & ~low) << 1) | (static_cast<std::size_t>(bit) << s) | (j & low)];
    amp = std::move(next);
    const int wire = slot_to_wire[s];
    wire_to_slot[wire] = -1;
    slot_to_wire.erase(slot_to_wire.begin() + s);
    for (int k = s; k < static_cast<int>(slot_to_wire.size()); ++k) wire_to_slot[slot_to_wire[k]] = k;
  }
};

void enumerate(const Circuit& circuit, EnumState state, std::size_t pc, double weight,
               std::uint64_t key, double prune, std::map<std::uint64_t, double>& dist) {
  for (std::size_t i = pc; i < circuit.instructions.size(); ++i) {
    const Instruction& in = circuit.instructions[i];
    switch (in.kind) {
      case InstrKind::Allocate:
        state.allocate(in.q0);
        break;
      case InstrKind::Gate1:
        apply_gate1_bits(state.amp, state.slot(in.q0), in.u1);
        break;
      case InstrKind::Gate2:
        apply_gate2_bits(state.amp, state.slot(in.q0), state.slot(in.q1), in.u2);
        break;
      case InstrKind::CondGate1:
        if (state.cbits[in.cbit] == in.cond_value)
          apply_gate1_bits(state.amp, state.slot(in.q0), in.u1);
        break;
      case InstrKind::Measure: {
        const int s = state.slot(in.q0);
        if (in.basis == Basis::X) apply_gate1_bits(state.amp, s, hadamard());
        for (int bit = 0; bit < 2; ++bit) {
          const double p = state.branch_weight(s, bit);
          if (weight * p < prune) continue;
          EnumState branch = state;
          branch.project(s, bit, p);
          if (in.basis == Basis::X) apply_gate1_bits(branch.amp, s, hadamard());
          branch.cbits[in.cbit] = static_cast<std::uint8_t>(bit);
          std::uint64_t branch_key = key;
          const int site = (in.cbit < static_cast<int>(circuit.site_of_bit.size()))
                               ? circuit.site_of_bit[in.cbit]
                               : -1;
          if (site > 0 && bit) branch_key |= std::uint64_t{1} << (site - 1);
          enumerate(circuit, std::move(branch), i + 1, weight * p, branch_key, prune, dist);
        }
        return;
      }
      case InstrKind::Reset: {
        const int s = state.slot(in.q0);
        for (int bit = 0; bit < 2; ++bit) {
          const double p = state.branch_weight(s, bit);
          if (weight * p < prune) continue;
          EnumState branch = state;
          branch.project(s, bit, p);
          branch.drop_slot(s, bit);
          enumerate(circuit, std::move(branch), i + 1, weight * p, key, prune, dist);
        }
        return;
      }
    }
  }
  dist[key] += weight;
}

}  // namespace

std::map<std::uint64_t, double> exact_site_distribution(const Circuit& circuit, double prune) {
  if (circuit.num_classical_bits > 0 && circuit.site_of_bit.empty())
    throw std::invalid_argument("circuit has no site-labeled bits");
  EnumState state;
  state.cbits.assign(circuit.num_classical_bits, 0);
  for (int w : implicit_start_wires(circuit)) state.allocate(w);
  std::map<std::uint64_t, double> dist;
  enumerate(circuit, std::move(state), 0, 1.0, 0, prune, dist);
  return dist;
}

double total_variation(const std::map<std::uint64_t, double>& p,
                       const std::map<std::uint64_t, double>& q) {
  double tv = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    tv += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) tv += v;
  return tv / 2.0;
}

double distribution_pair_product(const std::map<std::uint64_t, double>& dist, int site_a,
                                 int site_b) {
  double acc = 0.0;
  for (const auto& [key, p] : dist) {
    const int xa = (key >> (site_a - 1)) & 1 ? -1 : 1;
    const int xb = (key >> (site_b - 1)) & 1 ? -1 : 1;
    acc += p * xa * xb;
  }
  return acc;
}

CorrelatorTable distribution_correlators(const std::map<std::uint64_t, double>& dist,
                                         const WindowSpec& window, int t) {
  CorrelatorTable table;
  for (int r = 0; r <= window.max_r(); ++r) {
    if (window.empty_for(r)) {
      table.omitted.push_back({r, t, "empty averaging window"});
      continue;
    }
    const auto pairs = window.pairs(r);
    double acc = 0.0;
    for (const auto& [j, k] : pairs)
      acc += (j == k) ? 1.0 : distribution_pair_product(dist, j, k);
    CorrelatorEntry e;
    e.r = r;
    e.t = t;
    e.value = acc / static_cast<double>(pairs.size());
    e.n_terms = static_cast<long>(pairs.size());
    table.entries.push_back(e);
  }
  return table;
}

}  // namespace holoq
