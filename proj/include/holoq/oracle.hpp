#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "holoq/circuit.hpp"
#include "holoq/correlators.hpp"
#include "holoq/mps.hpp"
#include "holoq/sdki.hpp"

namespace holoq {

struct precision_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Either the solvable qMPS or a plain |0...0> product state.
struct InitialState {
  bool product = false;
  SolvableMps mps;

  static InitialState solvable(SolvableMps m) {
    InitialState s;
    s.mps = std::move(m);
    return s;
  }
  static InitialState product_up() {
    InitialState s;
    s.product = true;
    return s;
  }
};

/// Dense statevector over sites 1..n_sites plus the purifying bond register
/// (the lowest n_b bits); site 1 is the most significant index.
struct DenseState {
  std::vector<Cx> amp;
  int n_sites = 0;
  int n_b = 0;
  int bit_of_site(int site) const { return n_b + (n_sites - site); }
};

/// Builds the initial state from the cell tensors and applies the t-layer
/// brick wall directly (no Circuit involved), for use as ground truth.
DenseState dense_evolve(const SdkiParams& params, const InitialState& init, int total_sites,
                        bool temporal_boundary = true, int qubit_cap = 14);

double dense_expect1(const DenseState& state, int site, PauliAxis axis);
double dense_expect2(const DenseState& state, int site_a, PauliAxis axis_a, int site_b,
                     PauliAxis axis_b);

/// Exact smoothed correlators C(r,t) from dense evolution; the chain is the
/// window plus ceil(t/2) padding cells, which reproduces the half-infinite
/// values exactly (the transfer channel is unital).
CorrelatorTable dense_correlators(const SdkiParams& params, const InitialState& init,
                                  const WindowSpec& window, PauliAxis alpha = PauliAxis::X,
                                  PauliAxis beta = PauliAxis::X, bool temporal_boundary = true,
                                  int qubit_cap = 14);

struct TebdConfig {
  int max_bond = 1024;
  double svd_cutoff = 0.0;   // relative discarded weight per split
  int l_sites = 0;           // 0 = window + 2*padding_cells
  int padding_cells = 0;     // 0 = t + 2
  bool exact_mode = true;    // assert discarded weight < 1e-14
};

struct TebdResult {
  CorrelatorTable table;
  double max_discarded = 0.0;
  int max_bond_reached = 0;
  int l_sites_used = 0;
};

/// MPS/TEBD route to the same correlators: initialize from the cell tensors,
/// evolve layer by layer with SVD recompression, contract two-point
/// functions. In exact mode a truncation beyond 1e-14 raises precision_error.
TebdResult tebd_correlators(const SdkiParams& params, const InitialState& init,
                            const TebdConfig& config, const WindowSpec& window,
                            PauliAxis alpha = PauliAxis::X, PauliAxis beta = PauliAxis::X,
                            bool temporal_boundary = true);

/// Evolved MPS for ad-hoc expectation queries (testing).
FiniteMps tebd_evolve(const SdkiParams& params, const InitialState& init, const TebdConfig& config,
                      bool temporal_boundary = true);

// ---- exact outcome distributions by branch enumeration ----

/// Joint distribution over site-labeled measurement outcomes, computed by
/// depth-first enumeration of every measurement and reset branch (an
/// implementation of the circuit semantics independent of SimState).
/// Key: bit of site s at position (s-1).
std::map<std::uint64_t, double> exact_site_distribution(const Circuit& circuit,
                                                        double prune = 1e-18);

double total_variation(const std::map<std::uint64_t, double>& p,
                       const std::map<std::uint64_t, double>& q);

/// E[x_a * x_b] with x = +1/-1 for bit 0/1, from a site distribution.
double distribution_pair_product(const std::map<std::uint64_t, double>& dist, int site_a,
                                 int site_b);

/// Smoothed correlator table assembled from an exact site distribution
/// (all-X readout), matching the estimator's window convention.
CorrelatorTable distribution_correlators(const std::map<std::uint64_t, double>& dist,
                                         const WindowSpec& window, int t);

}  // namespace holoq
