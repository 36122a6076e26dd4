#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holoq/circuit.hpp"
#include "holoq/correlators.hpp"
#include "holoq/statevector.hpp"

namespace holoq {

/// One serialized trial: index, herald, per-site readout bits, seed.
struct ShotLine {
  std::uint64_t index = 0;
  int herald = -1;  // -1 when the circuit had no herald bit
  std::vector<std::uint8_t> site_bits;
  std::uint64_t seed = 0;
};

/// Site readout bits of a record, ordered by site label (1-based sites).
ShotLine shot_line_of(const ShotRecord& record, const std::vector<int>& site_of_bit,
                      int num_sites);

std::string serialize_shot_lines(const std::vector<ShotLine>& lines);
std::vector<ShotLine> parse_shot_lines(const std::string& text);

/// N_s x two_L matrix of +/-1 X-basis outcomes.
struct ShotMatrix {
  std::vector<std::vector<std::int8_t>> rows;
  int two_L = 0;
  bool herald_filtered = false;

  std::size_t num_shots() const { return rows.size(); }

  static ShotMatrix from_lines(const std::vector<ShotLine>& lines, int two_L,
                               bool herald_filtered);
  static ShotMatrix from_records(const std::vector<ShotRecord>& records,
                                 const std::vector<int>& site_of_bit, int two_L,
                                 bool herald_filtered);
};

/// Smoothed correlator estimates: per shot n the statistic
///   s_n(r) = mean over (j,delta) in the window of x_{n,j} * x_{n,j+r+delta},
/// value = mean_n s_n, stderr = sqrt(Var_n[s_n] / N_s) (shots are the
/// independent unit; sites within a shot are correlated).
CorrelatorTable estimate_correlators(const ShotMatrix& shots, const WindowSpec& window, int t);

}  // namespace holoq
