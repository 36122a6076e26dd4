#pragma once

#include <string>
#include <vector>

#include "holoq/linalg.hpp"

namespace holoq {

/// Site-averaging window for the smoothed correlator
///   C(r,t) = mean over j in [j_min, j_max(r)], delta in {0,1}
///            of <sigma_j sigma_{j+r+delta}>.
/// j_max keeps both partners inside the two_L window with a boundary margin;
/// normalization is by the actual number of (j, delta) terms.
struct WindowSpec {
  int two_L = 32;
  int j_min = 9;

  int j_max(int r) const { return two_L - 2 * ((r + 1) / 2) - 2; }
  bool empty_for(int r) const { return j_max(r) < j_min; }
  int max_r() const;
  /// All (j, k) index pairs entering C(r, t), 1-based sites.
  std::vector<std::pair<int, int>> pairs(int r) const;

  /// The measurement-window convention: j_min = 9 for the 32-site window,
  /// no left margin for smaller desk-scale windows.
  static WindowSpec defaults_for(int two_L);
};

struct CorrelatorEntry {
  char alpha = 'x';
  char beta = 'x';
  int r = 0;
  int t = 0;
  double value = 0.0;
  double stderr_ = 0.0;  // 0 for oracle tables
  long n_terms = 0;      // number of (j, delta) pairs averaged
  bool binned = false;
};

struct OmittedEntry {
  int r = 0;
  int t = 0;
  std::string reason;
};

struct CorrelatorTable {
  std::vector<CorrelatorEntry> entries;
  std::vector<OmittedEntry> omitted;

  const CorrelatorEntry* find(int r, int t) const;
  bool any_binned() const;
};

/// Bins r in {2j, 2j+1} for j > 0 by arithmetic mean (standard errors
/// combined in quadrature over the bin); r = 0 and r = 1 pass through.
/// Throws std::invalid_argument if the table is already binned.
CorrelatorTable bin_symmetry(const CorrelatorTable& table);

struct ErrorEntry {
  int r = 0;
  int t = 0;
  double c_expt = 0.0;
  double c_theory = 0.0;
  double stderr_ = 0.0;
  double epsilon = 0.0;
  bool valid = true;  // false when stderr_ == 0 (division error)
};

struct ErrorTable {
  std::vector<ErrorEntry> entries;
  double mean_epsilon = 0.0;  // over valid entries
  long valid_count = 0;
  long invalid_count = 0;
};

/// epsilon(r,t) = |C_expt - C_theory| / stderr per matching (alpha,beta,r,t)
/// entry. Entries present on one side only raise std::invalid_argument;
/// zero-stderr entries are reported per-entry as invalid.
ErrorTable normalized_errors(const CorrelatorTable& expt, const CorrelatorTable& theory);

// CSV: header alpha,beta,r,t,value,stderr,n_terms,binned
std::string correlator_csv(const CorrelatorTable& table);
CorrelatorTable parse_correlator_csv(const std::string& text);
void write_correlator_csv(const CorrelatorTable& table, const std::string& path);
CorrelatorTable read_correlator_csv(const std::string& path);

}  // namespace holoq
