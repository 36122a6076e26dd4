#pragma once

#include <vector>

#include "holoq/linalg.hpp"
#include "holoq/sdki.hpp"

namespace holoq {

/// Finite matrix product state with per-site physical dimensions and a
/// movable orthogonality center.  Sites left of the center are
/// left-canonical, sites right of it right-canonical.
class FiniteMps {
 public:
  /// qMPS over `cells` two-site unit cells plus one trailing chi-dimensional
  /// site purifying the open right bond (the transfer channel is unital, so
  /// window observables of the half-infinite state are reproduced exactly).
  static FiniteMps from_cells(const CellTensor& cell, const VecX& boundary, int cells);

  /// Product state |0...0> over `sites` two-level sites.
  static FiniteMps product_state(int sites);

  int n_sites() const { return static_cast<int>(tensors_.size()); }
  int phys_dim(int site) const { return static_cast<int>(tensors_[site].size()); }
  int bond_dim(int site) const;  // bond right of `site`
  int max_bond_dim() const;
  double max_discarded() const { return max_discarded_; }

  void position(int site);

  /// Applies a two-site gate on (site, site+1); both must be two-level.
  /// Gate convention: first factor = left site.  Truncates to max_bond /
  /// relative cutoff and accumulates the discarded weight.
  void apply_gate2(int site, const Mat4& gate, int max_bond, double cutoff);

  double expect1(int site, const Mat2& op);
  /// <op_a(site_a) op_b(site_b)> with site_a < site_b.
  double expect2(int site_a, const Mat2& op_a, int site_b, const Mat2& op_b);
  /// One sweep: <op_a(site_a) op_b(b)> for each b in ascending `bs`.
  std::vector<double> expect_pair_row(int site_a, const Mat2& op_a, const std::vector<int>& bs,
                                      const Mat2& op_b);

  double norm() const;
  void normalize();

 private:
  // tensors_[site][phys] is the (left bond) x (right bond) matrix.
  std::vector<std::vector<MatX>> tensors_;
  int center_ = 0;
  double max_discarded_ = 0.0;

  void orthogonalize_left(int site);   // absorb into site+1
  void orthogonalize_right(int site);  // absorb into site-1
};

}  // namespace holoq
