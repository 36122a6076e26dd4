#include "holoq/mps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace holoq {

namespace {

// theta[(l*da + a) , (b*r_cols + r)] layout helpers are kept local; all
// reshapes are explicit loops to keep index conventions obvious.

MatX merge_two_sites(const std::vector<MatX>& ta, const std::vector<MatX>& tb) {
  const int da = static_cast<int>(ta.size());
  const int db = static_cast<int>(tb.size());
  const int l = static_cast<int>(ta[0].rows());
  const int r = static_cast<int>(tb[0].cols());
  MatX theta(l * da, db * r);
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b) {
      const MatX block = ta[a] * tb[b];  // l x r
      for (int i = 0; i < l; ++i)
        for (int j = 0; j < r; ++j) theta(i * da + a, b * r + j) = block(i, j);
    }
  return theta;
}

}  // namespace

FiniteMps FiniteMps::from_cells(const CellTensor& cell, const VecX& boundary, int cells) {
  if (cells <= 0) throw std::invalid_argument("need at least one cell");
  const int chi = cell.chi;
  if (boundary.size() != chi) throw std::invalid_argument("boundary size mismatch");

  FiniteMps mps;
  const double cell_norm = 1.0 / std::sqrt(2.0);  // Bell normalization per cell
  for (int c = 0; c < cells; ++c) {
    const int l = (c == 0) ? 1 : chi;
    // Two-site block M[(i,s),(s',j)] = N^{(s,s')}_{ij} / sqrt(2), with the
    // boundary vector contracted into the first cell.
    MatX m(l * 2, 2 * chi);
    for (int s = 0; s < 2; ++s)
      for (int sp = 0; sp < 2; ++sp) {
        const MatX& block = cell.block(s, sp);
        for (int i = 0; i < l; ++i)
          for (int j = 0; j < chi; ++j) {
            Cx v = 0.0;
            if (c == 0) {
              for (int k = 0; k < chi; ++k) v += boundary(k) * block(k, j);
            } else {
              v = block(i, j);
            }
            m(i * 2 + s, sp * chi + j) = v * cell_norm;
          }
      }
    Eigen::BDCSVD<MatX> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    int rank = 1;
    for (Eigen::Index k = 1; k < svd.singularValues().size(); ++k)
      if (svd.singularValues()(k) > 1e-14 * svd.singularValues()(0)) rank = static_cast<int>(k) + 1;
    const MatX u = svd.matrixU().leftCols(rank);
    const MatX sv = svd.singularValues().head(rank).asDiagonal() *
                    svd.matrixV().leftCols(rank).adjoint();
    std::vector<MatX> ta(2), tb(2);
    for (int s = 0; s < 2; ++s) {
      ta[s] = MatX(l, rank);
      for (int i = 0; i < l; ++i)
        for (int k = 0; k < rank; ++k) ta[s](i, k) = u(i * 2 + s, k);
    }
    for (int sp = 0; sp < 2; ++sp) {
      tb[sp] = MatX(rank, chi);
      for (int k = 0; k < rank; ++k)
        for (int j = 0; j < chi; ++j) tb[sp](k, j) = sv(k, sp * chi + j);
    }
    mps.tensors_.push_back(std::move(ta));
    mps.tensors_.push_back(std::move(tb));
  }
  // Trailing chi-dimensional site carries the open right bond.
  std::vector<MatX> tail(chi);
  for (int b = 0; b < chi; ++b) {
    tail[b] = MatX::Zero(chi, 1);
    tail[b](b, 0) = 1.0;
  }
  mps.tensors_.push_back(std::move(tail));
  mps.center_ = mps.n_sites() - 1;
  mps.position(0);
  mps.normalize();
  return mps;
}

FiniteMps FiniteMps::product_state(int sites) {
  FiniteMps mps;
  for (int i = 0; i < sites; ++i) {
    std::vector<MatX> t(2);
    t[0] = MatX::Ones(1, 1);
    t[1] = MatX::Zero(1, 1);
    mps.tensors_.push_back(std::move(t));
  }
  mps.center_ = 0;
  return mps;
}

int FiniteMps::bond_dim(int site) const { return static_cast<int>(tensors_[site][0].cols()); }

int FiniteMps::max_bond_dim() const {
  int m = 1;
  for (int i = 0; i < n_sites(); ++i) m = std::max(m, bond_dim(i));
  return m;
}

void FiniteMps::orthogonalize_left(int site) {
  auto& t = tensors_[site];
  const int d = static_cast<int>(t.size());
  const int l = static_cast<int>(t[0].rows());
  const int r = static_cast<int>(t[0].cols());
  MatX m(l * d, r);
  for (int s = 0; s < d; ++s)
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < r; ++j) m(i * d + s, j) = t[s](i, j);
  Eigen::HouseholderQR<MatX> qr(m);
  const int k = std::min<int>(l * d, r);
  const MatX q = MatX(qr.householderQ()).leftCols(k);
  const MatX rest = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (int s = 0; s < d; ++s) {
    t[s] = MatX(l, k);
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < k; ++j) t[s](i, j) = q(i * d + s, j);
  }
  auto& next = tensors_[site + 1];
  for (auto& block : next) block = rest * block;
}

void FiniteMps::orthogonalize_right(int site) {
  auto& t = tensors_[site];
  const int d = static_cast<int>(t.size());
  const int l = static_cast<int>(t[0].rows());
  const int r = static_cast<int>(t[0].cols());
  // QR of the transposed (d*r) x l matrix gives the right-canonical form.
  MatX m(d * r, l);
  for (int s = 0; s < d; ++s)
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < r; ++j) m(j * d + s, i) = t[s](i, j);
  Eigen::HouseholderQR<MatX> qr(m);
  const int k = std::min<int>(d * r, l);
  const MatX q = MatX(qr.householderQ()).leftCols(k);
  const MatX rest = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (int s = 0; s < d; ++s) {
    t[s] = MatX(k, r);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < r; ++j) t[s](i, j) = q(j * d + s, i);
  }
  auto& prev = tensors_[site - 1];
  for (auto& block : prev) block = block * rest.transpose();
}

void FiniteMps::position(int site) {
  while (center_ < site) {
    orthogonalize_left(center_);
    ++center_;
  }
  while (center_ > site) {
    orthogonalize_right(center_);
    --center_;
  }
}

void FiniteMps::apply_gate2(int site, const Mat4& gate, int max_bond, double cutoff) {
  if (phys_dim(site) != 2 || phys_dim(site + 1) != 2)
    throw std::invalid_argument("apply_gate2 requires two-level sites");
  position(site);
  auto& ta = tensors_[site];
  auto& tb = tensors_[site + 1];
  const int l = static_cast<int>(ta[0].rows());
  const int r = static_cast<int>(tb[0].cols());
  MatX theta = merge_two_sites(ta, tb);  // (l*2) x (2*r)
  // Apply the gate to the physical pair (a, b).
  MatX out = MatX::Zero(l * 2, 2 * r);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < r; ++j)
      for (int ap = 0; ap < 2; ++ap)
        for (int bp = 0; bp < 2; ++bp) {
          Cx v = 0.0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              v += gate(ap * 2 + bp, a * 2 + b) * theta(i * 2 + a, b * r + j);
          out(i * 2 + ap, bp * r + j) = v;
        }
  Eigen::BDCSVD<MatX> svd(out, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sing = svd.singularValues();
  double total = 0.0;
  for (Eigen::Index k = 0; k < sing.size(); ++k) total += sing(k) * sing(k);
  int keep = static_cast<int>(sing.size());
  if (cutoff > 0.0) {
    double tail = 0.0;
    while (keep > 1) {
      const double s2 = sing(keep - 1) * sing(keep - 1);
      if ((tail + s2) / total > cutoff) break;
      tail += s2;
      --keep;
    }
  }
  keep = std::min(keep, max_bond);
  keep = std::max(keep, 1);
  double kept = 0.0;
  for (int k = 0; k < keep; ++k) kept += sing(k) * sing(k);
  max_discarded_ = std::max(max_discarded_, (total - kept) / total);
  const double renorm = 1.0 / std::sqrt(kept / total);

  const MatX u = svd.matrixU().leftCols(keep);
  const MatX sv =
      (sing.head(keep) * renorm).asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
  for (int a = 0; a < 2; ++a) {
    ta[a] = MatX(l, keep);
    for (int i = 0; i < l; ++i)
      for (int k = 0; k < keep; ++k) ta[a](i, k) = u(i * 2 + a, k);
  }
  for (int b = 0; b < 2; ++b) {
    tb[b] = MatX(keep, r);
    for (int k = 0; k < keep; ++k)
      for (int j = 0; j < r; ++j) tb[b](k, j) = sv(k, b * r + j);
  }
  center_ = site + 1;
}

double FiniteMps::norm() const {
  const auto& t = tensors_[center_];
  double s = 0.0;
  for (const auto& block : t) s += block.squaredNorm();
  return std::sqrt(s);
}

void FiniteMps::normalize() {
  const double n = norm();
  if (n <= 0.0) throw std::runtime_error("zero-norm MPS");
  for (auto& block : tensors_[center_]) block /= n;
}

double FiniteMps::expect1(int site, const Mat2& op) {
  position(site);
  const auto& t = tensors_[site];
  Cx acc = 0.0;
  for (int sp = 0; sp < phys_dim(site) && sp < 2; ++sp)
    for (int s = 0; s < phys_dim(site) && s < 2; ++s)
      acc += op(sp, s) * (t[sp].conjugate().cwiseProduct(t[s])).sum();
  if (std::abs(acc.imag()) > 1e-10)
    throw std::runtime_error("mps expectation has imaginary residue");
  return acc.real();
}

std::vector<double> FiniteMps::expect_pair_row(int site_a, const Mat2& op_a,
                                               const std::vector<int>& bs, const Mat2& op_b) {
  if (bs.empty()) return {};
  position(site_a);
  const auto& ta = tensors_[site_a];
  const int ra = static_cast<int>(ta[0].cols());
  // E_{m,m'} = sum_{s,s'} op_a(s',s) sum_l conj(T^{s'}_{l,m'}) T^{s}_{l,m};
  // contracted left of the (conj, ket) pair with identity (left-canonical).
  MatX env = MatX::Zero(ra, ra);  // ket index = rows, bra index = cols
  for (int sp = 0; sp < 2; ++sp)
    for (int s = 0; s < 2; ++s)
      if (op_a(sp, s) != Cx(0.0)) env += op_a(sp, s) * (ta[s].transpose() * ta[sp].conjugate());

  std::vector<double> out;
  std::size_t next = 0;
  for (int site = site_a + 1; site <= bs.back(); ++site) {
    const auto& t = tensors_[site];
    const int d = phys_dim(site);
    if (next < bs.size() && bs[next] == site) {
      Cx acc = 0.0;
      for (int sp = 0; sp < d && sp < 2; ++sp)
        for (int s = 0; s < d && s < 2; ++s) {
          if (op_b(sp, s) == Cx(0.0)) continue;
          // close with the right environment = identity (right-canonical)
          acc += op_b(sp, s) * (t[sp].conjugate().cwiseProduct(env.transpose() * t[s])).sum();
        }
      if (std::abs(acc.imag()) > 1e-10)
        throw std::runtime_error("mps expectation has imaginary residue");
      out.push_back(acc.real());
      ++next;
      if (next == bs.size()) break;
    }
    // transfer with the identity operator: env' = sum_s (T^s)^T env conj(T^s)
    MatX nenv = MatX::Zero(bond_dim(site), bond_dim(site));
    for (int s = 0; s < d; ++s) nenv += t[s].transpose() * env * t[s].conjugate();
    env = std::move(nenv);
  }
  return out;
}

double FiniteMps::expect2(int site_a, const Mat2& op_a, int site_b, const Mat2& op_b) {
  if (site_a >= site_b) throw std::invalid_argument("expect2 requires site_a < site_b");
  return expect_pair_row(site_a, op_a, {site_b}, op_b).front();
}

}  // namespace holoq
