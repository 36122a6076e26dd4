#include "holoq/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace holoq {

const Mat2& pauli_id() {
  static const Mat2 m = Mat2::Identity();
  return m;
}

const Mat2& pauli_x() {
  static const Mat2 m = (Mat2() << 0, 1, 1, 0).finished();
  return m;
}

const Mat2& pauli_y() {
  static const Mat2 m = (Mat2() << Cx(0, 0), Cx(0, -1), Cx(0, 1), Cx(0, 0)).finished();
  return m;
}

const Mat2& pauli_z() {
  static const Mat2 m = (Mat2() << 1, 0, 0, -1).finished();
  return m;
}

const Mat2& hadamard() {
  static const Mat2 m = (Mat2() << 1, 1, 1, -1).finished() / std::sqrt(2.0);
  return m;
}

const Mat2& pauli(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X: return pauli_x();
    case PauliAxis::Y: return pauli_y();
    case PauliAxis::Z: return pauli_z();
  }
  throw std::logic_error("bad pauli axis");
}

Mat2 expi_pauli(PauliAxis axis, double theta) {
  // Paulis square to the identity, so the series closes.
  return std::cos(theta) * pauli_id() + I_UNIT * std::sin(theta) * pauli(axis);
}

Mat4 expi_pauli_pair(PauliAxis axis, double theta) {
  const Mat4 pp = kron(pauli(axis), pauli(axis));
  return std::cos(theta) * Mat4::Identity() + I_UNIT * std::sin(theta) * pp;
}

MatX kron(const MatX& a, const MatX& b) {
  MatX out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double unitarity_defect(const MatX& u) {
  MatX g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

double max_abs_diff(const MatX& a, const MatX& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

bool equal_up_to_phase(const MatX& a, const MatX& b, double tol, Cx* phase) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  // Fix the phase on the largest entry of b, then compare entrywise.
  Eigen::Index imax = 0, jmax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      if (std::abs(b(i, j)) > best) { best = std::abs(b(i, j)); imax = i; jmax = j; }
  if (best < tol) return max_abs_diff(a, b) < tol;
  const Cx c = a(imax, jmax) / b(imax, jmax);
  if (std::abs(std::abs(c) - 1.0) > tol) return false;
  if (max_abs_diff(a, c * b) > tol) return false;
  if (phase) *phase = c;
  return true;
}

void apply_gate1_bits(std::vector<Cx>& amp, int bit, const Mat2& m) {
  const std::size_t n = amp.size();
  const std::size_t step = std::size_t{1} << bit;
  for (std::size_t base = 0; base < n; base += 2 * step) {
    for (std::size_t i = base; i < base + step; ++i) {
      const Cx a0 = amp[i];
      const Cx a1 = amp[i + step];
      amp[i] = m(0, 0) * a0 + m(0, 1) * a1;
      amp[i + step] = m(1, 0) * a0 + m(1, 1) * a1;
    }
  }
}

void apply_gate2_bits(std::vector<Cx>& amp, int bit_hi, int bit_lo, const Mat4& m) {
  if (bit_hi == bit_lo) throw std::invalid_argument("gate2 bits must differ");
  const std::size_t n = amp.size();
  const std::size_t mh = std::size_t{1} << bit_hi;
  const std::size_t ml = std::size_t{1} << bit_lo;
  for (std::size_t i = 0; i < n; ++i) {
    if (i & (mh | ml)) continue;
    const std::size_t i00 = i;
    const std::size_t i01 = i | ml;
    const std::size_t i10 = i | mh;
    const std::size_t i11 = i | mh | ml;
    const Cx a00 = amp[i00], a01 = amp[i01], a10 = amp[i10], a11 = amp[i11];
    amp[i00] = m(0, 0) * a00 + m(0, 1) * a01 + m(0, 2) * a10 + m(0, 3) * a11;
    amp[i01] = m(1, 0) * a00 + m(1, 1) * a01 + m(1, 2) * a10 + m(1, 3) * a11;
    amp[i10] = m(2, 0) * a00 + m(2, 1) * a01 + m(2, 2) * a10 + m(2, 3) * a11;
    amp[i11] = m(3, 0) * a00 + m(3, 1) * a01 + m(3, 2) * a10 + m(3, 3) * a11;
  }
}

}  // namespace holoq
