#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace holoq {

using Cx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

inline constexpr Cx I_UNIT{0.0, 1.0};

const Mat2& pauli_id();
const Mat2& pauli_x();
const Mat2& pauli_y();
const Mat2& pauli_z();
const Mat2& hadamard();

enum class PauliAxis { X, Y, Z };
const Mat2& pauli(PauliAxis axis);

/// exp(i * theta * sigma_axis), closed form.
Mat2 expi_pauli(PauliAxis axis, double theta);

/// exp(i * theta * sigma_axis (x) sigma_axis) on two qubits.
Mat4 expi_pauli_pair(PauliAxis axis, double theta);

/// Kronecker product; the FIRST factor is the most significant subsystem.
MatX kron(const MatX& a, const MatX& b);

/// Max-norm distance from the identity of u^dagger * u.
double unitarity_defect(const MatX& u);

double max_abs_diff(const MatX& a, const MatX& b);

/// True if a = c*b for some unit complex c, to tolerance `tol` in max-norm.
/// If so and `phase` is non-null, stores c.
bool equal_up_to_phase(const MatX& a, const MatX& b, double tol, Cx* phase = nullptr);

/// Applies a 4x4 gate to amplitude vector `amp` on bit positions
/// (bit_hi, bit_lo), bit_hi being the most significant gate index.
void apply_gate2_bits(std::vector<Cx>& amp, int bit_hi, int bit_lo, const Mat4& m);

/// Applies a 2x2 gate to amplitude vector `amp` on bit position `bit`.
void apply_gate1_bits(std::vector<Cx>& amp, int bit, const Mat2& m);

}  // namespace holoq
