#pragma once

// Orthonormal bases of Z(a) = {S : Q(a)'S = 0} and particular solutions of
// Q(a)'F = M, both obtained from the circulant extension of Q(a)'.
//
// The rows of Q(a)' are the first N-r rows of the circulant matrix C(a) whose
// eigenvalues are g_a at the N-th roots of unity, g_a(z) = sum_k a_k z^k.
// When g_a has roots on the unit circle the grid is rotated by a small angle
// alpha; this is the circulant of T_{r+1}(-alpha) a, where
// T_M(alpha) = diag(1, e^{i alpha}, ..., e^{i (M-1) alpha}).
//
// Fourier transforms are unitary: both directions carry the factor 1/sqrt(N).

#include <Eigen/Core>

#include "hmgn/horner.hpp"
#include "hmgn/series.hpp"

namespace hmgn {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

enum class HornerMode { Plain, Compensated };

/// Unitary DFT of every column: y_k = N^{-1/2} sum_j x_j exp(-2 pi i k j / N).
MatrixXcd fourier(const MatrixXcd& x);
/// Inverse of fourier().
MatrixXcd inverse_fourier(const MatrixXcd& x);

/// Point exp(i(2 pi j / n - alpha)) of the rotated grid.
cplx grid_point(Index j, Index n, double alpha);

/// g_a evaluated on the rotated grid, j = 0..n-1.
VectorXcd eval_poly_grid(const GlrrVector& a, double alpha, Index n, HornerMode mode = HornerMode::Plain);

/// Angle alpha in (-pi/n, pi/n] that approximately maximizes
/// min_j |g_a(exp(i(2 pi j / n - alpha)))|.
///
/// `offset` in [0, 1) shifts the candidate lattice by that fraction of its
/// spacing, which yields a different but equally valid search.
/// `mode` selects the evaluation of g_a used by the search.
/// Throws SpectrumDegenerate when no candidate keeps the grid off the roots.
double find_rotation(const GlrrVector& a, Index n, double offset = 0.0, HornerMode mode = HornerMode::Plain);

/// Eigenvalues of the rotated circulant C(T_{r+1}(-alpha0) a).
struct RotatedSpectrum {
  double alpha0 = 0.0;
  VectorXcd eigenvalues;
  Index n = 0;
  Index r = 0;

  double min_abs() const { return eigenvalues.cwiseAbs().minCoeff(); }
};

RotatedSpectrum rotated_spectrum(const GlrrVector& a, Index n, HornerMode mode = HornerMode::Plain,
                                 double offset = 0.0);
/// Spectrum at a prescribed angle; no search.
RotatedSpectrum rotated_spectrum_at(const GlrrVector& a, Index n, double alpha, HornerMode mode);

/// Real N x r basis of Z(a) with orthonormal columns.
struct SubspaceBasis {
  MatrixXd Z;
  /// sigma_{r+1} / sigma_1 of [Re Zc, Im Zc] for the complex basis Zc; zero
  /// in exact arithmetic and a measure of how far the complex span is from
  /// being closed under conjugation.
  double leakage = 0.0;
  /// ||Q(a)' Z||_F
  double nullspace_residual = 0.0;
  double alpha0 = 0.0;
};

SubspaceBasis nullspace_basis(const GlrrVector& a, Index n, HornerMode mode = HornerMode::Plain);
SubspaceBasis nullspace_basis(const GlrrVector& a, const RotatedSpectrum& spectrum, HornerMode mode);

/// Real N x r matrix F with Q(a)'F = M, M = -(rows K(pivot) of T_{r+1}(s))'.
MatrixXd fhat_matrix(const GlrrVector& a, const VectorXd& s, Index pivot, HornerMode mode = HornerMode::Plain);
MatrixXd fhat_matrix(const RotatedSpectrum& spectrum, const VectorXd& s, Index pivot);

/// Solves C(ã) y = v for the rotated circulant, y = F^{-1} A^{-1} F v.
MatrixXcd circulant_solve(const RotatedSpectrum& spectrum, const MatrixXcd& v);

}  // namespace hmgn
