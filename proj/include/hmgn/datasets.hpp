#pragma once

// Test problems and synthetic data: the known-minimum problem built around
// a quadratic signal, the damped two-cosine benchmark series of length 50,
// relative Gaussian noise and artificial gaps.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hmgn/series.hpp"

namespace hmgn {

/// x = y* + n where y* = b t^2 on the equispaced grid t in [-1, 1] and n is
/// W-orthogonal (W = I) to the tangent space Z(a*^2), a* = (1, -3, 3, -1).
/// By construction y* is a stationary point of ||x - s|| over rank-3 series.
struct KnownMinimumProblem {
  TimeSeries x;
  TimeSeries y_star;
  GlrrVector a_star;
  /// Orthonormal N x 6 basis of Z(a*^2), from Legendre polynomials P0..P5.
  MatrixXd tangent_basis;
};

/// Requires N >= 13.
KnownMinimumProblem build_known_minimum(Index n);

/// Orthonormal basis of the values of P0..P_{degree} on the equispaced grid
/// in [-1, 1] with n points.
MatrixXd legendre_basis(Index n, Index degree);

/// s_i = 0.9^i cos(pi i / 5) + 0.2 * 1.05^i cos(pi i / 12 + pi / 4), i = 1..50.
VectorXd ishteva50_signal();

/// s + level * ||s|| * e / ||e|| with e standard normal from a seeded
/// mt19937_64.
VectorXd add_relative_noise(const VectorXd& s, double level, std::uint64_t seed);

/// Parses "10-19,35-39" into 1-based inclusive ranges; a single number is a
/// range of length one.
std::vector<std::pair<Index, Index>> parse_ranges(const std::string& text);

/// Marks the 1-based inclusive ranges as missing.
TimeSeries apply_gaps(const VectorXd& values, const std::vector<std::pair<Index, Index>>& ranges);

/// Parses "p=1,2:a=0:w=0:phi=1.5708;p=1:w=0.1" into signal components.
/// Keys: p (polynomial coefficients, increasing degree, default 1), a (alpha),
/// w (omega), phi. Components are separated by ';'.
std::vector<SignalComponent> parse_components(const std::string& text);

}  // namespace hmgn
