#pragma once

#include <cstddef>

#include "hyqmom/moments.hpp"

namespace hyqmom {

/// Free-transport Riemann problem: a Maxwellian with mean `mean_left` for
/// x < 0 and `mean_right` for x >= 0, same density and variance.
struct RiemannSetup {
  double mean_left = 1.0;
  double mean_right = -1.0;
  double density = 1.0;
  double variance = 1.0 / 3.0;

  /// Throws InvalidArgument unless density > 0 and variance > 0.
  void validate() const;
};

/// Largest moment order exact_moments supports.
inline constexpr std::size_t kMaxExactOrder = 41;

/// M_0..M_kmax of f(t, x, u) = f_0(x - u t, u). At t = 0 this is the
/// piecewise Maxwellian initial condition. Throws DegreeTooHigh above
/// kMaxExactOrder and InvalidArgument for t < 0.
MomentVector exact_moments(const RiemannSetup& setup, double t, double x, std::size_t k_max);

/// Tail integrals I_j(alpha) = int_alpha^inf z^j phi(z) dz for j = 0..k_max,
/// phi the standard normal density.
void gaussian_upper_tail_moments(double alpha, std::size_t k_max, double* out);

}  // namespace hyqmom
