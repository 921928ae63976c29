#include "hyqmom/riemann.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "hyqmom/error.hpp"
#include "numeric_util.hpp"

namespace hyqmom {

void RiemannSetup::validate() const {
  if (!(density > 0.0)) throw Error(ErrorCode::InvalidArgument, "Riemann setup needs positive density");
  if (!(variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "Riemann setup needs positive variance");
  if (!std::isfinite(mean_left) || !std::isfinite(mean_right))
    throw Error(ErrorCode::InvalidArgument, "Riemann setup needs finite means");
}

void gaussian_upper_tail_moments(double alpha, std::size_t k_max, double* out) {
  const double phi = std::exp(-0.5 * alpha * alpha) / std::sqrt(2.0 * std::numbers::pi);
  out[0] = 0.5 * std::erfc(alpha / std::numbers::sqrt2);
  if (k_max >= 1) out[1] = phi;
  double power = 1.0;  // alpha^(j-1)
  for (std::size_t j = 2; j <= k_max; ++j) {
    power *= alpha;
    out[j] = power * phi + static_cast<double>(j - 1) * out[j - 2];
  }
}

namespace {

/// Adds density * int u^k N(u; mean, variance) over u > c (upper) or u < c,
/// k = 0..k_max, to `acc`.
void add_half_range(double density, double mean, double variance, double c, bool upper, std::size_t k_max,
                    std::vector<double>& acc) {
  const double sd = std::sqrt(variance);
  const double alpha = (c - mean) / sd;
  std::array<double, kMaxExactOrder + 1> tail{};
  // int_{-inf}^{alpha} z^j phi = (-1)^j I_j(-alpha)
  gaussian_upper_tail_moments(upper ? alpha : -alpha, k_max, tail.data());
  if (!upper)
    for (std::size_t j = 1; j <= k_max; j += 2) tail[j] = -tail[j];

  std::array<double, kMaxExactOrder + 1> sd_pow{}, mean_pow{};
  sd_pow[0] = mean_pow[0] = 1.0;
  for (std::size_t j = 1; j <= k_max; ++j) {
    sd_pow[j] = sd_pow[j - 1] * sd;
    mean_pow[j] = mean_pow[j - 1] * mean;
  }
  for (std::size_t k = 0; k <= k_max; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j <= k; ++j) s += detail::binomial(k, j) * mean_pow[k - j] * sd_pow[j] * tail[j];
    acc[k] += density * s;
  }
}

}  // namespace

MomentVector exact_moments(const RiemannSetup& setup, double t, double x, std::size_t k_max) {
  setup.validate();
  if (k_max > kMaxExactOrder)
    throw Error(ErrorCode::DegreeTooHigh, "exact moments are limited to order 41", k_max);
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "time must be non-negative");
  if (t == 0.0) {
    const double mean = x < 0.0 ? setup.mean_left : setup.mean_right;
    return maxwellian_moments(setup.density, mean, setup.variance, k_max);
  }
  // Particles at x with velocity u started at x - u t: from the left state
  // when u > x / t, from the right state otherwise.
  const double c = x / t;
  std::vector<double> m(k_max + 1, 0.0);
  add_half_range(setup.density, setup.mean_left, setup.variance, c, true, k_max, m);
  add_half_range(setup.density, setup.mean_right, setup.variance, c, false, k_max, m);
  return MomentVector(std::move(m));
}

}  // namespace hyqmom
