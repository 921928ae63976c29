#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "hyqmom/polynomial.hpp"

namespace hyqmom {

/// Raw velocity moments (M_0, ..., M_N). The order N is fixed at construction.
class MomentVector {
 public:
  /// Throws InvalidArgument on an empty sequence or non-finite entries.
  explicit MomentVector(std::vector<double> values);
  MomentVector(std::initializer_list<double> values)
      : MomentVector(std::vector<double>(values)) {}

  std::size_t order() const noexcept { return values_.size() - 1; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const MomentVector&, const MomentVector&) = default;

 private:
  std::vector<double> values_;
};

/// (M_0, mean, C_2, S_3..S_N). When the variance is zero (a single Dirac
/// atom) the standardized tail is empty but `order` still records N.
struct StandardizedState {
  double m0 = 1.0;
  double mean = 0.0;
  double variance = 1.0;
  std::vector<double> s;  // S_3 .. S_N
  std::size_t order = 2;
  bool degenerate_variance = false;

  /// Standardized moment S_k, with S_0 = 1, S_1 = 0, S_2 = 1.
  double standardized(std::size_t k) const;

  /// Moment vector (1, 0, 1, S_3, ..., S_N) of the standardized variable.
  MomentVector standardized_moments() const;

  /// Throws InvalidArgument when the type invariants do not hold.
  void validate() const;
};

/// Central moments C_0..C_N (C_0 = 1, C_1 = 0). Requires M_0 > 0.
std::vector<double> central_moments(const MomentVector& m);

/// Throws NonPositiveDensity if M_0 <= 0. A variance at or below
/// 1e-14 * max(1, M_2/M_0) is flagged degenerate and clamped to zero.
StandardizedState raw_to_standardized(const MomentVector& m);

MomentVector standardized_to_raw(const StandardizedState& s);

/// Moments of the normal distribution N(mean, variance) times m0, up to
/// the given order.
MomentVector maxwellian_moments(double m0, double mean, double variance, std::size_t order);

/// Standardized moments through `order` for the symmetric (Gaussian) case:
/// S_{2k+1} = 0, S_{2k+2} = (2k+1) S_{2k}.
StandardizedState gaussian_state(double m0, double mean, double variance, std::size_t order);

/// Hankel determinants (H_4, ..., H_2n) of the standardized moments,
/// n = floor(N/2). Throws InsufficientOrder when N < 4.
std::vector<double> hankel_determinants(const StandardizedState& s);

enum class Realizability { StrictInterior, Boundary, Unrealizable };

struct RealizabilityReport {
  Realizability classification = Realizability::StrictInterior;
  std::size_t boundary_rank = 0;  // number of atoms when on the boundary
  std::vector<double> hankel;     // H_4 .. H_2n
  /// Row-equilibrated LDL^T pivots, one per H_2k; their signs drive the
  /// classification.
  std::vector<double> scaled_pivots;
};

/// Default relative tolerance for pivot tests.
inline constexpr double kRealizabilityTolerance = 1e-10;

RealizabilityReport classify_realizability(const StandardizedState& s,
                                           double tol = kRealizabilityTolerance);

/// Linear functional <p> = sum_i p_i S_i. Throws DegreeTooHigh when the
/// polynomial needs moments above the state's order.
double apply_functional(const StandardizedState& s, const Polynomial& p);

/// Same functional on raw moments: <p> = sum_i p_i M_i.
double apply_functional(const MomentVector& m, const Polynomial& p);

}  // namespace hyqmom
