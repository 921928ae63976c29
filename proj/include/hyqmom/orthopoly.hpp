#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "hyqmom/moments.hpp"
#include "hyqmom/polynomial.hpp"

namespace hyqmom {

/// Which linear functional the recurrence coefficients belong to. Raw
/// coefficients (a-bar, b-bar) come from the raw moments with density m0,
/// mean u and variance C_2; standardized ones from (1, 0, 1, S_3, ...).
struct Scale {
  enum class Kind { Standardized, Raw };
  Kind kind = Kind::Standardized;
  double m0 = 1.0;
  double mean = 0.0;
  double variance = 1.0;

  static Scale standardized() { return {}; }
  static Scale raw(double m0, double mean, double variance) { return {Kind::Raw, m0, mean, variance}; }
};

/// Three-term recurrence Q_{k+1} = (X - a_k) Q_k - b_k Q_{k-1}, Q_{-1} = 0,
/// Q_0 = 1. b_0 is the total mass of the functional.
struct RecurrenceCoefficients {
  std::vector<double> a;
  std::vector<double> b;
  Scale scale;

  /// Highest moment order the coefficients determine: a_k is needed from
  /// order 2k+1 on and b_k from order 2k.
  std::size_t moment_order() const noexcept {
    return b.empty() ? 0 : std::min(2 * b.size() - 1, 2 * a.size());
  }
};

/// Standardized coefficients to raw ones: a-bar_k = u + sqrt(C_2) a_k,
/// b-bar_k = C_2 b_k for k >= 1, b-bar_0 = m0.
RecurrenceCoefficients to_raw_scale(const RecurrenceCoefficients& rc, double m0, double mean, double variance);

/// Inverse of to_raw_scale, using the scale recorded in `rc`.
RecurrenceCoefficients to_standardized_scale(const RecurrenceCoefficients& rc);

/// Symmetric tridiagonal matrix; `offdiag[i]` couples rows i and i+1.
struct JacobiMatrix {
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const noexcept { return diag.size(); }
};

struct Quadrature {
  std::vector<double> abscissas;
  std::vector<double> weights;

  /// sum_p w_p x_p^k
  double moment(std::size_t k) const;
};

/// Relative pivot size below which the Chebyshev algorithm reports a
/// boundary breakdown.
inline constexpr double kBreakdownTolerance = 1e-12;

/// Modified moments sigma_{k,p} = <Q_k X^p> with the coefficients they
/// produce. `relative_pivot[k]` is sigma_{k,k} divided by the magnitude of
/// the terms that were combined to form it; it is the cancellation-aware
/// measure of how far b_k is from zero.
struct ChebyshevTable {
  RecurrenceCoefficients rc;
  std::vector<std::vector<double>> sigma;  // sigma[k][p], k = 0..n
  std::vector<double> relative_pivot;      // index k, entry 0 is 1
  std::size_t breakdown = 0;               // first failing k, 0 when none
};

/// Chebyshev algorithm from raw moments M_0..M_N. Returns a_0..a_{(N-1)/2},
/// b_0..b_{N/2}. Throws BoundaryBreakdown (index k) when sigma_{k,k} falls
/// to `tol` times its term magnitude or below.
RecurrenceCoefficients chebyshev(const MomentVector& m, double tol = kBreakdownTolerance);

/// Chebyshev algorithm on the standardized moments of `s`.
RecurrenceCoefficients chebyshev(const StandardizedState& s, double tol = kBreakdownTolerance);

/// Same recursion, keeping the sigma table. Does not throw on breakdown: it
/// stops at the first k whose relative pivot is not above `tol`, records it
/// in `breakdown`, and leaves b_k as the last coefficient. Requires M_0 > 0.
ChebyshevTable chebyshev_table(std::span<const double> moments, double tol = kBreakdownTolerance);

/// Reverse Chebyshev algorithm: moments M_0..M_order from coefficients.
/// Requires order <= rc.moment_order(). Throws InvalidCoefficients on a
/// negative b_k or non-positive b_0.
MomentVector reverse_chebyshev(const RecurrenceCoefficients& rc, std::size_t order);

/// Q_0..Q_n with n = len(a), so Q_n needs a_0..a_{n-1} and b_1..b_{n-1}.
std::vector<MonicPolynomial> build_q_polynomials(const RecurrenceCoefficients& rc);

/// Terminal pair replacing the last diagonal / off-diagonal entries.
struct TerminalPair {
  double alpha;
  double beta;
};

/// Leading `size` x `size` Jacobi matrix. With a terminal pair the last
/// diagonal entry is alpha and the last off-diagonal entry sqrt(beta).
/// Throws NegativeOffdiagonal for negative b (or beta).
JacobiMatrix jacobi_matrix(const RecurrenceCoefficients& rc, std::size_t size,
                           std::optional<TerminalPair> terminal = std::nullopt);

struct EigenResult {
  std::vector<double> values;           // ascending
  std::vector<double> first_components;  // squared first components, if requested
};

/// Implicit-shift QL on a symmetric tridiagonal matrix. Throws
/// ConvergenceFailure after 50 sweeps on one eigenvalue.
EigenResult tridiagonal_eigen(const JacobiMatrix& j, bool with_vectors);

/// Eigenvalues only, written into `values` (resized). `work` is scratch
/// space. Allocation-free when the buffers are already large enough.
void tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> offdiag,
                             std::vector<double>& values, std::vector<double>& work);

/// k-point Gauss rule of the functional behind `rc` (Golub-Welsch).
Quadrature gauss_quadrature(const RecurrenceCoefficients& rc, std::size_t k);

}  // namespace hyqmom
