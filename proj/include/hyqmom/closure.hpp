#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "hyqmom/moments.hpp"
#include "hyqmom/orthopoly.hpp"
#include "hyqmom/polynomial.hpp"

namespace hyqmom {

/// Hyperbolicity of the HyQMOM system is established for n <= 9; above that
/// it rests on the numerical checks only.
inline constexpr std::size_t kProvenHyperbolicOrder = 9;

/// How the closing moment was obtained.
enum class ClosurePath {
  Interior,     // Chebyshev + closure + reverse sweep (b_n may be zero)
  ZeroDensity,  // M_0 = 0
  SingleAtom,   // C_2 = 0
  Quadrature,   // k < n atoms, power sum of the Gauss rule
};

enum class Interlacing { Strict, NonStrict, Violated };

struct ClosureResult {
  std::size_t n = 0;
  double m_next = 0.0;  // M_{2n+1} (S_{2n+1} for standardized input)
  double alpha = 0.0;
  double beta = 0.0;
  /// a_0..a_n (a_n = alpha) and b_0..b_n.
  RecurrenceCoefficients rc;
  std::vector<double> eigenvalues_q;  // roots of Q_n, ascending
  std::vector<double> eigenvalues_r;  // roots of R_{n+1}, ascending
  ClosurePath path = ClosurePath::Interior;
  std::size_t atoms = 0;  // number of Dirac atoms on the degenerate paths
  /// Set for n > 9, where global hyperbolicity is postulated rather than proven.
  bool hyperbolicity_postulated = false;
  /// Filled whenever both spectra were computed.
  std::optional<Interlacing> interlacing;
};

struct ClosureOptions {
  /// Reroute boundary input to the general algorithm instead of throwing.
  bool allow_boundary_fallback = true;
  bool compute_eigenvalues = true;
  double breakdown_tol = kBreakdownTolerance;
  /// Pivots below -unrealizable_tol (relative) mean the input is outside
  /// moment space; between that and breakdown_tol they count as zero.
  double unrealizable_tol = kRealizabilityTolerance;
};

/// HyQMOM closure for strictly realizable M_0..M_2n (n >= 1): a_n = mean of
/// a_0..a_{n-1}, beta_n = (2n+1)/n b_n, M_{2n+1} from the reverse sweep, and
/// the spectra of J_n and K_{n+1}. Boundary input is forwarded to
/// hyqmom_close_general unless disabled, in which case it throws
/// NotStrictlyRealizable.
ClosureResult hyqmom_close(const MomentVector& m, const ClosureOptions& opts = {});

/// Standardized form: returns S_{2n+1} and standardized-scale coefficients.
ClosureResult hyqmom_close(const StandardizedState& s, const ClosureOptions& opts = {});

/// Closure for any realizable moment vector, including M_0 = 0, a single
/// atom and k-atom boundary points. Throws Unrealizable otherwise.
ClosureResult hyqmom_close_general(const MomentVector& m, const ClosureOptions& opts = {});

/// QMOM: M_{2n} on the boundary H_2n = 0, from strictly realizable
/// M_0..M_{2n-1}. Throws NotStrictlyRealizable.
double qmom_close(const MomentVector& m);

struct GammaClosure {
  double s5 = 0.0;
  /// |gamma| < 5/2: R_3 has three real roots that separate those of Q_2.
  bool strictly_hyperbolic = true;
};

/// n = 2 family S_5 = S_3 (2 + S_3^2 + 5/2 H_4) + gamma H_4 sqrt(4 + S_3^2).
/// Throws NotStrictlyRealizable when H_4 <= 0.
GammaClosure gamma_family_close_n2(double s3, double s4, double gamma);

/// Roots of the standardized R_3 with P_5 = Q_2 R_3 for the gamma family,
/// ascending. Outside |gamma| < 5/2 a complex pair is reported by its real
/// part.
std::array<double, 3> gamma_family_r3_roots(double s3, double s4, double gamma);

struct CharacteristicPolynomials {
  MonicPolynomial q;  // Q_n
  MonicPolynomial r;  // R_{n+1} = (X - alpha) Q_n - beta Q_{n-1}
  MonicPolynomial p;  // P_{2n+1} = Q_n R_{n+1}
};

/// Assembles Q_n, R_{n+1} and P_{2n+1} in the scale of the closure's
/// coefficients.
CharacteristicPolynomials assemble_characteristic(const ClosureResult& closure);

/// Same from explicit coefficients a_0..a_{n-1}, b_0..b_{n-1} (extra
/// entries ignored) and the terminal pair.
CharacteristicPolynomials assemble_characteristic(const RecurrenceCoefficients& rc, std::size_t n,
                                                  double alpha, double beta);

/// (<P>, <P'>, <X P'>) on standardized moments through S_{2n+1}.
std::tuple<double, double, double> check_constraints(const StandardizedState& s, const Polynomial& p);

/// Same for P_{2n+1} of an interior closure of standardized moments, with P
/// built and the functionals summed in extended precision.
std::tuple<double, double, double> check_constraints(const StandardizedState& s, const ClosureResult& closure);

/// Largest distance between the sorted spectrum of the finite-difference
/// Jacobian dF/dM of the closed flux and the sorted union of the closure's
/// eigenvalues. The differences are taken at the standardized moments with
/// steps h_rel * max(|S_j|, 1); the spectrum is mapped back by mean + sd * mu.
double verify_factorization_fd(const MomentVector& m, double h_rel = 1e-6);

/// Eigenvalues of the finite-difference Jacobian, ascending by real part;
/// complex pairs are reported by real part with `max_imag` set.
struct FdSpectrum {
  std::vector<double> real;
  double max_imag = 0.0;
};
FdSpectrum fd_jacobian_spectrum(const MomentVector& m, double h_rel = 1e-6);

/// r_1 < q_1 < r_2 < ... < q_n < r_{n+1}. NonStrict when only the weak
/// inequalities hold within `tol` (beta -> 0 limit).
Interlacing interlacing_check(const ClosureResult& result, double tol = 0.0);

/// Allocation-light closure used inside the solver: closing moment and the
/// extreme roots of R_{n+1}, plus the smallest relative Chebyshev pivot.
struct FluxClosure {
  double m_next = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double min_relative_pivot = 1.0;
  ClosurePath path = ClosurePath::Interior;
};

class ClosureWorkspace {
 public:
  /// Throws Unrealizable when a pivot is negative beyond the tolerance.
  FluxClosure close(std::span<const double> moments, const ClosureOptions& opts = {});

 private:
  std::vector<std::vector<double>> sigma_;
  std::vector<double> a_, b_, diag_, off_, values_, work_;
};

}  // namespace hyqmom
