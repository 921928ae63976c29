#include "hyqmom/orthopoly.hpp"

#include <cmath>
#include <string>

#include "hyqmom/error.hpp"
#include "chebyshev_detail.hpp"

namespace hyqmom {

RecurrenceCoefficients to_raw_scale(const RecurrenceCoefficients& rc, double m0, double mean, double variance) {
  RecurrenceCoefficients out;
  out.scale = Scale::raw(m0, mean, variance);
  const double sigma = std::sqrt(variance);
  out.a.reserve(rc.a.size());
  for (double a : rc.a) out.a.push_back(mean + sigma * a);
  out.b.reserve(rc.b.size());
  for (std::size_t k = 0; k < rc.b.size(); ++k) out.b.push_back(k == 0 ? m0 : variance * rc.b[k]);
  return out;
}

RecurrenceCoefficients to_standardized_scale(const RecurrenceCoefficients& rc) {
  if (rc.scale.kind == Scale::Kind::Standardized) return rc;
  const double sigma = std::sqrt(rc.scale.variance);
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "standardizing needs positive variance");
  RecurrenceCoefficients out;
  out.scale = Scale::standardized();
  for (double a : rc.a) out.a.push_back((a - rc.scale.mean) / sigma);
  for (std::size_t k = 0; k < rc.b.size(); ++k) out.b.push_back(k == 0 ? 1.0 : rc.b[k] / rc.scale.variance);
  return out;
}

double Quadrature::moment(std::size_t k) const {
  double acc = 0.0;
  for (std::size_t p = 0; p < abscissas.size(); ++p) acc += weights[p] * std::pow(abscissas[p], static_cast<double>(k));
  return acc;
}

ChebyshevTable chebyshev_table(std::span<const double> m, double tol) {
  if (m.empty()) throw Error(ErrorCode::InvalidArgument, "empty moment vector");
  if (!(m[0] > 0.0)) throw Error(ErrorCode::NonPositiveDensity, "M_0 must be positive");
  ChebyshevTable t;
  t.breakdown = detail::chebyshev_forward(m, tol, t.sigma, m.size(), t.rc.a, t.rc.b, t.relative_pivot);
  return t;
}

RecurrenceCoefficients chebyshev(const MomentVector& m, double tol) {
  ChebyshevTable t = chebyshev_table(m.values(), tol);
  if (t.breakdown != 0)
    throw Error(ErrorCode::BoundaryBreakdown,
                "Chebyshev pivot vanished at k = " + std::to_string(t.breakdown), t.breakdown);
  RecurrenceCoefficients rc = std::move(t.rc);
  const double mean = rc.a.empty() ? 0.0 : rc.a[0];
  const double variance = rc.b.size() > 1 ? rc.b[1] : 0.0;
  rc.scale = Scale::raw(m[0], mean, variance);
  return rc;
}

RecurrenceCoefficients chebyshev(const StandardizedState& s, double tol) {
  if (s.degenerate_variance || !(s.variance > 0.0))
    throw Error(ErrorCode::BoundaryBreakdown, "zero variance: single atom", 1);
  RecurrenceCoefficients rc = chebyshev(s.standardized_moments(), tol);
  rc.scale = Scale::standardized();
  return rc;
}

MomentVector reverse_chebyshev(const RecurrenceCoefficients& rc, std::size_t order) {
  if (rc.b.empty() || !(rc.b[0] > 0.0))
    throw Error(ErrorCode::InvalidCoefficients, "b_0 must be positive");
  if (order > rc.moment_order())
    throw Error(ErrorCode::InvalidArgument,
                "coefficients determine moments only through order " + std::to_string(rc.moment_order()));
  for (double b : rc.b)
    if (b < 0.0) throw Error(ErrorCode::InvalidCoefficients, "negative recurrence coefficient b_k");

  // sigma_{k,p} on the triangle k <= p, k + p <= order. Diagonal entries are
  // products of b, the first super-diagonal adds partial sums of a, and the
  // rest follows sigma_{k,p+1} = sigma_{k+1,p} + a_k sigma_{k,p} + b_k sigma_{k-1,p}.
  const std::size_t kmax = order / 2;
  std::vector<std::vector<double>> sigma(kmax + 1, std::vector<double>(order + 1, 0.0));
  std::vector<double> prod_b(kmax + 1), sum_a(kmax + 1, 0.0);
  for (std::size_t k = 0; k <= kmax; ++k) {
    prod_b[k] = (k == 0 ? 1.0 : prod_b[k - 1]) * rc.b[k];
    if (2 * k + 1 <= order) sum_a[k] = (k == 0 ? 0.0 : sum_a[k - 1]) + rc.a[k];
  }
  for (std::size_t p = 0; p <= order; ++p) {
    for (std::size_t k = 0; k <= p && k + p <= order; ++k) {
      if (p == k) {
        sigma[k][p] = prod_b[k];
      } else if (p == k + 1) {
        sigma[k][p] = prod_b[k] * sum_a[k];
      } else {
        const double older = k >= 1 ? rc.b[k] * sigma[k - 1][p - 1] : 0.0;
        sigma[k][p] = sigma[k + 1][p - 1] + rc.a[k] * sigma[k][p - 1] + older;
      }
    }
  }
  return MomentVector(std::vector<double>(sigma[0].begin(), sigma[0].end()));
}

std::vector<MonicPolynomial> build_q_polynomials(const RecurrenceCoefficients& rc) {
  const std::size_t n = rc.a.size();
  if (n >= 2 && rc.b.size() < n)
    throw Error(ErrorCode::InvalidArgument, "need b_1..b_{n-1} to build Q_n");
  std::vector<Polynomial> q;
  q.reserve(n + 1);
  q.emplace_back(Polynomial{1.0});
  for (std::size_t k = 0; k < n; ++k) {
    Polynomial next = q[k].times_x() - rc.a[k] * q[k];
    if (k >= 1) next -= rc.b[k] * q[k - 1];
    q.push_back(std::move(next));
  }
  std::vector<MonicPolynomial> out;
  out.reserve(q.size());
  for (auto& p : q) out.emplace_back(std::move(p));
  return out;
}

JacobiMatrix jacobi_matrix(const RecurrenceCoefficients& rc, std::size_t size, std::optional<TerminalPair> terminal) {
  if (size == 0) throw Error(ErrorCode::InvalidArgument, "Jacobi matrix size must be positive");
  const std::size_t from_rc = terminal ? size - 1 : size;
  if (rc.a.size() < from_rc || (from_rc >= 2 && rc.b.size() < from_rc))
    throw Error(ErrorCode::InvalidArgument, "not enough recurrence coefficients for Jacobi matrix");
  JacobiMatrix j;
  j.diag.assign(rc.a.begin(), rc.a.begin() + static_cast<std::ptrdiff_t>(from_rc));
  for (std::size_t k = 1; k < from_rc; ++k) {
    if (rc.b[k] < 0.0)
      throw Error(ErrorCode::NegativeOffdiagonal, "negative b_" + std::to_string(k), k);
    j.offdiag.push_back(std::sqrt(rc.b[k]));
  }
  if (terminal) {
    if (terminal->beta < 0.0) throw Error(ErrorCode::NegativeOffdiagonal, "negative terminal beta", size - 1);
    j.diag.push_back(terminal->alpha);
    if (size >= 2) j.offdiag.push_back(std::sqrt(terminal->beta));
  }
  return j;
}

Quadrature gauss_quadrature(const RecurrenceCoefficients& rc, std::size_t k) {
  if (rc.b.empty() || !(rc.b[0] > 0.0)) throw Error(ErrorCode::InvalidCoefficients, "b_0 must be positive");
  for (std::size_t i = 1; i < k; ++i)
    if (!(rc.b[i] > 0.0)) throw Error(ErrorCode::InvalidCoefficients, "quadrature needs b_1..b_{k-1} > 0", i);
  const EigenResult eig = tridiagonal_eigen(jacobi_matrix(rc, k), true);
  Quadrature q;
  q.abscissas = eig.values;
  q.weights.resize(k);
  for (std::size_t p = 0; p < k; ++p) q.weights[p] = rc.b[0] * eig.first_components[p];
  return q;
}

}  // namespace hyqmom
