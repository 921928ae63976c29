#include "hyqmom/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyqmom/error.hpp"
#include "hyqmom/orthopoly.hpp"
#include "numeric_util.hpp"

namespace hyqmom {

MomentVector::MomentVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::InvalidArgument, "empty moment vector");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite moment");
}

double StandardizedState::standardized(std::size_t k) const {
  if (k > order) throw Error(ErrorCode::DegreeTooHigh, "moment order " + std::to_string(k) + " not available");
  if (k == 0) return 1.0;
  if (k == 1) return 0.0;
  if (degenerate_variance) return 0.0;
  if (k == 2) return 1.0;
  return s[k - 3];
}

MomentVector StandardizedState::standardized_moments() const {
  std::vector<double> v(order + 1);
  for (std::size_t k = 0; k <= order; ++k) v[k] = standardized(k);
  return MomentVector(std::move(v));
}

void StandardizedState::validate() const {
  if (!(m0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "density must be positive");
  if (!(variance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "variance must be non-negative");
  if (order < 2) throw Error(ErrorCode::InvalidArgument, "standardized state needs order >= 2");
  if (variance == 0.0 || degenerate_variance) {
    if (!s.empty()) throw Error(ErrorCode::InvalidArgument, "zero variance requires empty standardized tail");
  } else if (s.size() != order - 2) {
    throw Error(ErrorCode::InvalidArgument, "standardized tail length does not match order");
  }
}

std::vector<double> central_moments(const MomentVector& m) {
  const double m0 = m[0];
  if (!(m0 > 0.0)) throw Error(ErrorCode::NonPositiveDensity, "M_0 must be positive");
  const std::size_t n = m.order();
  const double mean = m.size() > 1 ? m[1] / m0 : 0.0;
  std::vector<double> c(n + 1, 0.0);
  c[0] = 1.0;
  for (std::size_t k = 2; k <= n; ++k) {
    // C_k = sum_i binom(k,i) (-mean)^(k-i) M_i / M_0
    double acc = 0.0;
    double shift = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      const std::size_t i = k - j;
      acc += detail::binomial(k, i) * shift * (m[i] / m0);
      shift *= -mean;
    }
    c[k] = acc;
  }
  return c;
}

StandardizedState raw_to_standardized(const MomentVector& m) {
  if (m.order() < 2) throw Error(ErrorCode::InsufficientOrder, "need moments through M_2");
  const std::vector<double> c = central_moments(m);
  StandardizedState st;
  st.m0 = m[0];
  st.mean = m[1] / m[0];
  st.order = m.order();
  const double threshold = 1e-14 * std::max(1.0, m[2] / m[0]);
  if (c[2] <= threshold) {
    if (c[2] < -threshold) throw Error(ErrorCode::Unrealizable, "negative variance");
    st.variance = 0.0;
    st.degenerate_variance = true;
    return st;
  }
  st.variance = c[2];
  const double sigma = std::sqrt(c[2]);
  st.s.resize(m.order() - 2);
  double scale = c[2] * sigma;
  for (std::size_t k = 3; k <= m.order(); ++k) {
    st.s[k - 3] = c[k] / scale;
    scale *= sigma;
  }
  return st;
}

MomentVector standardized_to_raw(const StandardizedState& st) {
  st.validate();
  const std::size_t n = st.order;
  std::vector<double> m(n + 1);
  const double u = st.mean;
  if (st.variance == 0.0) {
    double p = st.m0;
    for (std::size_t k = 0; k <= n; ++k, p *= u) m[k] = p;
    return MomentVector(std::move(m));
  }
  const double sigma = std::sqrt(st.variance);
  std::vector<double> c(n + 1);
  c[0] = 1.0;
  if (n >= 1) c[1] = 0.0;
  double scale = st.variance;
  for (std::size_t k = 2; k <= n; ++k) {
    c[k] = st.standardized(k) * scale;
    scale *= sigma;
  }
  std::vector<double> upow(n + 1);
  upow[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) upow[k] = upow[k - 1] * u;
  for (std::size_t k = 0; k <= n; ++k) {
    // M_k = M_0 [ sum_{i=2}^k binom(k,i) u^(k-i) C_i + u^k ]
    double acc = upow[k];
    for (std::size_t i = 2; i <= k; ++i) acc += detail::binomial(k, i) * upow[k - i] * c[i];
    m[k] = st.m0 * acc;
  }
  return MomentVector(std::move(m));
}

MomentVector maxwellian_moments(double m0, double mean, double variance, std::size_t order) {
  // M_k = mean M_{k-1} + (k-1) variance M_{k-2}
  std::vector<double> m(order + 1);
  m[0] = m0;
  if (order >= 1) m[1] = m0 * mean;
  for (std::size_t k = 2; k <= order; ++k)
    m[k] = mean * m[k - 1] + static_cast<double>(k - 1) * variance * m[k - 2];
  return MomentVector(std::move(m));
}

StandardizedState gaussian_state(double m0, double mean, double variance, std::size_t order) {
  StandardizedState st;
  st.m0 = m0;
  st.mean = mean;
  st.variance = variance;
  st.order = order;
  st.s.assign(order >= 2 ? order - 2 : 0, 0.0);
  double even = 1.0;  // S_2
  for (std::size_t k = 4; k <= order; k += 2) {
    even *= static_cast<double>(k - 1);
    st.s[k - 3] = even;
  }
  return st;
}

namespace {

/// Standardized Hankel matrix A_ij = S_{i+j}, i, j = 0..n.
std::vector<std::vector<double>> hankel_matrix(const StandardizedState& st, std::size_t n) {
  std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1));
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j) a[i][j] = st.standardized(i + j);
  return a;
}

double row_max(const std::vector<std::vector<double>>& a, std::size_t row, std::size_t size) {
  double m = 0.0;
  for (std::size_t j = 0; j < size; ++j) m = std::max(m, std::abs(a[row][j]));
  return m;
}

/// Determinant of the leading `size` x `size` block with rows scaled by
/// their maxima, by partially pivoted elimination. Returns {det, scaled det}.
std::pair<double, double> leading_determinant(const std::vector<std::vector<double>>& a, std::size_t size) {
  std::vector<std::vector<double>> w(size, std::vector<double>(size));
  double row_scale = 1.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double r = row_max(a, i, size);
    row_scale *= r;
    for (std::size_t j = 0; j < size; ++j) w[i][j] = r > 0.0 ? a[i][j] / r : 0.0;
  }
  double det = 1.0;
  for (std::size_t k = 0; k < size; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < size; ++i)
      if (std::abs(w[i][k]) > std::abs(w[p][k])) p = i;
    if (w[p][k] == 0.0) return {0.0, 0.0};
    if (p != k) {
      std::swap(w[p], w[k]);
      det = -det;
    }
    det *= w[k][k];
    for (std::size_t i = k + 1; i < size; ++i) {
      const double f = w[i][k] / w[k][k];
      for (std::size_t j = k; j < size; ++j) w[i][j] -= f * w[k][j];
    }
  }
  return {det * row_scale, det};
}

struct HankelPivots {
  std::vector<double> determinants;  // H_0 .. H_2n (index k -> H_2k)
  std::vector<double> scaled;        // scaled pivot (or scaled det after breakdown)
};

HankelPivots hankel_pivots(const StandardizedState& st, double tol) {
  const std::size_t n = st.order / 2;
  const auto a = hankel_matrix(st, n);
  HankelPivots out;
  out.determinants.assign(n + 1, 0.0);
  out.scaled.assign(n + 1, 0.0);

  // LDL^T without pivoting: d_k = H_2k / H_2k-2.
  std::vector<std::vector<double>> l(n + 1, std::vector<double>(n + 1, 0.0));
  std::vector<double> d(n + 1, 0.0);
  double det = 1.0;
  std::size_t k = 0;
  for (; k <= n; ++k) {
    double dk = a[k][k];
    for (std::size_t j = 0; j < k; ++j) dk -= l[k][j] * l[k][j] * d[j];
    d[k] = dk;
    det *= dk;
    out.determinants[k] = det;
    const double rm = row_max(a, k, k + 1);
    out.scaled[k] = rm > 0.0 ? dk / rm : 0.0;
    if (!(out.scaled[k] > tol)) {
      ++k;
      break;
    }
    l[k][k] = 1.0;
    for (std::size_t i = k + 1; i <= n; ++i) {
      double v = a[i][k];
      for (std::size_t j = 0; j < k; ++j) v -= l[i][j] * l[k][j] * d[j];
      l[i][k] = v / dk;
    }
  }
  // After a vanishing or negative pivot the LDL^T recursion is unusable;
  // evaluate the remaining leading determinants directly.
  for (; k <= n; ++k) {
    const auto [h, scaled] = leading_determinant(a, k + 1);
    out.determinants[k] = h;
    out.scaled[k] = scaled;
  }
  return out;
}

}  // namespace

std::vector<double> hankel_determinants(const StandardizedState& st) {
  if (st.degenerate_variance || !(st.variance > 0.0))
    throw Error(ErrorCode::InvalidArgument, "Hankel determinants need positive variance");
  if (st.order < 4) throw Error(ErrorCode::InsufficientOrder, "need standardized moments through S_4");
  const auto piv = hankel_pivots(st, kRealizabilityTolerance);
  return {piv.determinants.begin() + 2, piv.determinants.end()};
}

RealizabilityReport classify_realizability(const StandardizedState& st, double tol) {
  RealizabilityReport report;
  if (st.degenerate_variance || st.variance == 0.0) {
    report.classification = Realizability::Boundary;
    report.boundary_rank = 1;
    return report;
  }
  if (st.order < 4) return report;

  const auto piv = hankel_pivots(st, tol);
  report.hankel.assign(piv.determinants.begin() + 2, piv.determinants.end());
  report.scaled_pivots.assign(piv.scaled.begin() + 2, piv.scaled.end());

  const std::size_t n = st.order / 2;
  for (std::size_t k = 2; k <= n; ++k) {
    const double e = piv.scaled[k];
    if (e > tol) continue;
    if (e < -tol) {
      report.classification = Realizability::Unrealizable;
      return report;
    }
    // H_2k vanishes: every higher determinant has to vanish as well.
    for (std::size_t j = k + 1; j <= n; ++j) {
      if (std::abs(piv.scaled[j]) > tol) {
        report.classification = Realizability::Unrealizable;
        return report;
      }
    }
    // A rank-k boundary point is the k-atom Gauss rule of its lower
    // moments; everything above has to match that rule.
    const MomentVector sm = st.standardized_moments();
    const ChebyshevTable table = chebyshev_table(sm.values().first(2 * k), 0.0);
    const Quadrature q = gauss_quadrature(table.rc, k);
    // Standardizing amplifies rounding by ((|mean| + sd) / sd)^j.
    const double sd = std::sqrt(st.variance);
    const double growth = (std::abs(st.mean) + sd) / sd;
    for (std::size_t j = 2 * k; j <= st.order; ++j) {
      double scale = 0.0;
      for (std::size_t p = 0; p < k; ++p) scale += q.weights[p] * std::pow(std::abs(q.abscissas[p]), double(j));
      const double allowed = tol * std::max(1.0, scale) * std::pow(growth, double(j));
      if (std::abs(sm[j] - q.moment(j)) > allowed) {
        report.classification = Realizability::Unrealizable;
        return report;
      }
    }
    report.classification = Realizability::Boundary;
    report.boundary_rank = k;
    return report;
  }
  return report;
}

double apply_functional(const StandardizedState& st, const Polynomial& p) {
  if (p.degree() > st.order)
    throw Error(ErrorCode::DegreeTooHigh, "polynomial degree exceeds available moments");
  double acc = 0.0;
  for (std::size_t i = 0; i <= p.degree(); ++i) acc += p[i] * st.standardized(i);
  return acc;
}

double apply_functional(const MomentVector& m, const Polynomial& p) {
  if (p.degree() > m.order())
    throw Error(ErrorCode::DegreeTooHigh, "polynomial degree exceeds available moments");
  double acc = 0.0;
  for (std::size_t i = 0; i <= p.degree(); ++i) acc += p[i] * m[i];
  return acc;
}

}  // namespace hyqmom
