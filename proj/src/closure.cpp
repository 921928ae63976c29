#include "hyqmom/closure.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "chebyshev_detail.hpp"
#include "hyqmom/error.hpp"

namespace hyqmom {

namespace {

/// Shared core of the closures, on caller-owned buffers.
struct CoreResult {
  ClosurePath path = ClosurePath::Interior;
  double m_next = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t atoms = 0;
  double min_relative_pivot = 1.0;
  double mean = 0.0;
  double variance = 0.0;
};

std::size_t closure_half_order(std::size_t moment_count) {
  if (moment_count < 3 || moment_count % 2 == 0)
    throw Error(ErrorCode::InvalidArgument, "closure needs moments M_0..M_2n with n >= 1");
  return (moment_count - 1) / 2;
}

constexpr double kBoundaryScreen = 1e-5;

/// Whether the k-point Gauss rule of a_0..a_{k-1}, b_0..b_{k-1} matches
/// every moment to `tol` times its absolute power sum.
template <typename T>
bool gauss_rule_matches(std::span<const double> m, const std::vector<T>& a, const std::vector<T>& b, std::size_t k,
                        double tol) {
  RecurrenceCoefficients rc;
  rc.a.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k));
  rc.b.assign(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(k));
  for (std::size_t i = 1; i < k; ++i)
    if (!(rc.b[i] > 0.0)) return false;
  const Quadrature q = gauss_quadrature(rc, k);
  for (std::size_t p = 0; p < m.size(); ++p) {
    double value = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double xp = std::pow(q.abscissas[i], static_cast<double>(p));
      value += q.weights[i] * xp;
      scale += q.weights[i] * std::abs(xp);
    }
    if (std::abs(value - m[p]) > tol * scale) return false;
  }
  return true;
}

/// Runs in T; the solver uses double, the stand-alone closure long double.
template <typename T>
CoreResult close_core(std::span<const double> m, const ClosureOptions& opts, std::vector<std::vector<T>>& sigma,
                      std::vector<T>& a, std::vector<T>& b, std::vector<T>& rel) {
  const std::size_t n = closure_half_order(m.size());
  const std::size_t top = 2 * n + 1;
  CoreResult out;

  if (m[0] == 0.0) {
    for (double v : m)
      if (v != 0.0) throw Error(ErrorCode::Unrealizable, "zero density with non-zero moments");
    out.path = ClosurePath::ZeroDensity;
    out.m_next = 0.0;
    return out;
  }
  if (m[0] < 0.0) throw Error(ErrorCode::Unrealizable, "negative density");

  out.mean = m[1] / m[0];
  const double second = m[2] / m[0];
  const double variance = second - out.mean * out.mean;
  const double scale = std::max(1.0, second);
  if (variance <= 1e-14 * scale) {
    if (variance < -opts.unrealizable_tol * scale) throw Error(ErrorCode::Unrealizable, "negative variance");
    out.path = ClosurePath::SingleAtom;
    out.atoms = 1;
    out.m_next = m[0] * std::pow(out.mean, static_cast<double>(top));
    out.min_relative_pivot = 0.0;
    return out;
  }
  out.variance = variance;

  std::size_t breakdown = detail::chebyshev_forward(m, opts.breakdown_tol, sigma, top + 1, a, b, rel);
  out.min_relative_pivot = static_cast<double>(*std::min_element(rel.begin(), rel.end()));
  // Rounding leaves a vanishing pivot anywhere near zero and the pivots after
  // it are noise of either sign. A small pivot whose Gauss rule reproduces m
  // marks the boundary rank. Rank n has no pivots after it and keeps the
  // plain tolerance.
  const std::size_t last = std::min(breakdown != 0 ? breakdown : n, n - 1);
  bool on_boundary = false;
  for (std::size_t k = 1; k <= last && !on_boundary; ++k) {
    if (!(rel[k] < kBoundaryScreen)) continue;
    if (gauss_rule_matches(m, a, b, k, opts.unrealizable_tol)) {
      breakdown = k;
      on_boundary = true;
    }
  }
  if (!on_boundary && breakdown != 0 && rel[breakdown] < -opts.unrealizable_tol) {
    if (!gauss_rule_matches(m, a, b, breakdown, opts.unrealizable_tol))
      throw Error(ErrorCode::Unrealizable, "negative Hankel pivot at k = " + std::to_string(breakdown), breakdown);
    on_boundary = true;
  }
  if (on_boundary) out.min_relative_pivot = 0.0;

  if (breakdown != 0 && breakdown < n) {
    // k-atom boundary point: the measure is the k-point Gauss rule.
    const std::size_t k = breakdown;
    RecurrenceCoefficients rc;
    rc.a.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k));
    rc.b.assign(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(k));
    const Quadrature q = gauss_quadrature(rc, k);
    double acc = 0.0;
    for (std::size_t p = 0; p < k; ++p) acc += q.weights[p] * std::pow(q.abscissas[p], static_cast<double>(top));
    out.path = ClosurePath::Quadrature;
    out.atoms = k;
    out.m_next = acc;
    return out;
  }
  if (breakdown == n) {
    // H_2n vanishes (to tolerance): closure stays valid with b_n = 0.
    sigma[n][n] = 0.0;
    b[n] = 0.0;
  }

  T sum_a = 0;
  for (std::size_t k = 0; k < n; ++k) sum_a += a[k];
  const T alpha = sum_a / static_cast<T>(n);
  out.alpha = static_cast<double>(alpha);
  out.beta = static_cast<double>(static_cast<T>(2 * n + 1) / static_cast<T>(n) * b[n]);
  a.push_back(alpha);

  // Reverse sweep along the last anti-diagonal.
  sigma[n][n + 1] = sigma[n][n] * (alpha + sigma[n - 1][n] / sigma[n - 1][n - 1]);
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t p = 2 * n - k;
    const T older = k >= 1 ? b[k] * sigma[k - 1][p] : T(0);
    sigma[k][p + 1] = sigma[k + 1][p] + a[k] * sigma[k][p] + older;
  }
  out.m_next = static_cast<double>(sigma[0][top]);
  return out;
}

void sort_unique_atoms(std::vector<double>& v) { std::sort(v.begin(), v.end()); }

ClosureResult build_result(std::span<const double> m, const ClosureOptions& opts, Scale::Kind kind) {
  std::vector<std::vector<long double>> sigma;
  std::vector<long double> a, b, rel;
  const CoreResult core = close_core(m, opts, sigma, a, b, rel);

  ClosureResult r;
  r.n = (m.size() - 1) / 2;
  r.m_next = core.m_next;
  r.alpha = core.alpha;
  r.beta = core.beta;
  r.path = core.path;
  r.atoms = core.atoms;
  r.hyperbolicity_postulated = r.n > kProvenHyperbolicOrder;
  r.rc.a.assign(a.begin(), a.end());
  r.rc.b.assign(b.begin(), b.end());
  r.rc.scale = kind == Scale::Kind::Standardized ? Scale::standardized()
                                                 : Scale::raw(m[0], core.mean, core.variance);

  switch (core.path) {
    case ClosurePath::ZeroDensity:
      r.rc.a.clear();
      r.rc.b.clear();
      return r;
    case ClosurePath::SingleAtom:
      r.rc.a = {core.mean};
      r.rc.b = {m[0]};
      if (opts.compute_eigenvalues) {
        r.eigenvalues_q = {core.mean};
        r.eigenvalues_r = {core.mean};
        r.interlacing = Interlacing::NonStrict;
      }
      return r;
    case ClosurePath::Quadrature:
      r.rc.a.resize(core.atoms);
      r.rc.b.resize(core.atoms + 1);
      if (opts.compute_eigenvalues) {
        RecurrenceCoefficients head = r.rc;
        head.b.pop_back();
        r.eigenvalues_q = gauss_quadrature(head, core.atoms).abscissas;
        sort_unique_atoms(r.eigenvalues_q);
        r.eigenvalues_r = r.eigenvalues_q;
        r.interlacing = Interlacing::NonStrict;
      }
      return r;
    case ClosurePath::Interior:
      break;
  }

  if (opts.compute_eigenvalues) {
    r.eigenvalues_q = tridiagonal_eigen(jacobi_matrix(r.rc, r.n), false).values;
    r.eigenvalues_r =
        tridiagonal_eigen(jacobi_matrix(r.rc, r.n + 1, TerminalPair{r.alpha, r.beta}), false).values;
    r.interlacing = interlacing_check(r);
  }
  return r;
}

void require_strict(const ClosureResult& r, const ClosureOptions& opts) {
  if (r.path != ClosurePath::Interior)
    throw Error(ErrorCode::NotStrictlyRealizable, "moment vector lies on the boundary of moment space");
  (void)opts;
}

}  // namespace

ClosureResult hyqmom_close_general(const MomentVector& m, const ClosureOptions& opts) {
  return build_result(m.values(), opts, Scale::Kind::Raw);
}

ClosureResult hyqmom_close(const MomentVector& m, const ClosureOptions& opts) {
  ClosureResult r = build_result(m.values(), opts, Scale::Kind::Raw);
  if (!opts.allow_boundary_fallback) {
    require_strict(r, opts);
    if (!(r.beta > 0.0))
      throw Error(ErrorCode::NotStrictlyRealizable, "H_2n vanishes: moment vector on the boundary", r.n);
  }
  return r;
}

ClosureResult hyqmom_close(const StandardizedState& s, const ClosureOptions& opts) {
  if (s.degenerate_variance || !(s.variance > 0.0))
    throw Error(ErrorCode::NotStrictlyRealizable, "standardized closure needs positive variance");
  const MomentVector sm = s.standardized_moments();
  ClosureResult r = build_result(sm.values(), opts, Scale::Kind::Standardized);
  if (!opts.allow_boundary_fallback) {
    require_strict(r, opts);
    if (!(r.beta > 0.0))
      throw Error(ErrorCode::NotStrictlyRealizable, "H_2n vanishes: moment vector on the boundary", r.n);
  }
  return r;
}

double qmom_close(const MomentVector& m) {
  const std::size_t big_n = m.order();
  if (big_n % 2 == 0) throw Error(ErrorCode::InvalidArgument, "QMOM closes M_2n from M_0..M_{2n-1}");
  const std::size_t n = (big_n + 1) / 2;
  if (!(m[0] > 0.0)) throw Error(ErrorCode::NotStrictlyRealizable, "QMOM needs positive density");
  ChebyshevTable t = chebyshev_table(m.values());
  if (t.breakdown != 0)
    throw Error(ErrorCode::NotStrictlyRealizable, "QMOM input is not strictly realizable", t.breakdown);
  RecurrenceCoefficients rc = std::move(t.rc);
  rc.b.push_back(0.0);  // b_n = 0: H_2n = 0
  return reverse_chebyshev(rc, 2 * n)[2 * n];
}

GammaClosure gamma_family_close_n2(double s3, double s4, double gamma) {
  const double h4 = s4 - s3 * s3 - 1.0;
  if (!(h4 > 0.0)) throw Error(ErrorCode::NotStrictlyRealizable, "gamma family needs H_4 > 0");
  GammaClosure g;
  g.s5 = s3 * (2.0 + s3 * s3 + 2.5 * h4) + gamma * h4 * std::sqrt(4.0 + s3 * s3);
  g.strictly_hyperbolic = std::abs(gamma) < 2.5;
  return g;
}

std::array<double, 3> gamma_family_r3_roots(double s3, double s4, double gamma) {
  const double s5 = gamma_family_close_n2(s3, s4, gamma).s5;
  const double h4 = s4 - s3 * s3 - 1.0;
  const double root = std::sqrt(4.0 + s3 * s3);
  // P_5 = X^5 + c_4 X^4 + ... + c_0 from the closure derivatives; the lower
  // coefficients follow from invariance under density scaling, velocity
  // scaling and velocity shift.
  const double c4 = -(2.5 * s3 + gamma * root);
  const double c3 = -(2.0 - 2.0 * s3 * s3 + 2.5 * h4 + gamma * s3 * (h4 / root - 2.0 * root));
  const double c2 = -0.5 * (3.0 * s3 * c3 + 4.0 * s4 * c4 + 5.0 * s5);
  // Q_2 = X^2 - S_3 X - 1 divides P_5; long division leaves R_3.
  const double r2 = c4 + s3;
  const double r1 = c3 + s3 * r2 + 1.0;
  const double r0 = c2 + s3 * r1 + r2;

  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(0, 2) = -r0;
  companion(1, 2) = -r1;
  companion(2, 2) = -r2;
  const Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, false);
  std::array<double, 3> roots{};
  for (int i = 0; i < 3; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()[i].real();
  std::sort(roots.begin(), roots.end());
  return roots;
}

CharacteristicPolynomials assemble_characteristic(const RecurrenceCoefficients& rc, std::size_t n, double alpha,
                                                  double beta) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "closure order n must be positive");
  if (rc.a.size() < n || rc.b.size() < n)
    throw Error(ErrorCode::InvalidArgument, "need a_0..a_{n-1} and b_0..b_{n-1}");
  RecurrenceCoefficients head;
  head.a.assign(rc.a.begin(), rc.a.begin() + static_cast<std::ptrdiff_t>(n));
  head.b.assign(rc.b.begin(), rc.b.begin() + static_cast<std::ptrdiff_t>(n));
  const std::vector<MonicPolynomial> q = build_q_polynomials(head);
  const Polynomial& qn = q[n].polynomial();
  const Polynomial& qn1 = q[n - 1].polynomial();
  MonicPolynomial r(qn.times_x() - alpha * qn - beta * qn1);
  MonicPolynomial p = q[n] * r;
  return {q[n], std::move(r), std::move(p)};
}

CharacteristicPolynomials assemble_characteristic(const ClosureResult& closure) {
  if (closure.path != ClosurePath::Interior)
    throw Error(ErrorCode::NotStrictlyRealizable, "characteristic polynomial needs an interior closure");
  return assemble_characteristic(closure.rc, closure.n, closure.alpha, closure.beta);
}

std::tuple<double, double, double> check_constraints(const StandardizedState& s, const Polynomial& p) {
  const Polynomial dp = p.derivative();
  return {apply_functional(s, p), apply_functional(s, dp), apply_functional(s, dp.times_x())};
}

std::tuple<double, double, double> check_constraints(const StandardizedState& s, const ClosureResult& closure) {
  if (closure.path != ClosurePath::Interior)
    throw Error(ErrorCode::NotStrictlyRealizable, "characteristic polynomial needs an interior closure");
  if (closure.rc.scale.kind != Scale::Kind::Standardized)
    throw Error(ErrorCode::InvalidArgument, "constraints need a closure of standardized moments");
  const std::size_t n = closure.n;
  if (s.order < 2 * n + 1) throw Error(ErrorCode::DegreeTooHigh, "constraints need S_0..S_{2n+1}");
  using L = long double;
  auto times_linear = [](const std::vector<L>& p, L shift) {  // p * (X - shift)
    std::vector<L> out(p.size() + 1, 0.0L);
    for (std::size_t i = 0; i < p.size(); ++i) {
      out[i + 1] += p[i];
      out[i] -= shift * p[i];
    }
    return out;
  };
  std::vector<L> older{1.0L}, q = times_linear(older, closure.rc.a[0]);
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<L> next = times_linear(q, closure.rc.a[k]);
    for (std::size_t i = 0; i < older.size(); ++i) next[i] -= static_cast<L>(closure.rc.b[k]) * older[i];
    older = std::exchange(q, std::move(next));
  }
  std::vector<L> r = times_linear(q, closure.alpha);
  for (std::size_t i = 0; i < older.size(); ++i) r[i] -= static_cast<L>(closure.beta) * older[i];
  std::vector<L> p(q.size() + r.size() - 1, 0.0L);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) p[i + j] += q[i] * r[j];

  L c0 = 0.0L, c1 = 0.0L, c2 = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const L si = s.standardized(i);
    c0 += p[i] * si;
    if (i == 0) continue;
    c1 += static_cast<L>(i) * p[i] * static_cast<L>(s.standardized(i - 1));
    c2 += static_cast<L>(i) * p[i] * si;
  }
  return {static_cast<double>(c0), static_cast<double>(c1), static_cast<double>(c2)};
}

FdSpectrum fd_jacobian_spectrum(const MomentVector& m, double h_rel) {
  const std::size_t dim = m.size();
  closure_half_order(dim);
  const StandardizedState st = raw_to_standardized(m);
  if (st.degenerate_variance)
    throw Error(ErrorCode::NotStrictlyRealizable, "Jacobian spectrum needs positive variance");

  // The closure commutes with velocity shifts and scalings, so the raw
  // Jacobian is similar to (mean + sd * J_s) with J_s taken at the
  // standardized moments. Differencing there keeps every step O(h_rel).
  const MomentVector s = st.standardized_moments();
  ClosureOptions opts;
  opts.compute_eigenvalues = false;
  std::vector<double> x(s.values().begin(), s.values().end());
  const auto size = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index i = 0; i + 1 < size; ++i) jac(i, i + 1) = 1.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double h = h_rel * std::max(std::abs(s[j]), 1.0);
    const double saved = x[j];
    x[j] = saved + h;
    const double up = hyqmom_close_general(MomentVector(x), opts).m_next;
    x[j] = saved - h;
    const double down = hyqmom_close_general(MomentVector(x), opts).m_next;
    x[j] = saved;
    jac(size - 1, static_cast<Eigen::Index>(j)) = (up - down) / (2.0 * h);
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "Jacobian eigen-decomposition failed");
  const double sd = std::sqrt(st.variance);
  FdSpectrum out;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    out.real.push_back(st.mean + sd * solver.eigenvalues()[i].real());
    out.max_imag = std::max(out.max_imag, sd * std::abs(solver.eigenvalues()[i].imag()));
  }
  std::sort(out.real.begin(), out.real.end());
  return out;
}

double verify_factorization_fd(const MomentVector& m, double h_rel) {
  const FdSpectrum fd = fd_jacobian_spectrum(m, h_rel);
  const ClosureResult r = hyqmom_close(m);
  std::vector<double> expected = r.eigenvalues_q;
  expected.insert(expected.end(), r.eigenvalues_r.begin(), r.eigenvalues_r.end());
  std::sort(expected.begin(), expected.end());
  if (expected.size() != fd.real.size()) return std::numeric_limits<double>::infinity();
  double dist = fd.max_imag;
  for (std::size_t i = 0; i < expected.size(); ++i) dist = std::max(dist, std::abs(expected[i] - fd.real[i]));
  return dist;
}

Interlacing interlacing_check(const ClosureResult& result, double tol) {
  const auto& q = result.eigenvalues_q;
  const auto& r = result.eigenvalues_r;
  if (r.size() != q.size() + 1) return Interlacing::Violated;
  bool strict = true;
  auto compare = [&](double lo, double hi) {
    if (lo < hi) return true;
    strict = false;
    return lo <= hi + tol;
  };
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!compare(r[i], q[i]) || !compare(q[i], r[i + 1])) return Interlacing::Violated;
  }
  return strict ? Interlacing::Strict : Interlacing::NonStrict;
}

FluxClosure ClosureWorkspace::close(std::span<const double> m, const ClosureOptions& opts) {
  const CoreResult core = close_core(m, opts, sigma_, a_, b_, work_);
  FluxClosure out;
  out.m_next = core.m_next;
  out.path = core.path;
  out.min_relative_pivot = core.min_relative_pivot;
  const std::size_t n = (m.size() - 1) / 2;
  switch (core.path) {
    case ClosurePath::ZeroDensity:
      return out;
    case ClosurePath::SingleAtom:
      out.lambda_min = out.lambda_max = core.mean;
      return out;
    case ClosurePath::Quadrature: {
      RecurrenceCoefficients rc;
      rc.a.assign(a_.begin(), a_.begin() + static_cast<std::ptrdiff_t>(core.atoms));
      rc.b.assign(b_.begin(), b_.begin() + static_cast<std::ptrdiff_t>(core.atoms));
      const Quadrature q = gauss_quadrature(rc, core.atoms);
      out.lambda_min = q.abscissas.front();
      out.lambda_max = q.abscissas.back();
      return out;
    }
    case ClosurePath::Interior:
      break;
  }
  // K_{n+1}: a_0..a_{n-1}, alpha on the diagonal; sqrt(b_1..b_{n-1}), sqrt(beta) off it.
  diag_.assign(a_.begin(), a_.begin() + static_cast<std::ptrdiff_t>(n + 1));
  off_.resize(n);
  for (std::size_t k = 1; k < n; ++k) off_[k - 1] = std::sqrt(b_[k]);
  off_[n - 1] = std::sqrt(core.beta);
  tridiagonal_eigenvalues(diag_, off_, values_, work_);
  out.lambda_min = values_.front();
  out.lambda_max = values_.back();
  return out;
}

}  // namespace hyqmom
