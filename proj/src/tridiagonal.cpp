// Implicit-shift QL iteration for symmetric tridiagonal matrices, tracking
// only the first row of the eigenvector matrix (Golub-Welsch).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hyqmom/error.hpp"
#include "hyqmom/orthopoly.hpp"

namespace hyqmom {

namespace {

constexpr int kMaxSweeps = 50;

/// d: diagonal (overwritten by eigenvalues, unsorted), e: off-diagonal with
/// e[i] coupling i and i+1 and e[n-1] = 0 (destroyed), z: first-row
/// components or empty.
void implicit_ql(std::span<double> d, std::span<double> e, std::span<double> z) {
  const std::size_t n = d.size();
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    int sweeps = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (sweeps++ == kMaxSweeps)
        throw Error(ErrorCode::ConvergenceFailure, "tridiagonal QL did not converge", l);

      // Wilkinson-type shift from the leading 2x2 block.
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (!z.empty()) {
          const double zf = z[i + 1];
          z[i + 1] = s * z[i] + c * zf;
          z[i] = c * z[i] - s * zf;
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (true);
  }
}

void check_offdiag(std::span<const double> diag, std::span<const double> offdiag) {
  if (diag.empty()) throw Error(ErrorCode::InvalidArgument, "empty Jacobi matrix");
  if (offdiag.size() + 1 != diag.size())
    throw Error(ErrorCode::InvalidArgument, "off-diagonal length must be size - 1");
}

}  // namespace

EigenResult tridiagonal_eigen(const JacobiMatrix& j, bool with_vectors) {
  check_offdiag(j.diag, j.offdiag);
  const std::size_t n = j.size();
  std::vector<double> d = j.diag;
  std::vector<double> e(n, 0.0);
  std::copy(j.offdiag.begin(), j.offdiag.end(), e.begin());
  std::vector<double> z;
  if (with_vectors) {
    z.assign(n, 0.0);
    z[0] = 1.0;
  }
  implicit_ql(d, e, z);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  EigenResult out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = d[order[i]];
  if (with_vectors) {
    out.first_components.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.first_components[i] = z[order[i]] * z[order[i]];
  }
  return out;
}

void tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> offdiag,
                             std::vector<double>& values, std::vector<double>& work) {
  check_offdiag(diag, offdiag);
  const std::size_t n = diag.size();
  values.assign(diag.begin(), diag.end());
  work.assign(n, 0.0);
  std::copy(offdiag.begin(), offdiag.end(), work.begin());
  implicit_ql(values, work, {});
  std::sort(values.begin(), values.end());
}

}  // namespace hyqmom
