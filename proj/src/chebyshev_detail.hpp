#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hyqmom::detail {

/// Forward Chebyshev sweep on M_0..M_N into caller-owned buffers. `sigma`
/// gets at least N/2 + 1 rows of `cols` >= N + 1 entries; only the band
/// k <= p <= N - k is written. Fills a_k, b_k and the relative pivots
/// (rel[0] = 1). Returns the first k whose relative pivot is not above
/// `tol`, or 0. On breakdown at k, b_k is written and a_k is not.
template <typename T>
std::size_t chebyshev_forward(std::span<const double> m, double tol, std::vector<std::vector<T>>& sigma,
                              std::size_t cols, std::vector<T>& a, std::vector<T>& b, std::vector<T>& rel) {
  const std::size_t big_n = m.size() - 1;
  const std::size_t n = big_n / 2;
  if (sigma.size() < n + 1) sigma.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    if (sigma[k].size() < cols) sigma[k].resize(cols);
  a.clear();
  b.clear();
  rel.clear();

  for (std::size_t p = 0; p <= big_n; ++p) sigma[0][p] = m[p];
  b.push_back(m[0]);
  if (big_n >= 1) a.push_back(sigma[0][1] / sigma[0][0]);
  rel.push_back(1);

  for (std::size_t k = 1; k <= n; ++k) {
    const T ak = a[k - 1];
    const T bk = k >= 2 ? b[k - 1] : T(0);  // sigma_{-1,p} = 0
    const std::vector<T>& prev = sigma[k - 1];
    const std::vector<T>* older = k >= 2 ? &sigma[k - 2] : nullptr;
    std::vector<T>& row = sigma[k];
    for (std::size_t p = k; p <= big_n - k; ++p)
      row[p] = prev[p + 1] - ak * prev[p] - (older ? bk * (*older)[p] : T(0));
    using std::abs;
    const T scale = abs(prev[k + 1]) + abs(ak * prev[k]) + (older ? abs(bk * (*older)[k]) : T(0));
    const T r = scale > 0 ? row[k] / scale : T(0);
    rel.push_back(r);
    b.push_back(row[k] / prev[k - 1]);
    if (!(r > tol)) return k;
    if (k < n || big_n % 2 == 1) a.push_back(row[k + 1] / row[k] - prev[k] / prev[k - 1]);
  }
  return 0;
}

}  // namespace hyqmom::detail
