#pragma once

#include <array>
#include <cstddef>

namespace hyqmom::detail {

inline constexpr std::size_t kMaxBinomial = 96;

/// Pascal triangle in double; exact for every entry up to row 56.
struct BinomialTable {
  std::array<std::array<double, kMaxBinomial + 1>, kMaxBinomial + 1> c{};
  constexpr BinomialTable() {
    for (std::size_t n = 0; n <= kMaxBinomial; ++n) {
      c[n][0] = 1.0;
      for (std::size_t k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k < n ? c[n - 1][k] : 0.0);
    }
  }
};

inline constexpr BinomialTable kBinomials{};

inline double binomial(std::size_t n, std::size_t k) { return kBinomials.c[n][k]; }

}  // namespace hyqmom::detail
