#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hyqmom::app {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // usage error or a failed verification suite
  kUnrealizable = 2,
  kRealizabilityLoss = 3,
  kIoError = 4,
};

/// Entry point of the `hyqmom` binary with injectable streams.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// One sample of a root sweep: H_2n, the S_2n it implies, and the roots of
/// Q_n and R_{n+1} in standardized velocity.
struct RootsRow {
  double h = 0.0;
  double s_2n = 0.0;
  std::vector<double> q;
  std::vector<double> r;
};

/// Sweeps H_2n linearly over [h_min, h_max] with S_3..S_{2n-1} held fixed;
/// n = (s_fixed.size() + 3) / 2. Throws NotStrictlyRealizable at samples
/// outside the interior.
std::vector<RootsRow> sweep_roots(const std::vector<double>& s_fixed, double h_min, double h_max,
                                  std::size_t samples);

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Randomized property suites on Gaussian-mixture moments: round trip,
/// interlacing, characteristic constraints and the FD factorization.
std::vector<SuiteResult> run_verify(std::uint64_t seed, std::size_t samples, std::size_t n_max);

}  // namespace hyqmom::app
