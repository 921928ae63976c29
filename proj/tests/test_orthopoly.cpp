#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "generators.hpp"
#include "hyqmom/error.hpp"
#include "hyqmom/orthopoly.hpp"
#include "oracles.hpp"

using namespace hyqmom;

TEST_CASE("Gaussian recurrence coefficients are Hermite") {
  const auto rc = chebyshev(gaussian_state(1.0, 0.0, 1.0, 10));
  REQUIRE(rc.b.size() == 6);
  REQUIRE(rc.a.size() == 5);
  for (std::size_t k = 0; k < rc.a.size(); ++k) CHECK(rc.a[k] == doctest::Approx(0.0).scale(1.0));
  for (std::size_t k = 0; k < rc.b.size(); ++k) CHECK(rc.b[k] == doctest::Approx(k == 0 ? 1.0 : double(k)));
  CHECK(rc.scale.kind == Scale::Kind::Standardized);
}

TEST_CASE("raw coefficients carry the scale of the moments") {
  const MomentVector m = maxwellian_moments(2.0, 1.0, 0.25, 6);
  const auto raw = chebyshev(m);
  CHECK(raw.scale.kind == Scale::Kind::Raw);
  CHECK(raw.b[0] == 2.0);
  CHECK(raw.a[0] == doctest::Approx(1.0));
  CHECK(raw.b[1] == doctest::Approx(0.25));
  CHECK(raw.b[2] == doctest::Approx(0.5));
  const auto st = to_standardized_scale(raw);
  CHECK(st.a[1] == doctest::Approx(0.0).scale(1.0));
  CHECK(st.b[3] == doctest::Approx(3.0));
  const auto again = to_raw_scale(st, 2.0, 1.0, 0.25);
  for (std::size_t k = 0; k < raw.b.size(); ++k) CHECK(again.b[k] == doctest::Approx(raw.b[k]));
}

TEST_CASE("reverse Chebyshev agrees with Jacobi-matrix powers") {
  std::mt19937_64 rng(gen::kSeed + 10);
  std::uniform_real_distribution<double> ua(-2.0, 2.0), ub(0.05, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    RecurrenceCoefficients rc;
    rc.b.push_back(0.5 + ub(rng));
    for (std::size_t k = 0; k < n; ++k) rc.a.push_back(ua(rng));
    for (std::size_t k = 1; k <= n; ++k) rc.b.push_back(ub(rng));
    const std::size_t order = 2 * n;
    const MomentVector m = reverse_chebyshev(rc, order);
    // the n+1 square Jacobi matrix reproduces moments through order 2n+1; pad a_n.
    auto a = rc.a;
    a.push_back(0.0);
    const auto ref = oracle::jacobi_power_moments(a, rc.b, n + 1, order);
    // |M_k| <= b_0 ||J||^k with ||J|| <= max|a| + 2 max sqrt(b)
    const double norm = 2.0 + 2.0 * std::sqrt(3.0);
    for (std::size_t k = 0; k <= order; ++k)
      REQUIRE(std::abs(m[k] - ref[k]) <= 1e-12 * rc.b[0] * std::pow(norm, double(k)));
  }
}

TEST_CASE("moment order determined by coefficient counts") {
  RecurrenceCoefficients rc{{0.0, 0.0}, {1.0, 1.0, 2.0}, {}};
  CHECK(rc.moment_order() == 4);
  rc.a.push_back(0.0);
  CHECK(rc.moment_order() == 5);
  CHECK_THROWS_AS(reverse_chebyshev(RecurrenceCoefficients{{0.0}, {1.0}, {}}, 2), Error);
  CHECK_THROWS_AS(reverse_chebyshev(RecurrenceCoefficients{{0.0}, {1.0, -1.0}, {}}, 2), Error);
  CHECK_THROWS_AS(reverse_chebyshev(RecurrenceCoefficients{{0.0}, {0.0, 1.0}, {}}, 2), Error);
}

TEST_CASE("Chebyshev breakdown on boundary moments") {
  const oracle::DiscreteMeasure two{{-1.0, 2.0}, {0.3, 0.7}};
  const auto m = oracle::power_sums(two, 6);
  const auto table = chebyshev_table(m);
  CHECK(table.breakdown == 2);
  CHECK(std::abs(table.relative_pivot[2]) < 1e-12);
  try {
    chebyshev(MomentVector(m));
    FAIL("expected breakdown");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundaryBreakdown);
    CHECK(e.index() == 2);
  }
  CHECK_THROWS_AS(chebyshev_table(std::vector<double>{0.0, 0.0, 0.0}), Error);
}

TEST_CASE("Q polynomials are orthogonal under the moment functional") {
  std::mt19937_64 rng(gen::kSeed + 11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mix = gen::mixture(rng);
    const std::size_t n = 1 + rng() % 6;
    const auto raw = oracle::mixture_moments(mix, 2 * n);
    const MomentVector m(raw);
    const auto rc = chebyshev(m);
    auto head = rc;
    head.a.resize(n);
    const auto q = build_q_polynomials(head);
    REQUIRE(q.size() == n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double ip = apply_functional(m, q[i].polynomial() * q[j].polynomial());
        const double norm = std::sqrt(apply_functional(m, q[i].polynomial() * q[i].polynomial()) *
                                      apply_functional(m, q[j].polynomial() * q[j].polynomial()));
        REQUIRE(std::abs(ip) < 1e-8 * std::max(norm, 1.0));
      }
    }
  }
}

TEST_CASE("tridiagonal eigenvalues agree with a dense symmetric solver") {
  std::mt19937_64 rng(gen::kSeed + 12);
  std::uniform_real_distribution<double> ud(-5.0, 5.0), uo(0.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 25;
    JacobiMatrix j;
    for (std::size_t i = 0; i < n; ++i) j.diag.push_back(ud(rng));
    for (std::size_t i = 0; i + 1 < n; ++i) j.offdiag.push_back(trial % 7 == 0 && i % 3 == 0 ? 0.0 : uo(rng));
    const auto mine = tridiagonal_eigen(j, true);
    const auto ref = oracle::symmetric_eigenvalues(j.diag, j.offdiag);
    REQUIRE(std::is_sorted(mine.values.begin(), mine.values.end()));
    for (std::size_t i = 0; i < n; ++i) REQUIRE(mine.values[i] == doctest::Approx(ref[i]).scale(10.0).epsilon(1e-13));
    double sum = 0.0;
    for (double z : mine.first_components) sum += z;
    REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> values, work;
    tridiagonal_eigenvalues(j.diag, j.offdiag, values, work);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(values[i] == doctest::Approx(ref[i]).scale(10.0).epsilon(1e-13));
  }
}

TEST_CASE("Gauss quadrature reproduces moments through order 2k-1") {
  std::mt19937_64 rng(gen::kSeed + 13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto mix = gen::mixture(rng);
    const std::size_t k = 1 + rng() % 8;
    const auto raw = oracle::mixture_moments(mix, 2 * k);
    const auto scale = oracle::mixture_absolute_scale(mix, 2 * k);
    const auto rc = chebyshev(MomentVector(raw));
    const Quadrature q = gauss_quadrature(rc, k);
    for (std::size_t p = 0; p + 1 < 2 * k + 1; ++p) REQUIRE(std::abs(q.moment(p) - raw[p]) < 1e-9 * scale[p]);
    for (double w : q.weights) REQUIRE(w > 0.0);
  }
}

TEST_CASE("Gauss quadrature of atoms recovers the atoms") {
  const oracle::DiscreteMeasure three{{-1.0, 0.5, 2.0}, {0.2, 0.5, 0.3}};
  const auto rc = chebyshev(MomentVector(oracle::power_sums(three, 5)));
  const Quadrature q = gauss_quadrature(rc, 3);
  for (std::size_t p = 0; p < 3; ++p) {
    CHECK(q.abscissas[p] == doctest::Approx(three.x[p]));
    CHECK(q.weights[p] == doctest::Approx(three.w[p]));
  }
}

TEST_CASE("Jacobi matrix with terminal pair") {
  RecurrenceCoefficients rc{{0.0, 1.0}, {1.0, 4.0}, {}};
  const auto j = jacobi_matrix(rc, 3, TerminalPair{0.5, 9.0});
  CHECK(j.diag == std::vector<double>{0.0, 1.0, 0.5});
  CHECK(j.offdiag == std::vector<double>{2.0, 3.0});
  CHECK_THROWS_AS(jacobi_matrix(rc, 3, TerminalPair{0.5, -1.0}), Error);
  CHECK_THROWS_AS(jacobi_matrix(RecurrenceCoefficients{{0.0, 1.0}, {1.0, -4.0}, {}}, 2), Error);
  CHECK_THROWS_AS(jacobi_matrix(rc, 0), Error);
}

TEST_CASE("moments -> coefficients -> moments round trip") {
  std::mt19937_64 rng(gen::kSeed + 14);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const auto mix = gen::mixture(rng);
    const auto raw = oracle::mixture_moments(mix, 2 * n);
    const auto scale = oracle::mixture_absolute_scale(mix, 2 * n);
    const MomentVector back = reverse_chebyshev(chebyshev(MomentVector(raw)), 2 * n);
    for (std::size_t k = 0; k <= 2 * n; ++k) REQUIRE(std::abs(back[k] - raw[k]) < 1e-10 * scale[k]);
  }
}
