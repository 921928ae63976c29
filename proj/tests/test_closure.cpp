#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "generators.hpp"
#include "hyqmom/closure.hpp"
#include "hyqmom/error.hpp"
#include "oracles.hpp"

using namespace hyqmom;

namespace {

StandardizedState standardized(double s3, double s4) {
  StandardizedState st = gaussian_state(1.0, 0.0, 1.0, 4);
  st.s = {s3, s4};
  return st;
}

/// Random strictly realizable standardized state of order 2n.
StandardizedState random_state(std::mt19937_64& rng, std::size_t n) {
  return raw_to_standardized(MomentVector(oracle::mixture_moments(gen::mixture(rng), 2 * n)));
}

/// Appends S_{2n+1} from the closure to a state of order 2n.
StandardizedState extend(StandardizedState st, double s_next) {
  st.s.push_back(s_next);
  st.order += 1;
  return st;
}

void require_coefficients(const MonicPolynomial& p, std::vector<double> expect) {
  REQUIRE(p.degree() + 1 == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) REQUIRE(p[i] == doctest::Approx(expect[i]).scale(1.0).epsilon(1e-12));
}

}  // namespace

TEST_CASE("n = 1 closures") {
  const ClosureResult r = hyqmom_close(MomentVector{1.0, 0.0, 1.0});
  CHECK(r.m_next == doctest::Approx(0.0).scale(1.0));
  CHECK(r.beta == doctest::Approx(3.0));
  REQUIRE(r.eigenvalues_q.size() == 1);
  REQUIRE(r.eigenvalues_r.size() == 2);
  CHECK(r.eigenvalues_q[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(r.eigenvalues_r[0] == doctest::Approx(-std::sqrt(3.0)));
  CHECK(r.eigenvalues_r[1] == doctest::Approx(std::sqrt(3.0)));
  CHECK(r.interlacing == Interlacing::Strict);
  CHECK(hyqmom_close(MomentVector{1.0, 1.0, 2.0}).m_next == doctest::Approx(4.0));
}

TEST_CASE("closed coefficients follow the HyQMOM rule") {
  std::mt19937_64 rng(gen::kSeed + 20);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const auto r = hyqmom_close(MomentVector(oracle::mixture_moments(gen::mixture(rng), 2 * n)));
    REQUIRE(r.path == ClosurePath::Interior);
    REQUIRE(r.rc.a.size() == n + 1);
    REQUIRE(r.rc.b.size() == n + 1);
    const double mean_a = std::accumulate(r.rc.a.begin(), r.rc.a.begin() + long(n), 0.0) / double(n);
    double a_max = 0.0;
    for (std::size_t k = 0; k < n; ++k) a_max = std::max(a_max, std::abs(r.rc.a[k]));
    REQUIRE(std::abs(r.alpha - mean_a) <= 4.0 * std::numeric_limits<double>::epsilon() * a_max);
    REQUIRE(r.rc.a[n] == r.alpha);
    REQUIRE(r.beta == doctest::Approx(double(2 * n + 1) / double(n) * r.rc.b[n]).epsilon(4e-16));
    REQUIRE(r.beta >= 0.0);
    REQUIRE(r.hyperbolicity_postulated == (n > 9));
  }
}

TEST_CASE("closing moment equals the Jacobi-matrix moment with a_n = mean a") {
  std::mt19937_64 rng(gen::kSeed + 21);
  std::uniform_real_distribution<double> ua(-1.5, 1.5), ub(0.2, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<double> a, b{1.0 + ub(rng)};
    for (std::size_t k = 0; k < n; ++k) a.push_back(ua(rng));
    for (std::size_t k = 1; k <= n; ++k) b.push_back(ub(rng));
    a.push_back(0.0);
    const auto m = oracle::jacobi_power_moments(a, b, n + 1, 2 * n);
    a[n] = std::accumulate(a.begin(), a.begin() + long(n), 0.0) / double(n);
    const double expect = oracle::jacobi_power_moments(a, b, n + 1, 2 * n + 1)[2 * n + 1];
    const double scale = b[0] * std::pow(1.5 + 2.0 * std::sqrt(2.0), double(2 * n + 1));
    const auto r = hyqmom_close(MomentVector(m));
    REQUIRE(std::abs(r.m_next - expect) < 1e-10 * scale);
    for (std::size_t k = 0; k < n; ++k) REQUIRE(r.rc.a[k] == doctest::Approx(a[k]).scale(1.0).epsilon(1e-7));
  }
}

TEST_CASE("n = 2 closed form") {
  std::mt19937_64 rng(gen::kSeed + 22);
  std::uniform_real_distribution<double> u3(-3.0, 3.0), uh(0.01, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double s3 = u3(rng);
    const double s4 = uh(rng) + s3 * s3 + 1.0;
    const double expect = 0.5 * s3 * (5.0 * s4 - 3.0 * s3 * s3 - 1.0);
    const double got = hyqmom_close(standardized(s3, s4)).m_next;
    REQUIRE(std::abs(got - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
    REQUIRE(std::abs(gamma_family_close_n2(s3, s4, 0.0).s5 - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("general closure branches") {
  SUBCASE("zero density") {
    const auto r = hyqmom_close_general(MomentVector{0.0, 0.0, 0.0, 0.0, 0.0});
    CHECK(r.path == ClosurePath::ZeroDensity);
    CHECK(r.m_next == 0.0);
  }
  SUBCASE("single atom") {
    const auto r = hyqmom_close_general(MomentVector{1.0, 2.0, 4.0, 8.0, 16.0});
    CHECK(r.path == ClosurePath::SingleAtom);
    CHECK(r.m_next == doctest::Approx(32.0).epsilon(1e-14));
    const auto w = hyqmom_close_general(MomentVector{3.0, -1.5, 0.75});
    CHECK(w.m_next == doctest::Approx(std::pow(-1.5, 3) / 9.0));
  }
  SUBCASE("two atoms at n = 2") {
    const auto r = hyqmom_close_general(MomentVector{1.0, 0.0, 1.0, 0.0, 1.0});
    CHECK(r.m_next == doctest::Approx(0.0).scale(1.0));
    CHECK(r.beta == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("k atoms below n") {
    std::mt19937_64 rng(gen::kSeed + 23);
    for (int trial = 0; trial < 200; ++trial) {
      const auto m = gen::atoms(rng, 0, 0.3);  // 1..4 atoms
      const std::size_t n = m.x.size() + 1 + rng() % 3;
      const auto raw = oracle::power_sums(m, 2 * n + 1);
      const auto scale = oracle::absolute_power_sums(m, 2 * n + 1);
      const auto r = hyqmom_close_general(MomentVector(std::vector<double>(raw.begin(), raw.end() - 1)));
      REQUIRE(std::abs(r.m_next - raw[2 * n + 1]) < 1e-10 * scale[2 * n + 1]);
      REQUIRE(r.atoms == m.x.size());
    }
  }
  SUBCASE("many closely spaced atoms up to n = 10") {
    std::mt19937_64 rng(gen::kSeed + 29);
    for (int trial = 0; trial < 2000; ++trial) {
      const auto m = gen::atoms(rng, rng() % 6);  // 1..9 atoms
      const std::size_t k = m.x.size();
      const std::size_t n = k + 1 + rng() % (10 - k);
      const auto raw = oracle::power_sums(m, 2 * n + 1);
      const auto scale = oracle::absolute_power_sums(m, 2 * n + 1);
      const auto r = hyqmom_close_general(MomentVector(std::vector<double>(raw.begin(), raw.end() - 1)));
      REQUIRE(std::abs(r.m_next - raw[2 * n + 1]) < 1e-10 * scale[2 * n + 1]);
      REQUIRE(r.path == (k == 1 ? ClosurePath::SingleAtom : ClosurePath::Quadrature));
      REQUIRE(r.atoms == k);
    }
  }
  SUBCASE("outside moment space") {
    CHECK_THROWS_AS(hyqmom_close_general(MomentVector{1.0, 0.0, 1.0, 0.0, 0.5}), Error);
    CHECK_THROWS_AS(hyqmom_close_general(MomentVector{0.0, 1.0, 0.0}), Error);
    CHECK_THROWS_AS(hyqmom_close_general(MomentVector{1.0, 0.0, -1.0}), Error);
  }
}

TEST_CASE("strict mode refuses boundary input") {
  ClosureOptions strict;
  strict.allow_boundary_fallback = false;
  CHECK_THROWS_AS(hyqmom_close(MomentVector{1.0, 0.0, 1.0, 0.0, 1.0}, strict), Error);
  CHECK_THROWS_AS(hyqmom_close(MomentVector{1.0, 2.0, 4.0}, strict), Error);
  CHECK_NOTHROW(hyqmom_close(MomentVector{1.0, 0.0, 1.0, 0.0, 3.0}, strict));
  CHECK_THROWS_AS(hyqmom_close(MomentVector{1.0, 0.0, 1.0, 0.0}), Error);
}

TEST_CASE("QMOM closure") {
  CHECK(qmom_close(MomentVector{1.0, 0.0, 1.0, 0.0}) == doctest::Approx(1.0));
  for (double s : {-2.0, -0.5, 0.3, 1.7}) CHECK(qmom_close(MomentVector{1.0, 0.0, 1.0, s}) == doctest::Approx(s * s + 1.0));
  std::mt19937_64 rng(gen::kSeed + 24);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    auto m = gen::atoms(rng, n, 0.3);
    m.x.resize(n);
    m.w.resize(n);
    const auto raw = oracle::power_sums(m, 2 * n);
    const auto scale = oracle::absolute_power_sums(m, 2 * n);
    const double got = qmom_close(MomentVector(std::vector<double>(raw.begin(), raw.end() - 1)));
    REQUIRE(std::abs(got - raw[2 * n]) < 1e-9 * scale[2 * n]);
  }
  CHECK_THROWS_AS(qmom_close(MomentVector{1.0, 0.0, 1.0}), Error);
}

TEST_CASE("gamma family") {
  CHECK(gamma_family_close_n2(-1.0, 5.0, 0.0).s5 == doctest::Approx(-10.5));
  CHECK(gamma_family_close_n2(0.0, 4.0, 1.25).s5 == doctest::Approx(2.0 * 1.25 * 3.0));
  CHECK(gamma_family_close_n2(0.0, 4.0, 1.0).strictly_hyperbolic);
  CHECK_FALSE(gamma_family_close_n2(0.0, 4.0, 2.5).strictly_hyperbolic);
  CHECK_THROWS_AS(gamma_family_close_n2(1.0, 2.0, 0.0), Error);

  std::mt19937_64 rng(gen::kSeed + 25);
  std::uniform_real_distribution<double> u3(-2.0, 2.0), uh(0.1, 3.0), ug(-2.4, 2.4);
  for (int trial = 0; trial < 200; ++trial) {
    const double s3 = u3(rng), s4 = uh(rng) + s3 * s3 + 1.0, g = ug(rng);
    const double s5 = gamma_family_close_n2(s3, s4, g).s5;
    // The closure fixes a_2 of the standardized system.
    StandardizedState st = extend(standardized(s3, s4), s5);
    const auto rc = chebyshev(st.standardized_moments());
    REQUIRE(rc.a[2] == doctest::Approx(s3 / 2.0 + g * std::sqrt(4.0 + s3 * s3)).epsilon(1e-9));
    // R_3 roots bound and separate the roots of Q_2.
    const auto r = gamma_family_r3_roots(s3, s4, g);
    const double root = std::sqrt(4.0 + s3 * s3);
    const double qm = 0.5 * (s3 - root), qp = 0.5 * (s3 + root);
    REQUIRE(r[0] < qm);
    REQUIRE(qm < r[1]);
    REQUIRE(r[1] < qp);
    REQUIRE(qp < r[2]);
  }
  const auto r0 = gamma_family_r3_roots(0.0, 3.0, 0.0);
  CHECK(r0[0] == doctest::Approx(-std::sqrt(6.0)));
  CHECK(r0[1] == doctest::Approx(0.0).scale(1.0));
  CHECK(r0[2] == doctest::Approx(std::sqrt(6.0)));
}

TEST_CASE("characteristic polynomial fixtures") {
  const auto n1 = assemble_characteristic(hyqmom_close(gaussian_state(1.0, 0.0, 1.0, 2)));
  require_coefficients(n1.q, {0.0, 1.0});
  require_coefficients(n1.r, {-3.0, 0.0, 1.0});
  require_coefficients(n1.p, {0.0, -3.0, 0.0, 1.0});
  const auto n2 = assemble_characteristic(hyqmom_close(gaussian_state(1.0, 0.0, 1.0, 4)));
  require_coefficients(n2.q, {-1.0, 0.0, 1.0});
  require_coefficients(n2.r, {0.0, -6.0, 0.0, 1.0});
  const auto n3 = assemble_characteristic(hyqmom_close(gaussian_state(1.0, 0.0, 1.0, 6)));
  require_coefficients(n3.r, {7.0, 0.0, -10.0, 0.0, 1.0});
  CHECK_THROWS_AS(assemble_characteristic(hyqmom_close_general(MomentVector{1.0, 2.0, 4.0})), Error);
}

TEST_CASE("characteristic constraints vanish for HyQMOM closures") {
  std::mt19937_64 rng(gen::kSeed + 26);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const StandardizedState st = random_state(rng, n);
    const ClosureResult r = hyqmom_close(st);
    const StandardizedState ext = extend(st, r.m_next);
    double qnorm = 1.0;
    for (std::size_t k = 1; k <= n; ++k) qnorm *= r.rc.b[k];
    const auto [p0, p1, p2] = check_constraints(ext, r);
    CAPTURE(n);
    REQUIRE(std::abs(p0) < 1e-9 * qnorm);
    REQUIRE(std::abs(p1) < 1e-9 * qnorm);
    REQUIRE(std::abs(p2) < 1e-9 * qnorm);
  }
}

TEST_CASE("a perturbed alpha violates the constraints") {
  const StandardizedState st = standardized(-1.0, 5.0);
  const ClosureResult r = hyqmom_close(st);
  const auto bad = assemble_characteristic(r.rc, r.n, r.alpha + 0.1, r.beta);
  const auto [p0, p1, p2] = check_constraints(extend(st, r.m_next), bad.p);
  CHECK(std::abs(p0) + std::abs(p1) + std::abs(p2) > 1e-3);
  CHECK(apply_functional(gaussian_state(1.0, 0.0, 1.0, 4), Polynomial{0.0, 1.0}) == 0.0);
}

TEST_CASE("finite-difference Jacobian spectrum matches Q_n R_{n+1}") {
  CHECK(verify_factorization_fd(MomentVector{1.0, 0.0, 1.0}) < 1e-6);
  const auto spec = fd_jacobian_spectrum(maxwellian_moments(1.0, 0.0, 1.0, 4));
  const std::vector<double> expect{-std::sqrt(6.0), -1.0, 0.0, 1.0, std::sqrt(6.0)};
  REQUIRE(spec.real.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(spec.real[i] == doctest::Approx(expect[i]).scale(1.0).epsilon(1e-6));
  std::mt19937_64 rng(gen::kSeed + 27);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    const MomentVector m(oracle::mixture_moments(gen::mixture(rng), 2 * n));
    CAPTURE(n);
    REQUIRE(verify_factorization_fd(m) < 1e-5);
  }
}

TEST_CASE("eigenvalues interlace for interior input") {
  std::mt19937_64 rng(gen::kSeed + 28);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const MomentVector m(oracle::mixture_moments(gen::mixture(rng), 2 * n));
    const ClosureResult r = hyqmom_close(m);
    REQUIRE(r.interlacing == Interlacing::Strict);
    REQUIRE(interlacing_check(r) == Interlacing::Strict);
  }
}

TEST_CASE("roots of R_3 join those of Q_2 as H_4 vanishes") {
  const double s3 = -1.0;
  const double qm = 0.5 * (s3 - std::sqrt(5.0)), qp = 0.5 * (s3 + std::sqrt(5.0));
  double previous_spread = 0.0;
  for (double h4 : {4.0, 2.0, 1.0, 0.5, 0.1, 1e-3}) {
    const ClosureResult r = hyqmom_close(standardized(s3, h4 + s3 * s3 + 1.0));
    CHECK(r.eigenvalues_q[0] == doctest::Approx(qm));
    CHECK(r.eigenvalues_q[1] == doctest::Approx(qp));
    CHECK(r.interlacing == Interlacing::Strict);
    const double spread = r.eigenvalues_r[2] - r.eigenvalues_r[0];
    if (previous_spread > 0.0) CHECK(spread < previous_spread);
    previous_spread = spread;
  }
  const ClosureResult edge = hyqmom_close(standardized(s3, s3 * s3 + 1.0));
  CHECK(edge.beta == doctest::Approx(0.0).scale(1.0));
  CHECK(interlacing_check(edge, 1e-9) == Interlacing::NonStrict);
}

TEST_CASE("closure commutes with affine velocity changes") {
  std::mt19937_64 rng(gen::kSeed + 29);
  std::uniform_real_distribution<double> shift(-2.0, 2.0), stretch(0.3, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const StandardizedState st = random_state(rng, n);
    const ClosureResult base = hyqmom_close(st);
    StandardizedState moved = st;
    moved.mean = shift(rng);
    moved.variance = std::pow(stretch(rng), 2);
    moved.m0 = 2.5;
    const MomentVector moved_raw = standardized_to_raw(moved);
    const ClosureResult raw = hyqmom_close(moved_raw);
    const double sd = std::sqrt(moved.variance);
    for (std::size_t i = 0; i < base.eigenvalues_r.size(); ++i)
      REQUIRE(raw.eigenvalues_r[i] == doctest::Approx(moved.mean + sd * base.eigenvalues_r[i]).epsilon(1e-8).scale(1.0));
    std::vector<double> extended(moved_raw.values().begin(), moved_raw.values().end());
    extended.push_back(raw.m_next);
    const StandardizedState closed = raw_to_standardized(MomentVector(extended));
    REQUIRE(closed.s.back() == doctest::Approx(base.m_next).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("workspace closure agrees with the full closure") {
  std::mt19937_64 rng(gen::kSeed + 30);
  ClosureWorkspace ws;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const auto mix = gen::mixture(rng);
    const MomentVector m(oracle::mixture_moments(mix, 2 * n));
    const ClosureResult full = hyqmom_close(m);
    const FluxClosure fast = ws.close(m.values());
    REQUIRE(std::abs(fast.m_next - full.m_next) < 1e-10 * oracle::mixture_absolute_scale(mix, 2 * n + 1)[2 * n + 1]);
    // The workspace sweeps in double, the full closure in long double.
    const auto close_to = [](double x, double y) { return std::abs(x - y) <= 1e-8 * std::max(1.0, std::abs(y)); };
    REQUIRE(close_to(fast.lambda_min, full.eigenvalues_r.front()));
    REQUIRE(close_to(fast.lambda_max, full.eigenvalues_r.back()));
    REQUIRE(fast.min_relative_pivot > 0.0);
  }
  const FluxClosure dirac = ws.close(std::vector<double>{2.0, 2.0, 2.0});
  CHECK(dirac.path == ClosurePath::SingleAtom);
  CHECK(dirac.lambda_min == 1.0);
  CHECK(dirac.lambda_max == 1.0);
  CHECK_THROWS_AS(ws.close(std::vector<double>{1.0, 0.0, 1.0, 0.0, 0.5}), Error);
}
