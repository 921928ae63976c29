#include <doctest.h>

#include "hyqmom/error.hpp"
#include "hyqmom/polynomial.hpp"

using hyqmom::MonicPolynomial;
using hyqmom::Polynomial;

TEST_CASE("trailing zeros are trimmed") {
  const Polynomial p{1.0, 2.0, 0.0, 0.0};
  CHECK(p.degree() == 1);
  CHECK(Polynomial{}.degree() == 0);
  CHECK(Polynomial{0.0, 0.0}.coeffs().size() == 1);
}

TEST_CASE("evaluation, derivative and products") {
  const Polynomial p{-3.0, 0.0, 1.0};  // X^2 - 3
  CHECK(p(2.0) == doctest::Approx(1.0));
  CHECK(p.derivative()(5.0) == doctest::Approx(10.0));
  const Polynomial x{0.0, 1.0};
  const Polynomial p3 = x * p;
  CHECK(p3.degree() == 3);
  CHECK(p3[1] == -3.0);
  CHECK(p3[3] == 1.0);
  CHECK(p.times_x()[3] == 1.0);
  CHECK((p - p).degree() == 0);
  CHECK((2.0 * p)[0] == -6.0);
  CHECK(p[17] == 0.0);
  CHECK(Polynomial{1.0, -7.5}.max_abs_coeff() == 7.5);
}

TEST_CASE("monic wrapper rejects other leading coefficients") {
  CHECK_THROWS_AS(MonicPolynomial(Polynomial{0.0, 2.0}), hyqmom::Error);
  const MonicPolynomial q(Polynomial{-1.0, 0.0, 1.0});
  const MonicPolynomial r = q * q;
  CHECK(r.degree() == 4);
  CHECK(r[2] == -2.0);
  CHECK(Polynomial::monomial(3)[3] == 1.0);
}
