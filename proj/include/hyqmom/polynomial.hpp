#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hyqmom {

/// Real polynomial stored by ascending degree. Trailing zeros are trimmed so
/// that `degree()` is exact; the zero polynomial has degree 0 and coefficient
/// {0}.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs)
      : Polynomial(std::vector<double>(coeffs)) {}

  static Polynomial monomial(std::size_t degree);

  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](std::size_t i) const noexcept {
    return i < coeffs_.size() ? coeffs_[i] : 0.0;
  }
  double leading() const noexcept { return coeffs_.back(); }

  double operator()(double x) const noexcept;
  Polynomial derivative() const;
  Polynomial times_x() const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  /// Largest coefficient magnitude.
  double max_abs_coeff() const noexcept;

 private:
  void trim();
  std::vector<double> coeffs_;
};

/// Polynomial whose leading coefficient is exactly one.
class MonicPolynomial {
 public:
  /// Throws InvalidArgument unless the leading coefficient equals 1.
  explicit MonicPolynomial(Polynomial p);
  MonicPolynomial() : poly_({1.0}) {}

  std::size_t degree() const noexcept { return poly_.degree(); }
  std::span<const double> coeffs() const noexcept { return poly_.coeffs(); }
  double operator[](std::size_t i) const noexcept { return poly_[i]; }
  double operator()(double x) const noexcept { return poly_(x); }

  const Polynomial& polynomial() const noexcept { return poly_; }
  operator const Polynomial&() const noexcept { return poly_; }

  friend MonicPolynomial operator*(const MonicPolynomial& a, const MonicPolynomial& b) {
    return MonicPolynomial(a.poly_ * b.poly_);
  }

 private:
  Polynomial poly_;
};

}  // namespace hyqmom
