#pragma once

#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace streamdist {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// The exact value of a finite double.
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::domain_error("exact_rational: value is not finite");
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  // mantissa * 2^53 is an integer for every finite double.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational out(scaled);
  if (exponent >= 0) {
    out *= Rational(BigInt(1) << exponent);
  } else {
    out /= Rational(BigInt(1) << -exponent);
  }
  return out;
}

/// Compensated summation.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  KahanSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace streamdist
