#pragma once

#include <compare>
#include <cstddef>
#include <ostream>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace udlab {

/// Exact non-negative rational. All measure arithmetic goes through this type;
/// there is no conversion to or from floating point.
class MeasureValue {
 public:
  using Rational = boost::multiprecision::cpp_rational;

  MeasureValue() = default;
  explicit MeasureValue(Rational value) : value_(std::move(value)) {}

  static MeasureValue zero() { return MeasureValue{}; }
  static MeasureValue one() { return MeasureValue{Rational(1)}; }
  /// 2^-bits
  static MeasureValue dyadic(std::size_t bits);
  static MeasureValue fraction(long long num, long long den);
  /// Parses "n/d" (or a bare integer).
  static MeasureValue parse(const std::string& text);

  const Rational& value() const { return value_; }
  bool is_zero() const { return value_ == 0; }
  /// True when the denominator is a power of two.
  bool is_dyadic() const;

  /// Always "numerator/denominator", reduced; zero prints as "0/1".
  std::string str() const;

  MeasureValue& operator+=(const MeasureValue& o) { value_ += o.value_; return *this; }
  MeasureValue& operator-=(const MeasureValue& o) { value_ -= o.value_; return *this; }
  MeasureValue& operator*=(const MeasureValue& o) { value_ *= o.value_; return *this; }
  MeasureValue& operator/=(const MeasureValue& o);

  friend MeasureValue operator+(MeasureValue a, const MeasureValue& b) { return a += b; }
  friend MeasureValue operator-(MeasureValue a, const MeasureValue& b) { return a -= b; }
  friend MeasureValue operator*(MeasureValue a, const MeasureValue& b) { return a *= b; }
  friend MeasureValue operator/(MeasureValue a, const MeasureValue& b) { return a /= b; }

  friend bool operator==(const MeasureValue& a, const MeasureValue& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const MeasureValue& a, const MeasureValue& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const MeasureValue& v) { return os << v.str(); }

 private:
  Rational value_{0};
};

}  // namespace udlab
