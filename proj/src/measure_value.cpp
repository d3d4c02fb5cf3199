#include "udlab/measure_value.hpp"

#include <stdexcept>

namespace udlab {

using boost::multiprecision::cpp_int;

MeasureValue MeasureValue::dyadic(std::size_t bits) {
  cpp_int den = 1;
  den <<= bits;
  return MeasureValue{Rational(cpp_int(1), den)};
}

MeasureValue MeasureValue::fraction(long long num, long long den) {
  if (den == 0) throw std::domain_error("MeasureValue: zero denominator");
  return MeasureValue{Rational(cpp_int(num), cpp_int(den))};
}

MeasureValue MeasureValue::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return MeasureValue{Rational(cpp_int(text))};
    cpp_int num(text.substr(0, slash));
    cpp_int den(text.substr(slash + 1));
    if (den == 0) throw std::domain_error("zero denominator");
    return MeasureValue{Rational(num, den)};
  } catch (const std::exception&) {
    throw std::invalid_argument("not a fraction: '" + text + "'");
  }
}

bool MeasureValue::is_dyadic() const {
  const cpp_int den = boost::multiprecision::denominator(value_);
  return (den & (den - 1)) == 0;
}

std::string MeasureValue::str() const {
  return boost::multiprecision::numerator(value_).str() + "/" +
         boost::multiprecision::denominator(value_).str();
}

MeasureValue& MeasureValue::operator/=(const MeasureValue& o) {
  if (o.value_ == 0) throw std::domain_error("MeasureValue: division by zero");
  value_ /= o.value_;
  return *this;
}

}  // namespace udlab
