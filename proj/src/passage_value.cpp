#include "fpp/passage_value.hpp"

#include <charconv>
#include <numeric>

namespace fpp {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw ConfigError("invalid rational '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return {parse_int(text, text), 1};
  const auto num = parse_int(text.substr(0, slash), text);
  const auto den = parse_int(text.substr(slash + 1), text);
  if (den == 0) throw ConfigError("rational '" + std::string(text) + "' has zero denominator");
  return reduced(num, den);
}

Rational Rational::reduced(std::int64_t num, std::int64_t den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

std::string Rational::str() const { return std::to_string(num) + "/" + std::to_string(den); }

Weights::Weights(Rational a, Rational b) : a_(Rational::reduced(a.num, a.den)), b_(Rational::reduced(b.num, b.den)) {
  if (a_.num <= 0) throw ConfigError("weight a must be positive (got " + a_.str() + ")");
  if (!(a_ < b_)) throw ConfigError("weights must satisfy a < b (got a=" + a_.str() + ", b=" + b_.str() + ")");
  scale_ = std::lcm(a_.den, b_.den);
  a_units_ = a_.num * (scale_ / a_.den);
  b_units_ = b_.num * (scale_ / b_.den);
}

std::string Weights::format(Units u) const { return to_rational(u).str(); }

}  // namespace fpp
