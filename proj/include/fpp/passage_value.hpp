#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fpp {

// Raised for invalid lattice specs, unknown names and similar user errors.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Passage times, weights and derivatives are integers on the common scale
/// `Weights::scale()`; one unit is 1/scale.
using Units = std::int64_t;

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Accepts "p/q" or an integer string.
  static Rational parse(std::string_view text);
  static Rational reduced(std::int64_t num, std::int64_t den);

  std::string str() const;
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rational& x, const Rational& y) {
    return x.num == y.num && x.den == y.den;
  }
  friend std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
    const __int128 lhs = static_cast<__int128>(x.num) * y.den;
    const __int128 rhs = static_cast<__int128>(y.num) * x.den;
    return lhs <=> rhs;
  }
};

/// The two-letter weight alphabet {a, b}, held exactly on a common integer
/// scale so that ties between paths are detected without rounding.
class Weights {
 public:
  Weights() : Weights(Rational{1, 1}, Rational{2, 1}) {}
  Weights(Rational a, Rational b);

  Rational a() const { return a_; }
  Rational b() const { return b_; }
  Units a_units() const { return a_units_; }
  Units b_units() const { return b_units_; }
  Units gap() const { return b_units_ - a_units_; }
  Units scale() const { return scale_; }

  Rational to_rational(Units u) const { return Rational::reduced(u, scale_); }
  double to_double(Units u) const {
    return static_cast<double>(u) / static_cast<double>(scale_);
  }
  /// Always "num/den", reduced.
  std::string format(Units u) const;

  friend bool operator==(const Weights& x, const Weights& y) {
    return x.a_ == y.a_ && x.b_ == y.b_;
  }

 private:
  Rational a_, b_;
  Units scale_ = 1;
  Units a_units_ = 1;
  Units b_units_ = 2;
};

/// Exact passage value: the composition (count_a, count_b) of one attaining
/// path together with its scaled total. Ordering and equality look at the
/// total only; distinct compositions may tie.
struct PassageValue {
  std::int64_t count_a = 0;
  std::int64_t count_b = 0;
  Units units = 0;

  static PassageValue of(std::int64_t count_a, std::int64_t count_b, const Weights& w) {
    return {count_a, count_b, count_a * w.a_units() + count_b * w.b_units()};
  }
  static constexpr PassageValue infinity() {
    return {0, 0, std::numeric_limits<Units>::max()};
  }
  bool is_infinite() const { return units == std::numeric_limits<Units>::max(); }

  PassageValue& operator+=(const PassageValue& other) {
    if (is_infinite() || other.is_infinite()) {
      *this = infinity();
    } else {
      count_a += other.count_a;
      count_b += other.count_b;
      units += other.units;
    }
    return *this;
  }
  friend PassageValue operator+(PassageValue x, const PassageValue& y) { return x += y; }

  friend bool operator==(const PassageValue& x, const PassageValue& y) { return x.units == y.units; }
  friend std::strong_ordering operator<=>(const PassageValue& x, const PassageValue& y) {
    return x.units <=> y.units;
  }
};

}  // namespace fpp
