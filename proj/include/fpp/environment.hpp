#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fpp {

using EdgeId = int;

/// Bit value of an edge: 0 is weight a, 1 is weight b.
enum class Letter : std::uint8_t { a = 0, b = 1 };

/// One point of {a,b}^W, stored as a bitmask with bit e set when edge e
/// carries weight b. The all-zero mask is the all-a environment.
class Environment {
 public:
  Environment() = default;
  explicit Environment(std::size_t edge_count) : size_(edge_count), words_((edge_count + 63) / 64, 0) {}

  static Environment from_mask(std::size_t edge_count, std::uint64_t mask);
  static Environment constant(std::size_t edge_count, Letter letter);
  /// Lowercase or uppercase hex, least-significant bit is edge 0. Digits
  /// beyond the edge count must be zero.
  static Environment from_hex(std::size_t edge_count, std::string_view hex);

  std::size_t size() const { return size_; }
  bool is_b(EdgeId e) const { return (words_[static_cast<std::size_t>(e) >> 6] >> (e & 63)) & 1U; }
  Letter letter(EdgeId e) const { return is_b(e) ? Letter::b : Letter::a; }
  void set(EdgeId e, Letter value) {
    const auto bit = std::uint64_t{1} << (e & 63);
    auto& word = words_[static_cast<std::size_t>(e) >> 6];
    word = value == Letter::b ? (word | bit) : (word & ~bit);
  }

  std::size_t count_b() const;
  std::size_t count_a() const { return size_ - count_b(); }

  /// Requires size() <= 64.
  std::uint64_t mask() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

  /// Fixed width: ceil(size/4) digits (at least one).
  std::string to_hex() const;

  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct EnvironmentHash {
  std::size_t operator()(const Environment& env) const noexcept;
};

/// p^(#a edges) (1-p)^(#b edges).
double prob_of(const Environment& env, double p);

}  // namespace fpp
