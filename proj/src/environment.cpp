#include "fpp/environment.hpp"

#include <bit>
#include <cmath>

#include "fpp/passage_value.hpp"

namespace fpp {

Environment Environment::from_mask(std::size_t edge_count, std::uint64_t mask) {
  if (edge_count < 64 && (mask >> edge_count) != 0) {
    throw ContractViolation("mask has bits beyond edge count " + std::to_string(edge_count));
  }
  Environment env(edge_count);
  if (!env.words_.empty()) env.words_[0] = mask;
  return env;
}

Environment Environment::constant(std::size_t edge_count, Letter letter) {
  Environment env(edge_count);
  if (letter == Letter::b) {
    for (std::size_t e = 0; e < edge_count; ++e) env.set(static_cast<EdgeId>(e), Letter::b);
  }
  return env;
}

Environment Environment::from_hex(std::size_t edge_count, std::string_view hex) {
  Environment env(edge_count);
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty()) throw ConfigError("empty environment hex string");
  std::size_t bit = 0;
  for (auto it = hex.rbegin(); it != hex.rend(); ++it, bit += 4) {
    const char c = *it;
    int digit = 0;
    if (c >= '0' && c <= '9') {
      digit = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      digit = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      digit = c - 'A' + 10;
    } else {
      throw ConfigError("invalid hex digit '" + std::string(1, c) + "' in environment");
    }
    for (int k = 0; k < 4; ++k) {
      if (((digit >> k) & 1) == 0) continue;
      if (bit + k >= edge_count) {
        throw ConfigError("environment hex sets bit " + std::to_string(bit + k) + " but the lattice has " +
                          std::to_string(edge_count) + " edges");
      }
      env.set(static_cast<EdgeId>(bit + k), Letter::b);
    }
  }
  return env;
}

std::size_t Environment::count_b() const {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::uint64_t Environment::mask() const {
  if (size_ > 64) throw ContractViolation("mask() requires at most 64 edges");
  return words_.empty() ? 0 : words_[0];
}

std::string Environment::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t digits = size_ == 0 ? 1 : (size_ + 3) / 4;
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    const std::size_t bit = 4 * d;
    unsigned value = 0;
    for (std::size_t k = 0; k < 4 && bit + k < size_; ++k) {
      if (is_b(static_cast<EdgeId>(bit + k))) value |= 1U << k;
    }
    out[digits - 1 - d] = kDigits[value];
  }
  return out;
}

std::size_t EnvironmentHash::operator()(const Environment& env) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ env.size();
  for (auto w : env.words()) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

double prob_of(const Environment& env, double p) {
  const auto nb = env.count_b();
  const auto na = env.size() - nb;
  return std::pow(p, static_cast<double>(na)) * std::pow(1.0 - p, static_cast<double>(nb));
}

}  // namespace fpp
