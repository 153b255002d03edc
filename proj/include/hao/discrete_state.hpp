#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace hao {

/// Assignment of Boolean fluents. Up to 128 fluents are supported.
class DiscreteState {
 public:
  static constexpr std::size_t kMaxFluents = 128;

  constexpr DiscreteState() = default;

  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i, bool value = true) {
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    if (value)
      words_[i / 64] |= bit;
    else
      words_[i / 64] &= ~bit;
  }

  DiscreteState operator&(const DiscreteState& o) const {
    DiscreteState r;
    for (std::size_t w = 0; w < kWords; ++w) r.words_[w] = words_[w] & o.words_[w];
    return r;
  }
  DiscreteState operator|(const DiscreteState& o) const {
    DiscreteState r;
    for (std::size_t w = 0; w < kWords; ++w) r.words_[w] = words_[w] | o.words_[w];
    return r;
  }
  DiscreteState operator~() const {
    DiscreteState r;
    for (std::size_t w = 0; w < kWords; ++w) r.words_[w] = ~words_[w];
    return r;
  }

  bool none() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }
  std::size_t count() const;

  /// Hex string of the first `width` bits, most significant fluent first.
  std::string hex(std::size_t width) const;
  /// Binary string of the first `width` bits, fluent 0 first.
  std::string bits(std::size_t width) const;

  friend bool operator==(const DiscreteState&, const DiscreteState&) = default;
  // Canonical order: compare the bit vector as an integer, high word first.
  friend std::strong_ordering operator<=>(const DiscreteState& a, const DiscreteState& b) {
    for (std::size_t w = kWords; w-- > 0;) {
      if (a.words_[w] != b.words_[w]) return a.words_[w] <=> b.words_[w];
    }
    return std::strong_ordering::equal;
  }

  std::size_t hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto w : words_) h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }

 private:
  static constexpr std::size_t kWords = kMaxFluents / 64;
  std::array<std::uint64_t, kWords> words_{};
};

/// Matches states whose fluents agree with `value` on every bit of `mask`.
struct StatePattern {
  DiscreteState mask;
  DiscreteState value;

  bool matches(const DiscreteState& n) const { return (n & mask) == value; }
};

/// Discrete effect of an outcome: n' = (n & ~clear) | set.
struct StateEffect {
  DiscreteState set;
  DiscreteState clear;

  DiscreteState apply(const DiscreteState& n) const { return (n & ~clear) | set; }
};

}  // namespace hao

template <>
struct std::hash<hao::DiscreteState> {
  std::size_t operator()(const hao::DiscreteState& s) const noexcept { return s.hash(); }
};
