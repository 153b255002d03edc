#include "hao/discrete_state.hpp"

#include <bit>

namespace hao {

std::size_t DiscreteState::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::string DiscreteState::hex(std::size_t width) const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t nibbles = width == 0 ? 1 : (width + 3) / 4;
  std::string out(nibbles, '0');
  for (std::size_t k = 0; k < nibbles; ++k) {
    unsigned v = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t i = k * 4 + b;
      if (i < width && test(i)) v |= 1u << b;
    }
    out[nibbles - 1 - k] = kDigits[v];
  }
  return out;
}

std::string DiscreteState::bits(std::size_t width) const {
  std::string out(width, '0');
  for (std::size_t i = 0; i < width; ++i)
    if (test(i)) out[i] = '1';
  return out;
}

}  // namespace hao
