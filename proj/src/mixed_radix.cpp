#include "iflow/mixed_radix.hpp"

#include <cassert>
#include <limits>
#include <stdexcept>

namespace iflow {

std::uint64_t radix_product(std::span<const int> radices) {
  const auto product = radix_product_capped(radices, std::numeric_limits<std::uint64_t>::max());
  if (product == 0 && !radices.empty()) {
    for (int r : radices) {
      if (r == 0) return 0;
    }
    throw std::overflow_error("mixed-radix product overflows 64 bits");
  }
  return product;
}

std::uint64_t radix_product_capped(std::span<const int> radices, std::uint64_t cap) {
  std::uint64_t product = 1;
  for (int r : radices) {
    if (r <= 0) return 0;
    const auto radix = static_cast<std::uint64_t>(r);
    if (product > cap / radix) return 0;
    product *= radix;
  }
  return product;
}

std::uint64_t encode_mixed_radix(std::span<const int> digits, std::span<const int> radices) {
  assert(digits.size() == radices.size());
  std::uint64_t index = 0;
  for (std::size_t t = 0; t < digits.size(); ++t) {
    assert(digits[t] >= 0 && digits[t] < radices[t]);
    index = index * static_cast<std::uint64_t>(radices[t]) + static_cast<std::uint64_t>(digits[t]);
  }
  return index;
}

void decode_mixed_radix(std::uint64_t index, std::span<const int> radices, std::span<int> digits) {
  assert(digits.size() == radices.size());
  for (std::size_t t = radices.size(); t-- > 0;) {
    const auto radix = static_cast<std::uint64_t>(radices[t]);
    digits[t] = static_cast<int>(index % radix);
    index /= radix;
  }
}

std::vector<int> decode_mixed_radix(std::uint64_t index, std::span<const int> radices) {
  std::vector<int> digits(radices.size());
  decode_mixed_radix(index, radices, digits);
  return digits;
}

std::vector<std::uint64_t> mixed_radix_strides(std::span<const int> radices) {
  std::vector<std::uint64_t> strides(radices.size());
  std::uint64_t stride = 1;
  for (std::size_t t = radices.size(); t-- > 0;) {
    strides[t] = stride;
    stride *= static_cast<std::uint64_t>(radices[t]);
  }
  return strides;
}

}  // namespace iflow
