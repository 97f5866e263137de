#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace iflow {

// Mixed-radix positional encoding. The first digit is the most significant:
//   index = sum_t digit_t * prod_{t' > t} radix_t'
// Every history tuple and every trajectory in the library uses this order,
// with digits listed oldest first.

/// Product of all radices; 1 for an empty list.
std::uint64_t radix_product(std::span<const int> radices);

/// Same as radix_product but returns 0 when the product would exceed `cap`.
std::uint64_t radix_product_capped(std::span<const int> radices, std::uint64_t cap);

std::uint64_t encode_mixed_radix(std::span<const int> digits, std::span<const int> radices);

void decode_mixed_radix(std::uint64_t index, std::span<const int> radices, std::span<int> digits);

std::vector<int> decode_mixed_radix(std::uint64_t index, std::span<const int> radices);

/// Place value of every digit (stride of the last digit is 1).
std::vector<std::uint64_t> mixed_radix_strides(std::span<const int> radices);

}  // namespace iflow
