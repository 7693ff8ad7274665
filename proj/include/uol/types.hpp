#pragma once

#include <cstdint>
#include <string>

namespace uol {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr u64 kU64Max = ~u64{0};
inline constexpr u128 kU128Max = ~u128{0};

std::string to_string(u128 v);
std::string to_string(i128 v);

// Parses a non-negative decimal string into a 128-bit value; throws InvalidInput.
u128 parse_u128(const std::string& text);

// Narrowing with a RangeError when the value does not fit.
u64 checked_u64(u128 v, const char* what);

}  // namespace uol
