#include "uol/types.hpp"

#include <algorithm>

#include "uol/error.hpp"

namespace uol {

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string to_string(i128 v) {
  if (v < 0) return "-" + to_string(static_cast<u128>(-(v + 1)) + 1);
  return to_string(static_cast<u128>(v));
}

u128 parse_u128(const std::string& text) {
  if (text.empty()) throw InvalidInput("empty integer literal");
  u128 v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw InvalidInput("not a non-negative integer: '" + text + "'");
    }
    const u128 digit = static_cast<u128>(c - '0');
    if (v > (kU128Max - digit) / 10) {
      throw RangeError("integer literal exceeds 128 bits: '" + text + "'");
    }
    v = v * 10 + digit;
  }
  return v;
}

u64 checked_u64(u128 v, const char* what) {
  if (v > kU64Max) {
    throw RangeError(std::string(what) + " exceeds 64 bits: " + to_string(v));
  }
  return static_cast<u64>(v);
}

}  // namespace uol
