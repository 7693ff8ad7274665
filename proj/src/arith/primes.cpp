#include <algorithm>
#include <cmath>
#include <string>

#include "uol/arith.hpp"

namespace uol {

bool PrimeTable::contains(u64 n) const {
  if (n > 0xFFFFFFFFull) return false;
  return std::binary_search(primes_.begin(), primes_.end(),
                            static_cast<u32>(n));
}

std::span<const u32> PrimeTable::range(u64 lo, u64 hi) const {
  if (lo > hi || lo > 0xFFFFFFFFull) return {};
  const u32 hi32 = static_cast<u32>(std::min<u64>(hi, 0xFFFFFFFFull));
  auto first = std::lower_bound(primes_.begin(), primes_.end(),
                                static_cast<u32>(lo));
  auto last = std::upper_bound(first, primes_.end(), hi32);
  return {&*primes_.begin() + (first - primes_.begin()),
          static_cast<std::size_t>(last - first)};
}

PrimeTable sieve_primes(u64 limit) {
  if (limit < 2 || limit > kSieveMaxLimit) {
    throw ResourceLimit("sieve limit " + std::to_string(limit) +
                        " outside [2, " + std::to_string(kSieveMaxLimit) +
                        "]");
  }
  // Base primes up to sqrt(limit) by a plain sieve.
  const u64 root = static_cast<u64>(std::sqrt(static_cast<double>(limit))) + 1;
  std::vector<bool> small_composite(root + 1, false);
  std::vector<u32> base;
  for (u64 i = 3; i <= root; i += 2) {
    if (small_composite[i]) continue;
    base.push_back(static_cast<u32>(i));
    for (u64 j = i * i; j <= root; j += 2 * i) small_composite[j] = true;
  }

  std::vector<u32> primes;
  const double estimate =
      1.26 * static_cast<double>(limit) / std::log(static_cast<double>(limit));
  primes.reserve(static_cast<std::size_t>(estimate) + 16);
  primes.push_back(2);

  // Segment over odd numbers: index i stands for lo + 2i.
  constexpr u64 kSegmentOdds = u64{1} << 15;
  std::vector<unsigned char> composite(kSegmentOdds);
  std::vector<u64> next(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    next[k] = static_cast<u64>(base[k]) * base[k];
  }
  for (u64 lo = 3; lo <= limit; lo += 2 * kSegmentOdds) {
    const u64 hi = std::min(limit, lo + 2 * kSegmentOdds - 1);
    const u64 count = (hi - lo) / 2 + 1;
    std::fill(composite.begin(), composite.begin() + count, 0);
    for (std::size_t k = 0; k < base.size(); ++k) {
      const u64 p = base[k];
      u64 j = next[k];
      for (; j <= hi; j += 2 * p) composite[(j - lo) / 2] = 1;
      next[k] = j;
    }
    for (u64 i = 0; i < count; ++i) {
      if (!composite[i]) primes.push_back(static_cast<u32>(lo + 2 * i));
    }
  }
  return PrimeTable(limit, std::move(primes));
}

namespace {

bool miller_rabin_witness(u64 n, u64 d, unsigned r, u64 a) {
  a %= n;
  if (a == 0) return false;
  u64 x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (unsigned i = 1; i < r; ++i) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    if (n % p == 0) return n == p;
  }
  if (n < 41 * 41) return true;
  u64 d = n - 1;
  unsigned r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // Sinclair's seven bases are a proven witness set below 2^64.
  for (u64 a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull,
                1795265022ull}) {
    if (miller_rabin_witness(n, d, r, a)) return false;
  }
  return true;
}

}  // namespace uol
