#include <algorithm>
#include <cmath>
#include <thread>

#include "runner.hpp"
#include "uol/density_lab.hpp"

namespace uol {

namespace {

constexpr u64 kPrimeChunk = u64{1} << 16;
constexpr u64 kCompositeChunk = u64{1} << 12;

void check_range(const ExperimentConfig& c, u64 lo, u64 hi, u64 default_cap,
                 const char* what) {
  if (lo < 2 || lo > hi) {
    throw InvalidInput(std::string(what) + " range [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "] is empty or starts below 2");
  }
  const u64 cap = c.max_limit != 0 ? c.max_limit : default_cap;
  if (hi > cap) {
    throw ResourceLimit(std::string(what) + " limit " + std::to_string(hi) +
                        " exceeds the cap " + std::to_string(cap) +
                        " (raise max_limit to override)");
  }
}

// Static block partition; every index is processed exactly once.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(
                                                         std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * block; i < std::min(n, (w + 1) * block); ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void account_prime(ExperimentReport& part, const PrimeOrderRecord& rec,
                   const ExperimentConfig& config) {
  const u32 first = part.prime_decades.front().decade;
  PrimeDecadeRow& row = part.prime_decades[detail::decade_of(rec.p) - first];
  const double p = static_cast<double>(rec.p);
  ++row.primes;
  if (static_cast<double>(rec.ord) < p / config.f(rec.p)) ++row.low_order;
  if (rec.is_bad) {
    ++row.bad;
    part.bad_primes.push_back(rec.p);
  }
  if (rec.cls == PrimeClass::kRamified) {
    ++row.ramified;
  } else {
    const u64 index = *rec.index;
    ++part.index_histogram[index];
    for (auto& c : part.chebotarev) {
      ++c.unramified;
      if (index % c.n == 0) ++c.hits;
    }
  }
  if (config.keep_records) part.prime_records.push_back(rec);
}

}  // namespace

ExperimentReport scan_primes_range(const ExperimentConfig& config, u64 lo,
                                   u64 hi, const ScanOptions& options) {
  config.validate();
  if (!config.matrix) throw InvalidInput("prime scans need a matrix");
  check_range(config, lo, hi, kPrimeScanCap, "prime scan");
  const auto ctx = detail::matrix_context(*config.matrix);
  const PrimeTable table = sieve_primes(hi);
  const FactorFn factor = [&table](u64 n) { return factorize_with_table(n, table); };

  return detail::run_chunked(
      ReportKind::kPrimeScan, config, lo, hi, kPrimeChunk, options.workers,
      [&](u64 c_lo, u64 c_hi) {
        ExperimentReport part =
            detail::empty_report(ReportKind::kPrimeScan, config, c_lo, c_hi);
        for (u32 p : table.range(c_lo, c_hi)) {
          account_prime(part, matrix_order_mod_p(ctx.a, ctx.fd, p, factor), config);
        }
        return part;
      });
}

ExperimentReport scan_primes(const ExperimentConfig& config,
                             const ScanOptions& options) {
  return scan_primes_range(config, 2, config.limit, options);
}

namespace {

struct PrimeInfo {
  u64 ord = 0;  // 0: p divides the base, order undefined
  PrimeClass cls = PrimeClass::kSplit;
  bool bad = false;
};

// Smallest prime factor of every n <= limit.
std::vector<u32> smallest_factors(u64 limit, const PrimeTable& table) {
  std::vector<u32> spf(limit + 1, 0);
  for (u32 p : table.primes()) {
    if (static_cast<u64>(p) * p > limit) {
      if (spf[p] == 0) spf[p] = p;
      continue;
    }
    for (u64 m = p; m <= limit; m += p) {
      if (spf[m] == 0) spf[m] = p;
    }
  }
  return spf;
}

FactoredInteger factor_with_spf(u64 n, const std::vector<u32>& spf) {
  std::vector<PrimePower> factors;
  const u64 value = n;
  while (n > 1) {
    const u32 p = spf[n];
    u32 e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    factors.push_back({p, e});
  }
  return FactoredInteger::from_trusted(value, std::move(factors));
}

}  // namespace

ExperimentReport scan_composites_range(const ExperimentConfig& config, u64 lo,
                                       u64 hi, const ScanOptions& options) {
  config.validate();
  check_range(config, lo, hi, kCompositeScanCap, "composite scan");

  std::optional<detail::MatrixContext> ctx;
  if (config.matrix) ctx = detail::matrix_context(*config.matrix);
  const i64 b = config.base.value_or(0);

  const PrimeTable table = sieve_primes(std::max<u64>(hi, 2));
  const std::vector<u32> spf = smallest_factors(hi, table);
  const FactorFn factor = [&table](u64 n) { return factorize_with_table(n, table); };

  // Per-prime orders for every p <= hi, indexed by position in the table.
  const auto primes = table.primes();
  std::vector<PrimeInfo> info(primes.size());
  parallel_for(primes.size(), options.workers, [&](std::size_t i) {
    const u64 p = primes[i];
    if (ctx) {
      const auto rec = matrix_order_mod_p(ctx->a, ctx->fd, p, factor);
      info[i] = {rec.ord, rec.cls, rec.is_bad};
    } else if (reduce_mod(b, p) != 0) {
      const auto rec = integer_order_mod_p(b, p, factor);
      info[i] = {rec.ord, PrimeClass::kSplit, rec.is_bad};
    }
  });
  auto lookup = [&](u64 p) -> const PrimeInfo& {
    const auto it = std::lower_bound(primes.begin(), primes.end(), p);
    return info[static_cast<std::size_t>(it - primes.begin())];
  };

  const double exponent = 1.0 - config.epsilon;
  const bool prop11_applies = config.limit >= 16;

  return detail::run_chunked(
      ReportKind::kCompositeScan, config, lo, hi, kCompositeChunk,
      options.workers, [&](u64 c_lo, u64 c_hi) {
        ExperimentReport part =
            detail::empty_report(ReportKind::kCompositeScan, config, c_lo, c_hi);
        const u32 first = part.composite_decades.front().decade;
        auto& cs = part.composite;
        for (u64 n = c_lo; n <= c_hi; ++n) {
          CompositeDecadeRow& row = part.composite_decades[detail::decade_of(n) - first];
          const FactoredInteger fac = factor_with_spf(n, spf);

          bool defined = true;
          for (const auto& pp : fac.factors()) {
            if (lookup(static_cast<u64>(pp.prime)).ord == 0) defined = false;
          }
          if (!defined) {
            ++row.skipped;
            continue;
          }

          CompositeOrderRecord rec;
          if (ctx) {
            rec = matrix_order_mod_N(ctx->a, fac, ctx->fd, [&](u64 p) {
              const PrimeInfo& pi = lookup(p);
              PrimeOrderRecord pr;
              pr.p = p;
              pr.cls = pi.cls;
              pr.ord = pi.ord;
              pr.is_bad = pi.bad;
              return pr;
            });
          } else {
            rec = integer_order_composite(b, fac, [&](u64 p) {
              const PrimeInfo& pi = lookup(p);
              IntegerOrderRecord ir;
              ir.p = p;
              ir.ord = pi.ord;
              ir.index = (p - 1) / pi.ord;
              ir.is_bad = pi.bad;
              return ir;
            });
          }

          ++row.scanned;
          const bool meets = static_cast<double>(rec.ord) >=
                             std::pow(static_cast<double>(n), exponent);
          if (meets) ++row.meets_threshold;

          ++cs.lambda_ratio_bins[static_cast<std::size_t>(10 * rec.lambda / n)];
          if (cs.lambda_ratio_min_N == 0 ||
              static_cast<u128>(rec.lambda) * cs.lambda_ratio_min_N <
                  static_cast<u128>(cs.lambda_ratio_min_lambda) * n) {
            cs.lambda_ratio_min_N = n;
            cs.lambda_ratio_min_lambda = rec.lambda;
          }
          ++cs.square_part_histogram[rec.s];
          if (rec.s == 1) ++cs.squarefree;
          if (rec.N_B == 1) ++cs.good_only;

          // ord_N >= floor(lambda(N)/N * prod ord_p), ramified p left out.
          BigInt product = rec.lambda;
          std::map<u64, u64> per_prime;
          for (const auto& lo_rec : rec.local) {
            per_prime[lo_rec.p] = lo_rec.ord_p;
            if (!lo_rec.ramified) product *= lo_rec.ord_p;
          }
          ++cs.inequality_checked;
          if (product >= (BigInt(to_string(rec.ord)) + 1) * n) {
            ++cs.inequality_violations;
            if (cs.inequality_violation_examples.size() < 10) {
              cs.inequality_violation_examples.push_back(n);
            }
          }
          if (prop11_applies) {
            ++cs.prop11_checked;
            if (static_cast<double>(rec.ord) < prop11_bound(rec, per_prime, config.limit)) {
              ++cs.prop11_violations;
            }
          }

          if (config.keep_records) {
            part.composite_records.push_back(
                {n, rec.ord, rec.lambda, rec.s, rec.N_G, rec.N_B, rec.d0, meets});
          }
        }
        return part;
      });
}

ExperimentReport scan_composites(const ExperimentConfig& config,
                                 const ScanOptions& options) {
  return scan_composites_range(config, 2, config.limit, options);
}

ChebotarevRatio chebotarev_ratio(const ExperimentReport& scan, u64 n) {
  for (const auto& row : scan.chebotarev) {
    if (row.n == n) return {row.empirical, row.predicted_lower, row.predicted_upper};
  }
  throw InvalidInput("n = " + std::to_string(n) + " was not part of the scan's n-list");
}

ChebotarevRatio chebotarev_ratio(const ExperimentConfig& config, u64 n,
                                 const ScanOptions& options) {
  ExperimentConfig c = config;
  c.n_list = {n};
  c.keep_records = false;
  return chebotarev_ratio(scan_primes(c, options), n);
}

std::vector<BetaRow> bad_prime_beta(const ExperimentConfig& config,
                                    const ScanOptions& options) {
  ExperimentConfig c = config;
  c.keep_records = false;
  return scan_primes(c, options).beta;
}

}  // namespace uol
