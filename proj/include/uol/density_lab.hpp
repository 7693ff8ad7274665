#pragma once

// Batch density experiments over ranges of primes and integers.
//
// Every aggregate that is merged across chunks is an exact integer (counts,
// histograms, the ordered bad-prime list). Real-valued quantities such as
// beta(z) and Chebotarev ratios are derived from those at the end, so the
// result never depends on how the range was split or how many workers ran.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uol/error.hpp"
#include "uol/order_engine.hpp"
#include "uol/quad_field.hpp"

namespace uol {

/// The f in "ord_p(A) < p / f(p)".
class ThresholdFunction {
 public:
  enum class Kind { kLog, kLogLog, kPower };

  ThresholdFunction() = default;
  static ThresholdFunction log() { return {Kind::kLog, 0.0}; }
  static ThresholdFunction loglog() { return {Kind::kLogLog, 0.0}; }
  /// p^alpha with 0 < alpha <= 0.1.
  static ThresholdFunction power(double alpha);
  /// Accepts "log", "loglog" and "pow:<alpha>".
  static ThresholdFunction parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  /// f(p). ln ln p is clamped below at 1 so small primes stay meaningful.
  double operator()(u64 p) const;
  std::string to_string() const;

  friend bool operator==(const ThresholdFunction&,
                         const ThresholdFunction&) = default;

 private:
  ThresholdFunction(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}
  Kind kind_ = Kind::kLog;
  double alpha_ = 0.0;
};

inline constexpr u64 kPrimeScanCap = 100'000'000;
inline constexpr u64 kCompositeScanCap = 1'000'000;

struct ExperimentConfig {
  std::optional<Matrix2> matrix;  ///< exactly one of matrix / base
  std::optional<i64> base;
  u64 limit = 1'000'000;
  ThresholdFunction f;
  double epsilon = 0.1;
  std::vector<u64> n_list{2, 3, 4, 5};
  std::vector<u64> z_list{100, 1'000, 10'000, 100'000};
  u64 checkpoint_every = 0;  ///< integers between checkpoints; 0 disables
  std::string checkpoint_path;
  double time_budget_seconds = 0.0;  ///< 0 means unlimited
  u64 max_limit = 0;  ///< 0 selects the per-scan default cap
  bool keep_records = false;

  /// Throws InvalidInput describing the first violated constraint.
  void validate() const;

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

/// "a,b;c,d" to a matrix. Throws InvalidInput on malformed text.
Matrix2 parse_matrix(std::string_view text);
std::string format_matrix(const Matrix2& m);

/// Config as a JSON object. Keys absent from `json` keep their value in `base`.
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(std::string_view json,
                                  const ExperimentConfig& base = {});

enum class ReportKind {
  kPrimeScan,
  kCompositeScan,
  kChebotarev,
  kBadPrimes,
  kLemmaSimple,
};

const char* to_string(ReportKind kind);

/// Primes in the decade [10^j, 10^(j+1)).
struct PrimeDecadeRow {
  u32 decade = 0;
  u64 primes = 0;
  u64 low_order = 0;  ///< ord < p / f(p)
  u64 bad = 0;
  u64 ramified = 0;

  friend bool operator==(const PrimeDecadeRow&, const PrimeDecadeRow&) = default;
};

struct ChebotarevRow {
  u64 n = 0;
  u64 hits = 0;        ///< unramified p with n | i_p
  u64 unramified = 0;  ///< unramified primes scanned
  double empirical = 0.0;
  double predicted_lower = 0.0;  ///< 2 / degree upper bound
  double predicted_upper = 0.0;  ///< 2 / degree lower bound

  friend bool operator==(const ChebotarevRow&, const ChebotarevRow&) = default;
};

struct BetaRow {
  u64 z = 0;
  double beta = 0.0;  ///< sum of 1/p over bad p in [z, limit]

  friend bool operator==(const BetaRow&, const BetaRow&) = default;
};

struct CompositeDecadeRow {
  u32 decade = 0;
  u64 scanned = 0;
  u64 skipped = 0;  ///< gcd(b, N) > 1
  u64 meets_threshold = 0;  ///< ord >= N^(1 - epsilon)

  friend bool operator==(const CompositeDecadeRow&,
                         const CompositeDecadeRow&) = default;
};

struct CompositeRow {
  u64 N = 0;
  u128 ord = 0;
  u64 lambda = 0;
  u64 s = 1;
  u64 N_G = 1;
  u64 N_B = 1;
  u64 d0 = 1;
  bool meets_threshold = false;

  friend bool operator==(const CompositeRow&, const CompositeRow&) = default;
};

/// Exact composite aggregates; everything merges by addition.
struct CompositeSummary {
  /// lambda(N)/N in tenths: bin i counts floor(10 lambda / N) == i.
  std::vector<u64> lambda_ratio_bins = std::vector<u64>(10, 0);
  u64 lambda_ratio_min_N = 0;  ///< argmin of lambda(N)/N, smallest N on ties
  u64 lambda_ratio_min_lambda = 0;
  std::map<u64, u64> square_part_histogram;  ///< s -> count
  u64 squarefree = 0;
  u64 good_only = 0;  ///< N_B == 1
  u64 inequality_checked = 0;
  u64 inequality_violations = 0;  ///< ord < floor(lambda/N prod ord_p)
  std::vector<u64> inequality_violation_examples;  ///< first few N
  u64 prop11_checked = 0;
  u64 prop11_violations = 0;

  friend bool operator==(const CompositeSummary&,
                         const CompositeSummary&) = default;
};

struct LemmaSimpleCensus {
  u64 y = 0;
  BigInt M;  ///< prod_{n <= y} det(A^n - I)
  std::vector<u64> low_order_primes;  ///< p <= prime_limit with ord_p(A) <= y
  u64 prime_limit = 0;
  bool divisor_check = false;
  double logM_over_y2 = 0.0;

  friend bool operator==(const LemmaSimpleCensus&,
                         const LemmaSimpleCensus&) = default;
};

struct Timing {
  double seconds = 0.0;
  unsigned workers = 1;
  u64 chunks = 0;

  friend bool operator==(const Timing&, const Timing&) = default;
};

struct ExperimentReport {
  ReportKind kind = ReportKind::kPrimeScan;
  ExperimentConfig config;
  u64 range_lo = 2;  ///< integers covered: [range_lo, range_hi]
  u64 range_hi = 1;
  bool partial = false;

  // Prime scans.
  std::vector<PrimeDecadeRow> prime_decades;
  std::map<u64, u64> index_histogram;  ///< i_p -> count, unramified only
  std::vector<u64> bad_primes;
  std::vector<BetaRow> beta;
  std::vector<ChebotarevRow> chebotarev;
  std::vector<PrimeOrderRecord> prime_records;

  // Composite scans.
  std::vector<CompositeDecadeRow> composite_decades;
  CompositeSummary composite;
  std::vector<CompositeRow> composite_records;

  std::optional<LemmaSimpleCensus> census;

  Timing timing;

  u64 primes_scanned() const;
  u64 composites_scanned() const;
  u64 composites_skipped() const;
  u64 composites_meeting_threshold() const;

  friend bool operator==(const ExperimentReport&,
                         const ExperimentReport&) = default;
};

/// Thrown when a scan stops early (time budget). Carries the report for the
/// completed prefix, flagged partial.
class PartialResult : public Error {
 public:
  PartialResult(const std::string& what, ExperimentReport report)
      : Error(ErrorKind::kPartialResult, what), report_(std::move(report)) {}
  const ExperimentReport& report() const noexcept { return report_; }

 private:
  ExperimentReport report_;
};

struct ScanOptions {
  unsigned workers = 1;
};

/// Scans every prime p <= config.limit. Deterministic in `workers`.
ExperimentReport scan_primes(const ExperimentConfig& config,
                             const ScanOptions& options = {});

/// Scans the primes in [lo, hi] only; merge_reports() joins adjacent ranges.
ExperimentReport scan_primes_range(const ExperimentConfig& config, u64 lo,
                                   u64 hi, const ScanOptions& options = {});

/// Every N in [2, config.limit].
ExperimentReport scan_composites(const ExperimentConfig& config,
                                 const ScanOptions& options = {});
ExperimentReport scan_composites_range(const ExperimentConfig& config, u64 lo,
                                       u64 hi, const ScanOptions& options = {});

/// Joins reports over adjacent ranges (left.range_hi + 1 == right.range_lo)
/// of the same experiment and recomputes the derived rows.
ExperimentReport merge_reports(const ExperimentReport& left,
                               const ExperimentReport& right);

/// Recomputes beta and Chebotarev rows from the exact aggregates.
void finalize_report(ExperimentReport& report);

struct ChebotarevRatio {
  double empirical = 0.0;
  double predicted_lower = 0.0;
  double predicted_upper = 0.0;
};

/// #{p <= x unramified : n | i_p} / #{p <= x unramified} against
/// (2 / degree_upper, 2 / degree_lower).
ChebotarevRatio chebotarev_ratio(const ExperimentConfig& config, u64 n,
                                 const ScanOptions& options = {});
ChebotarevRatio chebotarev_ratio(const ExperimentReport& prime_scan, u64 n);

/// (z, beta(z)) for each z in config.z_list.
std::vector<BetaRow> bad_prime_beta(const ExperimentConfig& config,
                                    const ScanOptions& options = {});

/// Compensated sum of 1/p over the report's bad primes in [lo, hi].
double bad_reciprocal_sum(const ExperimentReport& prime_scan, u64 lo, u64 hi);

inline constexpr u64 kCensusPrimeLimit = 100'000;

/// M = prod_{n=1}^{y} det(A^n - I), the primes p <= prime_limit with
/// ord_p(A) <= y, whether each divides M, and ln|M| / y^2. 2 <= y <= 60.
LemmaSimpleCensus lemma_simple_census(const Matrix2& a, u64 y,
                                      u64 prime_limit = kCensusPrimeLimit);

enum class ReportFormat { kCsv, kJson };

/// "csv" or "json".
ReportFormat parse_format(std::string_view text);

std::string report_to_csv(const ExperimentReport& report);
/// `with_timing = false` drops wall-clock fields for byte comparisons.
std::string report_to_json(const ExperimentReport& report,
                           bool with_timing = true);
ExperimentReport report_from_json(std::string_view json);

/// Writes to `destination`, or stdout when it is empty or "-". I/O errors
/// raise IoError naming the path.
void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::string& destination, bool with_timing = true);

}  // namespace uol
