#pragma once

// Range-parallel chunk execution shared by the prime and composite scans.
// Chunk boundaries depend only on the range, never on the worker count, and
// chunk reports are merged strictly in range order.

#include <functional>

#include "uol/density_lab.hpp"

namespace uol::detail {

using ChunkFn = std::function<ExperimentReport(u64 lo, u64 hi)>;

/// Empty report for [lo, hi] with the decade rows of that range.
ExperimentReport empty_report(ReportKind kind, const ExperimentConfig& config,
                              u64 lo, u64 hi);

u32 decade_of(u64 n);

/// merge_reports() without the copy and without finalizing.
void merge_into(ExperimentReport& acc, const ExperimentReport& right);

/// Runs `fn` over [lo, hi] in chunks of `chunk` integers, honouring the
/// config's checkpoint and time-budget settings. Throws PartialResult when
/// the budget stops the scan early.
ExperimentReport run_chunked(ReportKind kind, const ExperimentConfig& config,
                             u64 lo, u64 hi, u64 chunk, unsigned workers,
                             const ChunkFn& fn);

/// Resolved matrix data for matrix experiments. Throws InvalidInput naming
/// the matrix type when it is not hyperbolic.
struct MatrixContext {
  SL2Matrix a;
  QuadFieldData fd;
};
MatrixContext matrix_context(const Matrix2& m);

/// Config equality on the fields that change results.
bool same_experiment(const ExperimentConfig& x, const ExperimentConfig& y);

}  // namespace uol::detail
