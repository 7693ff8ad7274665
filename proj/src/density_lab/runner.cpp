#include "runner.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace uol::detail {

namespace {

std::optional<ExperimentReport> load_checkpoint(ReportKind kind,
                                                const ExperimentConfig& config,
                                                u64 lo, u64 hi) {
  const std::string& path = config.checkpoint_path;
  if (path.empty() || !std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentReport r = report_from_json(buf.str());
  if (r.kind != kind || !same_experiment(r.config, config)) {
    throw InvalidInput("checkpoint '" + path +
                       "' belongs to a different experiment");
  }
  if (r.range_lo != lo || r.range_hi > hi) {
    throw InvalidInput("checkpoint '" + path + "' covers [" +
                       std::to_string(r.range_lo) + ", " +
                       std::to_string(r.range_hi) +
                       "], which does not fit the requested range");
  }
  r.config = config;
  r.partial = false;
  return r;
}

void write_checkpoint(const ExperimentReport& r, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint '" + tmp + "'");
    out << report_to_json(r, false);
    if (!out) throw IoError("failed writing checkpoint '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into '" + path + "': " + ec.message());
}

}  // namespace

ExperimentReport run_chunked(ReportKind kind, const ExperimentConfig& config,
                             u64 lo, u64 hi, u64 chunk, unsigned workers,
                             const ChunkFn& fn) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  ExperimentReport acc;
  if (auto resumed = load_checkpoint(kind, config, lo, hi)) {
    acc = std::move(*resumed);
  } else {
    acc = empty_report(kind, config, lo, lo - 1);
  }
  const u64 first = acc.range_hi + 1;
  if (first > hi) {
    finalize_report(acc);
    return acc;
  }

  const u64 n_chunks = (hi - first) / chunk + 1;
  workers = std::max(1u, workers);
  workers = static_cast<unsigned>(std::min<u64>(workers, n_chunks));

  std::vector<std::optional<ExperimentReport>> done(n_chunks);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<u64> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;

  auto budget_exceeded = [&] {
    if (config.time_budget_seconds <= 0.0) return false;
    const std::chrono::duration<double> elapsed = Clock::now() - start;
    return elapsed.count() > config.time_budget_seconds;
  };

  auto wake = [&] {
    { std::lock_guard lock(mu); }
    cv.notify_all();
  };
  auto worker = [&] {
    for (;;) {
      if (stop.load() || budget_exceeded()) {
        stop = true;
        break;
      }
      const u64 i = next.fetch_add(1);
      if (i >= n_chunks) break;
      const u64 c_lo = first + i * chunk;
      const u64 c_hi = std::min(hi, c_lo + chunk - 1);
      try {
        ExperimentReport part = fn(c_lo, c_hi);
        std::lock_guard lock(mu);
        done[i] = std::move(part);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
      cv.notify_all();
    }
    wake();
  };

  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);

  // This thread only merges, strictly in chunk order.
  u64 merged = 0;
  u64 next_checkpoint = config.checkpoint_every > 0
                            ? acc.range_hi + config.checkpoint_every
                            : kU64Max;
  try {
    while (merged < n_chunks) {
      std::optional<ExperimentReport> part;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] {
          return done[merged].has_value() || failure ||
                 (stop.load() && next.load() <= merged);
        });
        if (!done[merged]) break;
        part = std::move(done[merged]);
        done[merged].reset();
      }
      merge_into(acc, *part);
      ++merged;
      if (acc.range_hi >= next_checkpoint && merged < n_chunks) {
        finalize_report(acc);
        write_checkpoint(acc, config.checkpoint_path);
        while (next_checkpoint <= acc.range_hi) next_checkpoint += config.checkpoint_every;
      }
    }
  } catch (...) {
    stop = true;
    for (auto& t : pool) t.join();
    throw;
  }

  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  // Chunks that finished after the loop gave up still extend the prefix.
  while (merged < n_chunks && done[merged]) {
    merge_into(acc, *done[merged]);
    ++merged;
  }

  const std::chrono::duration<double> elapsed = Clock::now() - start;
  acc.timing.seconds = elapsed.count();
  acc.timing.workers = workers;
  acc.timing.chunks = merged;
  finalize_report(acc);

  if (merged < n_chunks) {
    acc.partial = true;
    if (!config.checkpoint_path.empty()) write_checkpoint(acc, config.checkpoint_path);
    throw PartialResult("time budget of " + std::to_string(config.time_budget_seconds) +
                            " s exhausted after covering [" +
                            std::to_string(acc.range_lo) + ", " +
                            std::to_string(acc.range_hi) + "]",
                        std::move(acc));
  }
  if (!config.checkpoint_path.empty() && config.checkpoint_every > 0) {
    std::error_code ec;
    std::filesystem::remove(config.checkpoint_path, ec);
  }
  return acc;
}

}  // namespace uol::detail
