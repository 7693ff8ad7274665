#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "uol/density_lab.hpp"

namespace uol::cli {

namespace {

using nlohmann::json;

// Keys a config file may carry that belong to the front end, not to the
// experiment itself.
constexpr const char* kFrontEndKeys[] = {"threads", "output", "format"};

struct Flags {
  std::string matrix;
  i64 trace = 0;
  i64 base = 0;
  u64 modulus = 0;
  u64 limit = 0;
  double epsilon = 0.1;
  std::string f;
  std::vector<u64> n_list;
  std::vector<u64> z_list;
  unsigned threads = 0;
  std::string output;
  std::string format = "csv";
  u64 checkpoint_every = 0;
  std::string checkpoint_path;
  double time_budget = 0.0;
  u64 max_limit = 0;
  bool records = false;
  bool no_timing = false;
  std::string config_path;
  u64 y = 0;
  u64 prime_limit = kCensusPrimeLimit;
};

struct Options {
  CLI::Option* matrix = nullptr;
  CLI::Option* trace = nullptr;
  CLI::Option* base = nullptr;
  CLI::Option* limit = nullptr;
  CLI::Option* epsilon = nullptr;
  CLI::Option* f = nullptr;
  CLI::Option* n_list = nullptr;
  CLI::Option* z_list = nullptr;
  CLI::Option* threads = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* output = nullptr;
  CLI::Option* checkpoint_every = nullptr;
  CLI::Option* checkpoint_path = nullptr;
  CLI::Option* time_budget = nullptr;
  CLI::Option* max_limit = nullptr;
  CLI::Option* records = nullptr;
};

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& text, const std::string& destination,
                std::ostream& out) {
  if (destination.empty() || destination == "-") {
    out << text;
    return;
  }
  std::ofstream file(destination, std::ios::binary);
  if (!file) throw IoError("cannot open '" + destination + "' for writing");
  file << text;
  if (!file) throw IoError("failed writing '" + destination + "'");
}

unsigned parse_threads(const std::string& text, const std::string& source) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(text, &used);
    if (used == text.size() && v >= 1 && v <= 4096) return static_cast<unsigned>(v);
  } catch (const std::exception&) {
  }
  throw InvalidInput(source + " must be a thread count between 1 and 4096, got '" +
                     text + "'");
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  void add_matrix_flags(CLI::App* sub, Options& o, bool allow_base) {
    o.matrix = sub->add_option("--matrix", flags_.matrix, "matrix as \"a,b;c,d\"");
    o.trace = sub->add_option("--trace", flags_.trace,
                              "use the companion matrix [[t,-1],[1,0]]");
    o.matrix->excludes(o.trace);
    if (allow_base) {
      o.base = sub->add_option("--base", flags_.base, "integer base b, |b| >= 2");
      o.base->excludes(o.matrix)->excludes(o.trace);
    }
  }

  void add_output_flags(CLI::App* sub, Options& o) {
    o.output = sub->add_option("--output,-o", flags_.output, "write data here instead of stdout");
    o.format = sub->add_option("--format", flags_.format, "csv or json")
                   ->check(CLI::IsMember({"csv", "json"}));
  }

  void add_scan_flags(CLI::App* sub, Options& o, bool primes) {
    o.limit = sub->add_option("--limit", flags_.limit,
                              primes ? "scan primes p <= limit (default 1e6)"
                                     : "scan N <= limit (default 1e5)");
    o.epsilon = sub->add_option("--epsilon", flags_.epsilon, "ord >= N^(1 - epsilon)");
    o.f = sub->add_option("--f", flags_.f, "log, loglog or pow:<alpha>");
    o.n_list = sub->add_option("--n-list", flags_.n_list, "e.g. 2,3,4,5")->delimiter(',');
    o.z_list = sub->add_option("--z-list", flags_.z_list, "e.g. 100,1000")->delimiter(',');
    o.threads = sub->add_option("--threads", flags_.threads,
                                "worker threads (default: $UNIT_ORDER_LAB_THREADS, "
                                "else all cores)")
                    ->check(CLI::Range(1u, 4096u));
    o.checkpoint_every = sub->add_option("--checkpoint-every", flags_.checkpoint_every,
                                         "save progress every this many integers");
    o.checkpoint_path = sub->add_option("--checkpoint", flags_.checkpoint_path,
                                        "checkpoint file (default: <output>.checkpoint)");
    o.time_budget = sub->add_option("--time-budget", flags_.time_budget,
                                    "stop after this many seconds with a partial report");
    o.max_limit = sub->add_option("--max-limit", flags_.max_limit,
                                  "raise the safety cap on --limit");
    o.records = sub->add_flag("--records", flags_.records,
                              "include per-prime or per-N rows in JSON output");
    sub->add_flag("--no-timing", flags_.no_timing, "omit wall-clock fields from JSON");
    sub->add_option("--config", flags_.config_path, "JSON config; flags override it");
    add_output_flags(sub, o);
  }

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Multiplicative orders of integers and SL2(Z) matrices, and "
                 "density experiments over primes and composites.",
                 "unit-order-lab"};
    app.require_subcommand(1);

    Options order_o, morder_o, primes_o, comps_o, cheb_o, bad_o, lemma_o, field_o;

    auto* order = app.add_subcommand("order", "ord_N(b) for an integer base");
    order->add_option("--base", flags_.base, "integer base")->required();
    order->add_option("--modulus,-N", flags_.modulus, "modulus N >= 1")->required();
    add_output_flags(order, order_o);

    auto* morder = app.add_subcommand("matrix-order", "ord_N(A) for a hyperbolic matrix");
    add_matrix_flags(morder, morder_o, false);
    morder->add_option("--modulus,-N", flags_.modulus, "modulus N >= 2")->required();
    add_output_flags(morder, morder_o);

    auto* primes = app.add_subcommand("scan-primes", "orders of A mod every prime p <= x");
    add_matrix_flags(primes, primes_o, false);
    add_scan_flags(primes, primes_o, true);

    auto* comps = app.add_subcommand("scan-composites", "orders mod every N <= x");
    add_matrix_flags(comps, comps_o, true);
    add_scan_flags(comps, comps_o, false);

    auto* cheb = app.add_subcommand("chebotarev", "density of n | i_p against the prediction");
    add_matrix_flags(cheb, cheb_o, false);
    add_scan_flags(cheb, cheb_o, true);

    auto* bad = app.add_subcommand("bad-primes", "beta(z): sum of 1/p over bad p in [z, x]");
    add_matrix_flags(bad, bad_o, false);
    add_scan_flags(bad, bad_o, true);

    auto* lemma = app.add_subcommand("lemma-simple",
                                     "primes of order <= y against prod det(A^n - I)");
    add_matrix_flags(lemma, lemma_o, false);
    lemma->add_option("--y", flags_.y, "2 <= y <= 60")->required();
    lemma->add_option("--prime-limit", flags_.prime_limit, "check primes up to this bound");
    add_output_flags(lemma, lemma_o);

    auto* field = app.add_subcommand("field-info", "quadratic field data of a matrix");
    add_matrix_flags(field, field_o, false);
    field->add_option("--n-list", flags_.n_list, "Kummer degree bounds for these n")
        ->delimiter(',');
    add_output_flags(field, field_o);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return 1;
    }

    const ReportFormat format = parse_format(flags_.format);
    try {
      if (order->parsed()) return run_order(format);
      if (morder->parsed()) return run_matrix_order(morder_o, format);
      if (primes->parsed()) return run_scan(primes_o, ReportKind::kPrimeScan, format);
      if (comps->parsed()) return run_scan(comps_o, ReportKind::kCompositeScan, format);
      if (cheb->parsed()) return run_scan(cheb_o, ReportKind::kChebotarev, format);
      if (bad->parsed()) return run_scan(bad_o, ReportKind::kBadPrimes, format);
      if (lemma->parsed()) return run_lemma(lemma_o, format);
      if (field->parsed()) return run_field(field_o, format);
    } catch (const PartialResult& e) {
      err_ << "error: " << e.what() << "\n";
      return 2;
    }
    return 1;
  }

 private:
  Matrix2 matrix_from_flags(const Options& o) const {
    if (given(o.matrix)) return parse_matrix(flags_.matrix);
    if (given(o.trace)) return companion_matrix(flags_.trace);
    throw InvalidInput("give a matrix with --matrix \"a,b;c,d\" or --trace t");
  }

  SL2Matrix hyperbolic(const Matrix2& m) const {
    const SL2Matrix a = classify_matrix(m);
    if (!a.hyperbolic()) {
      throw InvalidInput(std::string("matrix is ") + to_string(a.kind()) +
                         "; orders are only computed for |trace| > 2");
    }
    return a;
  }

  int run_order(ReportFormat format) {
    if (flags_.modulus == 0) throw InvalidInput("--modulus must be at least 1");
    const u64 ord = integer_order_mod_N(flags_.base, flags_.modulus);
    if (format == ReportFormat::kJson) {
      const json j = {{"base", flags_.base}, {"modulus", flags_.modulus}, {"ord", ord}};
      write_text(j.dump(2) + "\n", flags_.output, out_);
    } else {
      write_text(std::to_string(ord) + "\n", flags_.output, out_);
    }
    return 0;
  }

  int run_matrix_order(const Options& o, ReportFormat format) {
    const Matrix2 m = matrix_from_flags(o);
    const SL2Matrix a = hyperbolic(m);
    if (flags_.modulus < 2) throw InvalidInput("--modulus must be at least 2");
    const auto rec = matrix_order_mod_N(a, flags_.modulus, field_data(a));
    if (format == ReportFormat::kJson) {
      const json j = {{"matrix", format_matrix(m)}, {"modulus", rec.N},
                      {"ord", to_string(rec.ord)},  {"lambda", rec.lambda},
                      {"s", rec.s},                 {"N_G", rec.N_G},
                      {"N_B", rec.N_B},             {"d0", rec.d0}};
      write_text(j.dump(2) + "\n", flags_.output, out_);
    } else {
      write_text(to_string(rec.ord) + "\n", flags_.output, out_);
    }
    return 0;
  }

  // Defaults, then the config file, then explicit flags.
  ExperimentConfig build_config(const Options& o, ReportKind kind, ReportFormat& format,
                                unsigned& threads) {
    ExperimentConfig c;
    c.limit = kind == ReportKind::kCompositeScan ? 100'000 : 1'000'000;
    std::optional<unsigned> file_threads;

    if (!flags_.config_path.empty()) {
      const std::string text = read_file(flags_.config_path);
      json j = json::parse(text, nullptr, false);
      if (j.is_discarded()) config_from_json(text);  // throws with line context
      if (!j.is_object()) throw InvalidInput("config must be a JSON object");
      if (j.contains("threads")) {
        file_threads = parse_threads(j["threads"].dump(), "config key 'threads'");
      }
      if (j.contains("output") && !given(o.output)) {
        if (!j["output"].is_string()) throw InvalidInput("config key 'output' must be a string");
        flags_.output = j["output"].get<std::string>();
      }
      if (j.contains("format") && !given(o.format)) {
        if (!j["format"].is_string()) throw InvalidInput("config key 'format' must be a string");
        format = parse_format(j["format"].get<std::string>());
      }
      for (const char* key : kFrontEndKeys) j.erase(key);
      c = config_from_json(j.dump(), c);
    }

    if (given(o.matrix)) {
      c.matrix = parse_matrix(flags_.matrix);
      c.base.reset();
    } else if (given(o.trace)) {
      c.matrix = companion_matrix(flags_.trace);
      c.base.reset();
    } else if (given(o.base)) {
      c.base = flags_.base;
      c.matrix.reset();
    }
    if (given(o.limit)) c.limit = flags_.limit;
    if (given(o.epsilon)) c.epsilon = flags_.epsilon;
    if (given(o.f)) c.f = ThresholdFunction::parse(flags_.f);
    if (given(o.n_list)) c.n_list = flags_.n_list;
    if (given(o.z_list)) c.z_list = flags_.z_list;
    if (given(o.checkpoint_every)) c.checkpoint_every = flags_.checkpoint_every;
    if (given(o.checkpoint_path)) c.checkpoint_path = flags_.checkpoint_path;
    if (given(o.time_budget)) c.time_budget_seconds = flags_.time_budget;
    if (given(o.max_limit)) c.max_limit = flags_.max_limit;
    if (given(o.records)) c.keep_records = flags_.records;

    if (c.checkpoint_every > 0 && c.checkpoint_path.empty()) {
      c.checkpoint_path = (flags_.output.empty() || flags_.output == "-")
                              ? "unit-order-lab.checkpoint"
                              : flags_.output + ".checkpoint";
    }
    // CSV output is the per-row table, so rows are always kept for it.
    if (format == ReportFormat::kCsv &&
        (kind == ReportKind::kPrimeScan || kind == ReportKind::kCompositeScan)) {
      c.keep_records = true;
    }
    if (kind != ReportKind::kPrimeScan && kind != ReportKind::kCompositeScan) {
      c.keep_records = false;
    }

    if (given(o.threads)) {
      threads = flags_.threads;
    } else if (file_threads) {
      threads = *file_threads;
    } else if (const char* env = std::getenv("UNIT_ORDER_LAB_THREADS"); env && *env) {
      threads = parse_threads(env, "UNIT_ORDER_LAB_THREADS");
    } else {
      threads = std::max(1u, std::thread::hardware_concurrency());
    }
    if (kind != ReportKind::kCompositeScan && !c.matrix) {
      throw InvalidInput("give a matrix with --matrix \"a,b;c,d\" or --trace t");
    }
    c.validate();
    return c;
  }

  int run_scan(const Options& o, ReportKind kind, ReportFormat format) {
    unsigned threads = 1;
    const ExperimentConfig c = build_config(o, kind, format, threads);
    const ScanOptions opts{threads};
    const bool timing = !flags_.no_timing;
    try {
      ExperimentReport r = kind == ReportKind::kCompositeScan ? scan_composites(c, opts)
                                                              : scan_primes(c, opts);
      if (kind == ReportKind::kChebotarev || kind == ReportKind::kBadPrimes) r.kind = kind;
      emit(r, format, timing);
    } catch (const PartialResult& e) {
      ExperimentReport r = e.report();
      if (kind == ReportKind::kChebotarev || kind == ReportKind::kBadPrimes) r.kind = kind;
      emit(r, format, timing);
      throw;
    }
    return 0;
  }

  int run_lemma(const Options& o, ReportFormat format) {
    const Matrix2 m = matrix_from_flags(o);
    hyperbolic(m);
    ExperimentReport r;
    r.kind = ReportKind::kLemmaSimple;
    r.config.matrix = m;
    r.config.limit = flags_.prime_limit;
    r.range_hi = flags_.prime_limit;
    r.census = lemma_simple_census(m, flags_.y, flags_.prime_limit);
    emit(r, format, false);
    return 0;
  }

  int run_field(const Options& o, ReportFormat format) {
    const Matrix2 m = matrix_from_flags(o);
    const SL2Matrix a = hyperbolic(m);
    const QuadFieldData fd = field_data(a);
    json j = {{"matrix", format_matrix(m)},
              {"trace", to_string(a.trace())},
              {"disc", to_string(fd.disc)},
              {"field_disc", to_string(fd.field_disc)},
              {"conductor", to_string(fd.conductor)},
              {"unit_x", fd.fundamental_unit.x.str()},
              {"unit_y", fd.fundamental_unit.y.str()},
              {"unit_norm", fd.unit_norm},
              {"power_index", fd.power_index},
              {"matrix_disc", to_string(fd.matrix_disc)}};
    json degrees = json::array();
    for (u64 n : flags_.n_list) {
      const auto d = kummer_degree_interval(n, fd);
      degrees.push_back({{"n", n}, {"lower", d.lower}, {"upper", d.upper},
                         {"exact", d.exact}});
    }
    if (format == ReportFormat::kJson) {
      j["kummer_degrees"] = degrees;
      write_text(j.dump(2) + "\n", flags_.output, out_);
      return 0;
    }
    std::ostringstream text;
    text << "key,value\n";
    for (const auto& [k, v] : j.items()) {
      const std::string value = v.is_string() ? v.get<std::string>() : v.dump();
      const bool quote = value.find(',') != std::string::npos;
      text << k << ',' << (quote ? "\"" + value + "\"" : value) << '\n';
    }
    for (const auto& d : degrees) {
      text << "kummer_degree_" << d["n"].get<u64>() << ',' << d["lower"].get<u64>()
           << ".." << d["upper"].get<u64>() << '\n';
    }
    write_text(text.str(), flags_.output, out_);
    return 0;
  }

  void emit(const ExperimentReport& r, ReportFormat format, bool timing) {
    if (flags_.output.empty() || flags_.output == "-") {
      write_text(format == ReportFormat::kCsv ? report_to_csv(r) : report_to_json(r, timing) + "\n",
                 "", out_);
    } else {
      emit_report(r, format, flags_.output, timing);
    }
  }

  std::ostream& out_;
  std::ostream& err_;
  Flags flags_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return Runner(out, err).run(args);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kInvalidInput ? 1 : 2;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory; lower --limit\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace uol::cli
