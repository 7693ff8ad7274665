#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "runner.hpp"
#include "uol/density_lab.hpp"

namespace uol {

using nlohmann::json;

const char* to_string(ReportKind kind) {
  switch (kind) {
    case ReportKind::kPrimeScan:
      return "prime_scan";
    case ReportKind::kCompositeScan:
      return "composite_scan";
    case ReportKind::kChebotarev:
      return "chebotarev";
    case ReportKind::kBadPrimes:
      return "bad_primes";
    case ReportKind::kLemmaSimple:
      return "lemma_simple";
  }
  return "?";
}

namespace {

ReportKind parse_kind(const std::string& s) {
  for (ReportKind k : {ReportKind::kPrimeScan, ReportKind::kCompositeScan,
                       ReportKind::kChebotarev, ReportKind::kBadPrimes,
                       ReportKind::kLemmaSimple}) {
    if (s == to_string(k)) return k;
  }
  throw InvalidInput("unknown report kind '" + s + "'");
}

u64 pow10(u32 j) {
  u64 v = 1;
  while (j-- > 0) v *= 10;
  return v;
}

// Neumaier's compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

template <class Row>
void merge_decades(std::vector<Row>& into, const std::vector<Row>& from,
                   void (*add)(Row&, const Row&)) {
  std::vector<Row> out;
  std::size_t i = 0, j = 0;
  while (i < into.size() || j < from.size()) {
    if (j == from.size() || (i < into.size() && into[i].decade < from[j].decade)) {
      out.push_back(into[i++]);
    } else if (i == into.size() || from[j].decade < into[i].decade) {
      out.push_back(from[j++]);
    } else {
      Row r = into[i++];
      add(r, from[j++]);
      out.push_back(r);
    }
  }
  into = std::move(out);
}

double fraction(u64 num, u64 den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

namespace detail {

u32 decade_of(u64 n) {
  u32 j = 0;
  while (n >= 10) {
    n /= 10;
    ++j;
  }
  return j;
}

ExperimentReport empty_report(ReportKind kind, const ExperimentConfig& config,
                              u64 lo, u64 hi) {
  ExperimentReport r;
  r.kind = kind;
  r.config = config;
  r.range_lo = lo;
  r.range_hi = hi;
  if (kind == ReportKind::kPrimeScan) {
    for (u64 n : config.n_list) r.chebotarev.push_back({n, 0, 0, 0, 0, 0});
  }
  if (lo > hi) return r;
  for (u32 d = decade_of(lo); d <= decade_of(hi); ++d) {
    if (kind == ReportKind::kCompositeScan) {
      r.composite_decades.push_back({d, 0, 0, 0});
    } else {
      r.prime_decades.push_back({d, 0, 0, 0, 0});
    }
  }
  return r;
}

}  // namespace detail

u64 ExperimentReport::primes_scanned() const {
  u64 total = 0;
  for (const auto& row : prime_decades) total += row.primes;
  return total;
}

u64 ExperimentReport::composites_scanned() const {
  u64 total = 0;
  for (const auto& row : composite_decades) total += row.scanned;
  return total;
}

u64 ExperimentReport::composites_skipped() const {
  u64 total = 0;
  for (const auto& row : composite_decades) total += row.skipped;
  return total;
}

u64 ExperimentReport::composites_meeting_threshold() const {
  u64 total = 0;
  for (const auto& row : composite_decades) total += row.meets_threshold;
  return total;
}

double bad_reciprocal_sum(const ExperimentReport& r, u64 lo, u64 hi) {
  CompensatedSum sum;
  for (auto it = r.bad_primes.rbegin(); it != r.bad_primes.rend(); ++it) {
    if (*it >= lo && *it <= hi) sum.add(1.0 / static_cast<double>(*it));
  }
  return sum.value();
}

void finalize_report(ExperimentReport& r) {
  if (r.kind != ReportKind::kPrimeScan && r.kind != ReportKind::kChebotarev &&
      r.kind != ReportKind::kBadPrimes) {
    return;
  }
  // beta(z) as tail sums taken from the largest prime down.
  r.beta.clear();
  std::vector<u64> zs = r.config.z_list;
  CompensatedSum tail;
  auto it = r.bad_primes.rbegin();
  std::vector<BetaRow> rows;
  for (auto z = zs.rbegin(); z != zs.rend(); ++z) {
    while (it != r.bad_primes.rend() && *it >= *z) {
      tail.add(1.0 / static_cast<double>(*it));
      ++it;
    }
    rows.push_back({*z, tail.value()});
  }
  r.beta.assign(rows.rbegin(), rows.rend());

  if (r.config.matrix) {
    const auto ctx = detail::matrix_context(*r.config.matrix);
    for (auto& row : r.chebotarev) {
      const DegreeInterval iv = kummer_degree_interval(row.n, ctx.fd);
      row.empirical = fraction(row.hits, row.unramified);
      row.predicted_lower = 2.0 / static_cast<double>(iv.upper);
      row.predicted_upper = 2.0 / static_cast<double>(iv.lower);
    }
  }
}

void detail::merge_into(ExperimentReport& out, const ExperimentReport& right) {
  const ExperimentReport& left = out;
  if (left.kind != right.kind) throw InvalidInput("cannot merge reports of different kinds");
  if (!detail::same_experiment(left.config, right.config)) {
    throw InvalidInput("cannot merge reports of different experiments");
  }
  if (left.range_hi + 1 != right.range_lo) {
    throw InvalidInput("cannot merge non-adjacent ranges [" +
                       std::to_string(left.range_lo) + ", " +
                       std::to_string(left.range_hi) + "] and [" +
                       std::to_string(right.range_lo) + ", " +
                       std::to_string(right.range_hi) + "]");
  }
  out.range_hi = right.range_hi;
  out.partial = out.partial || right.partial;

  merge_decades<PrimeDecadeRow>(
      out.prime_decades, right.prime_decades,
      [](PrimeDecadeRow& a, const PrimeDecadeRow& b) {
        a.primes += b.primes;
        a.low_order += b.low_order;
        a.bad += b.bad;
        a.ramified += b.ramified;
      });
  for (const auto& [i, c] : right.index_histogram) out.index_histogram[i] += c;
  out.bad_primes.insert(out.bad_primes.end(), right.bad_primes.begin(),
                        right.bad_primes.end());
  for (std::size_t k = 0; k < out.chebotarev.size() && k < right.chebotarev.size(); ++k) {
    out.chebotarev[k].hits += right.chebotarev[k].hits;
    out.chebotarev[k].unramified += right.chebotarev[k].unramified;
  }
  out.prime_records.insert(out.prime_records.end(), right.prime_records.begin(),
                           right.prime_records.end());

  merge_decades<CompositeDecadeRow>(
      out.composite_decades, right.composite_decades,
      [](CompositeDecadeRow& a, const CompositeDecadeRow& b) {
        a.scanned += b.scanned;
        a.skipped += b.skipped;
        a.meets_threshold += b.meets_threshold;
      });
  auto& cs = out.composite;
  const auto& rs = right.composite;
  for (std::size_t k = 0; k < cs.lambda_ratio_bins.size(); ++k) {
    cs.lambda_ratio_bins[k] += rs.lambda_ratio_bins[k];
  }
  if (rs.lambda_ratio_min_N != 0 &&
      (cs.lambda_ratio_min_N == 0 ||
       static_cast<u128>(rs.lambda_ratio_min_lambda) * cs.lambda_ratio_min_N <
           static_cast<u128>(cs.lambda_ratio_min_lambda) * rs.lambda_ratio_min_N)) {
    cs.lambda_ratio_min_N = rs.lambda_ratio_min_N;
    cs.lambda_ratio_min_lambda = rs.lambda_ratio_min_lambda;
  }
  for (const auto& [s, c] : rs.square_part_histogram) cs.square_part_histogram[s] += c;
  cs.squarefree += rs.squarefree;
  cs.good_only += rs.good_only;
  cs.inequality_checked += rs.inequality_checked;
  cs.inequality_violations += rs.inequality_violations;
  for (u64 n : rs.inequality_violation_examples) {
    if (cs.inequality_violation_examples.size() < 10) {
      cs.inequality_violation_examples.push_back(n);
    }
  }
  cs.prop11_checked += rs.prop11_checked;
  cs.prop11_violations += rs.prop11_violations;
  out.composite_records.insert(out.composite_records.end(),
                               right.composite_records.begin(),
                               right.composite_records.end());

  out.timing.seconds += right.timing.seconds;
  out.timing.chunks += right.timing.chunks;
  out.timing.workers = std::max(out.timing.workers, right.timing.workers);
}

ExperimentReport merge_reports(const ExperimentReport& left,
                               const ExperimentReport& right) {
  ExperimentReport out = left;
  detail::merge_into(out, right);
  finalize_report(out);
  return out;
}

ReportFormat parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "json") return ReportFormat::kJson;
  throw InvalidInput("unknown format '" + std::string(text) + "' (expected csv or json)");
}

namespace {

const char* class_code(PrimeClass c) {
  switch (c) {
    case PrimeClass::kSplit:
      return "S";
    case PrimeClass::kInert:
      return "I";
    case PrimeClass::kRamified:
      return "R";
  }
  return "?";
}

PrimeClass parse_class_code(const std::string& s) {
  if (s == "S") return PrimeClass::kSplit;
  if (s == "I") return PrimeClass::kInert;
  if (s == "R") return PrimeClass::kRamified;
  throw InvalidInput("unknown prime class '" + s + "'");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string report_to_csv(const ExperimentReport& r) {
  std::ostringstream out;
  switch (r.kind) {
    case ReportKind::kPrimeScan:
      out << "p,class,torus,ord,i_p,is_bad\n";
      for (const auto& rec : r.prime_records) {
        out << rec.p << ',' << class_code(rec.cls) << ',';
        if (rec.torus_order) out << *rec.torus_order;
        out << ',' << rec.ord << ',';
        if (rec.index) out << *rec.index;
        out << ',' << (rec.is_bad ? 1 : 0) << '\n';
      }
      break;
    case ReportKind::kCompositeScan:
      out << "N,ord,lambda,s,N_G,N_B,d0,meets_threshold\n";
      for (const auto& c : r.composite_records) {
        out << c.N << ',' << to_string(c.ord) << ',' << c.lambda << ',' << c.s
            << ',' << c.N_G << ',' << c.N_B << ',' << c.d0 << ','
            << (c.meets_threshold ? 1 : 0) << '\n';
      }
      break;
    case ReportKind::kChebotarev:
      out << "n,hits,unramified,empirical,predicted_lower,predicted_upper\n";
      for (const auto& c : r.chebotarev) {
        out << c.n << ',' << c.hits << ',' << c.unramified << ','
            << fmt_double(c.empirical) << ',' << fmt_double(c.predicted_lower)
            << ',' << fmt_double(c.predicted_upper) << '\n';
      }
      break;
    case ReportKind::kBadPrimes:
      out << "z,beta\n";
      for (const auto& b : r.beta) out << b.z << ',' << fmt_double(b.beta) << '\n';
      break;
    case ReportKind::kLemmaSimple:
      out << "y,M,low_order_primes,divisor_check,logM_over_y2\n";
      if (r.census) {
        const auto& c = *r.census;
        out << c.y << ',' << c.M.str() << ',';
        for (std::size_t i = 0; i < c.low_order_primes.size(); ++i) {
          out << (i ? " " : "") << c.low_order_primes[i];
        }
        out << ',' << (c.divisor_check ? 1 : 0) << ',' << fmt_double(c.logM_over_y2)
            << '\n';
      }
      break;
  }
  return out.str();
}

std::string report_to_json(const ExperimentReport& r, bool with_timing) {
  json j;
  j["kind"] = to_string(r.kind);
  j["config"] = json::parse(config_to_json(r.config));
  j["range"] = {{"lo", r.range_lo}, {"hi", r.range_hi}};
  j["partial"] = r.partial;

  json tables = json::object();
  if (!r.prime_decades.empty()) {
    json rows = json::array();
    for (const auto& d : r.prime_decades) {
      rows.push_back({{"decade", d.decade},
                      {"lo", std::max<u64>(pow10(d.decade), r.range_lo)},
                      {"primes", d.primes},
                      {"low_order", d.low_order},
                      {"bad", d.bad},
                      {"ramified", d.ramified},
                      {"low_order_fraction", fraction(d.low_order, d.primes)},
                      {"bad_fraction", fraction(d.bad, d.primes)}});
    }
    tables["prime_decades"] = rows;
  }
  if (!r.chebotarev.empty()) {
    json rows = json::array();
    for (const auto& c : r.chebotarev) {
      rows.push_back({{"n", c.n},
                      {"hits", c.hits},
                      {"unramified", c.unramified},
                      {"empirical", c.empirical},
                      {"predicted_lower", c.predicted_lower},
                      {"predicted_upper", c.predicted_upper}});
    }
    tables["chebotarev"] = rows;
  }
  if (!r.composite_decades.empty()) {
    json rows = json::array();
    for (const auto& d : r.composite_decades) {
      rows.push_back({{"decade", d.decade},
                      {"scanned", d.scanned},
                      {"skipped", d.skipped},
                      {"meets_threshold", d.meets_threshold},
                      {"fraction", fraction(d.meets_threshold, d.scanned)}});
    }
    tables["composite_decades"] = rows;
    const auto& cs = r.composite;
    json hist = json::array();
    for (const auto& [s, c] : cs.square_part_histogram) hist.push_back({s, c});
    tables["composite_summary"] = {
        {"lambda_ratio_bins", cs.lambda_ratio_bins},
        {"lambda_ratio_min_N", cs.lambda_ratio_min_N},
        {"lambda_ratio_min_lambda", cs.lambda_ratio_min_lambda},
        {"square_part_histogram", hist},
        {"squarefree", cs.squarefree},
        {"good_only", cs.good_only},
        {"inequality_checked", cs.inequality_checked},
        {"inequality_violations", cs.inequality_violations},
        {"inequality_violation_examples", cs.inequality_violation_examples},
        {"prop11_checked", cs.prop11_checked},
        {"prop11_violations", cs.prop11_violations},
        {"fraction_meeting_threshold",
         fraction(r.composites_meeting_threshold(), r.composites_scanned())}};
  }
  if (r.census) {
    const auto& c = *r.census;
    tables["census"] = {{"y", c.y},
                        {"M", c.M.str()},
                        {"low_order_primes", c.low_order_primes},
                        {"prime_limit", c.prime_limit},
                        {"divisor_check", c.divisor_check},
                        {"logM_over_y2", c.logM_over_y2}};
  }
  j["tables"] = tables;

  json hist = json::array();
  for (const auto& [i, c] : r.index_histogram) hist.push_back({i, c});
  j["histogram"] = hist;

  json beta_rows = json::array();
  for (const auto& b : r.beta) beta_rows.push_back({{"z", b.z}, {"beta", b.beta}});
  j["beta"] = {{"bad_primes", r.bad_primes}, {"sums", beta_rows}};

  if (!r.prime_records.empty()) {
    json rows = json::array();
    for (const auto& p : r.prime_records) {
      rows.push_back({{"p", p.p},
                      {"class", class_code(p.cls)},
                      {"torus", p.torus_order ? json(*p.torus_order) : json(nullptr)},
                      {"ord", p.ord},
                      {"i_p", p.index ? json(*p.index) : json(nullptr)},
                      {"is_bad", p.is_bad}});
    }
    j["prime_records"] = rows;
  }
  if (!r.composite_records.empty()) {
    json rows = json::array();
    for (const auto& c : r.composite_records) {
      rows.push_back({{"N", c.N},
                      {"ord", to_string(c.ord)},
                      {"lambda", c.lambda},
                      {"s", c.s},
                      {"N_G", c.N_G},
                      {"N_B", c.N_B},
                      {"d0", c.d0},
                      {"meets_threshold", c.meets_threshold}});
    }
    j["composite_records"] = rows;
  }
  if (with_timing) {
    j["timing"] = {{"seconds", r.timing.seconds},
                   {"workers", r.timing.workers},
                   {"chunks", r.timing.chunks}};
  }
  return j.dump(1) + "\n";
}

ExperimentReport report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    ExperimentReport r;
    r.kind = parse_kind(j.at("kind").get<std::string>());
    r.config = config_from_json(j.at("config").dump());
    r.range_lo = j.at("range").at("lo").get<u64>();
    r.range_hi = j.at("range").at("hi").get<u64>();
    r.partial = j.at("partial").get<bool>();
    const json& t = j.at("tables");
    if (t.contains("prime_decades")) {
      for (const auto& d : t["prime_decades"]) {
        r.prime_decades.push_back({d.at("decade").get<u32>(), d.at("primes").get<u64>(),
                                   d.at("low_order").get<u64>(), d.at("bad").get<u64>(),
                                   d.at("ramified").get<u64>()});
      }
    }
    if (t.contains("chebotarev")) {
      for (const auto& c : t["chebotarev"]) {
        r.chebotarev.push_back({c.at("n").get<u64>(), c.at("hits").get<u64>(),
                                c.at("unramified").get<u64>(),
                                c.at("empirical").get<double>(),
                                c.at("predicted_lower").get<double>(),
                                c.at("predicted_upper").get<double>()});
      }
    }
    if (t.contains("composite_decades")) {
      for (const auto& d : t["composite_decades"]) {
        r.composite_decades.push_back(
            {d.at("decade").get<u32>(), d.at("scanned").get<u64>(),
             d.at("skipped").get<u64>(), d.at("meets_threshold").get<u64>()});
      }
      const json& s = t.at("composite_summary");
      auto& cs = r.composite;
      cs.lambda_ratio_bins = s.at("lambda_ratio_bins").get<std::vector<u64>>();
      cs.lambda_ratio_min_N = s.at("lambda_ratio_min_N").get<u64>();
      cs.lambda_ratio_min_lambda = s.at("lambda_ratio_min_lambda").get<u64>();
      for (const auto& e : s.at("square_part_histogram")) {
        cs.square_part_histogram[e.at(0).get<u64>()] = e.at(1).get<u64>();
      }
      cs.squarefree = s.at("squarefree").get<u64>();
      cs.good_only = s.at("good_only").get<u64>();
      cs.inequality_checked = s.at("inequality_checked").get<u64>();
      cs.inequality_violations = s.at("inequality_violations").get<u64>();
      cs.inequality_violation_examples =
          s.at("inequality_violation_examples").get<std::vector<u64>>();
      cs.prop11_checked = s.at("prop11_checked").get<u64>();
      cs.prop11_violations = s.at("prop11_violations").get<u64>();
    }
    if (t.contains("census")) {
      const json& c = t["census"];
      LemmaSimpleCensus census;
      census.y = c.at("y").get<u64>();
      census.M = BigInt(c.at("M").get<std::string>());
      census.low_order_primes = c.at("low_order_primes").get<std::vector<u64>>();
      census.prime_limit = c.at("prime_limit").get<u64>();
      census.divisor_check = c.at("divisor_check").get<bool>();
      census.logM_over_y2 = c.at("logM_over_y2").get<double>();
      r.census = std::move(census);
    }
    for (const auto& e : j.at("histogram")) {
      r.index_histogram[e.at(0).get<u64>()] = e.at(1).get<u64>();
    }
    r.bad_primes = j.at("beta").at("bad_primes").get<std::vector<u64>>();
    for (const auto& b : j.at("beta").at("sums")) {
      r.beta.push_back({b.at("z").get<u64>(), b.at("beta").get<double>()});
    }
    if (j.contains("prime_records")) {
      for (const auto& p : j["prime_records"]) {
        PrimeOrderRecord rec;
        rec.p = p.at("p").get<u64>();
        rec.cls = parse_class_code(p.at("class").get<std::string>());
        if (!p.at("torus").is_null()) rec.torus_order = p["torus"].get<u64>();
        rec.ord = p.at("ord").get<u64>();
        if (!p.at("i_p").is_null()) rec.index = p["i_p"].get<u64>();
        rec.is_bad = p.at("is_bad").get<bool>();
        r.prime_records.push_back(rec);
      }
    }
    if (j.contains("composite_records")) {
      for (const auto& c : j["composite_records"]) {
        r.composite_records.push_back(
            {c.at("N").get<u64>(), parse_u128(c.at("ord").get<std::string>()),
             c.at("lambda").get<u64>(), c.at("s").get<u64>(), c.at("N_G").get<u64>(),
             c.at("N_B").get<u64>(), c.at("d0").get<u64>(),
             c.at("meets_threshold").get<bool>()});
      }
    }
    if (j.contains("timing")) {
      const json& tm = j["timing"];
      r.timing = {tm.at("seconds").get<double>(), tm.at("workers").get<unsigned>(),
                  tm.at("chunks").get<u64>()};
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed report JSON: ") + e.what());
  }
}

void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::string& destination, bool with_timing) {
  const std::string text = format == ReportFormat::kCsv
                               ? report_to_csv(report)
                               : report_to_json(report, with_timing);
  if (destination.empty() || destination == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing report to standard output");
    return;
  }
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + destination + "' for writing: " +
                  std::strerror(errno));
  }
  out << text;
  out.close();
  if (!out) throw IoError("failed writing report to '" + destination + "'");
}

}  // namespace uol
