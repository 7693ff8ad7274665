#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>

#include "runner.hpp"
#include "uol/density_lab.hpp"

namespace uol {

using nlohmann::json;

ThresholdFunction ThresholdFunction::power(double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.1)) {
    throw InvalidInput("threshold exponent must lie in (0, 0.1]");
  }
  return {Kind::kPower, alpha};
}

ThresholdFunction ThresholdFunction::parse(std::string_view text) {
  if (text == "log") return log();
  if (text == "loglog") return loglog();
  if (text.starts_with("pow:")) {
    const std::string_view num = text.substr(4);
    double alpha = 0.0;
    const auto [end, ec] = std::from_chars(num.data(), num.data() + num.size(), alpha);
    if (ec != std::errc() || end != num.data() + num.size()) {
      throw InvalidInput("bad threshold exponent '" + std::string(num) + "'");
    }
    return power(alpha);
  }
  throw InvalidInput("unknown threshold function '" + std::string(text) +
                     "' (expected log, loglog or pow:<alpha>)");
}

double ThresholdFunction::operator()(u64 p) const {
  const double x = static_cast<double>(p);
  switch (kind_) {
    case Kind::kLog:
      return std::log(x);
    case Kind::kLogLog:
      return std::max(1.0, std::log(std::log(x)));
    case Kind::kPower:
      return std::pow(x, alpha_);
  }
  return 1.0;
}

std::string ThresholdFunction::to_string() const {
  switch (kind_) {
    case Kind::kLog:
      return "log";
    case Kind::kLogLog:
      return "loglog";
    case Kind::kPower: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, alpha_);
      return "pow:" + std::string(buf, res.ptr);
    }
  }
  return "log";
}

void ExperimentConfig::validate() const {
  if (matrix.has_value() == base.has_value()) {
    throw InvalidInput("experiment needs exactly one of a matrix or a base");
  }
  if (matrix) detail::matrix_context(*matrix);
  if (base && (*base >= -1 && *base <= 1)) {
    throw InvalidInput("base must satisfy |b| >= 2");
  }
  if (limit < 2) throw InvalidInput("limit must be >= 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidInput("epsilon must lie in (0, 1)");
  }
  for (u64 n : n_list) {
    if (n < 2) throw InvalidInput("n-list entries must be >= 2");
  }
  for (std::size_t i = 0; i < z_list.size(); ++i) {
    if (z_list[i] < 1) throw InvalidInput("z-list entries must be >= 1");
    if (i > 0 && z_list[i] <= z_list[i - 1]) {
      throw InvalidInput("z-list must be strictly ascending");
    }
  }
  if (time_budget_seconds < 0.0) {
    throw InvalidInput("time budget must be >= 0");
  }
  if (checkpoint_every > 0 && checkpoint_path.empty()) {
    throw InvalidInput("checkpointing needs a checkpoint path");
  }
}

namespace {

i64 parse_i64(std::string_view text, std::string_view what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  i64 v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw InvalidInput("malformed " + std::string(what) + ": '" +
                       std::string(text) + "'");
  }
  return v;
}

}  // namespace

Matrix2 parse_matrix(std::string_view text) {
  const std::string original(text);
  const auto semi = text.find(';');
  if (semi == std::string_view::npos) {
    throw InvalidInput("malformed matrix '" + original + "': expected \"a,b;c,d\"");
  }
  auto row = [&](std::string_view r, i64& x, i64& y) {
    const auto comma = r.find(',');
    if (comma == std::string_view::npos || r.find(',', comma + 1) != std::string_view::npos) {
      throw InvalidInput("malformed matrix '" + original + "': expected \"a,b;c,d\"");
    }
    x = parse_i64(r.substr(0, comma), "matrix entry");
    y = parse_i64(r.substr(comma + 1), "matrix entry");
  };
  Matrix2 m;
  row(text.substr(0, semi), m.a, m.b);
  row(text.substr(semi + 1), m.c, m.d);
  return m;
}

std::string format_matrix(const Matrix2& m) {
  return std::to_string(m.a) + "," + std::to_string(m.b) + ";" +
         std::to_string(m.c) + "," + std::to_string(m.d);
}

std::string config_to_json(const ExperimentConfig& c) {
  json j = json::object();
  if (c.matrix) j["matrix"] = format_matrix(*c.matrix);
  if (c.base) j["base"] = *c.base;
  j["limit"] = c.limit;
  j["f"] = c.f.to_string();
  j["epsilon"] = c.epsilon;
  j["n_list"] = c.n_list;
  j["z_list"] = c.z_list;
  j["checkpoint_every"] = c.checkpoint_every;
  if (!c.checkpoint_path.empty()) j["checkpoint_path"] = c.checkpoint_path;
  j["time_budget"] = c.time_budget_seconds;
  j["max_limit"] = c.max_limit;
  j["keep_records"] = c.keep_records;
  return j.dump();
}

namespace {

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw InvalidInput("config key '" + key + "' has the wrong type");
  }
}

u64 get_natural(const json& v, const std::string& key) {
  if (v.is_string()) {
    return checked_u64(parse_u128(v.get<std::string>()), key.c_str());
  }
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    // Accept 1e6-style literals when they are exact integers.
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0 && d == std::floor(d) && d < 1.8e19) return static_cast<u64>(d);
    }
    throw InvalidInput("config key '" + key + "' must be a natural number");
  }
  if (v.is_number_integer() && v.get<i64>() < 0) {
    throw InvalidInput("config key '" + key + "' must be >= 0");
  }
  return v.get<u64>();
}

std::vector<u64> get_list(const json& v, const std::string& key) {
  std::vector<u64> out;
  if (v.is_string()) {
    std::string_view s = v.get_ref<const std::string&>();
    while (!s.empty()) {
      const auto comma = s.find(',');
      out.push_back(static_cast<u64>(
          parse_i64(s.substr(0, comma), key)));
      if (comma == std::string_view::npos) break;
      s.remove_prefix(comma + 1);
    }
    return out;
  }
  if (!v.is_array()) throw InvalidInput("config key '" + key + "' must be a list");
  for (const auto& e : v) out.push_back(get_natural(e, key));
  return out;
}

std::string line_context(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ExperimentConfig config_from_json(std::string_view text,
                                  const ExperimentConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config parse error at " + line_context(text, e.byte) +
                       ": " + e.what());
  }
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  ExperimentConfig c = base;
  for (const auto& [key, v] : j.items()) {
    if (key == "matrix") {
      if (v.is_string()) {
        c.matrix = parse_matrix(v.get<std::string>());
      } else if (v.is_array() && v.size() == 2 && v[0].size() == 2 &&
                 v[1].size() == 2) {
        c.matrix = Matrix2{get_as<i64>(v[0][0], key), get_as<i64>(v[0][1], key),
                           get_as<i64>(v[1][0], key), get_as<i64>(v[1][1], key)};
      } else {
        throw InvalidInput("config key 'matrix' must be \"a,b;c,d\" or [[a,b],[c,d]]");
      }
      c.base.reset();
    } else if (key == "trace") {
      c.matrix = companion_matrix(get_as<i64>(v, key));
      c.base.reset();
    } else if (key == "base") {
      c.base = get_as<i64>(v, key);
      c.matrix.reset();
    } else if (key == "limit" || key == "x") {
      c.limit = get_natural(v, key);
    } else if (key == "f") {
      c.f = ThresholdFunction::parse(get_as<std::string>(v, key));
    } else if (key == "epsilon") {
      c.epsilon = get_as<double>(v, key);
    } else if (key == "n_list") {
      c.n_list = get_list(v, key);
    } else if (key == "z_list") {
      c.z_list = get_list(v, key);
    } else if (key == "checkpoint_every") {
      c.checkpoint_every = get_natural(v, key);
    } else if (key == "checkpoint_path") {
      c.checkpoint_path = get_as<std::string>(v, key);
    } else if (key == "time_budget") {
      c.time_budget_seconds = get_as<double>(v, key);
    } else if (key == "max_limit") {
      c.max_limit = get_natural(v, key);
    } else if (key == "keep_records") {
      c.keep_records = get_as<bool>(v, key);
    } else {
      throw InvalidInput("unknown config key '" + key + "'");
    }
  }
  return c;
}

namespace detail {

MatrixContext matrix_context(const Matrix2& m) {
  const SL2Matrix a = classify_matrix(m);
  if (!a.hyperbolic()) {
    throw InvalidInput(std::string("matrix is ") + to_string(a.kind()) +
                       "; experiments need |trace| > 2");
  }
  return {a, field_data(a)};
}

bool same_experiment(const ExperimentConfig& x, const ExperimentConfig& y) {
  return x.matrix == y.matrix && x.base == y.base && x.f == y.f &&
         x.epsilon == y.epsilon && x.n_list == y.n_list &&
         x.z_list == y.z_list && x.keep_records == y.keep_records;
}

}  // namespace detail
}  // namespace uol
