#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uol/density_lab.hpp"

namespace py = pybind11;
using namespace uol;

namespace {

Matrix2 to_matrix(const py::object& m) {
  if (py::isinstance<py::str>(m)) return parse_matrix(m.cast<std::string>());
  const auto rows = m.cast<std::vector<std::vector<i64>>>();
  if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2) {
    throw InvalidInput("matrix must be \"a,b;c,d\" or [[a, b], [c, d]]");
  }
  return {rows[0][0], rows[0][1], rows[1][0], rows[1][1]};
}

SL2Matrix hyperbolic(const Matrix2& m) {
  const SL2Matrix a = classify_matrix(m);
  if (!a.hyperbolic()) {
    throw InvalidInput(std::string("matrix is ") + to_string(a.kind()) +
                       "; orders are only computed for |trace| > 2");
  }
  return a;
}

// Python ints of any size go through their decimal form.
py::int_ big(const std::string& digits) {
  return py::reinterpret_steal<py::int_>(PyLong_FromString(digits.c_str(), nullptr, 10));
}

std::string run_scan(const std::string& kind, const std::string& config_json,
                     unsigned workers, bool with_timing) {
  ExperimentConfig defaults;
  if (kind == "composites") defaults.limit = 100'000;
  const ExperimentConfig c = config_from_json(config_json, defaults);
  const ScanOptions opts{std::max(1u, workers)};
  py::gil_scoped_release release;
  const ExperimentReport r =
      kind == "composites" ? scan_composites(c, opts) : scan_primes(c, opts);
  return report_to_json(r, with_timing);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multiplicative orders of integers and SL2(Z) matrices.";

  auto base_error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ResourceLimit>(m, "ResourceLimit", base_error.ptr());
  py::register_exception<PartialResult>(m, "PartialResult", base_error.ptr());

  m.def("is_prime", &is_prime, py::arg("n"));
  m.def(
      "factorize",
      [](u64 n) {
        std::vector<std::pair<u64, u32>> out;
        for (const auto& pp : factorize(n).factors()) out.emplace_back(pp.prime, pp.exponent);
        return out;
      },
      py::arg("n"));
  m.def(
      "integer_order",
      [](i64 b, u64 n) { return integer_order_mod_N(b, n); }, py::arg("base"),
      py::arg("modulus"));
  m.def(
      "matrix_order",
      [](const py::object& matrix, u64 n) {
        const SL2Matrix a = hyperbolic(to_matrix(matrix));
        if (n < 2) throw InvalidInput("modulus must be at least 2");
        return big(to_string(matrix_order_mod_N(a, n, field_data(a)).ord));
      },
      py::arg("matrix"), py::arg("modulus"));
  m.def(
      "classify",
      [](const py::object& matrix) { return std::string(to_string(classify_matrix(to_matrix(matrix)).kind())); },
      py::arg("matrix"));
  m.def(
      "field_info",
      [](const py::object& matrix) {
        const SL2Matrix a = hyperbolic(to_matrix(matrix));
        const QuadFieldData fd = field_data(a);
        py::dict d;
        d["disc"] = big(to_string(fd.disc));
        d["field_disc"] = big(to_string(fd.field_disc));
        d["conductor"] = big(to_string(fd.conductor));
        d["unit"] = py::make_tuple(big(fd.fundamental_unit.x.str()),
                                   big(fd.fundamental_unit.y.str()));
        d["unit_norm"] = fd.unit_norm;
        d["power_index"] = fd.power_index;
        return d;
      },
      py::arg("matrix"));
  m.def(
      "kummer_degree_interval",
      [](const py::object& matrix, u64 n) {
        const SL2Matrix a = hyperbolic(to_matrix(matrix));
        const auto d = kummer_degree_interval(n, field_data(a));
        return py::make_tuple(d.lower, d.upper);
      },
      py::arg("matrix"), py::arg("n"));
  m.def(
      "lemma_simple_census",
      [](const py::object& matrix, u64 y, u64 prime_limit) {
        const auto c = lemma_simple_census(to_matrix(matrix), y, prime_limit);
        py::dict d;
        d["y"] = c.y;
        d["M"] = big(c.M.str());
        d["low_order_primes"] = c.low_order_primes;
        d["divisor_check"] = c.divisor_check;
        d["logM_over_y2"] = c.logM_over_y2;
        return d;
      },
      py::arg("matrix"), py::arg("y"), py::arg("prime_limit") = kCensusPrimeLimit);
  m.def("_scan", &run_scan, py::arg("kind"), py::arg("config_json"), py::arg("workers") = 1,
        py::arg("with_timing") = true);
}
