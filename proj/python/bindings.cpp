// Python module subtrop._core. Matrices cross the boundary as float64 numpy
// arrays; NaN marks a missing entry on input.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <string>

#include "subtrop/error.hpp"
#include "subtrop/eval.hpp"
#include "subtrop/factorize.hpp"
#include "subtrop/objective.hpp"
#include "subtrop/polymin.hpp"
#include "subtrop/synth.hpp"

namespace py = pybind11;
using namespace subtrop;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

NonNegMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-d array");
  const auto r = static_cast<std::size_t>(a.shape(0));
  const auto c = static_cast<std::size_t>(a.shape(1));
  const double* p = a.data();
  NonNegMatrix M(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double v = p[i * c + j];
      if (std::isnan(v)) {
        M.set_missing(i, j);
      } else {
        M.set(i, j, v);
      }
    }
  }
  return M;
}

Array to_array(const NonNegMatrix& M) {
  Array out({M.rows(), M.cols()});
  double* p = out.mutable_data();
  for (std::size_t i = 0; i < M.rows(); ++i) {
    for (std::size_t j = 0; j < M.cols(); ++j) {
      p[i * M.cols() + j] = M.is_observed(i, j) ? M(i, j) : std::nan("");
    }
  }
  return out;
}

PatternMatrix to_pattern(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-d mask");
  PatternMatrix P(a.shape(0), a.shape(1));
  const bool* p = a.data();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    for (py::ssize_t j = 0; j < a.shape(1); ++j) P.set(i, j, p[i * a.shape(1) + j]);
  }
  return P;
}

py::array_t<bool> from_pattern(const PatternMatrix& P) {
  py::array_t<bool> out({P.rows(), P.cols()});
  bool* p = out.mutable_data();
  for (std::size_t i = 0; i < P.rows(); ++i) {
    for (std::size_t j = 0; j < P.cols(); ++j) p[i * P.cols() + j] = P(i, j);
  }
  return out;
}

py::dict factorize_py(const Array& A, std::size_t rank, const std::string& algorithm,
                      std::optional<std::size_t> cycles,
                      std::optional<std::string> objective, std::size_t bucket_size,
                      double delta, double theta, double tau, int max_degree,
                      double update_fraction, bool rescale) {
  FactorizeOptions opt;
  opt.algorithm = algorithm_from_name(algorithm);
  opt.rank = rank;
  opt.cycles = cycles;
  opt.objective = objective;
  opt.capricorn.bucket_size = bucket_size;
  opt.capricorn.delta = delta;
  opt.capricorn.theta = theta;
  opt.capricorn.tau = tau;
  opt.cancer.max_degree = max_degree;
  opt.cancer.update_fraction = update_fraction;
  opt.rescale = rescale;
  const NonNegMatrix M = to_matrix(A);
  FactorizeResult r;
  {
    py::gil_scoped_release release;
    r = factorize(M, opt);
  }
  py::list trace;
  for (const auto& rec : r.trace.records) {
    py::dict d;
    d["iteration"] = rec.iteration;
    d["block"] = rec.block ? py::cast(*rec.block) : py::none();
    d["error"] = rec.error;
    d["best_error"] = rec.best_error;
    d["failed"] = rec.failed;
    trace.append(d);
  }
  py::dict out;
  out["B"] = to_array(r.factors.B);
  out["C"] = to_array(r.factors.C);
  out["objective"] = r.factors.objective_name;
  out["cycles"] = r.cycles;
  out["best_error"] = r.best_error;
  out["final_error"] = r.final_error;
  out["relative_error"] = r.relative_error;
  out["seconds"] = r.seconds;
  out["trace"] = trace;
  return out;
}

py::dict synth_py(std::size_t rows, std::size_t cols, std::size_t rank, double density,
                  const std::string& noise, double level, int integer_levels,
                  std::uint64_t seed) {
  SynthSpec s;
  s.rows = rows;
  s.cols = cols;
  s.rank = rank;
  s.density = density;
  s.noise = {noise_kind_from_name(noise), level};
  s.integer_levels = integer_levels;
  s.seed = seed;
  const auto inst = generate_instance(s);
  py::dict out;
  out["clean"] = to_array(inst.clean);
  out["noisy"] = to_array(inst.noisy);
  out["B"] = to_array(inst.true_B);
  out["C"] = to_array(inst.true_C);
  out["warnings"] = inst.warnings;
  return out;
}

py::dict evaluate_py(const Array& truth, const Array& pred,
                     const py::array_t<bool, py::array::c_style | py::array::forcecast>& holdout) {
  const auto rep = evaluate_prediction(to_matrix(truth), to_matrix(pred), to_pattern(holdout));
  py::dict out;
  for (const auto& name : all_metric_names()) out[py::str(name)] = metric_value(rep, name);
  out["evaluated"] = rep.evaluated;
  out["evaluated_nonzero"] = rep.evaluated_nonzero;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Subtropical (max-times) matrix factorization";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  m.def("maxtimes_product",
        [](const Array& B, const Array& C) {
          return to_array(maxtimes_product(to_matrix(B), to_matrix(C)));
        },
        py::arg("B"), py::arg("C"), "(B ⊠ C)[i, j] = max_s B[i, s] * C[s, j]");

  m.def("objective",
        [](const std::string& name, const Array& A, const Array& R) {
          return evaluate(objective_from_name(name), to_matrix(A), to_matrix(R));
        },
        py::arg("name"), py::arg("A"), py::arg("R"),
        "Additive cost over the observed (non-NaN) entries of A");

  m.def("relative_error",
        [](const Array& A, const Array& R) {
          return relative_frobenius(to_matrix(A), to_matrix(R));
        },
        py::arg("A"), py::arg("R"));

  m.def("factorize", &factorize_py, py::arg("A"), py::arg("rank"),
        py::arg("algorithm") = "capricorn", py::arg("cycles") = py::none(),
        py::arg("objective") = py::none(), py::arg("bucket_size") = 3,
        py::arg("delta") = 0.01, py::arg("theta") = 0.5, py::arg("tau") = 0.5,
        py::arg("max_degree") = 16, py::arg("update_fraction") = 0.1,
        py::arg("rescale") = true);

  m.def("synth", &synth_py, py::arg("rows") = 200, py::arg("cols") = 160,
        py::arg("rank") = 5, py::arg("density") = 0.3, py::arg("noise") = "none",
        py::arg("level") = 0.0, py::arg("integer_levels") = 0, py::arg("seed") = 0);

  m.def("sample_holdout",
        [](const Array& A, std::optional<double> fraction,
           std::optional<std::size_t> per_row, bool nonzeros_only, std::uint64_t seed) {
          HoldoutSpec spec;
          spec.fraction = fraction;
          spec.per_row = per_row;
          spec.nonzeros_only = nonzeros_only;
          return from_pattern(sample_holdout(to_matrix(A), spec, seed));
        },
        py::arg("A"), py::arg("fraction") = py::none(), py::arg("per_row") = py::none(),
        py::arg("nonzeros_only") = true, py::arg("seed") = 0);

  m.def("evaluate", &evaluate_py, py::arg("truth"), py::arg("prediction"),
        py::arg("holdout"), "Every holdout metric as a dict");

  m.def("polymin",
        [](std::vector<double> a, std::vector<double> n, std::vector<double> b,
           int degree, const std::string& objective) {
          const auto r = polymin(a, n, b, degree, objective_from_name(objective));
          return py::make_tuple(r.error, r.x);
        },
        py::arg("a"), py::arg("n"), py::arg("b"), py::arg("degree"),
        py::arg("objective") = "frobenius",
        "Minimize sum_i phi(a_i, max(n_i, b_i x)) over x in [0, 1]");
}
