#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ifgf/diagnostics.hpp"
#include "ifgf/evaluator.hpp"
#include "ifgf/geometry.hpp"
#include "ifgf/kernel.hpp"

namespace py = pybind11;
using namespace ifgf;

namespace {

using Points = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Coeffs = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

std::vector<Vec3> to_points(const Points& arr) {
  if (arr.ndim() != 2 || arr.shape(1) != 3) throw std::invalid_argument("points must have shape (N, 3)");
  const auto v = arr.unchecked<2>();
  std::vector<Vec3> out(arr.shape(0));
  for (py::ssize_t i = 0; i < arr.shape(0); ++i) out[i] = {v(i, 0), v(i, 1), v(i, 2)};
  return out;
}

std::vector<cplx> to_coeffs(const Coeffs& arr) {
  if (arr.ndim() != 1) throw std::invalid_argument("coefficients must be one-dimensional");
  return {arr.data(), arr.data() + arr.shape(0)};
}

Points from_points(const std::vector<Vec3>& pts) {
  Points out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int a = 0; a < 3; ++a) v(i, a) = pts[i][a];
  return out;
}

Coeffs from_coeffs(const std::vector<cplx>& c) {
  Coeffs out(static_cast<py::ssize_t>(c.size()));
  std::copy(c.begin(), c.end(), out.mutable_data());
  return out;
}

py::tuple cloud_tuple(const PointCloud& c) { return py::make_tuple(from_points(c.points), from_coeffs(c.coefficients)); }

Vec3 vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

}  // namespace

PYBIND11_MODULE(_ifgf, m) {
  m.doc() = "Interpolated factored Green function summation";

  m.def("gen_sphere", [](double a, int n) { return cloud_tuple(gen_sphere(a, n)); }, py::arg("a"), py::arg("n"));
  m.def(
      "gen_spheroid",
      [](double a, double alpha, double beta, double gamma, int n) {
        return cloud_tuple(gen_spheroid(a, alpha, beta, gamma, n));
      },
      py::arg("a"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("n"));
  m.def("gen_rough_sphere", [](double a, int n) { return cloud_tuple(gen_rough_sphere(a, n)); }, py::arg("a"),
        py::arg("n"));

  m.def(
      "green", [](std::array<double, 3> x, std::array<double, 3> y, double kappa) { return green(vec(x), vec(y), kappa); },
      py::arg("x"), py::arg("y"), py::arg("kappa"));
  m.def(
      "centered_factor",
      [](std::array<double, 3> x, std::array<double, 3> c, double kappa) { return centered_factor(vec(x), vec(c), kappa); },
      py::arg("x"), py::arg("center"), py::arg("kappa"));
  m.def(
      "analytic_factor",
      [](std::array<double, 3> x, std::array<double, 3> y, std::array<double, 3> c, double kappa) {
        return analytic_factor(vec(x), vec(y), vec(c), kappa);
      },
      py::arg("x"), py::arg("y"), py::arg("center"), py::arg("kappa"));

  py::class_<EvaluationPlan>(m, "Plan")
      .def_property_readonly("size", &EvaluationPlan::size)
      .def_property_readonly("depth", &EvaluationPlan::depth)
      .def_property_readonly("kappa", &EvaluationPlan::kappa)
      .def_property_readonly("leaf_grid",
                             [](const EvaluationPlan& p) { return py::make_tuple(p.params().leaf_ns, p.params().leaf_nc); })
      .def(
          "level_stats",
          [](const EvaluationPlan& p) {
            py::list out;
            for (const auto& l : p.level_stats()) {
              py::dict d;
              d["level"] = l.level;
              d["side"] = l.side;
              d["boxes"] = l.boxes;
              d["segments"] = l.segments;
              d["n_s"] = l.grid.n_s;
              d["n_c"] = l.grid.n_c;
              out.append(d);
            }
            return out;
          })
      .def(
          "evaluate",
          [](const EvaluationPlan& p, const Coeffs& coeffs, int threads) {
            const auto a = to_coeffs(coeffs);
            std::vector<cplx> out;
            {
              py::gil_scoped_release release;
              out = evaluate(p, a, {threads, nullptr});
            }
            return from_coeffs(out);
          },
          py::arg("coefficients"), py::arg("threads") = 1);

  m.def(
      "precompute",
      [](const Points& points, double kappa, int ps, int pang, int leaf_ns, int leaf_nc, int depth,
         int leaf_size_target) {
        EvaluatorParams params{ps, pang, leaf_ns, leaf_nc, depth, leaf_size_target};
        const auto pts = to_points(points);
        py::gil_scoped_release release;
        return precompute(pts, kappa, params);
      },
      py::arg("points"), py::arg("kappa"), py::arg("ps") = 3, py::arg("pang") = 5, py::arg("leaf_ns") = 0,
      py::arg("leaf_nc") = 0, py::arg("depth") = 0, py::arg("leaf_size_target") = 32);

  m.def(
      "direct",
      [](const Points& points, const Coeffs& coeffs, double kappa, std::optional<std::vector<std::size_t>> targets,
         int threads) {
        const auto pts = to_points(points);
        const auto a = to_coeffs(coeffs);
        std::vector<std::size_t> idx;
        if (targets) {
          idx = *targets;
        } else {
          idx.resize(pts.size());
          for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        }
        std::vector<cplx> out;
        {
          py::gil_scoped_release release;
          out = direct_oracle(pts, a, kappa, idx, threads);
        }
        return from_coeffs(out);
      },
      py::arg("points"), py::arg("coefficients"), py::arg("kappa"), py::arg("targets") = py::none(),
      py::arg("threads") = 1);

  m.def(
      "relative_error",
      [](const Coeffs& acc, const Coeffs& exact) { return relative_error(to_coeffs(acc), to_coeffs(exact)); },
      py::arg("approx"), py::arg("exact"));
  m.def("random_subset", &random_subset, py::arg("n"), py::arg("m"), py::arg("seed"));

  m.def(
      "factorization_error",
      [](double kappa_h, const std::string& strategy, int sources, int targets, std::uint64_t seed) {
        FactorizationDiagConfig c;
        c.sources = sources;
        c.targets = targets;
        c.seed = seed;
        return factorization_error(kappa_h, parse_strategy(strategy), c);
      },
      py::arg("kappa_h"), py::arg("strategy") = "full-s", py::arg("sources") = 1000, py::arg("targets") = 1000,
      py::arg("seed") = 1);
  m.def(
      "r_vs_s",
      [](int points, double delta_s, int sources, int targets, std::uint64_t seed) {
        RvsSDiagConfig c;
        c.points = points;
        c.delta_s = delta_s;
        c.sources = sources;
        c.targets = targets;
        c.seed = seed;
        py::list out;
        for (const auto& s : diag_r_vs_s(c)) out.append(py::make_tuple(s.r0, s.delta_r, s.error_r, s.error_s));
        return out;
      },
      py::arg("points") = 20, py::arg("delta_s") = eta / 8.0, py::arg("sources") = 1000, py::arg("targets") = 1000,
      py::arg("seed") = 1);
}
