#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aniso/estimator.hpp"
#include "aniso/rng.hpp"
#include "aniso/specialfn.hpp"
#include "aniso/isotest.hpp"
#include "aniso/study.hpp"

namespace py = pybind11;
using namespace aniso;

PYBIND11_MODULE(_core, m) {
  m.doc() = "anisotropy estimation from level curves of Gaussian fields";

  py::enum_<CovFamily>(m, "CovFamily")
      .value("SquaredExponential", CovFamily::SquaredExponential);

  py::class_<IsotropicCovariance>(m, "IsotropicCovariance")
      .def(py::init([](double variance, double length_scale) {
             IsotropicCovariance c{CovFamily::SquaredExponential, variance,
                                   length_scale};
             c.validate();
             return c;
           }),
           py::arg("variance") = 1.0, py::arg("length_scale") = 1.0)
      .def_readonly("variance", &IsotropicCovariance::variance)
      .def_readonly("length_scale", &IsotropicCovariance::length_scale)
      .def("evaluate",
           [](const IsotropicCovariance& c, const Eigen::Vector2d& t,
              const std::vector<int>& order) {
             return c.evaluate(t, order);
           },
           py::arg("t"), py::arg("order") = std::vector<int>{})
      .def("second_spectral_moment", &IsotropicCovariance::second_spectral_moment)
      .def("spectral_density", &IsotropicCovariance::spectral_density);

  py::class_<AffineModel>(m, "AffineModel")
      .def(py::init([](double lambda1, double lambda, double basis_angle,
                       const Eigen::Vector2d& vstar) {
             AffineModel a{lambda1, lambda, basis_angle, vstar.normalized()};
             a.validate();
             return a;
           }),
           py::arg("lambda1") = 1.0, py::arg("lambda_") = 1.0,
           py::arg("basis_angle") = 0.0,
           py::arg("vstar") = Eigen::Vector2d(1.0, 0.0))
      .def_readonly("lambda1", &AffineModel::lambda1)
      .def_property_readonly("lambda_",
                             [](const AffineModel& a) { return a.lambda; })
      .def_readonly("basis_angle", &AffineModel::basis_angle)
      .def_readonly("vstar", &AffineModel::vstar)
      .def("A", &AffineModel::A)
      .def("theta_o", &AffineModel::theta_o);

  py::class_<GridField>(m, "GridField")
      .def_readonly("half_width", &GridField::half_width)
      .def_readonly("spacing", &GridField::spacing)
      .def_readonly("seed", &GridField::seed)
      .def_readonly("values", &GridField::values)
      .def_readonly("grad_x", &GridField::grad_x)
      .def_readonly("grad_y", &GridField::grad_y)
      .def("save", &GridField::save)
      .def_static("load", &GridField::load);

  m.def("sample_field", &sample_field, py::arg("cov"), py::arg("model"),
        py::arg("n"), py::arg("h"), py::arg("seed"));

  py::class_<LevelCurve>(m, "LevelCurve")
      .def_readonly("level", &LevelCurve::level)
      .def_readonly("domain_area", &LevelCurve::domain_area)
      .def("total_length", &LevelCurve::total_length)
      .def("__len__", [](const LevelCurve& c) { return c.segments.size(); });

  m.def("extract_level_curve", &extract_level_curve, py::arg("field"),
        py::arg("u"));

  py::class_<FunctionalTriple>(m, "FunctionalTriple")
      .def_readonly("j_one", &FunctionalTriple::j_one)
      .def_readonly("j_star", &FunctionalTriple::j_star)
      .def_readonly("x_n", &FunctionalTriple::x_n)
      .def_readonly("y_n", &FunctionalTriple::y_n);

  m.def("functional_triple", &functional_triple, py::arg("field"), py::arg("u"),
        py::arg("vstar"));

  py::enum_<EstimateCase>(m, "EstimateCase")
      .value("Interior", EstimateCase::Interior)
      .value("AxisYzeroXlarge", EstimateCase::AxisYzeroXlarge)
      .value("Isotropic", EstimateCase::Isotropic);

  py::class_<EstimateResult>(m, "EstimateResult")
      .def_readonly("lambda_hat", &EstimateResult::lambda_hat)
      .def_readonly("theta_hat", &EstimateResult::theta_hat)
      .def_readonly("kind", &EstimateResult::kind)
      .def_readonly("x_n", &EstimateResult::x_n)
      .def_readonly("y_n", &EstimateResult::y_n);

  m.def("estimate", &estimate, py::arg("x_n"), py::arg("y_n"),
        py::arg("tol") = 1e-12);
  m.def("estimate_from_field", &estimate_from_field, py::arg("field"),
        py::arg("u"), py::arg("vstar"));
  m.def("estimate_tau", &estimate_tau, py::arg("j_one"), py::arg("u"),
        py::arg("cov"));
  m.def("estimate_lambda1", &estimate_lambda1, py::arg("j_one"), py::arg("u"),
        py::arg("lambda_hat"), py::arg("cov"));

  m.def("f_map", [](double lambda, double theta) {
    const FPoint p = f_map(lambda, theta);
    return std::make_pair(p.x, p.y);
  });
  m.def("elliptic_I", &elliptic_I, py::arg("lambda_"),
        py::arg("want_derivative") = false);
  m.def("hermite", &hermite);

  py::class_<CovarianceStack>(m, "CovarianceStack")
      .def_readonly("sigma_triple", &CovarianceStack::sigma_triple)
      .def_readonly("sigma_star", &CovarianceStack::sigma_star)
      .def_readonly("sigma_star_basis", &CovarianceStack::sigma_star_basis)
      .def_readonly("sigma_param", &CovarianceStack::sigma_param)
      .def_readonly("tail_estimate", &CovarianceStack::tail_estimate)
      .def_readonly("truncation", &CovarianceStack::truncation);

  m.def(
      "build_stack",
      [](double u, const IsotropicCovariance& cov, const AffineModel& model,
         int Q) { return build_stack(u, cov, model, Q); },
      py::arg("u"), py::arg("cov"), py::arg("model"), py::arg("Q") = 6);

  py::class_<TestResult>(m, "TestResult")
      .def_readonly("xi", &TestResult::xi)
      .def_readonly("p_value", &TestResult::p_value)
      .def_readonly("reject", &TestResult::reject)
      .def_readonly("tau_hat", &TestResult::tau_hat);

  m.def(
      "isotropy_test",
      [](const GridField& field, double u, const Eigen::Vector2d& vstar,
         const IsotropicCovariance& cov, double alpha, int Q) {
        return isotropy_test(field, u, vstar, cov, alpha, Q);
      },
      py::arg("field"), py::arg("u"), py::arg("vstar"), py::arg("cov"),
      py::arg("alpha") = 0.05, py::arg("Q") = 6);

  m.def("limit_density_fU", &limit_density_fU, py::arg("t"),
        py::arg("sigma_star_star"));
}
