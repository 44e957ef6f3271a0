#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "gtp/asymptotics.hpp"
#include "gtp/closed_form.hpp"
#include "gtp/config.hpp"
#include "gtp/errors.hpp"
#include "gtp/experiments.hpp"
#include "gtp/geometry.hpp"
#include "gtp/pde_fd.hpp"
#include "gtp/specfun.hpp"

namespace py = pybind11;
using namespace gtp;

namespace {

PExponent exponent(double p) { return std::isinf(p) ? PExponent::infinity() : PExponent::finite(p); }

RateModel rate_model(const std::string& name) {
  for (auto m : {RateModel::TLogInvT, RateModel::T, RateModel::SqrtT})
    if (to_string(m) == name) return m;
  throw DomainError("unknown rate model: " + name);
}

py::dict report_dict(const AsymptoticReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["t"] = r.t_grid;
  d["measured"] = r.measured;
  d["target"] = r.target;
  d["fitted_rate"] = r.fitted_rate;
  d["extrapolated"] = r.extrapolated;
  d["relative_gap"] = r.relative_gap;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Short-time asymptotics of the normalized p-Laplacian heat flow";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<SeriesRegimeExceeded>(m, "SeriesRegimeExceeded", PyExc_ArithmeticError);

  m.def("conj_exponent", [](double p) { return exponent(p).conj(); }, py::arg("p"));

  m.def("erfc", [](double x) { return gtp::erfc(x); }, py::arg("x"));
  m.def("log_erfc", &log_erfc);
  m.def("erfcx", &erfcx);
  m.def("inverse_erfc", &inverse_erfc);
  m.def("gamma", [](double x) { return gtp::gamma(x); }, py::arg("x"));
  m.def("bessel_j", &bessel_j, py::arg("nu"), py::arg("x"));
  m.def("bessel_zeros", &bessel_zeros, py::arg("nu"), py::arg("count"));
  m.def("erfc_moment", &erfc_moment, py::arg("N"), py::arg("q"));

  m.def("heat_content_constant", &heat_content_constant);
  m.def("mean_value_constant", &mean_value_constant);
  m.def("qmean_constant", &qmean_constant);
  m.def(
      "heat_content_limit",
      [](int N, double p, double R, double pi_gamma) { return heat_content_limit(N, exponent(p), R, pi_gamma); },
      py::arg("N"), py::arg("p"), py::arg("R"), py::arg("pi_gamma"));

  py::class_<Domain>(m, "Domain")
      .def_static("half_space", &Domain::half_space, py::arg("dim"))
      .def_static("ball", &Domain::ball, py::arg("radius"), py::arg("dim"))
      .def_static("ellipse", &Domain::ellipse, py::arg("a"), py::arg("b"))
      .def_static("superellipse", &Domain::superellipse, py::arg("a"), py::arg("b"), py::arg("m"),
                  py::arg("segments") = 4096)
      .def_property_readonly("dim", &Domain::dim)
      .def("contains", &Domain::contains)
      .def("boundary_distance", &Domain::boundary_distance)
      .def("nearest_boundary_point", &Domain::nearest_boundary_point)
      .def("curvatures", &Domain::curvatures)
      .def("__repr__", &Domain::describe);

  py::class_<TouchingBallConfig>(m, "TouchingBall")
      .def_readonly("center", &TouchingBallConfig::center)
      .def_readonly("radius", &TouchingBallConfig::radius)
      .def_readonly("contact", &TouchingBallConfig::contact)
      .def_readonly("curvatures", &TouchingBallConfig::kappa)
      .def_readonly("pi_gamma", &TouchingBallConfig::pi_gamma);
  m.def("touching_ball", &validate_touching_ball, py::arg("domain"), py::arg("x"), py::arg("R"),
        py::arg("sphere_samples") = 4096);
  m.def(
      "parallel_area",
      [](const Domain& d, const TouchingBallConfig& c, double s, bool monte_carlo, std::uint64_t seed) {
        MonteCarloOptions mc;
        mc.seed = seed;
        const auto a = parallel_area(d, c, s, monte_carlo ? AreaMethod::MonteCarlo : AreaMethod::Auto, mc);
        return py::make_tuple(a.area, a.std_error);
      },
      py::arg("domain"), py::arg("ball"), py::arg("s"), py::arg("monte_carlo") = false, py::arg("seed") = 12345);
  m.def("parallel_area_limit", &parallel_area_limit, py::arg("N"), py::arg("R"), py::arg("pi_gamma"));
  m.def(
      "weingarten_check",
      [](const Domain& d, double R, int n) {
        const auto w = weingarten_check(d, R, n);
        py::dict out;
        out["min"] = w.min_pi;
        out["max"] = w.max_pi;
        out["deviation"] = w.deviation;
        out["verdict"] = w.verdict;
        return out;
      },
      py::arg("domain"), py::arg("R"), py::arg("samples") = 1024);

  py::class_<ScalarField, std::shared_ptr<ScalarField>>(m, "Field")
      .def("value", &ScalarField::value, py::arg("x"), py::arg("t"))
      .def("log_value", &ScalarField::log_value, py::arg("x"), py::arg("t"))
      .def("varadhan_residual",
           [](const ScalarField& f, const Point& x, double t) { return varadhan_residual(f, x, t); }, py::arg("x"),
           py::arg("t"))
      .def_property_readonly("p", [](const ScalarField& f) { return f.p().value(); });

  m.def(
      "half_space_solution",
      [](double p, int N) { return std::const_pointer_cast<ScalarField>(half_space_solution(exponent(p), N)); },
      py::arg("p"), py::arg("N") = 2);
  m.def(
      "ball_solution",
      [](double p, double R, int N) {
        return std::static_pointer_cast<ScalarField>(std::const_pointer_cast<BallParabolic>(ball_parabolic(exponent(p), R, N)));
      },
      py::arg("p"), py::arg("R"), py::arg("N"));
  m.def(
      "global_solution", [](double p, int N) { return std::const_pointer_cast<ScalarField>(global_phi(exponent(p), N)); },
      py::arg("p"), py::arg("N"));
  m.def(
      "ball_elliptic_log",
      [](double p, double R, int N, double eps, double r) { return ball_elliptic(exponent(p), R, N, eps).radial_log_value(r); },
      py::arg("p"), py::arg("R"), py::arg("N"), py::arg("eps"), py::arg("r"));
  m.def("half_space_residual_lower",
        [](double p, double delta, double t) { return half_space_residual_lower(exponent(p), delta, t); },
        py::arg("p"), py::arg("delta"), py::arg("t"));

  m.def(
      "heat_content",
      [](const ScalarField& f, const TouchingBallConfig& c, double t) { return heat_content(f, c, t); },
      py::arg("field"), py::arg("ball"), py::arg("t"));
  m.def(
      "heat_content_report",
      [](const ScalarField& f, const TouchingBallConfig& c, const std::vector<double>& ts) {
        AsymptoticReport r;
        {
          py::gil_scoped_release nogil;
          r = heat_content_report(f, c, ts);
        }
        return report_dict(r);
      },
      py::arg("field"), py::arg("ball"), py::arg("t"));
  m.def(
      "q_mean_report",
      [](const ScalarField& f, const TouchingBallConfig& c, double q, const std::vector<double>& ts) {
        AsymptoticReport r;
        {
          py::gil_scoped_release nogil;
          r = q_mean_report(f, c, q, ts);
        }
        return report_dict(r);
      },
      py::arg("field"), py::arg("ball"), py::arg("q"), py::arg("t"));
  m.def(
      "q_mean",
      [](const std::vector<double>& values, double q, std::vector<double> weights) {
        if (weights.empty()) weights.assign(values.size(), 1.0);
        return q_mean(values, weights, q).mu;
      },
      py::arg("values"), py::arg("q"), py::arg("weights") = std::vector<double>{});
  m.def(
      "rate_fit",
      [](const std::vector<double>& t, const std::vector<double>& r, const std::string& model) {
        const auto f = rate_fit(t, r, rate_model(model));
        return py::make_tuple(f.C, f.relative_residual);
      },
      py::arg("t"), py::arg("residuals"), py::arg("model"));

  m.def(
      "solve_fd",
      [](const Domain& domain, double p, double h, double T, py::object boundary) {
        BoundaryData data;
        bool python_data = false;
        double constant = 0.0;
        if (py::isinstance<py::float_>(boundary) || py::isinstance<py::int_>(boundary)) {
          constant = boundary.cast<double>();
          data = [constant](const Eigen::Vector2d&, double) { return constant; };
        } else {
          auto fn = boundary.cast<std::function<double(double, double, double)>>();
          data = [fn](const Eigen::Vector2d& y, double t) { return fn(y.x(), y.y(), t); };
          python_data = true;
        }
        auto grid = std::make_shared<const Grid2D>(domain, h);
        FieldState st;
        if (python_data) {
          st = solve_to(grid, exponent(p), data, T);
        } else {
          py::gil_scoped_release nogil;
          st = solve_to(grid, exponent(p), data, T);
        }
        py::array_t<double> values({grid->ny(), grid->nx()});
        auto v = values.mutable_unchecked<2>();
        for (int j = 0; j < grid->ny(); ++j)
          for (int i = 0; i < grid->nx(); ++i) v(j, i) = st.values[grid->index(i, j)];
        std::vector<double> xs(grid->nx()), ys(grid->ny());
        for (int i = 0; i < grid->nx(); ++i) xs[i] = grid->position(grid->index(i, 0)).x();
        for (int j = 0; j < grid->ny(); ++j) ys[j] = grid->position(grid->index(0, j)).y();
        py::dict out;
        out["values"] = values;
        out["x"] = xs;
        out["y"] = ys;
        out["t"] = st.t;
        out["dt"] = st.dt;
        out["steps"] = st.steps;
        out["max_principle_held"] = st.max_principle_held;
        out["time_monotone"] = st.time_monotone;
        // constant data on a disk has the scaled radial solution as reference
        if (!python_data && domain.kind() == Domain::Kind::Ball) {
          const auto ref = ball_parabolic(exponent(p), domain.as_ball().radius, 2);
          const auto err = validate_against_reference(*grid, st, [&](const Eigen::Vector2d& x) {
            return constant * ref->radial_value(std::min(x.norm(), ref->radius()), st.t);
          });
          out["sup_error"] = err.sup;
          out["l2_error"] = err.l2;
        }
        return out;
      },
      py::arg("domain"), py::arg("p"), py::arg("h"), py::arg("T"), py::arg("boundary") = 1.0);

  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        const auto cfg = parse_config(config_text);
        validate_config(cfg);
        ExperimentOutcome out;
        {
          py::gil_scoped_release nogil;
          out = run_experiment(cfg);
        }
        py::list checks;
        for (const auto& c : out.checks) {
          py::dict d;
          d["name"] = c.name;
          d["value"] = c.value;
          d["tolerance"] = c.tolerance;
          d["pass"] = c.pass;
          checks.append(d);
        }
        py::dict d;
        d["experiment"] = out.name;
        d["pass"] = out.pass();
        d["checks"] = checks;
        d["csv"] = out.csv;
        d["data"] = out.data.dump();
        return d;
      },
      py::arg("config_text"));
}
