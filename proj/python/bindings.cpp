#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <stdexcept>

#include "jmlab/cone_geometry.hpp"
#include "jmlab/jm_metric.hpp"
#include "jmlab/path_io.hpp"
#include "jmlab/potentials.hpp"
#include "jmlab/scenario.hpp"
#include "jmlab/sector_optics.hpp"
#include "jmlab/sector_oracle.hpp"
#include "jmlab/variational.hpp"

namespace py = pybind11;
using namespace jmlab;

namespace {

ParamKind kind_from_string(const std::string& s) {
    if (s == "time") return ParamKind::Time;
    if (s == "arclength") return ParamKind::Arclength;
    if (s == "abstract") return ParamKind::Abstract;
    throw std::invalid_argument("param kind must be time, arclength or abstract");
}

SampledPath make_path(std::vector<Vec> points, std::vector<double> params,
                      const std::string& kind) {
    return SampledPath(std::move(points), std::move(params), kind_from_string(kind));
}

py::dict path_to_dict(const SampledPath& p) {
    py::dict d;
    d["points"] = p.points;
    d["params"] = p.params;
    const char* k = p.kind == ParamKind::Time
                        ? "time"
                        : (p.kind == ParamKind::Arclength ? "arclength" : "abstract");
    d["kind"] = k;
    return d;
}

} // namespace

PYBIND11_MODULE(_jmlab, m) {
    m.doc() = "geometric mechanics lab: reweighted kinetic metrics, cone geometry, "
              "band refraction and action minimization";

    py::class_<HomogeneousPotential>(m, "Potential")
        .def_static(
            "power_law",
            [](int ambient_dim, std::vector<double> masses, double kappa, double alpha,
               const std::string& conv) {
                return HomogeneousPotential::power_law(
                    MassSystem(ambient_dim, std::move(masses), kappa), alpha,
                    convention_from_string(conv));
            },
            py::arg("ambient_dim"), py::arg("masses"), py::arg("kappa"), py::arg("alpha"),
            py::arg("convention") = "PaperLiteral")
        .def_static(
            "central",
            [](int dim, double alpha, double strength) {
                return HomogeneousPotential::central(dim, alpha, strength);
            },
            py::arg("dim"), py::arg("alpha"), py::arg("strength") = 1.0)
        .def_static(
            "step_shape",
            [](int dim, double alpha, double outer, double band, double delta,
               const std::string& conv) {
                return HomogeneousPotential::step_shape(dim, alpha,
                                                        StepShapeParams(outer, band, delta),
                                                        convention_from_string(conv));
            },
            py::arg("dim"), py::arg("alpha"), py::arg("outer"), py::arg("band"),
            py::arg("delta"), py::arg("convention") = "PaperLiteral")
        .def("alpha", &HomogeneousPotential::alpha)
        .def("dim", &HomogeneousPotential::dim)
        .def("evaluate",
             [](const HomogeneousPotential& p, const Vec& q) {
                 return p.evaluate(q).value_or_infinity();
             })
        .def("gradient", &HomogeneousPotential::gradient)
        .def("newton_acceleration", &HomogeneousPotential::newton_acceleration)
        .def("collision_distance", &HomogeneousPotential::collision_distance);

    m.def("cone_radius", &cone_radius, py::arg("alpha"));
    m.def("to_cone_coordinate", &to_cone_coordinate, py::arg("r"), py::arg("alpha"));
    m.def("from_cone_coordinate", &from_cone_coordinate, py::arg("rho"), py::arg("alpha"));

    m.def(
        "jm_length",
        [](double h0, const HomogeneousPotential& pot, std::vector<Vec> points,
           std::vector<double> params, const std::string& kind) {
            return jm_length(JmMetric{h0, pot},
                             make_path(std::move(points), std::move(params), kind));
        },
        py::arg("h0"), py::arg("potential"), py::arg("points"), py::arg("params"),
        py::arg("kind") = "abstract");

    m.def("kepler_gauss_curvature", &kepler_gauss_curvature, py::arg("r"), py::arg("h0"));
    m.def(
        "gauss_curvature_fd",
        [](double h0, const HomogeneousPotential& pot, const Vec& q, double h) {
            return gauss_curvature_fd(JmMetric{h0, pot}, q, h);
        },
        py::arg("h0"), py::arg("potential"), py::arg("q"), py::arg("h") = 1e-4);

    m.def(
        "cone_distance",
        [](double rho1, double theta1, double rho2, double theta2, double c) {
            return cone_distance({rho1, theta1}, {rho2, theta2}, ConeSpec(c));
        },
        py::arg("rho1"), py::arg("theta1"), py::arg("rho2"), py::arg("theta2"),
        py::arg("c"));

    m.def(
        "apex_extendibility",
        [](double c, double incoming_theta, double outgoing_theta) {
            ApexVerdict v = apex_extendibility(ConeSpec(c), incoming_theta, outgoing_theta);
            py::dict d;
            d["inextendible"] = v.classification == ApexClass::Inextendible;
            d["margin"] = v.margin;
            d["min_flattened_angle"] = v.min_flattened_angle;
            return d;
        },
        py::arg("c"), py::arg("incoming_theta"), py::arg("outgoing_theta"));

    m.def(
        "corner_cut",
        [](double c, double incoming_theta, double outgoing_theta, double cut_radius) {
            CornerCutResult r =
                corner_cut(ConeSpec(c), incoming_theta, outgoing_theta, cut_radius);
            py::dict d;
            d["points"] = r.points;
            d["length"] = r.length;
            d["apex_length"] = r.apex_length;
            d["saving"] = r.saving;
            return d;
        },
        py::arg("c"), py::arg("incoming_theta"), py::arg("outgoing_theta"),
        py::arg("cut_radius"));

    m.def(
        "marchal_condition",
        [](double outer, double band, double delta, double alpha, const std::string& conv) {
            return marchal_condition(StepShapeParams(outer, band, delta), alpha,
                                     convention_from_string(conv));
        },
        py::arg("outer"), py::arg("band"), py::arg("delta"), py::arg("alpha"),
        py::arg("convention") = "PaperLiteral");

    m.def(
        "band_minimum",
        [](double outer, double band, double delta, double alpha, const std::string& conv) {
            SectorMetric metric = build_counterexample_sector(
                StepShapeParams(outer, band, delta), alpha, convention_from_string(conv));
            TestCurveMinimum tc = minimize_test_curve(metric);
            const auto& s = metric.sectors();
            py::dict d;
            d["psi1"] = s[0].end;
            d["psi2"] = s[1].end - s[1].begin;
            d["x_star"] = tc.x_star;
            d["length"] = tc.length;
            d["through_vertex"] = tc.classification == TestCurveClass::CollisionPath;
            d["critical_index"] = critical_index(s[0].end, s[1].end - s[1].begin,
                                                 s[0].index);
            return d;
        },
        py::arg("outer"), py::arg("band"), py::arg("delta"), py::arg("alpha"),
        py::arg("convention") = "PaperLiteral",
        "closed-form minimum of the symmetric pole-to-pole test family");

    m.def(
        "oracle_shortest_path",
        [](double outer, double band, double delta, double alpha, const std::string& conv,
           int resolution, int neighbor_order, double rho_max,
           std::optional<std::array<double, 2>> a, std::optional<std::array<double, 2>> b) {
            SectorMetric metric = build_counterexample_sector(
                StepShapeParams(outer, band, delta), alpha, convention_from_string(conv));
            OracleParams op;
            op.resolution = resolution;
            op.neighbor_order = neighbor_order;
            op.rho_max = rho_max;
            std::array<double, 2> pa = a ? *a : std::array<double, 2>{1.0, 0.0};
            std::array<double, 2> pb =
                b ? *b
                  : std::array<double, 2>{std::cos(metric.opening()),
                                          std::sin(metric.opening())};
            OracleResult res = oracle_shortest_path(metric, pa, pb, op);
            py::dict d;
            d["length"] = res.length;
            d["hits_vertex"] = res.hits_vertex;
            d["expanded"] = res.expanded;
            d["path"] = res.path;
            return d;
        },
        py::arg("outer"), py::arg("band"), py::arg("delta"), py::arg("alpha"),
        py::arg("convention") = "PaperLiteral", py::arg("resolution") = 300,
        py::arg("neighbor_order") = 6, py::arg("rho_max") = 1.5,
        py::arg("a") = std::nullopt, py::arg("b") = std::nullopt,
        "grid shortest path in the developed band metric");

    m.def(
        "discrete_action",
        [](std::vector<Vec> points, std::vector<double> times,
           const HomogeneousPotential& pot) {
            ActionReport r = discrete_action(
                make_path(std::move(points), std::move(times), "time"), pot);
            py::dict d;
            d["kinetic"] = r.kinetic_integral;
            d["potential"] = r.potential_integral;
            d["action"] = r.action;
            d["energy_profile"] = r.energy_profile;
            return d;
        },
        py::arg("points"), py::arg("times"), py::arg("potential"));

    m.def(
        "minimize_fixed_time",
        [](const Vec& q0, const Vec& q1, double T, const HomogeneousPotential& pot,
           int samples, int max_iterations, double tolerance, int starts,
           double perturbation, std::uint64_t seed) {
            MinimizeOptions opts;
            opts.sample_count = samples;
            opts.max_iterations = max_iterations;
            opts.tolerance = tolerance;
            opts.starts = starts;
            opts.perturbation = perturbation;
            opts.seed = seed;
            MinimizeResult r = minimize_fixed_time(q0, q1, T, pot, opts);
            py::dict d;
            d["path"] = path_to_dict(r.path);
            d["action"] = r.report.action;
            d["gradient_norm"] = r.gradient_norm;
            d["el_residual"] = r.el_residual_max;
            d["iterations"] = r.iterations;
            d["collision_touch"] = r.collision_touch;
            d["converged"] = r.converged;
            return d;
        },
        py::arg("q0"), py::arg("q1"), py::arg("total_time"), py::arg("potential"),
        py::arg("samples") = 65, py::arg("max_iterations") = 5000,
        py::arg("tolerance") = 1e-6, py::arg("starts") = 5, py::arg("perturbation") = 0.05,
        py::arg("seed") = 0);

    m.def(
        "action_length_bridge",
        [](std::vector<Vec> points, std::vector<double> times,
           const HomogeneousPotential& pot) {
            BridgeReport r = action_length_bridge(
                make_path(std::move(points), std::move(times), "time"), pot);
            py::dict d;
            d["length"] = r.length;
            d["action"] = r.action;
            d["slack"] = r.slack;
            return d;
        },
        py::arg("points"), py::arg("times"), py::arg("potential"));

    m.def(
        "blowup_rescale",
        [](std::vector<Vec> points, std::vector<double> times, double lambda,
           double alpha) {
            return path_to_dict(blowup_rescale(
                make_path(std::move(points), std::move(times), "time"), lambda, alpha));
        },
        py::arg("points"), py::arg("times"), py::arg("lambda_"), py::arg("alpha"));

    m.def(
        "brake_retrace_check",
        [](const HomogeneousPotential& pot, double h0, const Vec& q_start, double duration,
           int steps) {
            BrakeReport r = brake_retrace_check(pot, h0, q_start, duration, steps);
            py::dict d;
            d["retrace_deviation"] = r.max_retrace_deviation;
            d["energy_drift"] = r.max_energy_drift;
            return d;
        },
        py::arg("potential"), py::arg("h0"), py::arg("q_start"), py::arg("duration"),
        py::arg("steps"));

    m.def("validate_config", &validate_config_text, py::arg("json_text"),
          "all schema violations of a scenario config, empty when valid");
    m.def(
        "run_scenario",
        [](const std::string& json_text, std::optional<std::uint64_t> seed,
           std::optional<std::string> output_dir, std::optional<double> tolerance,
           int jobs) {
            RunOverrides ov;
            ov.seed = seed;
            ov.output_dir = std::move(output_dir);
            ov.tolerance = tolerance;
            ov.jobs = jobs;
            std::ostringstream log;
            int rc = run_scenario_text(json_text, ov, log);
            return py::make_tuple(rc, log.str());
        },
        py::arg("json_text"), py::arg("seed") = std::nullopt,
        py::arg("output_dir") = std::nullopt, py::arg("tolerance") = std::nullopt,
        py::arg("jobs") = 1, "returns (exit_code, log_text)");
    m.def("list_scenarios", &list_scenarios);
    m.def("g17", &g17, py::arg("value"), "shortest exact decimal form of a double");
}
