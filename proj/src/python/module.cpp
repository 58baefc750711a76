// Python bindings for the main operations: field registry, Euler
// characteristics, the Euler-primitive identities, shot-noise estimators,
// and the validation suite.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ecx/euler_integral.hpp"
#include "ecx/fields.hpp"
#include "ecx/moments.hpp"
#include "ecx/rng.hpp"
#include "ecx/shotnoise.hpp"
#include "ecx/topology.hpp"
#include "ecx/validate.hpp"

namespace py = pybind11;

namespace {

ecx::QuadratureSpec make_quad(int resolution, int levels, double tol) {
    ecx::QuadratureSpec quad;
    quad.spatial_resolution = resolution;
    quad.level_count = levels;
    quad.tol = tol;
    return quad;
}

}  // namespace

PYBIND11_MODULE(_ecx, m) {
    m.doc() = "Euler characteristics of 2D excursion sets: identities and estimators";

    py::class_<ecx::Jet2>(m, "Jet2")
        .def_readonly("value", &ecx::Jet2::value)
        .def_readonly("gx", &ecx::Jet2::gx)
        .def_readonly("gy", &ecx::Jet2::gy)
        .def_readonly("hxx", &ecx::Jet2::hxx)
        .def_readonly("hxy", &ecx::Jet2::hxy)
        .def_readonly("hyy", &ecx::Jet2::hyy);

    py::class_<ecx::ScalarField2D>(m, "ScalarField2D")
        .def("value", [](const ecx::ScalarField2D& f, double x, double y) {
            return f.value({x, y});
        })
        .def("jet", [](const ecx::ScalarField2D& f, double x, double y) { return f.jet({x, y}); })
        .def_property_readonly("bbox", [](const ecx::ScalarField2D& f) {
            const ecx::Rect& b = f.bbox();
            return py::make_tuple(b.x0, b.y0, b.x1, b.y1);
        })
        .def_property_readonly("family",
                               [](const ecx::ScalarField2D& f) { return f.descriptor().family; });

    m.def("make_field", [](const std::string& desc) { return ecx::make_field(desc); },
          py::arg("descriptor"), "Field registry lookup, e.g. 'two_bump' or 'bumps:0:0:1:1'.");

    m.def("derive_seed", &ecx::derive_seed, py::arg("master_seed"), py::arg("index"));

    m.def(
        "euler_char",
        [](const std::string& field_desc, double level, const std::string& method,
           double spacing) -> long long {
            const ecx::ScalarField2D field = ecx::make_field(field_desc);
            const ecx::GridSpec spec = ecx::GridSpec::with_spacing(field.bbox(), spacing);
            if (method == "cubical")
                return ecx::euler_char_cubical(ecx::binarize(field, spec, level));
            if (method == "bicov") return ecx::euler_char_bicov(field, spec, level);
            if (method == "morse")
                return ecx::euler_char_morse(ecx::find_critical_points(field, field.bbox()), level);
            throw std::invalid_argument("method must be cubical|bicov|morse");
        },
        py::arg("field"), py::arg("level"), py::arg("method") = "cubical",
        py::arg("spacing") = 1.0 / 256.0);

    m.def(
        "euler_primitive",
        [](const std::string& field_desc, const std::string& testfn_desc, int resolution,
           int levels, const std::string& method) {
            const ecx::ScalarField2D field = ecx::make_field(field_desc);
            const ecx::RealTestFn h = ecx::make_real_testfn(testfn_desc);
            const ecx::QuadratureSpec quad = make_quad(resolution, levels, 1e-4);
            const double integral = ecx::euler_primitive_integral(field, h, quad);
            const double direct =
                ecx::euler_primitive_direct(field, h, quad, ecx::ec_method_from_string(method));
            py::dict out;
            out["integral"] = integral;
            out["direct"] = direct;
            out["gap"] = std::abs(integral - direct);
            return out;
        },
        py::arg("field"), py::arg("testfn"), py::arg("resolution") = 256,
        py::arg("levels") = 128, py::arg("method") = "cubical");

    m.def(
        "kac_rice",
        [](const std::string& profile, const std::string& testfn_desc) {
            const ecx::KacRice1DResult r =
                ecx::kac_rice_1d(ecx::make_profile1d(profile), ecx::make_real_testfn(testfn_desc));
            py::dict out;
            out["lhs"] = r.lhs;
            out["rhs"] = r.rhs;
            out["up_integral"] = r.up_integral;
            out["down_integral"] = r.down_integral;
            return out;
        },
        py::arg("profile"), py::arg("testfn"));

    m.def(
        "coarea",
        [](const std::string& field_desc, const std::string& testfn_desc, int resolution,
           int levels) {
            const ecx::CoareaResult r =
                ecx::coarea_check(ecx::make_field(field_desc), ecx::make_real_testfn(testfn_desc),
                                  make_quad(resolution, levels, 1e-4));
            py::dict out;
            out["lhs"] = r.lhs;
            out["rhs"] = r.rhs;
            return out;
        },
        py::arg("field"), py::arg("testfn"), py::arg("resolution") = 256, py::arg("levels") = 64);

    m.def(
        "psi",
        [](int i, double t, double s1, double s2, double v, double intensity, int resolution) {
            return ecx::psi(i, t, {s1, s2}, v, ecx::gaussian_model(),
                            make_quad(resolution, 32, 1e-4), intensity);
        },
        py::arg("i"), py::arg("t"), py::arg("s1") = 0.0, py::arg("s2") = 0.0, py::arg("v") = 0.0,
        py::arg("intensity") = 1.0, py::arg("resolution") = 256);

    m.def(
        "empirical_cf",
        [](double t, int reps, std::uint64_t seed, double intensity) {
            const ecx::KernelModel model = ecx::gaussian_model();
            const ecx::McEstimate e = ecx::empirical_cf(
                model, 5.0 * model.max_truncation_radius(), intensity, t, reps, seed);
            return py::make_tuple(e.value, e.stderr_est);
        },
        py::arg("t"), py::arg("reps") = 1000, py::arg("seed") = 42, py::arg("intensity") = 1.0);

    m.def(
        "mc_gamma_at_origin",
        [](double t, int reps, std::uint64_t seed, double intensity) {
            const ecx::KernelModel model = ecx::gaussian_model();
            const ecx::McEstimate e = ecx::mc_gamma_at_origin(
                t, model, 5.0 * model.max_truncation_radius(), intensity, reps, seed);
            return py::make_tuple(e.value, e.stderr_est);
        },
        py::arg("t"), py::arg("reps") = 1000, py::arg("seed") = 42, py::arg("intensity") = 1.0);

    m.def(
        "stationary_limit_density",
        [](double t, double intensity, double s_max, int s_grid) {
            ecx::ImproperGridSpec improper;
            improper.s_max = s_max;
            improper.s_grid = s_grid;
            const ecx::ValueWithError v = ecx::stationary_limit_density(
                t, ecx::gaussian_model(), make_quad(256, 32, 1e-4), improper, intensity);
            return py::make_tuple(v.value, v.error);
        },
        py::arg("t"), py::arg("intensity") = 1.0, py::arg("s_max") = 20.0, py::arg("s_grid") = 96);

    m.def(
        "moment_experiment",
        [](int q, double p, double window, int reps, std::uint64_t seed) {
            const ecx::MomentReport r = ecx::run_moment_experiment(
                ecx::gaussian_model(), 1.0, window, ecx::make_bump_testfn(0.2, 0.8), q, p, reps,
                seed, make_quad(128, 32, 2e-2));
            py::dict out;
            out["empirical_qth"] = r.empirical_qth;
            out["bound"] = r.bound;
            out["constant_used"] = r.constant_used;
            out["csv"] = r.to_csv_row();
            return out;
        },
        py::arg("q") = 2, py::arg("p") = 2.0, py::arg("window") = 2.0, py::arg("reps") = 16,
        py::arg("seed") = 42);

    m.def(
        "validate",
        [](std::uint64_t seed, bool include_reproducibility) {
            ecx::ValidationOptions opts;
            opts.master_seed = seed;
            opts.include_reproducibility = include_reproducibility;
            const ecx::Report report = ecx::run_validation(opts);
            return report.to_string();
        },
        py::arg("seed") = 42, py::arg("include_reproducibility") = false,
        "Run the acceptance suite and return the JSON report as a string.");
}
