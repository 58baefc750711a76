// Command-line driver: experiment configuration, seeded reproducible runs,
// JSON reports with optional CSV tables, and the self-validation suite.
//
// Exit codes: 0 all checks pass, 1 check failure, 2 usage error, 3 internal
// error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecx/config.hpp"
#include "ecx/euler_integral.hpp"
#include "ecx/fields.hpp"
#include "ecx/moments.hpp"
#include "ecx/parallel.hpp"
#include "ecx/report.hpp"
#include "ecx/rng.hpp"
#include "ecx/shotnoise.hpp"
#include "ecx/topology.hpp"
#include "ecx/validate.hpp"

namespace {

using ecx::Json;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

struct Output {
    std::string out_path;
    std::string csv_path;
    std::vector<std::string> csv_rows;

    void csv(const std::string& row) { csv_rows.push_back(row); }

    int finish(ecx::Report& report) {
        const std::string text = report.to_string();
        std::fputs(text.c_str(), stdout);
        if (!out_path.empty()) {
            std::ofstream f(out_path);
            f << text;
        }
        if (!csv_path.empty()) {
            std::ofstream f(csv_path);
            f << "operation,inputs,value,value2,error,wall_time_ms\n";
            for (const auto& row : csv_rows) f << row << "\n";
        }
        return report.all_pass() ? 0 : 1;
    }
};

std::string csv_row(const std::string& op, const std::string& inputs, double value, double value2,
                    double error, double wall_ms) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g,%.3f", op.c_str(), inputs.c_str(),
                  value, value2, error, wall_ms);
    return buf;
}

ecx::QuadratureSpec quad_from_config(const ecx::ConfigMap& cfg) {
    ecx::QuadratureSpec quad;
    quad.spatial_resolution = ecx::config_get_int(cfg, "quadrature.spatial_resolution", 512);
    quad.level_count = ecx::config_get_int(cfg, "quadrature.level_count", 128);
    quad.tol = ecx::config_get_double(cfg, "quadrature.tol", 1e-4);
    quad.rule = ecx::config_get(cfg, "quadrature.rule", "midpoint") == "gauss_legendre"
                    ? ecx::QuadRule::GaussLegendre
                    : ecx::QuadRule::Midpoint;
    return quad;
}

Json quad_json(const ecx::QuadratureSpec& quad) {
    return {{"spatial_resolution", quad.spatial_resolution},
            {"level_count", quad.level_count},
            {"rule", quad.rule == ecx::QuadRule::Midpoint ? "midpoint" : "gauss_legendre"},
            {"tol", quad.tol}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler characteristics of 2D excursion sets: identities and estimators"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t master_seed = 42;
    int workers = 0;
    Output output;
    app.add_option("--config", config_path, "flat key=value config file with [section] headers");
    app.add_option("--seed", master_seed, "master seed (per-task seeds derive from it)");
    app.add_option("--workers", workers, "worker threads (0 = available parallelism)");
    app.add_option("--out", output.out_path, "write the JSON report here as well as stdout");
    app.add_option("--csv", output.csv_path, "write CSV rows of the operations run");

    // ec
    auto* ec_cmd = app.add_subcommand("ec", "Euler characteristic of one excursion set");
    std::string ec_field = "two_bump", ec_method = "all";
    double ec_level = 0.3, ec_spacing = 1.0 / 256.0;
    ec_cmd->add_option("--field", ec_field, "field descriptor");
    ec_cmd->add_option("--level", ec_level, "excursion level u");
    ec_cmd->add_option("--method", ec_method, "cubical|bicov|morse|all");
    ec_cmd->add_option("--spacing", ec_spacing, "lattice spacing (the estimator epsilon)");

    // primitive
    auto* prim_cmd = app.add_subcommand("primitive", "I_f(h) and chi_f(h) with their gap");
    std::string prim_field = "radial_exp", prim_testfn = "bump:0.2:0.8", prim_method = "cubical";
    prim_cmd->add_option("--field", prim_field, "field descriptor");
    prim_cmd->add_option("--testfn", prim_testfn, "test function descriptor");
    prim_cmd->add_option("--method", prim_method, "EC method for the level integral");

    // kacrice
    auto* kac_cmd = app.add_subcommand("kacrice", "1D companion identity, both sides");
    std::string kac_profile = "tent", kac_testfn = "bump:0.2:0.8";
    kac_cmd->add_option("--profile", kac_profile, "tent|gauss1d");
    kac_cmd->add_option("--testfn", kac_testfn, "test function descriptor");

    // coarea
    auto* co_cmd = app.add_subcommand("coarea", "perimeter identity, both sides");
    std::string co_field = "radial_exp", co_testfn = "bump:0.2:0.8";
    co_cmd->add_option("--field", co_field, "field descriptor");
    co_cmd->add_option("--testfn", co_testfn, "test function descriptor");

    // shotnoise
    auto* shot_cmd = app.add_subcommand("shotnoise", "characteristic-function checks");
    std::vector<double> shot_t{0.5, 1.0, 2.0};
    int shot_reps = 2000;
    double shot_intensity = 1.0;
    bool shot_stationary = false;
    shot_cmd->add_option("--t", shot_t, "t panel");
    shot_cmd->add_option("--reps", shot_reps, "MC replicates");
    shot_cmd->add_option("--intensity", shot_intensity, "Poisson intensity");
    shot_cmd->add_flag("--stationary", shot_stationary,
                       "also compare the stationary limit against the origin-density MC");

    // moments
    auto* mom_cmd = app.add_subcommand("moments", "empirical moments against the bound");
    int mom_q = 2, mom_reps = 64;
    double mom_p = 2.0, mom_window = 2.0, mom_intensity = 1.0;
    mom_cmd->add_option("--q", mom_q, "moment order");
    mom_cmd->add_option("--p", mom_p, "Hoelder exponent (> 1)");
    mom_cmd->add_option("--reps", mom_reps, "MC replicates");
    mom_cmd->add_option("--window", mom_window, "germ window radius");
    mom_cmd->add_option("--intensity", mom_intensity, "Poisson intensity");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "full acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ecx::ConfigMap cfg;
        if (!config_path.empty()) cfg = ecx::parse_config_file(config_path);
        // flags override the file
        if (app.count("--seed") == 0) master_seed = ecx::config_get_u64(cfg, "run.seed", master_seed);
        if (app.count("--workers") == 0) workers = ecx::config_get_int(cfg, "run.workers", workers);
        ecx::set_worker_count(workers);
        const ecx::QuadratureSpec quad = quad_from_config(cfg);

        ecx::Report report;
        report.master_seed = master_seed;

        if (*ec_cmd) {
            report.command = "ec";
            if (ec_cmd->count("--field") == 0)
                ec_field = ecx::config_get(cfg, "ec.field", ec_field);
            const ecx::ScalarField2D field = ecx::make_field(ec_field);
            const ecx::GridSpec spec = ecx::GridSpec::with_spacing(field.bbox(), ec_spacing);
            report.config = {{"field", ec_field}, {"level", ec_level},
                             {"method", ec_method}, {"spacing", ec_spacing}};
            Timer timer;
            Json values;
            bool pass = true;
            long long first = 0;
            bool have_first = false;
            auto add = [&](const std::string& name, long long chi) {
                values[name] = chi;
                if (!have_first) {
                    first = chi;
                    have_first = true;
                } else if (chi != first) {
                    pass = false;
                }
            };
            if (ec_method == "cubical" || ec_method == "all")
                add("cubical", ecx::euler_char_cubical(ecx::binarize(field, spec, ec_level)));
            if (ec_method == "bicov" || ec_method == "all")
                add("bicov", ecx::euler_char_bicov(field, spec, ec_level));
            if (ec_method == "morse" || ec_method == "all")
                add("morse", ecx::euler_char_morse(
                                 ecx::find_critical_points(field, field.bbox()), ec_level));
            ecx::CheckRecord rec{"euler_characteristic", values, 0.0, pass, timer.ms(),
                                 master_seed};
            report.checks.push_back(rec);
            output.csv(csv_row("ec", ec_field + ":u=" + std::to_string(ec_level),
                               static_cast<double>(first), 0.0, 0.0, timer.ms()));
            return output.finish(report);
        }

        if (*prim_cmd) {
            report.command = "primitive";
            const ecx::ScalarField2D field = ecx::make_field(prim_field);
            const ecx::RealTestFn h = ecx::make_real_testfn(prim_testfn);
            report.config = {{"field", prim_field}, {"testfn", prim_testfn},
                             {"method", prim_method}, {"quadrature", quad_json(quad)}};
            Timer timer;
            const double integral = ecx::euler_primitive_integral(field, h, quad);
            const double direct = ecx::euler_primitive_direct(
                field, h, quad, ecx::ec_method_from_string(prim_method));
            const double gap = std::abs(integral - direct);
            const double tol = std::max(1e-2, 10.0 * quad.tol);
            ecx::CheckRecord rec{"euler_primitive_identity",
                                 Json{{"integral", integral}, {"direct", direct}, {"gap", gap}},
                                 tol,
                                 gap <= tol,
                                 timer.ms(),
                                 master_seed};
            report.checks.push_back(rec);
            output.csv(csv_row("primitive", prim_field + ":" + prim_testfn, integral, direct, gap,
                               timer.ms()));
            return output.finish(report);
        }

        if (*kac_cmd) {
            report.command = "kacrice";
            const ecx::Profile1D profile = ecx::make_profile1d(kac_profile);
            const ecx::RealTestFn h = ecx::make_real_testfn(kac_testfn);
            report.config = {{"profile", kac_profile}, {"testfn", kac_testfn}};
            Timer timer;
            const ecx::KacRice1DResult r = ecx::kac_rice_1d(profile, h);
            const double rel = std::abs(r.rhs - 2.0 * r.lhs) / std::max(1e-300, std::abs(r.rhs));
            ecx::CheckRecord rec{"kac_rice_factor2",
                                 Json{{"lhs", r.lhs},
                                      {"rhs", r.rhs},
                                      {"up_integral", r.up_integral},
                                      {"down_integral", r.down_integral},
                                      {"rel_gap_to_2lhs", rel}},
                                 1e-3,
                                 rel <= 1e-3,
                                 timer.ms(),
                                 master_seed};
            report.checks.push_back(rec);
            output.csv(csv_row("kacrice", kac_profile + ":" + kac_testfn, r.lhs, r.rhs, rel,
                               timer.ms()));
            return output.finish(report);
        }

        if (*co_cmd) {
            report.command = "coarea";
            const ecx::ScalarField2D field = ecx::make_field(co_field);
            const ecx::RealTestFn h = ecx::make_real_testfn(co_testfn);
            report.config = {{"field", co_field}, {"testfn", co_testfn},
                             {"quadrature", quad_json(quad)}};
            Timer timer;
            const ecx::CoareaResult r = ecx::coarea_check(field, h, quad);
            const double rel = std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
            ecx::CheckRecord rec{"coarea_identity",
                                 Json{{"lhs", r.lhs}, {"rhs", r.rhs}, {"rel_gap", rel}},
                                 0.01,
                                 rel <= 0.01,
                                 timer.ms(),
                                 master_seed};
            report.checks.push_back(rec);
            output.csv(csv_row("coarea", co_field + ":" + co_testfn, r.lhs, r.rhs, rel, timer.ms()));
            return output.finish(report);
        }

        if (*shot_cmd) {
            report.command = "shotnoise";
            const ecx::KernelModel model = ecx::gaussian_model();
            const double window = 5.0 * model.max_truncation_radius();
            report.config = {{"model", "gaussian"},
                             {"intensity", shot_intensity},
                             {"reps", shot_reps},
                             {"window_radius", window},
                             {"t_panel", shot_t},
                             {"quadrature", quad_json(quad)}};
            int idx = 0;
            for (double t : shot_t) {
                Timer timer;
                const ecx::McEstimate emp = ecx::empirical_cf(
                    model, window, shot_intensity, t, shot_reps, ecx::derive_seed(master_seed, idx));
                const ecx::Complex p = ecx::psi(1, t, {0.0, 0.0}, 0.0, model, quad, shot_intensity);
                const double gap = std::abs(p - emp.value);
                const double allowed = 3.0 * emp.stderr_est + 1e-3;
                ecx::CheckRecord rec{"cf_t_" + std::to_string(idx),
                                     Json{{"t", t},
                                          {"psi_re", p.real()},
                                          {"psi_im", p.imag()},
                                          {"empirical_re", emp.value.real()},
                                          {"empirical_im", emp.value.imag()},
                                          {"stderr", emp.stderr_est},
                                          {"gap", gap}},
                                     allowed,
                                     gap <= allowed,
                                     timer.ms(),
                                     ecx::derive_seed(master_seed, idx)};
                report.checks.push_back(rec);
                output.csv(csv_row("shotnoise_cf", "t=" + std::to_string(t), gap, allowed,
                                   emp.stderr_est, timer.ms()));
                ++idx;
            }
            if (shot_stationary) {
                Timer timer;
                const ecx::ValueWithError limit =
                    ecx::stationary_limit_density(1.0, model, quad, {}, shot_intensity);
                const ecx::McEstimate origin = ecx::mc_gamma_at_origin(
                    1.0, model, window, shot_intensity, shot_reps, ecx::derive_seed(master_seed, 99));
                const double gap = std::abs(limit.value - origin.value);
                const double allowed = 3.0 * origin.stderr_est + limit.error;
                ecx::CheckRecord rec{"stationary_limit",
                                     Json{{"limit_re", limit.value.real()},
                                          {"limit_im", limit.value.imag()},
                                          {"limit_error", limit.error},
                                          {"mc_re", origin.value.real()},
                                          {"mc_im", origin.value.imag()},
                                          {"mc_stderr", origin.stderr_est},
                                          {"gap", gap}},
                                     allowed,
                                     gap <= allowed,
                                     timer.ms(),
                                     ecx::derive_seed(master_seed, 99)};
                report.checks.push_back(rec);
            }
            return output.finish(report);
        }

        if (*mom_cmd) {
            report.command = "moments";
            const ecx::KernelModel model = ecx::gaussian_model();
            const ecx::RealTestFn h = ecx::make_bump_testfn(0.2, 0.8);
            ecx::QuadratureSpec mq = quad;
            mq.spatial_resolution = std::min(mq.spatial_resolution, 192);
            mq.tol = std::max(mq.tol, 2e-2);
            report.config = {{"q", mom_q}, {"p", mom_p}, {"window", mom_window},
                             {"intensity", mom_intensity}, {"reps", mom_reps}};
            Timer timer;
            const ecx::MomentReport mr = ecx::run_moment_experiment(
                model, mom_intensity, mom_window, h, mom_q, mom_p, mom_reps, master_seed, mq);
            ecx::CheckRecord rec{"moment_bound",
                                 Json{{"empirical_qth", mr.empirical_qth},
                                      {"bound", mr.bound},
                                      {"constant_used", mr.constant_used},
                                      {"moment_cap", mr.moment_cap},
                                      {"support_prob_integral", mr.support_prob_integral}},
                                 0.0,
                                 mr.empirical_qth <= mr.bound,
                                 timer.ms(),
                                 master_seed};
            report.checks.push_back(rec);
            output.csv(ecx::MomentReport::csv_header());
            output.csv(mr.to_csv_row());
            return output.finish(report);
        }

        if (*val_cmd) {
            ecx::ValidationOptions opts;
            opts.master_seed = master_seed;
            ecx::Report vr = ecx::run_validation(opts);
            return output.finish(vr);
        }

        std::fprintf(stderr, "no command selected\n");
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        ecx::Report report;
        report.command = "error";
        report.master_seed = master_seed;
        ecx::CheckRecord rec{"internal_error", Json{{"message", e.what()}}, 0.0, false, 0.0,
                             master_seed};
        report.checks.push_back(rec);
        std::fputs(report.to_string().c_str(), stdout);
        return 3;
    }
}
