#include "ecx/validate.hpp"

#include <chrono>
#include <cmath>
#include <complex>

#include "ecx/euler_integral.hpp"
#include "ecx/fields.hpp"
#include "ecx/moments.hpp"
#include "ecx/rng.hpp"
#include "ecx/shotnoise.hpp"
#include "ecx/topology.hpp"

namespace ecx {

namespace {

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

double integral_of_h(const RealTestFn& h) {
    double acc = 0.0;
    for (const auto& node : quad_nodes_1d(h.lo, h.hi, 4096, QuadRule::GaussLegendre))
        acc += node.w * h.h(node.x);
    return acc;
}

Json cx(const Complex& z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

struct Fixture {
    std::uint64_t master_seed;
    QuadratureSpec quad;  // default: midpoint, 512, 128 levels, tol 1e-4
    RealTestFn h = make_bump_testfn(0.2, 0.8);
    ScalarField2D radial = make_field("radial_exp");
    ScalarField2D two_bump = make_field("two_bump");
    KernelModel model = gaussian_model();
    double intensity = 1.0;
    double mc_window = 30.0;  // 5 * truncation radius of the Gaussian kernel
};

CheckRecord check_radial_exactness(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "radial_exactness";
    rec.tolerance = 1e-3;
    const double value = euler_primitive_integral(fx.radial, fx.h, fx.quad);
    const double oracle = integral_of_h(fx.h);
    const double gap = std::abs(value - oracle);
    rec.wall_time_ms = timer.ms();
    rec.pass = gap <= rec.tolerance && rec.wall_time_ms < 10000.0;
    rec.values = {{"euler_primitive_integral", value},
                  {"integral_h", oracle},
                  {"gap", gap},
                  {"runtime_limit_ms", 10000.0}};
    return rec;
}

CheckRecord check_main_identity(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "main_identity";
    rec.tolerance = 1e-2;

    QuadratureSpec qi = fx.quad;
    QuadratureSpec qd = fx.quad;
    qd.spatial_resolution = 1024;
    const double i1 = euler_primitive_integral(fx.two_bump, fx.h, qi);
    const double d1 = euler_primitive_direct(fx.two_bump, fx.h, qd, ECMethod::Cubical);
    const double gap1 = std::abs(i1 - d1);

    qi.spatial_resolution = 1024;
    qd.spatial_resolution = 2048;
    qd.level_count = 256;
    const double i2 = euler_primitive_integral(fx.two_bump, fx.h, qi);
    const double d2 = euler_primitive_direct(fx.two_bump, fx.h, qd, ECMethod::Cubical);
    const double gap2 = std::abs(i2 - d2);

    const double ratio = gap2 / gap1;
    rec.pass = gap1 <= rec.tolerance && ratio >= 0.25 && ratio <= 0.75;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"integral", i1},        {"direct", d1},
                  {"gap", gap1},           {"gap_doubled_resolutions", gap2},
                  {"halving_ratio", ratio}, {"halving_window", Json::array({0.25, 0.75})}};
    return rec;
}

CheckRecord check_ec_method_agreement(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "ec_method_agreement";
    rec.tolerance = 0.0;  // integer equality

    const std::vector<double> levels{0.3, 0.5, 0.65, 0.8, 0.95};
    const GridSpec spec = GridSpec::with_spacing(fx.two_bump.bbox(), 1.0 / 256.0);
    const SampledField samples = sample_field(fx.two_bump, spec);
    const auto cubical = cubical_chi_at_levels(samples, levels);
    const auto bicov = bicov_chi_at_levels(samples, levels);
    const auto points = find_critical_points(fx.two_bump, fx.two_bump.bbox());

    bool pass = true;
    Json rows = Json::array();
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const long long morse = euler_char_morse(points, levels[k]);
        pass = pass && cubical[k] == bicov[k] && bicov[k] == morse;
        rows.push_back({{"level", levels[k]},
                        {"cubical", cubical[k]},
                        {"bicov", bicov[k]},
                        {"morse", morse}});
    }
    rec.pass = pass;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"levels", rows}, {"spacing", 1.0 / 256.0}};
    return rec;
}

CheckRecord check_rotation_identity(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "rotation_identity";
    rec.tolerance = 2e-4;
    const double base = euler_primitive_integral(fx.two_bump, fx.h, fx.quad);
    const double rotated =
        euler_primitive_integral(rotate_field(fx.two_bump, 1), fx.h, fx.quad);
    const double averaged = euler_primitive_rotavg(fx.two_bump, fx.h, fx.quad);
    const double gap_rot = std::abs(base - rotated);
    const double gap_avg = std::abs(base - averaged);
    rec.pass = gap_rot <= rec.tolerance && gap_avg <= rec.tolerance;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"integral", base},
                  {"integral_quarter_turn", rotated},
                  {"rotavg", averaged},
                  {"gap_rotation", gap_rot},
                  {"gap_rotavg", gap_avg}};
    return rec;
}

CheckRecord check_coarea(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "coarea";
    rec.tolerance = 0.01;
    const CoareaResult radial = coarea_check(fx.radial, fx.h, fx.quad);
    const CoareaResult bumps = coarea_check(fx.two_bump, fx.h, fx.quad);
    const double rel_radial = std::abs(radial.lhs - radial.rhs) / std::abs(radial.rhs);
    const double rel_bumps = std::abs(bumps.lhs - bumps.rhs) / std::abs(bumps.rhs);
    rec.pass = rel_radial <= rec.tolerance && rel_bumps <= rec.tolerance;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"radial_lhs", radial.lhs},   {"radial_rhs", radial.rhs},
                  {"radial_rel_gap", rel_radial}, {"two_bump_lhs", bumps.lhs},
                  {"two_bump_rhs", bumps.rhs},  {"two_bump_rel_gap", rel_bumps}};
    return rec;
}

CheckRecord check_kac_rice(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "kac_rice_companion";
    rec.tolerance = 1e-3;
    const KacRice1DResult tent = kac_rice_1d(tent_profile(), fx.h);
    const KacRice1DResult smooth = kac_rice_1d(gauss1d_profile(), fx.h);
    const double tent_gap = std::abs(tent.rhs - 2.0 * tent.lhs);
    const double smooth_rel = std::abs(smooth.rhs - 2.0 * smooth.lhs) / std::abs(smooth.rhs);
    const double crossing_gap = std::abs(tent.up_integral - tent.down_integral);
    rec.pass = tent_gap <= 1e-10 * std::max(1.0, std::abs(tent.rhs)) &&
               smooth_rel <= rec.tolerance && crossing_gap <= 1e-12;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"tent_lhs", tent.lhs},
                  {"tent_rhs", tent.rhs},
                  {"tent_gap", tent_gap},
                  {"gauss1d_lhs", smooth.lhs},
                  {"gauss1d_rhs", smooth.rhs},
                  {"gauss1d_rel_gap", smooth_rel},
                  {"up_down_integral_gap", crossing_gap}};
    return rec;
}

CheckRecord check_continuity_bound(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "continuity_bound";
    rec.tolerance = 0.0;  // the inequality is exact
    rec.seed = derive_seed(fx.master_seed, 700);
    Rng rng(rec.seed);
    int violations = 0;
    double worst_ratio = 0.0;
    for (int k = 0; k < 1000; ++k) {
        Jet2 f, g;
        f.value = rng.uniform(fx.h.lo, fx.h.hi);  // f-values inside supp(h)
        f.gx = rng.uniform(-2.0, 2.0);
        f.gy = rng.uniform(-2.0, 2.0);
        f.hxx = rng.uniform(-2.0, 2.0);
        f.hxy = rng.uniform(-2.0, 2.0);
        f.hyy = rng.uniform(-2.0, 2.0);
        g.value = rng.uniform(-2.0, 2.0);
        g.gx = rng.uniform(-2.0, 2.0);
        g.gy = rng.uniform(-2.0, 2.0);
        g.hxx = rng.uniform(-2.0, 2.0);
        g.hxy = rng.uniform(-2.0, 2.0);
        g.hyy = rng.uniform(-2.0, 2.0);
        for (int i = 1; i <= 2; ++i) {
            const GapBound gb = continuity_gap_bound(f, g, fx.h, i);
            if (gb.actual > gb.bound) ++violations;
            if (gb.bound > 0.0) worst_ratio = std::max(worst_ratio, gb.actual / gb.bound);
        }
    }
    rec.pass = violations == 0;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"pairs", 1000}, {"violations", violations}, {"worst_ratio", worst_ratio}};
    return rec;
}

CheckRecord check_morse_stability(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "morse_stability";
    rec.tolerance = 0.0;
    rec.seed = derive_seed(fx.master_seed, 800);
    Rng rng(rec.seed);
    const double eta = 1e-4;
    const double level = 0.3;
    int mismatches = 0;
    for (int k = 0; k < 100; ++k) {
        const double a = rng.uniform(-1.0, 1.0);
        const double b1 = rng.uniform(-1.0, 1.0);
        const double b2 = rng.uniform(-1.0, 1.0);
        const auto [before, after] =
            morse_count_stability(fx.two_bump, level, make_affine_field(a, b1, b2), eta);
        const std::array<int, 3> expected{2, 1, 0};
        if (before != expected || after != expected) ++mismatches;
    }
    rec.pass = mismatches == 0;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"perturbations", 100}, {"eta", eta}, {"level", level},
                  {"mismatches", mismatches}};
    return rec;
}

CheckRecord check_shot_cf(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "shot_noise_cf";
    rec.tolerance = 1e-3;  // plus 3 * stderr, per t
    rec.seed = derive_seed(fx.master_seed, 900);
    bool pass = true;
    Json rows = Json::array();
    const int reps = 10000;
    int idx = 0;
    for (double t : {0.5, 1.0, 2.0}) {
        const McEstimate emp = empirical_cf(fx.model, fx.mc_window, fx.intensity, t, reps,
                                            derive_seed(rec.seed, idx++));
        const Complex quad_psi = psi(1, t, {0.0, 0.0}, 0.0, fx.model, fx.quad, fx.intensity);
        const double gap = std::abs(quad_psi - emp.value);
        const double allowed = 3.0 * emp.stderr_est + 1e-3;
        pass = pass && gap <= allowed;
        rows.push_back({{"t", t},
                        {"psi", cx(quad_psi)},
                        {"empirical", cx(emp.value)},
                        {"stderr", emp.stderr_est},
                        {"gap", gap},
                        {"allowed", allowed}});
    }
    rec.pass = pass;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"reps", reps}, {"t_panel", rows}};
    return rec;
}

CheckRecord check_isotropy_factor(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "isotropy_factor";
    rec.tolerance = 1e-12;  // for the angular constant; MC sides use 3*stderr
    rec.seed = derive_seed(fx.master_seed, 1000);
    const int reps = 10000;
    const IsotropyCheck c =
        isotropy_factor_check(fx.model, 1.0, fx.mc_window, fx.intensity, reps, rec.seed);
    const double gap1 = std::abs(c.lhs1 - c.rhs);
    const double gap2 = std::abs(c.lhs2 - c.rhs);
    const double sector = (M_PI - 2.0) / 8.0;
    const double ang_cos = angular_cos2_integral(-3.0 * M_PI / 4.0, -M_PI / 2.0);
    const double ang_sin = angular_sin2_integral(-M_PI, -3.0 * M_PI / 4.0);
    const double ang_gap = std::max(std::abs(ang_cos - sector), std::abs(ang_sin - sector));
    rec.pass = gap1 <= 3.0 * c.stderr_diff1 && gap2 <= 3.0 * c.stderr_diff2 &&
               ang_gap <= rec.tolerance;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"reps", reps},
                  {"lhs1", cx(c.lhs1)},
                  {"lhs2", cx(c.lhs2)},
                  {"rhs", cx(c.rhs)},
                  {"gap1", gap1},
                  {"gap2", gap2},
                  {"stderr_diff1", c.stderr_diff1},
                  {"stderr_diff2", c.stderr_diff2},
                  {"angular_constant_gap", ang_gap}};
    return rec;
}

CheckRecord check_stationary_limit(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "stationary_limit";
    rec.seed = derive_seed(fx.master_seed, 1100);
    const double t = 1.0;
    const ValueWithError limit =
        stationary_limit_density(t, fx.model, fx.quad, ImproperGridSpec{}, fx.intensity);
    const McEstimate origin =
        mc_gamma_at_origin(t, fx.model, fx.mc_window, fx.intensity, 10000, rec.seed);
    const double gap = std::abs(limit.value - origin.value);
    const double allowed = 3.0 * origin.stderr_est + limit.error;
    rec.tolerance = allowed;

    // window sweep: distances to the limit are non-increasing within bars
    QuadratureSpec mc_quad = fx.quad;
    mc_quad.spatial_resolution = 128;
    const double ns[3] = {16.0, 64.0, 256.0};
    const int sweep_reps[3] = {200, 120, 80};
    McEstimate sweep[3];
    double dist[3];
    for (int k = 0; k < 3; ++k) {
        sweep[k] = mc_euler_primitive_fourier(t, fx.model, ns[k], fx.intensity, sweep_reps[k],
                                              mc_quad, derive_seed(rec.seed, 10 + k));
        dist[k] = std::abs(sweep[k].value - limit.value);
    }
    const bool mono01 =
        dist[1] <= dist[0] + 3.0 * (sweep[0].stderr_est + sweep[1].stderr_est) + limit.error;
    const bool mono12 =
        dist[2] <= dist[1] + 3.0 * (sweep[1].stderr_est + sweep[2].stderr_est) + limit.error;

    rec.pass = gap <= allowed && mono01 && mono12;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"limit", cx(limit.value)},
                  {"limit_error_bar", limit.error},
                  {"mc_gamma", cx(origin.value)},
                  {"mc_stderr", origin.stderr_est},
                  {"gap", gap},
                  {"allowed", allowed},
                  {"sweep",
                   Json::array({Json{{"n", ns[0]}, {"estimate", cx(sweep[0].value)},
                                     {"stderr", sweep[0].stderr_est}, {"distance", dist[0]}},
                                Json{{"n", ns[1]}, {"estimate", cx(sweep[1].value)},
                                     {"stderr", sweep[1].stderr_est}, {"distance", dist[1]}},
                                Json{{"n", ns[2]}, {"estimate", cx(sweep[2].value)},
                                     {"stderr", sweep[2].stderr_est}, {"distance", dist[2]}}})},
                  {"monotone", mono01 && mono12}};
    return rec;
}

CheckRecord check_derivative_formulas(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "psi_derivative_formulas";
    rec.tolerance = 1e-3;
    const double t = 1.0;
    bool pass = true;
    Json rows = Json::array();
    for (int i = 1; i <= 2; ++i) {
        const Vec2 s{0.3, 0.2};
        const double dv = 1e-4;
        const Complex d4 = d4_psi(i, t, s, fx.model, fx.quad, fx.intensity);
        const Complex fd4 = (psi(i, t, s, dv, fx.model, fx.quad, fx.intensity) -
                             psi(i, t, s, -dv, fx.model, fx.quad, fx.intensity)) /
                            (2.0 * dv);
        const double rel4 = std::abs(d4 - fd4) / std::abs(fd4);

        const double ds = 1e-3;
        const Complex d22 = d22_psi(i, t, fx.model, fx.quad, fx.intensity);
        const Complex fd22 = (psi(i, t, {ds, 0.0}, 0.0, fx.model, fx.quad, fx.intensity) -
                              2.0 * psi(i, t, {0.0, 0.0}, 0.0, fx.model, fx.quad, fx.intensity) +
                              psi(i, t, {-ds, 0.0}, 0.0, fx.model, fx.quad, fx.intensity)) /
                             (ds * ds);
        const double rel22 = std::abs(d22 - fd22) / std::abs(fd22);
        pass = pass && rel4 <= rec.tolerance && rel22 <= rec.tolerance;
        rows.push_back({{"i", i},
                        {"d4", cx(d4)},
                        {"d4_fd", cx(fd4)},
                        {"d4_rel", rel4},
                        {"d22", cx(d22)},
                        {"d22_fd", cx(fd22)},
                        {"d22_rel", rel22}});
    }
    rec.pass = pass;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"t", t}, {"cases", rows}};
    return rec;
}

CheckRecord check_moment_bound(const Fixture& fx) {
    Timer timer;
    CheckRecord rec;
    rec.name = "moment_bound";
    rec.tolerance = 0.0;
    rec.seed = derive_seed(fx.master_seed, 1300);

    QuadratureSpec quad;
    quad.spatial_resolution = 128;
    quad.level_count = 32;
    quad.tol = 2e-2;
    const double window = 2.0;
    const int reps = 64;

    bool pass = true;
    Json rows = Json::array();
    for (int k = 0; k < 5; ++k) {
        const std::uint64_t seed_k = derive_seed(rec.seed, k);
        std::vector<double> values(static_cast<std::size_t>(reps));
        parallel_for_chunks(static_cast<std::size_t>(reps), [&](std::size_t r) {
            const ScalarField2D f = shot_field(
                sample_germs(window, fx.intensity, fx.model, derive_seed(seed_k, r)), fx.model);
            const Rect box{-(window + 3.0), -(window + 3.0), window + 3.0, window + 3.0};
            values[r] = euler_primitive_integral(with_bbox(f, box), fx.h, quad);
        });
        const double prob_integral = support_prob_integral(
            fx.model, fx.intensity, window, fx.h, 2.0, std::min(reps, 200), derive_seed(seed_k, 9000));
        for (int q : {1, 2}) {
            const double empirical = empirical_moment(values, q);
            const double cap = shot_moment_cap(fx.model, fx.intensity, q, 2.0);
            const double constant = q * std::pow(2.0, q);
            const double bound = moment_bound(q, 2.0, cap, fx.h, prob_integral, constant);
            pass = pass && empirical <= bound;
            rows.push_back({{"seed_index", k},
                            {"q", q},
                            {"p", 2.0},
                            {"empirical", empirical},
                            {"bound", bound},
                            {"constant_used", constant},
                            {"moment_cap", cap},
                            {"support_prob_integral", prob_integral}});
        }
    }
    rec.pass = pass;
    rec.wall_time_ms = timer.ms();
    rec.values = {{"window", window}, {"reps", reps}, {"cases", rows}};
    return rec;
}

std::vector<CheckRecord> run_criteria(std::uint64_t master_seed) {
    Fixture fx{master_seed, QuadratureSpec{}};
    std::vector<CheckRecord> checks;
    checks.push_back(check_radial_exactness(fx));
    checks.push_back(check_main_identity(fx));
    checks.push_back(check_ec_method_agreement(fx));
    checks.push_back(check_rotation_identity(fx));
    checks.push_back(check_coarea(fx));
    checks.push_back(check_kac_rice(fx));
    checks.push_back(check_continuity_bound(fx));
    checks.push_back(check_morse_stability(fx));
    checks.push_back(check_shot_cf(fx));
    checks.push_back(check_isotropy_factor(fx));
    checks.push_back(check_stationary_limit(fx));
    checks.push_back(check_derivative_formulas(fx));
    checks.push_back(check_moment_bound(fx));
    return checks;
}

}  // namespace

Report run_validation(const ValidationOptions& opts) {
    Report report;
    report.command = "validate";
    report.master_seed = opts.master_seed;
    report.config = {{"master_seed", opts.master_seed},
                     {"field_panel", Json::array({"radial_exp", "two_bump"})},
                     {"testfn", "bump:0.2:0.8"},
                     {"quadrature",
                      {{"spatial_resolution", 512}, {"level_count", 128}, {"rule", "midpoint"},
                       {"tol", 1e-4}}},
                     {"shot_model", "gaussian, amplitude U[0.5,1.5], rotation on, intensity 1"}};
    report.checks = run_criteria(opts.master_seed);

    if (opts.include_reproducibility) {
        Timer timer;
        CheckRecord rec;
        rec.name = "reproducibility";
        rec.tolerance = 0.0;
        rec.seed = opts.master_seed;

        Report first = report;
        Report second;
        second.command = report.command;
        second.master_seed = report.master_seed;
        second.config = report.config;
        second.checks = run_criteria(opts.master_seed);

        const bool identical =
            Report::strip_timings(first.to_json()) == Report::strip_timings(second.to_json());
        rec.pass = identical;
        rec.wall_time_ms = timer.ms();
        rec.values = {{"byte_identical_modulo_timings", identical}};
        report.checks.push_back(rec);
    }
    return report;
}

}  // namespace ecx
