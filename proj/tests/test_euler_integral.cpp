#include <doctest.h>

#include <cmath>

#include "ecx/euler_integral.hpp"
#include "ecx/rng.hpp"
#include "ecx/shotnoise.hpp"
#include "helpers.hpp"

using namespace ecx;

namespace {

RealTestFn constant_testfn(double h_value, double dh_value) {
    RealTestFn fn;
    fn.h = [h_value](double) { return h_value; };
    fn.dh = [dh_value](double) { return dh_value; };
    fn.lo = 0.0;
    fn.hi = 1.0;
    fn.n2_bound = std::max(std::abs(h_value), std::abs(dh_value));
    return fn;
}

double integral_h(const RealTestFn& h) {
    return ecx_test::adaptive_simpson(h.h, h.lo, h.hi, 1e-13);
}

}  // namespace

TEST_CASE("gamma density: quarter-plane membership and arithmetic") {
    Jet2 j;
    j.value = 0.5;

    j.gx = 1.0;
    j.gy = 1.0;
    CHECK(gamma_density(j, constant_testfn(1.0, 1.0)) == 0.0);  // neither quarter plane

    // grad (-1,-2): Q1 active, gamma = gx^2 h' + hxx h = 1*0 + 2*1
    j.gx = -1.0;
    j.gy = -2.0;
    j.hxx = 2.0;
    const auto t1 = gamma_term(j, constant_testfn(1.0, 0.0));
    CHECK(t1.q1_active);
    CHECK_FALSE(t1.q2_active);
    CHECK(gamma_density(j, constant_testfn(1.0, 0.0)) == doctest::Approx(2.0));

    // grad (-2,-1): Q2 active, gamma = gy^2 h' + hyy h = 1*1 + (-3)*1
    j.gx = -2.0;
    j.gy = -1.0;
    j.hyy = -3.0;
    const auto t2 = gamma_term(j, constant_testfn(1.0, 1.0));
    CHECK(t2.q2_active);
    CHECK(gamma_density(j, constant_testfn(1.0, 1.0)) == doctest::Approx(-2.0));
}

TEST_CASE("radial exactness: I_f(h) equals the integral of h") {
    const ScalarField2D f = make_field("radial_exp");
    const RealTestFn h = make_bump_testfn(0.2, 0.8);
    QuadratureSpec quad;
    const double value = euler_primitive_integral(f, h, quad);
    CHECK(std::abs(value - integral_h(h)) <= 1e-3);
}

TEST_CASE("empty excursions give exactly zero") {
    const ScalarField2D f = make_field("radial_exp");  // max value 1
    const RealTestFn h = make_bump_testfn(1.5, 2.0);
    QuadratureSpec quad;
    quad.spatial_resolution = 128;
    CHECK(euler_primitive_integral(f, h, quad) == 0.0);
    CHECK(euler_primitive_direct(f, h, quad, ECMethod::Morse) == 0.0);
    CHECK(euler_primitive_rotavg(f, h, quad) == 0.0);
}

TEST_CASE("support preconditions are enforced") {
    const ScalarField2D f = make_field("radial_exp");
    RealTestFn bad = make_bump_testfn(0.2, 0.8);
    bad.lo = 0.0;  // support touching 0 violates the hypothesis
    QuadratureSpec quad;
    quad.spatial_resolution = 64;
    CHECK_THROWS(euler_primitive_integral(f, bad, quad));
    CHECK_THROWS(euler_primitive_direct(f, bad, quad, ECMethod::Cubical));
}

TEST_CASE("linearity of I_f in the test function") {
    const ScalarField2D f = make_field("two_bump");
    const RealTestFn h1 = make_bump_testfn(0.2, 0.6);
    const RealTestFn h2 = make_bump_testfn(0.4, 0.9);
    const double alpha = 1.7, beta = -0.4;
    RealTestFn combo;
    combo.h = [=](double u) { return alpha * h1.h(u) + beta * h2.h(u); };
    combo.dh = [=](double u) { return alpha * h1.dh(u) + beta * h2.dh(u); };
    combo.lo = 0.2;
    combo.hi = 0.9;
    combo.n2_bound = std::abs(alpha) * h1.n2_bound + std::abs(beta) * h2.n2_bound;

    QuadratureSpec quad;
    quad.spatial_resolution = 128;
    const double lhs = euler_primitive_integral(f, combo, quad);
    const double rhs = alpha * euler_primitive_integral(f, h1, quad) +
                       beta * euler_primitive_integral(f, h2, quad);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("main identity on the two-bump field (desk scale)") {
    const ScalarField2D f = make_field("two_bump");
    const RealTestFn h = make_bump_testfn(0.2, 0.8);
    QuadratureSpec quad;
    quad.spatial_resolution = 256;
    const double integral = euler_primitive_integral(f, h, quad);
    QuadratureSpec dq;
    dq.spatial_resolution = 512;
    for (ECMethod method : {ECMethod::Cubical, ECMethod::Bicov, ECMethod::Morse}) {
        const double direct = euler_primitive_direct(f, h, dq, method);
        CHECK(std::abs(integral - direct) <= 1e-2);
    }
}

TEST_CASE("direct level integral matches the plateau decomposition") {
    const ScalarField2D f = make_field("two_bump");
    const RealTestFn h = make_bump_testfn(0.5, 0.95);  // straddles the saddle at 2/e
    const auto points = find_critical_points(f, f.bbox());
    const double saddle = points[2].value;
    REQUIRE(saddle > 0.5);
    REQUIRE(saddle < 0.95);
    // chi = 1 below the saddle, 2 between saddle and peaks (peaks above 0.95)
    const double expected = ecx_test::adaptive_simpson(h.h, 0.5, saddle, 1e-13) +
                            2.0 * ecx_test::adaptive_simpson(h.h, saddle, 0.95, 1e-13);
    QuadratureSpec quad;
    quad.spatial_resolution = 512;
    quad.level_count = 256;
    const double direct = euler_primitive_direct(f, h, quad, ECMethod::Morse);
    CHECK(direct == doctest::Approx(expected).epsilon(2e-3));
}

TEST_CASE("rotation-averaged form agrees with the plain integral") {
    const RealTestFn h = make_bump_testfn(0.2, 0.8);
    QuadratureSpec quad;
    for (const char* name : {"radial_exp", "two_bump"}) {
        const ScalarField2D f = make_field(name);
        const double a = euler_primitive_integral(f, h, quad);
        const double b = euler_primitive_rotavg(f, h, quad);
        CHECK(std::abs(a - b) <= 2.0 * quad.tol);
    }
}

TEST_CASE("kac-rice companion: tent closed form and crossing pairing") {
    const RealTestFn h = make_bump_testfn(0.2, 0.8);
    const KacRice1DResult tent = kac_rice_1d(tent_profile(), h);
    CHECK(tent.lhs == doctest::Approx(integral_h(h)).epsilon(1e-12));
    CHECK(std::abs(tent.rhs - 2.0 * tent.lhs) <= 1e-12);
    CHECK(std::abs(tent.up_integral - tent.down_integral) <= 1e-14);

    const KacRice1DResult smooth = kac_rice_1d(gauss1d_profile(), h);
    CHECK(std::abs(smooth.rhs - 2.0 * smooth.lhs) / smooth.rhs <= 1e-3);

    // h supported above max f
    const RealTestFn high = make_bump_testfn(1.5, 2.0);
    const KacRice1DResult empty = kac_rice_1d(tent_profile(), high);
    CHECK(empty.lhs == 0.0);
    CHECK(empty.rhs == 0.0);

    // boundary condition: f at the ends must stay below supp(h)
    Profile1D bad;
    bad.f = [](double) { return 0.5; };
    bad.df = [](double) { return 0.0; };
    bad.a = 0.0;
    bad.b = 1.0;
    CHECK_THROWS(kac_rice_1d(bad, h));
}

TEST_CASE("marching squares perimeter of a circular level set") {
    const ScalarField2D f = make_field("radial_exp");
    const GridSpec spec = GridSpec::cover(f.bbox(), 512);
    const SampledField samples = sample_field(f, spec);
    const double per = contour_length(samples, f, 0.5);
    CHECK(per == doctest::Approx(2.0 * M_PI * std::sqrt(std::log(2.0))).epsilon(1e-3));
}

TEST_CASE("co-area identity within one percent") {
    const RealTestFn h = make_bump_testfn(0.2, 0.8);
    QuadratureSpec quad;
    for (const char* name : {"radial_exp", "two_bump"}) {
        const CoareaResult r = coarea_check(make_field(name), h, quad);
        CHECK(std::abs(r.lhs - r.rhs) / std::abs(r.rhs) <= 0.01);
    }

    const RealTestFn high = make_bump_testfn(1.5, 2.0);
    QuadratureSpec cheap;
    cheap.spatial_resolution = 128;
    cheap.level_count = 32;
    const CoareaResult zero = coarea_check(make_field("radial_exp"), high, cheap);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
}

TEST_CASE("continuity gap bound: zero perturbation and property sweep") {
    const RealTestFn h = make_bump_testfn(0.2, 0.8);
    Jet2 f;
    f.value = 0.5;
    f.gx = -1.0;
    f.gy = -2.0;
    f.hxx = 0.7;
    const GapBound zero = continuity_gap_bound(f, Jet2{}, h, 1);
    CHECK(zero.actual == 0.0);
    CHECK(zero.bound >= 0.0);

    // same quarter plane, small g: actual stays under the |d_i g| driven bound
    Jet2 g;
    g.gx = -0.05;
    g.gy = -0.05;
    g.hxx = 0.02;
    g.value = 0.01;
    const GapBound small = continuity_gap_bound(f, g, h, 1);
    CHECK(small.actual > 0.0);
    CHECK(small.actual <= small.bound);

    CHECK_THROWS(continuity_gap_bound(f, g, h, 3));

    Rng rng(derive_seed(42, 700));
    int violations = 0;
    for (int k = 0; k < 1000; ++k) {
        Jet2 a, b;
        a.value = rng.uniform(0.2, 0.8);
        a.gx = rng.uniform(-2, 2);
        a.gy = rng.uniform(-2, 2);
        a.hxx = rng.uniform(-2, 2);
        a.hxy = rng.uniform(-2, 2);
        a.hyy = rng.uniform(-2, 2);
        b.value = rng.uniform(-2, 2);
        b.gx = rng.uniform(-2, 2);
        b.gy = rng.uniform(-2, 2);
        b.hxx = rng.uniform(-2, 2);
        b.hxy = rng.uniform(-2, 2);
        b.hyy = rng.uniform(-2, 2);
        for (int i = 1; i <= 2; ++i) {
            const GapBound gb = continuity_gap_bound(a, b, h, i);
            if (gb.actual > gb.bound) ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("continuity moment report: zero perturbation and monotone scaling") {
    const ScalarField2D f = make_field("two_bump");
    const RealTestFn h = make_bump_testfn(0.2, 0.8);
    QuadratureSpec quad;
    quad.spatial_resolution = 64;
    quad.tol = 0.05;

    const FieldSampler zero_sampler = [](std::uint64_t) { return make_affine_field(0, 0, 0); };
    const auto zero = continuity_moment_report(f, zero_sampler, h, 2, quad, 4, 99);
    CHECK(zero.lhs_q == 0.0);
    CHECK(std::isfinite(zero.rhs_without_cq));

    const KernelModel model = [] {
        KernelModel m = gaussian_model();
        m.amp_lo = 0.02;
        m.amp_hi = 0.08;
        return m;
    }();
    auto scaled_sampler = [&](double scale) {
        return FieldSampler([&model, scale](std::uint64_t seed) {
            const ScalarField2D g = shot_field(sample_germs(2.0, 0.5, model, seed), model);
            return add_scaled(make_affine_field(0, 0, 0), g, scale);
        });
    };
    // common random numbers: the same derived seeds at every scale
    const auto r1 = continuity_moment_report(f, scaled_sampler(1.0), h, 1, quad, 6, 4242);
    const auto r2 = continuity_moment_report(f, scaled_sampler(0.5), h, 1, quad, 6, 4242);
    const auto r3 = continuity_moment_report(f, scaled_sampler(0.25), h, 1, quad, 6, 4242);
    CHECK(r1.lhs_q >= r2.lhs_q);
    CHECK(r2.lhs_q >= r3.lhs_q);
    CHECK(r1.lhs_q > 0.0);
    CHECK(std::isfinite(r1.rhs_without_cq));
    CHECK(r1.rhs_without_cq > 0.0);
}
