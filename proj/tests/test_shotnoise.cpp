#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ecx/parallel.hpp"
#include "ecx/rng.hpp"
#include "ecx/shotnoise.hpp"

using namespace ecx;

namespace {

QuadratureSpec quick_quad() {
    QuadratureSpec quad;
    quad.spatial_resolution = 256;
    return quad;
}

}  // namespace

TEST_CASE("kernel structural and decay invariants hold on a 1e4-point sample") {
    for (const GrainKernel& kernel : {gaussian_kernel(), radial_power_kernel(3.0)}) {
        Rng rng(31);
        int grad_violations = 0, decay_violations = 0, negative = 0;
        for (int k = 0; k < 10000; ++k) {
            double x, y;
            rng.in_disc(kernel.truncation_radius, x, y);
            const Jet2 j = kernel.jet_at({x, y});
            if (j.value < 0.0) ++negative;
            const double gn = std::hypot(j.gx, j.gy);
            if (gn > kernel.grad_const * std::pow(std::abs(j.value), kernel.grad_alpha / 2.0))
                ++grad_violations;
            const double cap =
                kernel.decay_const * std::pow(1.0 + std::hypot(x, y), -kernel.decay_gamma);
            for (double entry : {j.value, j.gx, j.gy, j.hxx, j.hxy, j.hyy})
                if (std::abs(entry) > cap) {
                    ++decay_violations;
                    break;
                }
        }
        CHECK(negative == 0);
        CHECK(grad_violations == 0);
        CHECK(decay_violations == 0);
        CHECK(kernel.decay_gamma > 4.0);
        CHECK(kernel.grad_alpha >= 1.0);
    }
}

TEST_CASE("germ sampling: determinism, serialization, Poisson counts") {
    const KernelModel model = gaussian_model();
    const GermSample a = sample_germs(10.0, 1.0, model, 555);
    const GermSample b = sample_germs(10.0, 1.0, model, 555);
    CHECK(a.to_text() == b.to_text());
    for (const auto& germ : a.germs)
        CHECK(germ.pos.x * germ.pos.x + germ.pos.y * germ.pos.y <= 100.0);

    std::istringstream in(a.to_text());
    const GermSample parsed = GermSample::from_text(in);
    CHECK(parsed.germs.size() == a.germs.size());
    CHECK(parsed.to_text() == a.to_text());

    // empirical mean count over 1e4 seeds within 3 sigma of 100*pi
    const double mean_expected = 100.0 * M_PI;
    double mean = 0.0;
    const int n = 10000;
    for (int k = 0; k < n; ++k)
        mean += static_cast<double>(sample_germs(10.0, 1.0, model, derive_seed(9, k)).germs.size());
    mean /= n;
    CHECK(std::abs(mean - mean_expected) <= 3.0 * std::sqrt(mean_expected / n));

    CHECK_THROWS(sample_germs(-1.0, 1.0, model, 1));
    CHECK_THROWS(sample_germs(1.0, 0.0, model, 1));
}

TEST_CASE("shot field sums kernel jets") {
    const KernelModel model = gaussian_model();

    GermSample empty;
    empty.window_radius = 5.0;
    empty.intensity = 1.0;
    const ScalarField2D zero = shot_field(empty, model);
    CHECK(zero.value({0.3, -0.7}) == 0.0);

    GermSample one;
    one.window_radius = 5.0;
    one.intensity = 1.0;
    one.germs.push_back({{0.0, 0.0}, 0, 1.0, 0.0});
    const ScalarField2D single = shot_field(one, model);
    const Jet2 expect = gaussian_kernel().jet_at({0.4, 0.2});
    const Jet2 got = single.jet({0.4, 0.2});
    CHECK(got.value == expect.value);
    CHECK(got.gx == expect.gx);
    CHECK(got.hxy == expect.hxy);

    GermSample two = one;
    two.germs.push_back({{1.0, -0.5}, 0, 1.3, 0.0});
    const ScalarField2D pair = shot_field(two, model);
    const Vec2 probe{0.2, 0.1};
    const Jet2 sum = pair.jet(probe);
    const Jet2 direct = germ_jet(two.germs[0], model, probe) + germ_jet(two.germs[1], model, probe);
    CHECK(std::abs(sum.value - direct.value) <= 1e-12);
    CHECK(std::abs(sum.gx - direct.gx) <= 1e-12);
    CHECK(std::abs(sum.hyy - direct.hyy) <= 1e-12);
}

TEST_CASE("psi basics: normalization, modulus, symmetry") {
    const KernelModel model = gaussian_model();
    const QuadratureSpec quad = quick_quad();
    CHECK(psi(1, 0.0, {0.0, 0.0}, 0.0, model, quad) == Complex{1.0, 0.0});
    CHECK(psi(2, 0.0, {0.0, 0.0}, 0.0, model, quad) == Complex{1.0, 0.0});

    Rng rng(77);
    for (int k = 0; k < 100; ++k) {
        const double t = rng.uniform(-2.0, 2.0);
        const Vec2 s{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        const double v = rng.uniform(-0.5, 0.5);
        const int i = k % 2 + 1;
        CHECK(std::abs(psi(i, t, s, v, model, quad)) <= 1.0 + 1e-9);
    }

    const Complex plus = psi(1, 0.8, {0.4, 0.3}, 0.0, model, quad);
    const Complex minus = psi(1, 0.8, {-0.4, -0.3}, 0.0, model, quad);
    CHECK(std::abs(plus - minus) <= 1e-7);
}

TEST_CASE("empirical characteristic function matches psi") {
    const KernelModel model = gaussian_model();
    const QuadratureSpec quad = quick_quad();
    const double window = 5.0 * model.max_truncation_radius();

    const McEstimate at_zero = empirical_cf(model, window, 1.0, 0.0, 200, 1);
    CHECK(at_zero.value == Complex{1.0, 0.0});
    CHECK(at_zero.stderr_est == 0.0);

    const McEstimate emp = empirical_cf(model, window, 1.0, 1.0, 2000, derive_seed(42, 900));
    CHECK(std::abs(emp.value) <= 1.0 + 3.0 * emp.stderr_est);
    const Complex quad_psi = psi(1, 1.0, {0.0, 0.0}, 0.0, model, quad);
    CHECK(std::abs(quad_psi - emp.value) <= 3.0 * emp.stderr_est + 2e-3);
}

TEST_CASE("d4/d22 match central finite differences of psi") {
    const KernelModel model = gaussian_model();
    const QuadratureSpec quad = quick_quad();
    const double t = 1.0;
    const Vec2 s{0.3, 0.2};

    for (int i : {1, 2}) {
        const Complex d4 = d4_psi(i, t, s, model, quad);
        const double dv = 1e-4;
        const Complex fd =
            (psi(i, t, s, dv, model, quad) - psi(i, t, s, -dv, model, quad)) / (2.0 * dv);
        CHECK(std::abs(d4 - fd) / std::abs(fd) <= 1e-3);

        const Complex d22 = d22_psi(i, t, model, quad);
        const double ds = 1e-3;
        const Complex fd2 = (psi(i, t, {ds, 0.0}, 0.0, model, quad) -
                             2.0 * psi(i, t, {0.0, 0.0}, 0.0, model, quad) +
                             psi(i, t, {-ds, 0.0}, 0.0, model, quad)) /
                            (ds * ds);
        CHECK(std::abs(d22 - fd2) / std::abs(fd2) <= 1e-3);
    }

    // conjugate symmetry and the zero plane-integral of the pure second derivative
    const Complex a = d4_psi(1, 0.7, {0.2, -0.1}, model, quad);
    const Complex b = d4_psi(1, -0.7, {-0.2, 0.1}, model, quad);
    CHECK(std::abs(a - std::conj(b)) <= 1e-8);
    CHECK(std::abs(d4_psi(1, 0.0, {0.0, 0.0}, model, quad)) <= 1e-10);

    // d22 at t=0 is minus the (real) plane integral of d_i g^2
    const Complex d22_zero = d22_psi(1, 0.0, model, quad);
    CHECK(d22_zero.real() < 0.0);
    CHECK(std::abs(d22_zero.imag()) <= 1e-12);
}

TEST_CASE("mc estimators are deterministic and order-independent") {
    const KernelModel model = gaussian_model();
    const double window = 5.0 * model.max_truncation_radius();
    set_worker_count(1);
    const McEstimate a = mc_gamma_at_origin(1.0, model, window, 1.0, 200, 777);
    set_worker_count(3);
    const McEstimate b = mc_gamma_at_origin(1.0, model, window, 1.0, 200, 777);
    set_worker_count(0);
    CHECK(a.value == b.value);
    CHECK(a.stderr_est == b.stderr_est);

    CHECK_THROWS(mc_gamma_at_origin(1.0, model, 2.0, 1.0, 10, 1));  // window below 5T
}

TEST_CASE("stationary limit density matches the origin-density MC (small panel)") {
    const KernelModel model = gaussian_model();
    QuadratureSpec quad = quick_quad();
    ImproperGridSpec improper;
    improper.s_max = 20.0;
    improper.s_grid = 96;
    const double t = 0.5;

    const ValueWithError limit = stationary_limit_density(t, model, quad, improper);
    const double window = 5.0 * model.max_truncation_radius();
    const McEstimate mc = mc_gamma_at_origin(t, model, window, 1.0, 4000, derive_seed(7, 1));
    CHECK(std::abs(limit.value - mc.value) <= 3.0 * mc.stderr_est + limit.error + 5e-3);
}

TEST_CASE("fourier-window mc estimator: determinism and t=0 reality") {
    const KernelModel model = gaussian_model();
    QuadratureSpec quad;
    quad.spatial_resolution = 96;
    const McEstimate a = mc_euler_primitive_fourier(0.0, model, 16.0, 1.0, 24, quad, 99);
    const McEstimate b = mc_euler_primitive_fourier(0.0, model, 16.0, 1.0, 24, quad, 99);
    CHECK(a.value == b.value);
    CHECK(std::abs(a.value.imag()) <= 3.0 * a.stderr_est + 1e-12);
}

TEST_CASE("isotropy factor check at t=1") {
    const KernelModel model = gaussian_model();
    const double window = 5.0 * model.max_truncation_radius();
    const IsotropyCheck c = isotropy_factor_check(model, 1.0, window, 1.0, 3000, derive_seed(3, 3));
    CHECK(std::abs(c.lhs1 - c.rhs) <= 3.0 * c.stderr_diff1);
    CHECK(std::abs(c.lhs2 - c.rhs) <= 3.0 * c.stderr_diff2);

    // t=0 variant: the second-moment form of the same identity
    const IsotropyCheck c0 = isotropy_factor_check(model, 0.0, window, 1.0, 3000, derive_seed(3, 4));
    CHECK(std::abs(c0.lhs1 - c0.rhs) <= 3.0 * c0.stderr_diff1);
    CHECK(std::abs(c0.rhs.imag()) == 0.0);
}

TEST_CASE("angular quadrature helper reproduces the sector constant") {
    const double sector = (M_PI - 2.0) / 8.0;
    CHECK(std::abs(angular_cos2_integral(-3.0 * M_PI / 4.0, -M_PI / 2.0) - sector) <= 1e-12);
    CHECK(std::abs(angular_sin2_integral(-M_PI, -3.0 * M_PI / 4.0) - sector) <= 1e-12);
}

TEST_CASE("model validation") {
    KernelModel m = gaussian_model();
    m.components[0].weight = 0.7;
    CHECK_THROWS(m.check());
    m.components[0].weight = 1.0;
    m.amp_lo = -0.1;
    CHECK_THROWS(m.check());
    KernelModel empty;
    CHECK_THROWS(empty.check());
    CHECK_THROWS(radial_power_kernel(1.5));
}
