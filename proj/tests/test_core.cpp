#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ecx/bessel.hpp"
#include "ecx/parallel.hpp"
#include "ecx/quadrature.hpp"
#include "ecx/rng.hpp"

using namespace ecx;

TEST_CASE("derive_seed is deterministic and collision-free over the test range") {
    CHECK(derive_seed(42, 7) == derive_seed(42, 7));

    std::vector<std::uint64_t> seen;
    seen.reserve(1000001);
    for (std::uint64_t i = 0; i <= 1000000; ++i) seen.push_back(derive_seed(42, i));
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());

    // different masters give different streams at i = 0
    std::vector<std::uint64_t> heads;
    for (std::uint64_t m = 0; m < 100; ++m) heads.push_back(derive_seed(m, 0));
    std::sort(heads.begin(), heads.end());
    CHECK(std::adjacent_find(heads.begin(), heads.end()) == heads.end());
}

TEST_CASE("rng distributions behave") {
    Rng rng(123);
    double acc = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        acc += u;
    }
    CHECK(std::abs(acc / 10000.0 - 0.5) < 0.02);

    // Poisson with a mean large enough to exercise chunk splitting
    Rng rp(7);
    double mean = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) mean += static_cast<double>(rp.poisson(200.0));
    mean /= n;
    CHECK(std::abs(mean - 200.0) < 3.0 * std::sqrt(200.0 / n));

    // in_disc stays inside and is deterministic per seed
    Rng ra(9), rb(9);
    for (int i = 0; i < 100; ++i) {
        double xa, ya, xb, yb;
        ra.in_disc(2.5, xa, ya);
        rb.in_disc(2.5, xb, yb);
        CHECK(xa == xb);
        CHECK(ya == yb);
        CHECK(xa * xa + ya * ya <= 2.5 * 2.5);
    }
}

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
    for (int order : {4, 8, 16, 32}) {
        const auto nodes = gauss_legendre(-1.0, 3.0, order);
        double acc = 0.0;
        for (const auto& n : nodes) acc += n.w * (n.x * n.x * n.x * n.x * n.x * n.x * n.x);
        // int_{-1}^{3} x^7 dx = (3^8 - 1)/8
        CHECK(acc == doctest::Approx((6561.0 - 1.0) / 8.0).epsilon(1e-13));
    }
}

TEST_CASE("composite rules converge on a smooth integrand") {
    auto f = [](double x) { return std::sin(3.0 * x); };
    const double exact = (std::cos(0.0) - std::cos(3.0)) / 3.0;
    const double mid = integrate_1d<double>(0.0, 1.0, 256, QuadRule::Midpoint, f);
    const double gl = integrate_1d<double>(0.0, 1.0, 256, QuadRule::GaussLegendre, f);
    CHECK(std::abs(mid - exact) < 1e-5);
    CHECK(std::abs(gl - exact) < 1e-14);
}

TEST_CASE("2d integration is deterministic across worker counts") {
    auto f = [](Vec2 p) { return std::exp(-p.x * p.x - 0.5 * p.y * p.y) + p.x; };
    const Rect box{-3.0, -3.0, 3.0, 3.0};
    set_worker_count(1);
    const double one = integrate_2d<double>(box, 128, QuadRule::Midpoint, f);
    set_worker_count(4);
    const double four = integrate_2d<double>(box, 128, QuadRule::Midpoint, f);
    set_worker_count(0);
    CHECK(one == four);
}

TEST_CASE("fast bessel matches the standard library") {
    for (double x = 0.0; x <= 180.0; x += 0.37) {
        CHECK(std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)) < 2e-7);
        CHECK(std::abs(bessel_j2(x) - std::cyl_bessel_j(2.0, x)) < 2e-7);
    }
    CHECK(bessel_j0(0.0) == doctest::Approx(1.0));
    CHECK(bessel_j2(1e-8) == doctest::Approx(0.0).epsilon(1e-15));
}
