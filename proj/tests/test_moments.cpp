#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ecx/moments.hpp"
#include "ecx/rng.hpp"

using namespace ecx;

TEST_CASE("empirical moment: basics, permutation invariance, scaling") {
    CHECK(empirical_moment(std::vector<double>{0.0, 0.0, 0.0}, 2) == 0.0);
    CHECK(empirical_moment(std::vector<double>{2.0}, 2) == 4.0);
    CHECK_THROWS(empirical_moment(std::vector<double>{}, 1));

    Rng rng(12);
    std::vector<double> v(64);
    for (auto& x : v) x = rng.uniform(-3.0, 3.0);
    std::vector<double> shuffled = v;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(empirical_moment(v, 3) == doctest::Approx(empirical_moment(shuffled, 3)).epsilon(1e-14));

    std::vector<double> scaled = v;
    for (auto& x : scaled) x *= -2.5;
    CHECK(empirical_moment(scaled, 2) ==
          doctest::Approx(std::pow(2.5, 2) * empirical_moment(v, 2)).epsilon(1e-13));
}

TEST_CASE("moment estimate is stable under sample doubling (jackknife SE)") {
    Rng rng(77);
    const int n = 400;
    std::vector<double> values(2 * n);
    for (auto& x : values) x = rng.uniform(0.0, 1.0);
    const std::vector<double> half(values.begin(), values.begin() + n);

    const double est_n = empirical_moment(half, 2);
    const double est_2n = empirical_moment(values, 2);

    // jackknife SE of the half-sample estimate
    double se = 0.0;
    {
        double sum = 0.0;
        for (double x : half) sum += x * x;
        double acc = 0.0;
        for (double x : half) {
            const double loo = (sum - x * x) / (n - 1);
            acc += (loo - est_n) * (loo - est_n);
        }
        se = std::sqrt(acc * (n - 1) / n);
    }
    CHECK(std::abs(est_2n - est_n) <= 3.0 * se);
}

TEST_CASE("moment bound: homogeneity and edge cases") {
    const RealTestFn h1 = make_bump_testfn(0.2, 0.8, 1.0);
    const RealTestFn h2 = make_bump_testfn(0.2, 0.8, 2.0);
    CHECK(moment_bound(2, 2.0, 10.0, h1, 0.0, 8.0) == 0.0);
    const double b1 = moment_bound(2, 2.0, 10.0, h1, 3.0, 8.0);
    const double b2 = moment_bound(2, 2.0, 10.0, h2, 3.0, 8.0);
    CHECK(b2 == doctest::Approx(4.0 * b1).epsilon(1e-12));
    CHECK_THROWS(moment_bound(2, 1.0, 10.0, h1, 3.0, 8.0));
    CHECK_THROWS(moment_bound(0, 2.0, 10.0, h1, 3.0, 8.0));
}

TEST_CASE("support probability integral: zero, monotone in p, seed stability") {
    const KernelModel model = gaussian_model();
    const RealTestFn unreachable = make_bump_testfn(50.0, 60.0);
    CHECK(support_prob_integral(model, 1.0, 2.0, unreachable, 2.0, 16, 5) == 0.0);

    const RealTestFn h = make_bump_testfn(0.2, 0.8);
    const double p15 = support_prob_integral(model, 1.0, 2.0, h, 1.5, 64, 5);
    const double p4 = support_prob_integral(model, 1.0, 2.0, h, 4.0, 64, 5);
    CHECK(p15 > 0.0);
    CHECK(p15 >= p4);  // x^{1-1/p} decreases toward x as p grows (x in [0,1])

    const double again = support_prob_integral(model, 1.0, 2.0, h, 2.0, 64, 6);
    const double base = support_prob_integral(model, 1.0, 2.0, h, 2.0, 64, 5);
    CHECK(std::abs(again - base) / base <= 0.05);

    CHECK_THROWS(support_prob_integral(model, 1.0, 2.0, h, 1.0, 16, 5));
}

TEST_CASE("shot moment cap is positive and grows with the order") {
    const KernelModel model = gaussian_model();
    const double m12 = shot_moment_cap(model, 1.0, 1, 2.0);
    const double m22 = shot_moment_cap(model, 1.0, 2, 2.0);
    CHECK(m12 > 0.0);
    CHECK(std::isfinite(m22));
    CHECK(m22 > m12);
}

TEST_CASE("moment experiment satisfies the bound (single desk-scale run)") {
    const KernelModel model = gaussian_model();
    const RealTestFn h = make_bump_testfn(0.2, 0.8);
    QuadratureSpec quad;
    quad.spatial_resolution = 128;
    quad.level_count = 32;
    quad.tol = 2e-2;
    const MomentReport report = run_moment_experiment(model, 1.0, 2.0, h, 2, 2.0, 24, 31, quad);
    CHECK(report.empirical_qth >= 0.0);
    CHECK(report.empirical_qth <= report.bound);
    CHECK(report.constant_used == doctest::Approx(2.0 * 4.0));
    const std::string row = report.to_csv_row();
    CHECK(row.find(',') != std::string::npos);
    CHECK(MomentReport::csv_header().rfind("q,", 0) == 0);
}
