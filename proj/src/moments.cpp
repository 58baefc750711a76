#include "ecx/moments.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ecx/euler_integral.hpp"
#include "ecx/parallel.hpp"
#include "ecx/rng.hpp"

namespace ecx {

std::string MomentReport::csv_header() {
    return "q,p,empirical_qth,bound,constant_used,moment_cap,support_prob_integral,reps,seed,inputs";
}

std::string MomentReport::to_csv_row() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%llu,%s", q, p,
                  empirical_qth, bound, constant_used, moment_cap, support_prob_integral, reps,
                  static_cast<unsigned long long>(seed), inputs.c_str());
    return buf;
}

namespace {

double sup_h_plus_dh(const RealTestFn& h) {
    double sup_h = 0.0, sup_dh = 0.0;
    const int n = 4096;
    for (int i = 0; i <= n; ++i) {
        const double u = h.lo + (h.hi - h.lo) * i / n;
        sup_h = std::max(sup_h, std::abs(h.h(u)));
        sup_dh = std::max(sup_dh, std::abs(h.dh(u)));
    }
    return sup_h + sup_dh;
}

double uniform_amp_moment(const KernelModel& model, int k) {
    const double lo = model.amp_lo, hi = model.amp_hi;
    if (hi - lo < 1e-300) return std::pow(lo, k);
    return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / ((k + 1) * (hi - lo));
}

}  // namespace

double moment_bound(int q, double p, double moment_cap, const RealTestFn& h,
                    double support_prob_integral, double constant) {
    if (q < 1) throw std::invalid_argument("moment_bound: q >= 1 required");
    if (!(p > 1.0)) throw std::invalid_argument("moment_bound: p > 1 required");
    const double inner = std::pow(moment_cap, 1.0 / p) * sup_h_plus_dh(h) * support_prob_integral;
    return constant * std::pow(inner, q);
}

double empirical_moment(const std::vector<double>& values, int q) {
    if (values.empty()) throw std::invalid_argument("empirical_moment: empty sample");
    double acc = 0.0;
    for (double v : values) acc += std::pow(std::abs(v), q);
    return acc / static_cast<double>(values.size());
}

double empirical_moment(const std::vector<std::complex<double>>& values, int q) {
    if (values.empty()) throw std::invalid_argument("empirical_moment: empty sample");
    double acc = 0.0;
    for (const auto& v : values) acc += std::pow(std::abs(v), q);
    return acc / static_cast<double>(values.size());
}

double support_prob_integral(const KernelModel& model, double intensity, double window_radius,
                             const RealTestFn& h, double p, int reps, std::uint64_t seed) {
    if (!(p > 1.0)) throw std::invalid_argument("support_prob_integral: p > 1 required");
    if (reps < 1) throw std::invalid_argument("support_prob_integral: reps >= 1");

    const double half = window_radius + model.max_truncation_radius();
    const int res = 96;
    const double step = 2.0 * half / res;

    std::vector<std::vector<std::uint32_t>> hits(static_cast<std::size_t>(reps));
    parallel_for_chunks(static_cast<std::size_t>(reps), [&](std::size_t r) {
        const ScalarField2D f =
            shot_field(sample_germs(window_radius, intensity, model, derive_seed(seed, r)), model);
        auto& local = hits[r];
        local.assign(static_cast<std::size_t>(res) * res, 0);
        for (int j = 0; j < res; ++j) {
            for (int i = 0; i < res; ++i) {
                const double v = f.value({-half + (i + 0.5) * step, -half + (j + 0.5) * step});
                if (v >= h.lo && v <= h.hi)
                    local[static_cast<std::size_t>(i) + static_cast<std::size_t>(res) * j] = 1;
            }
        }
    });

    double integral = 0.0;
    for (std::size_t cell = 0; cell < static_cast<std::size_t>(res) * res; ++cell) {
        std::uint32_t count = 0;
        for (int r = 0; r < reps; ++r) count += hits[static_cast<std::size_t>(r)][cell];
        const double prob = static_cast<double>(count) / reps;
        if (prob > 0.0) integral += std::pow(prob, 1.0 - 1.0 / p) * step * step;
    }
    return integral;
}

double shot_moment_cap(const KernelModel& model, double intensity, int q, double p) {
    model.check();
    const int n_grad = static_cast<int>(std::ceil(2.0 * p * q));
    const int n_hess = static_cast<int>(std::ceil(p * q));
    const int n_max = std::max(n_grad, n_hess);

    // kbar_j for the two entry kinds, by polar quadrature of |entry|^j
    auto kbar = [&](int j, bool hess_entry) {
        double total = 0.0;
        for (const auto& comp : model.components) {
            const GrainKernel& kernel = comp.kernel;
            double acc = 0.0;
            for (const auto& rn : quad_nodes_1d(0.0, kernel.truncation_radius, 512,
                                                QuadRule::GaussLegendre)) {
                const double r = rn.x;
                const double u = r * r;
                double ang = 0.0;
                const int na = 64;
                for (int a = 0; a < na; ++a) {
                    const double phi = (a + 0.5) * 2.0 * M_PI / na;
                    const double entry =
                        hess_entry
                            ? 2.0 * kernel.dg(u) + 4.0 * u * std::cos(phi) * std::cos(phi) * kernel.ddg(u)
                            : 2.0 * r * std::cos(phi) * kernel.dg(u);
                    ang += std::pow(std::abs(entry), j) * (2.0 * M_PI / na);
                }
                acc += rn.w * r * ang;
            }
            total += comp.weight * acc;
        }
        return intensity * uniform_amp_moment(model, j) * total;
    };

    auto moment_from_cumulants = [](const std::vector<double>& kb) {
        // m_n = sum_{k=1..n} C(n-1,k-1) kb_k m_{n-k}, all terms nonnegative
        const int n = static_cast<int>(kb.size()) - 1;
        std::vector<double> m(static_cast<std::size_t>(n) + 1, 0.0);
        m[0] = 1.0;
        for (int nn = 1; nn <= n; ++nn) {
            double acc = 0.0;
            double binom = 1.0;
            for (int k = 1; k <= nn; ++k) {
                acc += binom * kb[static_cast<std::size_t>(k)] * m[static_cast<std::size_t>(nn - k)];
                binom = binom * (nn - k) / k;
            }
            m[static_cast<std::size_t>(nn)] = acc;
        }
        return m;
    };

    std::vector<double> kb_grad(static_cast<std::size_t>(n_max) + 1, 0.0);
    std::vector<double> kb_hess(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int j = 1; j <= n_max; ++j) {
        kb_grad[static_cast<std::size_t>(j)] = kbar(j, false);
        kb_hess[static_cast<std::size_t>(j)] = kbar(j, true);
    }
    const auto m_grad = moment_from_cumulants(kb_grad);
    const auto m_hess = moment_from_cumulants(kb_hess);
    return std::max(m_grad[static_cast<std::size_t>(n_grad)],
                    m_hess[static_cast<std::size_t>(n_hess)]);
}

MomentReport run_moment_experiment(const KernelModel& model, double intensity,
                                   double window_radius, const RealTestFn& h, int q, double p,
                                   int reps, std::uint64_t seed, const QuadratureSpec& quad) {
    MomentReport report;
    report.q = q;
    report.p = p;
    report.reps = reps;
    report.seed = seed;
    report.inputs = "window=" + std::to_string(window_radius) +
                    ";intensity=" + std::to_string(intensity) + ";h=" + h.desc.to_string();

    // excursions of interest live within the window plus the radius where a
    // single grain can still reach min supp(h)
    const double reach = 3.0;
    const Rect box{-(window_radius + reach), -(window_radius + reach), window_radius + reach,
                   window_radius + reach};

    std::vector<double> values(static_cast<std::size_t>(reps));
    parallel_for_chunks(static_cast<std::size_t>(reps), [&](std::size_t r) {
        const ScalarField2D f =
            shot_field(sample_germs(window_radius, intensity, model, derive_seed(seed, r)), model);
        values[r] = euler_primitive_integral(with_bbox(f, box), h, quad);
    });

    report.empirical_qth = empirical_moment(values, q);
    report.moment_cap = shot_moment_cap(model, intensity, q, p);
    report.support_prob_integral =
        support_prob_integral(model, intensity, window_radius, h, p, std::min(reps, 200),
                              derive_seed(seed, 0x5350u));
    report.constant_used = q * std::pow(2.0, q);
    report.bound = moment_bound(q, p, report.moment_cap, h, report.support_prob_integral,
                                report.constant_used);
    return report;
}

}  // namespace ecx
