#include "ecx/euler_integral.hpp"

#include <algorithm>
#include <cmath>

#include "ecx/rng.hpp"
#include "ecx/topology.hpp"

namespace ecx {

namespace detail {
double magnitude(double v) { return std::abs(v); }
double magnitude(std::complex<double> v) { return std::abs(v); }
}  // namespace detail

ECMethod ec_method_from_string(const std::string& name) {
    if (name == "cubical") return ECMethod::Cubical;
    if (name == "bicov") return ECMethod::Bicov;
    if (name == "morse") return ECMethod::Morse;
    throw std::invalid_argument("unknown EC method: " + name);
}

std::vector<QuadNode> level_nodes(double lo, double hi, const QuadratureSpec& quad) {
    return quad_nodes_1d(lo, hi, quad.level_count, quad.rule);
}

namespace {

double max_gradient_norm(const ScalarField2D& field) {
    const Rect bb = field.bbox();
    double m = 0.0;
    const int n = 128;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Jet2 jet = field.jet({bb.x0 + (i + 0.5) * bb.width() / n,
                                        bb.y0 + (j + 0.5) * bb.height() / n});
            m = std::max(m, std::hypot(jet.gx, jet.gy));
        }
    }
    return m;
}

// Snap a level node away from nearby critical values; stays inside the
// plateau containing u, where chi is constant.
double snap_level(double u, const std::vector<double>& critical_values, double margin) {
    for (double v : critical_values) {
        if (std::abs(u - v) >= margin) continue;
        // plateau boundaries around u
        double lo = 0.0, hi = std::numeric_limits<double>::infinity();
        for (double w : critical_values) {
            if (w <= u && w > lo) lo = w;
            if (w > u && w < hi) hi = w;
        }
        double snapped = u < v ? v - margin : v + margin;
        if (snapped <= lo || snapped >= hi) snapped = 0.5 * (lo + std::min(hi, lo + 2.0 * margin));
        return std::max(snapped, 1e-12);
    }
    return u;
}

}  // namespace

double euler_primitive_direct(const ScalarField2D& field, const RealTestFn& h,
                              const QuadratureSpec& quad, ECMethod method) {
    quad.check();
    if (!(h.lo > 0.0))
        throw std::invalid_argument("euler_primitive_direct: supp(h) must lie in (0,inf)");

    const auto critical = find_critical_points(field, field.bbox());
    std::vector<double> critical_values;
    critical_values.reserve(critical.size());
    for (const auto& cp : critical) critical_values.push_back(cp.value);

    const GridSpec spec = GridSpec::cover(field.bbox(), quad.spatial_resolution);
    const double margin = 5.0 * spec.spacing * max_gradient_norm(field);

    const auto nodes = level_nodes(h.lo, h.hi, quad);
    std::vector<double> chi_levels(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k)
        chi_levels[k] = snap_level(nodes[k].x, critical_values, margin);

    std::vector<long long> chi(nodes.size());
    if (method == ECMethod::Morse) {
        for (std::size_t k = 0; k < nodes.size(); ++k)
            chi[k] = euler_char_morse(critical, chi_levels[k]);
    } else {
        const SampledField samples = sample_field(field, spec);
        chi = method == ECMethod::Cubical ? cubical_chi_at_levels(samples, chi_levels)
                                          : bicov_chi_at_levels(samples, chi_levels);
    }

    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
        acc += nodes[k].w * h.h(nodes[k].x) * static_cast<double>(chi[k]);
    return acc;
}

KacRice1DResult kac_rice_1d(const Profile1D& profile, const RealTestFn& h) {
    if (profile.f(profile.a) >= h.lo || profile.f(profile.b) >= h.lo)
        throw std::runtime_error("kac_rice_1d: boundary condition violated");

    std::vector<double> cuts;
    cuts.push_back(profile.a);
    for (double b : profile.breakpoints)
        if (b > profile.a && b < profile.b) cuts.push_back(b);
    cuts.push_back(profile.b);
    std::sort(cuts.begin(), cuts.end());

    auto integral_h = [&](double lo, double hi) {
        lo = std::max(lo, h.lo);
        hi = std::min(hi, h.hi);
        if (!(hi > lo)) return 0.0;
        double acc = 0.0;
        for (const auto& node : quad_nodes_1d(lo, hi, 256, QuadRule::GaussLegendre))
            acc += node.w * h.h(node.x);
        return acc;
    };

    KacRice1DResult out;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double fa = profile.f(cuts[k]);
        const double fb = profile.f(cuts[k + 1]);
        if (fb > fa) {
            out.lhs += integral_h(fa, fb);  // one up-crossing for each level in (fa, fb)
            out.up_integral += std::max(0.0, fb) - std::max(0.0, fa);
        } else if (fa > fb) {
            out.down_integral += std::max(0.0, fa) - std::max(0.0, fb);
        }
        for (const auto& node : quad_nodes_1d(cuts[k], cuts[k + 1], 512, QuadRule::GaussLegendre))
            out.rhs += node.w * h.h(profile.f(node.x)) * std::abs(profile.df(node.x));
    }
    return out;
}

double contour_length(const SampledField& samples, const ScalarField2D& field, double u) {
    const GridSpec& spec = samples.spec;
    const double s = spec.spacing;
    double length = 0.0;

    auto lerp = [u](double va, double vb) { return (u - va) / (vb - va); };

    for (int j = 0; j + 1 < spec.ny; ++j) {
        for (int i = 0; i + 1 < spec.nx; ++i) {
            const double v00 = samples.at(i, j);
            const double v10 = samples.at(i + 1, j);
            const double v01 = samples.at(i, j + 1);
            const double v11 = samples.at(i + 1, j + 1);
            const int mask = (v00 >= u ? 1 : 0) | (v10 >= u ? 2 : 0) | (v11 >= u ? 4 : 0) |
                             (v01 >= u ? 8 : 0);
            if (mask == 0 || mask == 15) continue;

            // edge crossing points in cell-local coordinates
            const Vec2 bottom{lerp(v00, v10), 0.0};
            const Vec2 right{1.0, lerp(v10, v11)};
            const Vec2 top{lerp(v01, v11), 1.0};
            const Vec2 left{0.0, lerp(v00, v01)};
            auto seg = [&](Vec2 p, Vec2 q) { length += s * norm(q - p); };

            switch (mask) {
                case 1: case 14: seg(left, bottom); break;
                case 2: case 13: seg(bottom, right); break;
                case 4: case 11: seg(right, top); break;
                case 8: case 7: seg(top, left); break;
                case 3: case 12: seg(left, right); break;
                case 6: case 9: seg(bottom, top); break;
                case 5: case 10: {
                    // saddle cell: connection chosen by the field value at the center
                    const Vec2 center = spec.point(i, j) + Vec2{0.5 * s, 0.5 * s};
                    const bool center_in = field.value(center) >= u;
                    const bool diag00 = mask == 5;  // v00 and v11 above
                    if (center_in == diag00) {
                        seg(left, top);
                        seg(bottom, right);
                    } else {
                        seg(left, bottom);
                        seg(right, top);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return length;
}

CoareaResult coarea_check(const ScalarField2D& field, const RealTestFn& h,
                          const QuadratureSpec& quad) {
    quad.check();
    if (!(h.lo > 0.0)) throw std::invalid_argument("coarea_check: supp(h) must lie in (0,inf)");

    CoareaResult out;
    const GridSpec spec = GridSpec::cover(field.bbox(), quad.spatial_resolution);
    const SampledField samples = sample_field(field, spec);
    const auto nodes = level_nodes(h.lo, h.hi, quad);
    std::vector<double> per(nodes.size());
    parallel_for_chunks(nodes.size(), [&](std::size_t k) {
        per[k] = contour_length(samples, field, nodes[k].x);
    });
    for (std::size_t k = 0; k < nodes.size(); ++k) out.lhs += nodes[k].w * h.h(nodes[k].x) * per[k];

    out.rhs = integrate_2d<double>(field.bbox(), quad.spatial_resolution, quad.rule, [&](Vec2 p) {
        const Jet2 jet = field.jet(p);
        return h.h(jet.value) * std::hypot(jet.gx, jet.gy);
    });
    return out;
}

namespace {

double gamma_i(const Jet2& jet, const RealTestFn& h, int i) {
    if (quarter_plane(jet.gx, jet.gy) != i) return 0.0;
    if (i == 1) return jet.gx * jet.gx * h.dh(jet.value) + jet.hxx * h.h(jet.value);
    return jet.gy * jet.gy * h.dh(jet.value) + jet.hyy * h.h(jet.value);
}

}  // namespace

GapBound continuity_gap_bound(const Jet2& jet_f, const Jet2& jet_g, const RealTestFn& h, int i) {
    if (i != 1 && i != 2) throw std::invalid_argument("continuity_gap_bound: i must be 1 or 2");

    const Jet2 combined = jet_f + jet_g;
    GapBound out;
    out.actual = std::abs(gamma_i(combined, h, i) - gamma_i(jet_f, h, i));

    const double gfi = i == 1 ? jet_f.gx : jet_f.gy;
    const double ggi = i == 1 ? jet_g.gx : jet_g.gy;
    const double hfii = i == 1 ? jet_f.hxx : jet_f.hyy;
    const double hgii = i == 1 ? jet_g.hxx : jet_g.hyy;

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Vec2 dirs[4] = {{1.0, 0.0}, {0.0, 1.0}, {inv_sqrt2, inv_sqrt2}, {inv_sqrt2, -inv_sqrt2}};
    double delta = 0.0;
    for (const Vec2& u : dirs) {
        const double df = jet_f.gx * u.x + jet_f.gy * u.y;
        const double dg = jet_g.gx * u.x + jet_g.gy * u.y;
        if (std::abs(df) <= std::abs(dg)) {
            delta = 1.0;
            break;
        }
    }

    const double first = std::max({gfi * gfi, std::abs(hfii), 2.0 * std::abs(gfi) + std::abs(ggi)});
    const double second =
        std::max({delta, std::abs(ggi), std::abs(jet_g.value), std::abs(hgii)});
    out.bound = 6.0 * h.n2_bound * first * second;
    return out;
}

ContinuityMomentReport continuity_moment_report(const ScalarField2D& f,
                                                const FieldSampler& g_sampler,
                                                const RealTestFn& h, int q,
                                                const QuadratureSpec& quad, int reps,
                                                std::uint64_t seed) {
    if (q < 1) throw std::invalid_argument("continuity_moment_report: q >= 1");
    if (reps < 1) throw std::invalid_argument("continuity_moment_report: reps >= 1");

    std::vector<ScalarField2D> gs;
    gs.reserve(reps);
    for (int r = 0; r < reps; ++r) gs.push_back(g_sampler(derive_seed(seed, r)));

    ContinuityMomentReport out;
    out.reps = reps;
    const double base = euler_primitive_integral(f, h, quad);
    for (const auto& g : gs) {
        const double perturbed = euler_primitive_integral(add_scaled(f, g, 1.0), h, quad);
        out.lhs_q += std::pow(std::abs(base - perturbed), q);
    }
    out.lhs_q /= reps;

    // corollary right side with C_q omitted; expectations over g by MC on a
    // coarse spatial lattice
    const Rect bb = f.bbox();
    const int res = 64;
    const double q2 = 2.0 * q;
    double best = 0.0;
    for (int i = 1; i <= 2; ++i) {
        double integral = 0.0;
        const double hx = bb.width() / res, hy = bb.height() / res;
        for (int jj = 0; jj < res; ++jj) {
            for (int ii = 0; ii < res; ++ii) {
                const Vec2 p{bb.x0 + (ii + 0.5) * hx, bb.y0 + (jj + 0.5) * hy};
                const Jet2 jf = f.jet(p);
                const double gfi = i == 1 ? jf.gx : jf.gy;
                const double hfii = i == 1 ? jf.hxx : jf.hyy;
                double m_g = 0.0, m_dg = 0.0, m_hg = 0.0, m_dgi2q = 0.0, p_delta = 0.0;
                for (const auto& g : gs) {
                    const Jet2 jg = g.jet(p);
                    const double ggi = i == 1 ? jg.gx : jg.gy;
                    const double hgii = i == 1 ? jg.hxx : jg.hyy;
                    m_g += std::pow(std::abs(jg.value), q2);
                    m_dg += std::pow(std::abs(ggi), q2);
                    m_hg += std::pow(std::abs(hgii), q2);
                    m_dgi2q += std::pow(std::abs(ggi), q2);
                    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
                    const Vec2 dirs[4] = {{1.0, 0.0}, {0.0, 1.0}, {inv_sqrt2, inv_sqrt2},
                                          {inv_sqrt2, -inv_sqrt2}};
                    for (const Vec2& u : dirs) {
                        if (std::abs(jf.gx * u.x + jf.gy * u.y) <=
                            std::abs(jg.gx * u.x + jg.gy * u.y)) {
                            p_delta += 1.0;
                            break;
                        }
                    }
                }
                m_g /= reps;
                m_dg /= reps;
                m_hg /= reps;
                m_dgi2q /= reps;
                p_delta /= reps;
                const double first = std::max({std::pow(gfi, 4.0 * q), std::pow(std::abs(hfii), q2),
                                               2.0 * std::pow(std::abs(gfi), q2) + m_dgi2q});
                const double second = std::max({m_g, m_dg, m_hg, p_delta});
                integral += std::pow(first * second, 1.0 / q2) * hx * hy;
            }
        }
        best = std::max(best, integral);
    }
    out.rhs_without_cq = std::pow(h.n2_bound, q) * std::pow(best, q);
    return out;
}

}  // namespace ecx
