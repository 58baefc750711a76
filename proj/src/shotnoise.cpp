#include "ecx/shotnoise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <stdexcept>

#include "ecx/bessel.hpp"
#include "ecx/parallel.hpp"
#include "ecx/rng.hpp"

namespace ecx {

namespace {

constexpr Complex kI{0.0, 1.0};

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

}  // namespace

// ---------------------------------------------------------------------------
// kernels
// ---------------------------------------------------------------------------

namespace {

GrainKernel radial_kernel_from_profile(std::string name, std::function<double(double)> g,
                                       std::function<double(double)> dg,
                                       std::function<double(double)> ddg, double trunc) {
    GrainKernel k;
    k.name = std::move(name);
    k.g = std::move(g);
    k.dg = std::move(dg);
    k.ddg = std::move(ddg);
    k.truncation_radius = trunc;
    k.radial = true;
    auto gv = k.g, gd = k.dg, gdd = k.ddg;
    k.jet_at = [gv, gd, gdd](Vec2 p) {
        const double u = p.x * p.x + p.y * p.y;
        const double pd = gd(u);
        const double pdd = gdd(u);
        Jet2 j;
        j.value = gv(u);
        j.gx = 2.0 * p.x * pd;
        j.gy = 2.0 * p.y * pd;
        j.hxx = 2.0 * pd + 4.0 * p.x * p.x * pdd;
        j.hxy = 4.0 * p.x * p.y * pdd;
        j.hyy = 2.0 * pd + 4.0 * p.y * p.y * pdd;
        return j;
    };
    return k;
}

}  // namespace

GrainKernel gaussian_kernel() {
    GrainKernel k = radial_kernel_from_profile(
        "gaussian", [](double u) { return std::exp(-u); }, [](double u) { return -std::exp(-u); },
        [](double u) { return std::exp(-u); }, 6.0);
    k.decay_gamma = 6.0;
    k.decay_const = 400.0;
    k.grad_alpha = 1.5;   // |grad g| = 2r e^{-r^2} <= C e^{-3r^2/4}
    k.grad_const = 1.75;  // max of 2r e^{-r^2/4} is 2 sqrt(2) e^{-1/2} ~ 1.716
    k.convex_level_threshold = 1.0;
    return k;
}

GrainKernel radial_power_kernel(double beta) {
    if (!(beta > 2.0)) throw std::invalid_argument("radial_power_kernel: beta must be > 2");
    const double trunc = std::sqrt(std::pow(10.0, 12.0 / beta) - 1.0);
    GrainKernel k = radial_kernel_from_profile(
        "radial_power", [beta](double u) { return std::pow(1.0 + u, -beta); },
        [beta](double u) { return -beta * std::pow(1.0 + u, -beta - 1.0); },
        [beta](double u) { return beta * (beta + 1.0) * std::pow(1.0 + u, -beta - 2.0); }, trunc);
    k.decay_gamma = 2.0 * beta;
    k.decay_const = std::pow(2.0, beta) * (4.0 * beta * beta + 6.0 * beta + 4.0);
    k.grad_alpha = 2.0;                  // |grad g| = 2 beta r (1+r^2)^{-beta-1} <= beta g
    k.grad_const = beta * (1.0 + 1e-9);  // equality at r = 1
    k.convex_level_threshold = 1.0;
    return k;
}

double KernelModel::max_truncation_radius() const {
    double m = 0.0;
    for (const auto& c : components) m = std::max(m, c.kernel.truncation_radius);
    return m;
}

bool KernelModel::all_radial() const {
    for (const auto& c : components)
        if (!c.kernel.radial) return false;
    return true;
}

void KernelModel::check() const {
    if (components.empty()) throw std::invalid_argument("KernelModel: no components");
    double total = 0.0;
    for (const auto& c : components) {
        if (!(c.weight > 0.0)) throw std::invalid_argument("KernelModel: weight <= 0");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("KernelModel: weights must sum to 1");
    if (!(amp_lo > 0.0 && amp_hi >= amp_lo))
        throw std::invalid_argument("KernelModel: bad amplitude law");
}

KernelModel gaussian_model() {
    KernelModel m;
    m.components.push_back({gaussian_kernel(), 1.0});
    return m;
}

// ---------------------------------------------------------------------------
// sampling and fields
// ---------------------------------------------------------------------------

GermSample sample_germs(double window_radius, double intensity, const KernelModel& model,
                        std::uint64_t seed) {
    if (!(window_radius > 0.0)) throw std::invalid_argument("sample_germs: window_radius <= 0");
    if (!(intensity > 0.0)) throw std::invalid_argument("sample_germs: intensity <= 0");
    model.check();

    Rng rng(seed);
    GermSample sample;
    sample.window_radius = window_radius;
    sample.intensity = intensity;
    sample.seed = seed;

    const double mean = intensity * M_PI * window_radius * window_radius;
    const std::uint64_t count = rng.poisson(mean);
    sample.germs.reserve(count);
    for (std::uint64_t g = 0; g < count; ++g) {
        Germ germ;
        rng.in_disc(window_radius, germ.pos.x, germ.pos.y);
        if (model.components.size() > 1) {
            const double u = rng.uniform01();
            double acc = 0.0;
            germ.kernel_index = static_cast<int>(model.components.size()) - 1;
            for (std::size_t c = 0; c < model.components.size(); ++c) {
                acc += model.components[c].weight;
                if (u < acc) {
                    germ.kernel_index = static_cast<int>(c);
                    break;
                }
            }
        }
        germ.amplitude = rng.uniform(model.amp_lo, model.amp_hi);
        germ.rotation = model.rotate ? rng.uniform(0.0, 2.0 * M_PI) : 0.0;
        sample.germs.push_back(germ);
    }
    return sample;
}

std::string GermSample::to_text() const {
    char line[200];
    std::snprintf(line, sizeof(line), "%llu %.17g %.17g %zu\n",
                  static_cast<unsigned long long>(seed), window_radius, intensity, germs.size());
    std::string out = line;
    for (const auto& g : germs) {
        std::snprintf(line, sizeof(line), "%.17g %.17g %d %.17g %.17g\n", g.pos.x, g.pos.y,
                      g.kernel_index, g.amplitude, g.rotation);
        out += line;
    }
    return out;
}

GermSample GermSample::from_text(std::istream& in) {
    GermSample s;
    unsigned long long seed = 0;
    std::size_t n = 0;
    if (!(in >> seed >> s.window_radius >> s.intensity >> n)) fail("GermSample: bad header");
    s.seed = seed;
    s.germs.resize(n);
    for (auto& g : s.germs)
        if (!(in >> g.pos.x >> g.pos.y >> g.kernel_index >> g.amplitude >> g.rotation))
            fail("GermSample: bad germ line");
    return s;
}

namespace {

Jet2 rotate_jet_cw(const Jet2& j, double c, double s) {
    Jet2 out;
    out.value = j.value;
    out.gx = c * j.gx - s * j.gy;
    out.gy = s * j.gx + c * j.gy;
    const double a = j.hxx, b = j.hxy, d = j.hyy;
    out.hxx = c * (c * a - s * b) - s * (c * b - s * d);
    out.hxy = c * (s * a + c * b) - s * (s * b + c * d);
    out.hyy = s * (s * a + c * b) + c * (s * b + c * d);
    return out;
}

}  // namespace

Jet2 germ_jet(const Germ& germ, const KernelModel& model, Vec2 x) {
    const GrainKernel& kernel =
        model.components[static_cast<std::size_t>(germ.kernel_index)].kernel;
    const Vec2 d = x - germ.pos;
    if (d.x * d.x + d.y * d.y > kernel.truncation_radius * kernel.truncation_radius) return Jet2{};
    if (germ.rotation == 0.0 || kernel.radial) return germ.amplitude * kernel.jet_at(d);
    const double c = std::cos(germ.rotation), s = std::sin(germ.rotation);
    const Vec2 rd{c * d.x + s * d.y, -s * d.x + c * d.y};
    return germ.amplitude * rotate_jet_cw(kernel.jet_at(rd), c, s);
}

namespace {

/// Uniform-bucket index over germs; queries visit the 3x3 neighborhood.
class GermIndex {
  public:
    GermIndex(GermSample sample, KernelModel model)
        : sample_(std::move(sample)),
          model_(std::move(model)),
          cell_(std::max(1e-9, model_.max_truncation_radius())) {
        lo_ = -(sample_.window_radius + model_.max_truncation_radius()) - 1e-9;
        n_ = std::max(1, static_cast<int>(std::ceil(-2.0 * lo_ / cell_)) + 1);
        buckets_.resize(static_cast<std::size_t>(n_) * n_);
        for (std::size_t g = 0; g < sample_.germs.size(); ++g)
            buckets_[bucket_of(sample_.germs[g].pos)].push_back(static_cast<int>(g));
    }

    Jet2 jet(Vec2 x) const {
        Jet2 total;
        const int bi = coord(x.x), bj = coord(x.y);
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                const int i = bi + di, j = bj + dj;
                if (i < 0 || j < 0 || i >= n_ || j >= n_) continue;
                for (int g :
                     buckets_[static_cast<std::size_t>(i) + static_cast<std::size_t>(n_) * j])
                    total = total + germ_jet(sample_.germs[static_cast<std::size_t>(g)], model_, x);
            }
        }
        return total;
    }

    double value(Vec2 x) const { return jet(x).value; }

  private:
    int coord(double v) const {
        return std::clamp(static_cast<int>(std::floor((v - lo_) / cell_)), 0, n_ - 1);
    }
    std::size_t bucket_of(Vec2 p) const {
        return static_cast<std::size_t>(coord(p.x)) + static_cast<std::size_t>(n_) * coord(p.y);
    }

    GermSample sample_;
    KernelModel model_;
    double cell_;
    double lo_ = 0.0;
    int n_ = 0;
    std::vector<std::vector<int>> buckets_;
};

}  // namespace

ScalarField2D shot_field(const GermSample& sample, const KernelModel& model) {
    auto index = std::make_shared<GermIndex>(sample, model);
    const double half = sample.window_radius + model.max_truncation_radius();
    FieldDescriptor desc{"shot_noise",
                         {{"window_radius", sample.window_radius},
                          {"intensity", sample.intensity},
                          {"seed", static_cast<double>(sample.seed)},
                          {"germ_count", static_cast<double>(sample.germs.size())}}};
    return ScalarField2D([index](Vec2 p) { return index->jet(p); },
                         [index](Vec2 p) { return index->value(p); },
                         Rect{-half, -half, half, half}, desc);
}

// ---------------------------------------------------------------------------
// amplitude-law expectations (uniform law, closed forms)
// ---------------------------------------------------------------------------

namespace {

double uniform_moment(double lo, double hi, int k) {
    // E[M^k] = (hi^{k+1} - lo^{k+1}) / ((k+1)(hi-lo)); reduces to lo^k when degenerate
    if (hi - lo < 1e-300) return std::pow(lo, k);
    return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / ((k + 1) * (hi - lo));
}

struct AmpLaw {
    double lo, hi;
    double m[7];  // moments E[M^0..6]

    explicit AmpLaw(const KernelModel& model) : lo(model.amp_lo), hi(model.amp_hi) {
        for (int k = 0; k <= 6; ++k) m[k] = uniform_moment(lo, hi, k);
    }

    // E[e^{iMw}]
    Complex e(double w) const {
        if (std::abs(w) * hi < 1e-4) {
            const Complex iw = kI * w;
            return m[0] + iw * (m[1] + iw * (m[2] / 2.0 + iw * (m[3] / 6.0 + iw * m[4] / 24.0)));
        }
        if (hi - lo < 1e-300) return std::exp(kI * (lo * w));
        return (std::exp(kI * (hi * w)) - std::exp(kI * (lo * w))) / (kI * w * (hi - lo));
    }

    // E[M e^{iMw}]
    Complex me(double w) const {
        if (std::abs(w) * hi < 1e-4) {
            const Complex iw = kI * w;
            return m[1] + iw * (m[2] + iw * (m[3] / 2.0 + iw * (m[4] / 6.0 + iw * m[5] / 24.0)));
        }
        if (hi - lo < 1e-300) return lo * std::exp(kI * (lo * w));
        auto prim = [&](double a) {
            return std::exp(kI * (a * w)) * Complex(1.0 / (w * w), -a / w);
        };
        return (prim(hi) - prim(lo)) / (hi - lo);
    }

    // E[M^2 e^{iMw}]
    Complex m2e(double w) const {
        if (std::abs(w) * hi < 1e-4) {
            const Complex iw = kI * w;
            return m[2] + iw * (m[3] + iw * (m[4] / 2.0 + iw * (m[5] / 6.0 + iw * m[6] / 24.0)));
        }
        if (hi - lo < 1e-300) return lo * lo * std::exp(kI * (lo * w));
        auto prim = [&](double a) {
            return std::exp(kI * (a * w)) *
                   Complex(2.0 * a / (w * w), -a * a / w + 2.0 / (w * w * w));
        };
        return (prim(hi) - prim(lo)) / (hi - lo);
    }
};

// ---------------------------------------------------------------------------
// generic polar quadrature for psi-type integrals (moderate |s|, any kernel)
// ---------------------------------------------------------------------------

struct PsiParts {
    Complex exponent{};  // per unit intensity
    Complex d4_factor{};
    Complex grad_moment{};   // int E[M d_i g] e^{..}  (for d22)
    Complex grad2_moment{};  // int E[M^2 d_i g^2] e^{..}
};

// pairing of the arguments with the jet for psi_i
double phase_base(int i, double t, Vec2 s, double v, const Jet2& j) {
    if (i == 1) return t * j.value + s.x * j.gx + s.y * j.gy + v * j.hxx;
    return t * j.value + s.x * j.gy + s.y * j.gx + v * j.hyy;
}

PsiParts psi_parts(int i, double t, Vec2 s, double v, const KernelModel& model,
                   const QuadratureSpec& quad) {
    if (i != 1 && i != 2) throw std::invalid_argument("psi: i must be 1 or 2");
    model.check();
    const AmpLaw amp(model);

    PsiParts total;
    for (const auto& comp : model.components) {
        const GrainKernel& kernel = comp.kernel;
        const double T = kernel.truncation_radius;

        // oscillation-aware node counts (the large-|s| regime is handled by
        // the radial-table path in stationary_limit_density)
        const double osc = model.amp_hi * (norm(s) * 2.0 + std::abs(v) * 6.0 + std::abs(t));
        const int n_r = std::max(quad.spatial_resolution, 128);
        const int n_phi = std::min(4096, 64 + 16 * static_cast<int>(std::ceil(osc)));
        const int n_rot = (!kernel.radial && model.rotate) ? 16 : 1;

        PsiParts part;
        const auto r_nodes = quad_nodes_1d(0.0, T, n_r, QuadRule::GaussLegendre);
        for (const auto& rn : r_nodes) {
            const double r = rn.x;
            Complex acc_e{}, acc_d4{}, acc_g{}, acc_g2{};
            for (int a = 0; a < n_phi; ++a) {
                const double phi = (a + 0.5) * 2.0 * M_PI / n_phi;
                const Vec2 x{r * std::cos(phi), r * std::sin(phi)};
                for (int rot = 0; rot < n_rot; ++rot) {
                    Jet2 j;
                    if (n_rot == 1) {
                        j = kernel.jet_at(x);
                    } else {
                        const double theta = (rot + 0.5) * 2.0 * M_PI / n_rot;
                        const double c = std::cos(theta), sn = std::sin(theta);
                        j = rotate_jet_cw(kernel.jet_at({c * x.x + sn * x.y, -sn * x.x + c * x.y}),
                                          c, sn);
                    }
                    const double w = phase_base(i, t, s, v, j);
                    const double hii = i == 1 ? j.hxx : j.hyy;
                    const double gi = i == 1 ? j.gx : j.gy;
                    acc_e += amp.e(w) - 1.0;
                    acc_d4 += amp.me(phase_base(i, t, s, 0.0, j)) * hii;
                    const double wt = t * j.value;
                    acc_g += amp.me(wt) * gi;
                    acc_g2 += amp.m2e(wt) * (gi * gi);
                }
            }
            const double scale = rn.w * r * (2.0 * M_PI / n_phi) / n_rot;
            part.exponent += scale * acc_e;
            part.d4_factor += scale * acc_d4;
            part.grad_moment += scale * acc_g;
            part.grad2_moment += scale * acc_g2;
        }
        total.exponent += comp.weight * part.exponent;
        total.d4_factor += comp.weight * part.d4_factor;
        total.grad_moment += comp.weight * part.grad_moment;
        total.grad2_moment += comp.weight * part.grad2_moment;
    }
    return total;
}

}  // namespace

Complex psi(int i, double t, Vec2 s, double v, const KernelModel& model,
            const QuadratureSpec& quad, double intensity) {
    const PsiParts parts = psi_parts(i, t, s, v, model, quad);
    return std::exp(intensity * parts.exponent);
}

Complex d4_psi(int i, double t, Vec2 s, const KernelModel& model, const QuadratureSpec& quad,
               double intensity) {
    const PsiParts parts = psi_parts(i, t, s, 0.0, model, quad);
    return kI * std::exp(intensity * parts.exponent) * intensity * parts.d4_factor;
}

Complex d22_psi(int i, double t, const KernelModel& model, const QuadratureSpec& quad,
                double intensity) {
    const PsiParts parts = psi_parts(i, t, Vec2{0.0, 0.0}, 0.0, model, quad);
    const Complex psi_t = std::exp(intensity * parts.exponent);
    const Complex a = intensity * parts.grad_moment;
    const Complex b = intensity * parts.grad2_moment;
    return -psi_t * (a * a + b);
}

// ---------------------------------------------------------------------------
// radial table for the stationary-limit improper integral
// ---------------------------------------------------------------------------

namespace {

/// Tabulates, on a uniform sigma grid,
///   U(sigma)  = exponent of psi(t, |s|=sigma)
///   AB(sigma) = int E[M e^{itMg}] (a + b/2) J0(M|rho|sigma)
///   B2(sigma) = int E[M e^{itMg}] (b/2)     J2(M|rho|sigma)
/// with a = 2 g', b = 4 r^2 g'', rho = 2 r g' (radial kernels only), so that
///   d4_psi_i(t, s, 0) = i e^{U} (AB - cos(2 alpha) B2),
///   cos(2 alpha) = (s1^2 - s2^2)/sigma^2 for either i.
class RadialTable {
  public:
    RadialTable(double t, const KernelModel& model, double intensity, double sigma_main,
                double sigma_max)
        : t_(t), sigma_main_(sigma_main) {
        if (!model.all_radial())
            fail("stationary_limit_density requires radial kernels (isotropic model)");
        const AmpLaw amp(model);
        step_ = 0.05;
        const std::size_t n = static_cast<std::size_t>(std::ceil(sigma_max / step_)) + 2;
        u_.assign(n, Complex{});
        ab_.assign(n, Complex{});
        b2_.assign(n, Complex{});

        // per-amplitude-segment GL rules, reused across radii
        std::vector<std::vector<QuadNode>> m_rules;
        for (int segs = 1; segs <= 40; ++segs) {
            std::vector<QuadNode> nodes;
            const double w = (amp.hi - amp.lo) / segs;
            for (int c = 0; c < segs; ++c)
                for (const auto& node : gauss_legendre(amp.lo + c * w, amp.lo + (c + 1) * w, 8))
                    nodes.push_back(node);
            m_rules.push_back(std::move(nodes));
        }
        const double amp_norm = 1.0 / (amp.hi - amp.lo);

        // per-component |rho| probe, for equal-phase-variation radial segments
        constexpr int kProbes = 1024;
        struct Probe {
            std::vector<double> cumvar;
            double total = 0.0;
        };
        std::vector<Probe> probes(model.components.size());
        for (std::size_t c = 0; c < model.components.size(); ++c) {
            const GrainKernel& kernel = model.components[c].kernel;
            const double T = kernel.truncation_radius;
            probes[c].cumvar.resize(kProbes + 1, 0.0);
            double prev = 0.0;
            for (int p = 1; p <= kProbes; ++p) {
                const double r = T * p / kProbes;
                const double rho = std::abs(2.0 * r * kernel.dg(r * r));
                probes[c].cumvar[static_cast<std::size_t>(p)] =
                    probes[c].cumvar[static_cast<std::size_t>(p - 1)] + std::abs(rho - prev);
                prev = rho;
            }
            probes[c].total = probes[c].cumvar[kProbes];
        }

        parallel_for_chunks(n, [&](std::size_t k) {
            const double sigma = static_cast<double>(k) * step_;
            const bool coarse = sigma > sigma_main_;  // tail region, error-bar use only
            Complex u{}, ab{}, b2{};
            for (std::size_t c = 0; c < model.components.size(); ++c) {
                const GrainKernel& kernel = model.components[c].kernel;
                const double T = kernel.truncation_radius;
                const Probe& probe = probes[c];

                const double zvar = amp.hi * sigma * probe.total;
                int n_seg = 12 + static_cast<int>(std::ceil(zvar / 5.0));
                n_seg = std::min(n_seg, coarse ? 40 : 160);

                Complex cu{}, cab{}, cb2{};
                int probe_pos = 0;
                double seg_lo = 0.0;
                for (int seg = 0; seg < n_seg; ++seg) {
                    const double var_target = probe.total * (seg + 1) / n_seg;
                    while (probe_pos < kProbes &&
                           probe.cumvar[static_cast<std::size_t>(probe_pos)] < var_target)
                        ++probe_pos;
                    double seg_hi = seg + 1 == n_seg ? T : T * probe_pos / kProbes;
                    seg_hi = std::max(seg_hi, seg_lo + T * 1e-6);
                    for (const auto& rn : gauss_legendre(seg_lo, seg_hi, 8)) {
                        const double r = rn.x;
                        const double r2 = r * r;
                        const double gd = kernel.dg(r2);
                        const double g = kernel.g(r2);
                        const double rho = std::abs(2.0 * r * gd);
                        const double a_coef = 2.0 * gd;
                        const double half_b = 2.0 * r2 * kernel.ddg(r2);
                        int m_segs =
                            1 + static_cast<int>(std::ceil(rho * sigma * (amp.hi - amp.lo) / 5.0));
                        m_segs = std::min(m_segs, coarse ? 8 : 40);
                        Complex acc_u{}, acc_ab{}, acc_b2{};
                        for (const auto& mn : m_rules[static_cast<std::size_t>(m_segs - 1)]) {
                            const double m = mn.x;
                            const Complex e = std::exp(kI * (t_ * m * g));
                            const double z = m * rho * sigma;
                            const double j0 = bessel_j0(z);
                            const double j2 = bessel_j2(z);
                            acc_u += mn.w * e * j0;
                            acc_ab += mn.w * (m * e) * ((a_coef + half_b) * j0);
                            acc_b2 += mn.w * (m * e) * (half_b * j2);
                        }
                        const double scale = rn.w * r * 2.0 * M_PI;
                        cu += scale * (amp_norm * acc_u - 1.0);
                        cab += scale * amp_norm * acc_ab;
                        cb2 += scale * amp_norm * acc_b2;
                    }
                    seg_lo = seg_hi;
                }
                const double weight = model.components[c].weight;
                u += weight * cu;
                ab += weight * cab;
                b2 += weight * cb2;
            }
            u_[k] = intensity * u;
            ab_[k] = intensity * ab;
            b2_[k] = intensity * b2;
        });
    }

    Complex exponent(double sigma) const { return interp(u_, sigma); }

    Complex d4(Vec2 s) const {
        const double s2 = s.x * s.x + s.y * s.y;
        const double sigma = std::sqrt(s2);
        const double cos2a = s2 > 0.0 ? (s.x * s.x - s.y * s.y) / s2 : 1.0;
        return kI * std::exp(interp(u_, sigma)) * (interp(ab_, sigma) - cos2a * interp(b2_, sigma));
    }

  private:
    Complex interp(const std::vector<Complex>& tab, double sigma) const {
        const double pos = std::abs(sigma) / step_;
        const std::size_t n = tab.size();
        std::size_t k = static_cast<std::size_t>(pos);
        if (k + 2 >= n) return tab[n - 1];
        const double f = pos - k;
        // Catmull-Rom
        const Complex p0 = tab[k == 0 ? 0 : k - 1];
        const Complex p1 = tab[k];
        const Complex p2 = tab[k + 1];
        const Complex p3 = tab[k + 2];
        return p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                              f * (3.0 * (p1 - p2) + p3 - p0)));
    }

    double t_;
    double sigma_main_;
    double step_ = 0.05;
    std::vector<Complex> u_, ab_, b2_;
};

// trapezoid in log coordinates: int int Delta/(s1 s2) ds = int int Delta dy
Complex improper_double_integral(const RadialTable& table, double eps0, double s_max, int grid) {
    const double y0 = std::log(eps0), y1 = std::log(s_max);
    const double dy = (y1 - y0) / (grid - 1);
    std::vector<double> s(static_cast<std::size_t>(grid));
    std::vector<double> w(static_cast<std::size_t>(grid), dy);
    for (int k = 0; k < grid; ++k) s[static_cast<std::size_t>(k)] = std::exp(y0 + k * dy);
    w.front() = 0.5 * dy;
    w.back() = 0.5 * dy;

    std::vector<Complex> rows(static_cast<std::size_t>(grid));
    parallel_for_chunks(static_cast<std::size_t>(grid), [&](std::size_t k1) {
        Complex acc{};
        const double s1 = s[k1];
        for (int k2 = 0; k2 < grid; ++k2) {
            const double s2 = s[static_cast<std::size_t>(k2)];
            const Complex delta =
                table.d4({s1 - s2, s2}) - table.d4({s1 + s2, -s2});
            acc += w[static_cast<std::size_t>(k2)] * delta;
        }
        rows[k1] = w[k1] * acc;
    });
    Complex total{};
    for (const Complex& r : rows) total += r;
    return total;
}

}  // namespace

ValueWithError stationary_limit_density(double t, const KernelModel& model,
                                        const QuadratureSpec& quad,
                                        const ImproperGridSpec& improper, double intensity) {
    model.check();
    if (!model.all_radial())
        fail("stationary_limit_density requires radial kernels (isotropic model)");
    const double sigma_main = std::sqrt(5.0) * improper.s_max * 1.001;
    const double sigma_max = 2.0 * sigma_main;
    const RadialTable table(t, model, intensity, sigma_main, sigma_max);

    // double improper integral with doubling estimates
    const Complex coarse =
        improper_double_integral(table, improper.eps0, improper.s_max, improper.s_grid);
    const Complex fine =
        improper_double_integral(table, improper.eps0, improper.s_max, 2 * improper.s_grid);
    const double disc_err = std::abs(fine - coarse);
    const Complex wider =
        improper_double_integral(table, improper.eps0, 2.0 * improper.s_max, improper.s_grid);
    const double tail_err = std::abs(wider - coarse);
    const Complex inner =
        improper_double_integral(table, 0.5 * improper.eps0, improper.s_max, improper.s_grid);
    const double origin_err = std::abs(inner - coarse);
    if (disc_err > 0.25 * std::abs(fine) + 1e-2)
        fail("stationary_limit_density: improper integral not converged");

    // d2/ds1^2 psi_i(t,0): -psi(t) * intensity * pi * int rho^2 E[M^2 e^{itMg}] r dr
    const AmpLaw amp(model);
    Complex rho2_int{};
    for (const auto& comp : model.components) {
        const GrainKernel& kernel = comp.kernel;
        Complex acc{};
        for (const auto& rn :
             quad_nodes_1d(0.0, kernel.truncation_radius, std::max(quad.spatial_resolution, 256),
                           QuadRule::GaussLegendre)) {
            const double r = rn.x;
            const double gd = kernel.dg(r * r);
            const double rho2 = 4.0 * r * r * gd * gd;
            acc += rn.w * r * rho2 * amp.m2e(t * kernel.g(r * r));
        }
        rho2_int += comp.weight * acc;
    }
    const Complex psi_t = std::exp(table.exponent(0.0));
    const Complex d22 = -psi_t * intensity * M_PI * rho2_int;
    const Complex d4_0 = table.d4({0.0, 0.0});

    // both quarter-plane terms coincide for an isotropic (radial) model
    const Complex grad_term = kI * t * ((M_PI - 2.0) / (8.0 * M_PI)) * (2.0 * d22);
    const Complex hess_direct = (kI / 4.0) * (2.0 * d4_0);
    const Complex hess_integral = -(kI / (2.0 * M_PI * M_PI)) * (2.0 * fine);

    ValueWithError out;
    out.value = grad_term + hess_direct + hess_integral;
    out.error = (disc_err + tail_err + origin_err) / (M_PI * M_PI) + 1e-4 * std::abs(out.value) +
                1e-9;
    return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo estimators
// ---------------------------------------------------------------------------

namespace {

McEstimate reduce_mc(const std::vector<Complex>& values) {
    const int reps = static_cast<int>(values.size());
    Complex mean{};
    for (const Complex& v : values) mean += v;
    mean /= static_cast<double>(reps);
    double var = 0.0;
    for (const Complex& v : values) {
        const Complex d = v - mean;
        var += d.real() * d.real() + d.imag() * d.imag();
    }
    var /= std::max(1, reps - 1);
    McEstimate out;
    out.value = mean;
    out.stderr_est = std::sqrt(var / reps);
    return out;
}

Complex gamma_fourier_density(const Jet2& j, double t) {
    const int q = quarter_plane(j.gx, j.gy);
    if (q == 0) return Complex{};
    const Complex e = std::exp(kI * (t * j.value));
    const double g2 = q == 1 ? j.gx * j.gx : j.gy * j.gy;
    const double hii = q == 1 ? j.hxx : j.hyy;
    return -(kI * t * g2 + hii) * e;
}

}  // namespace

McEstimate mc_gamma_at_origin(double t, const KernelModel& model, double window_radius,
                              double intensity, int reps, std::uint64_t seed) {
    if (window_radius < 5.0 * model.max_truncation_radius())
        fail("mc_gamma_at_origin: window_radius must be >= 5 * truncation radius");
    std::vector<Complex> values(static_cast<std::size_t>(reps));
    parallel_for_chunks(static_cast<std::size_t>(reps), [&](std::size_t r) {
        const GermSample sample =
            sample_germs(window_radius, intensity, model, derive_seed(seed, r));
        Jet2 j;
        for (const auto& germ : sample.germs) j = j + germ_jet(germ, model, {0.0, 0.0});
        values[r] = gamma_fourier_density(j, t);
    });
    return reduce_mc(values);
}

McEstimate empirical_cf(const KernelModel& model, double window_radius, double intensity,
                        double t, int reps, std::uint64_t seed) {
    std::vector<Complex> values(static_cast<std::size_t>(reps));
    parallel_for_chunks(static_cast<std::size_t>(reps), [&](std::size_t r) {
        const GermSample sample =
            sample_germs(window_radius, intensity, model, derive_seed(seed, r));
        double f0 = 0.0;
        for (const auto& germ : sample.germs) f0 += germ_jet(germ, model, {0.0, 0.0}).value;
        values[r] = std::exp(kI * (t * f0));
    });
    return reduce_mc(values);
}

McEstimate mc_euler_primitive_fourier(double t, const KernelModel& model, double n,
                                      double intensity, int reps, const QuadratureSpec& quad,
                                      std::uint64_t seed) {
    if (!(n > 0.0)) throw std::invalid_argument("mc_euler_primitive_fourier: n <= 0");
    const double radius = std::sqrt(n);
    const double delta = 2.0 * radius / quad.spatial_resolution;
    std::vector<Complex> values(static_cast<std::size_t>(reps));
    parallel_for_chunks(static_cast<std::size_t>(reps), [&](std::size_t r) {
        const GermSample sample = sample_germs(radius, intensity, model, derive_seed(seed, r));
        const GermIndex index(sample, model);
        Complex acc{};
        const int rings = std::max(4, static_cast<int>(std::round(radius / delta)));
        const double dr = radius / rings;
        for (int k = 0; k < rings; ++k) {
            const double rad = (k + 0.5) * dr;
            const int nphi = std::max(8, static_cast<int>(std::ceil(2.0 * M_PI * rad / dr)));
            const double dphi = 2.0 * M_PI / nphi;
            Complex ring{};
            for (int a = 0; a < nphi; ++a) {
                const double phi = (a + 0.5) * dphi;
                ring += gamma_fourier_density(index.jet({rad * std::cos(phi), rad * std::sin(phi)}), t);
            }
            acc += ring * (rad * dr * dphi);
        }
        values[r] = acc / (M_PI * n);
    });
    return reduce_mc(values);
}

IsotropyCheck isotropy_factor_check(const KernelModel& model, double t, double window_radius,
                                    double intensity, int reps, std::uint64_t seed) {
    const double cfac = (M_PI - 2.0) / (16.0 * M_PI);
    std::vector<Complex> l1(static_cast<std::size_t>(reps)), l2(static_cast<std::size_t>(reps)),
        rh(static_cast<std::size_t>(reps));
    parallel_for_chunks(static_cast<std::size_t>(reps), [&](std::size_t r) {
        const GermSample sample =
            sample_germs(window_radius, intensity, model, derive_seed(seed, r));
        Jet2 j;
        for (const auto& germ : sample.germs) j = j + germ_jet(germ, model, {0.0, 0.0});
        const Complex e = std::exp(kI * (t * j.value));
        const int q = quarter_plane(j.gx, j.gy);
        l1[r] = q == 1 ? e * (j.gx * j.gx) : Complex{};
        l2[r] = q == 2 ? e * (j.gy * j.gy) : Complex{};
        rh[r] = cfac * e * (j.gx * j.gx + j.gy * j.gy);
    });
    IsotropyCheck out;
    const auto m1 = reduce_mc(l1), m2 = reduce_mc(l2), mr = reduce_mc(rh);
    out.lhs1 = m1.value;
    out.lhs2 = m2.value;
    out.rhs = mr.value;
    std::vector<Complex> d1(l1.size()), d2(l2.size());
    for (std::size_t k = 0; k < l1.size(); ++k) {
        d1[k] = l1[k] - rh[k];
        d2[k] = l2[k] - rh[k];
    }
    out.stderr_diff1 = reduce_mc(d1).stderr_est;
    out.stderr_diff2 = reduce_mc(d2).stderr_est;
    return out;
}

double angular_cos2_integral(double a, double b) {
    double acc = 0.0;
    for (const auto& node : quad_nodes_1d(a, b, 64, QuadRule::GaussLegendre))
        acc += node.w * std::cos(node.x) * std::cos(node.x);
    return acc;
}

double angular_sin2_integral(double a, double b) {
    double acc = 0.0;
    for (const auto& node : quad_nodes_1d(a, b, 64, QuadRule::GaussLegendre))
        acc += node.w * std::sin(node.x) * std::sin(node.x);
    return acc;
}

}  // namespace ecx
