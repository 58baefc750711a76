#include "ecx/fields.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace ecx {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string FieldDescriptor::to_string() const {
    std::string out = family;
    for (const auto& [name, value] : params) {
        out += ":";
        out += format_double(value);
    }
    return out;
}

RadialProfile exp_profile() {
    RadialProfile p;
    p.psi = [](double r) { return std::exp(-r); };
    p.dpsi = [](double r) { return -std::exp(-r); };
    p.ddpsi = [](double r) { return std::exp(-r); };
    p.psi0 = 1.0;
    p.cutoff = 31.0;  // e^{-31} < 1e-13
    p.name = "exp";
    return p;
}

ScalarField2D make_radial_field(const RadialProfile& profile) {
    const auto psi = profile.psi;
    const auto dpsi = profile.dpsi;
    const auto ddpsi = profile.ddpsi;
    auto jet = [psi, dpsi, ddpsi](Vec2 p) {
        const double u = p.x * p.x + p.y * p.y;
        const double pd = dpsi(u);
        const double pdd = ddpsi(u);
        Jet2 j;
        j.value = psi(u);
        j.gx = 2.0 * p.x * pd;
        j.gy = 2.0 * p.y * pd;
        j.hxx = 2.0 * pd + 4.0 * p.x * p.x * pdd;
        j.hxy = 4.0 * p.x * p.y * pdd;
        j.hyy = 2.0 * pd + 4.0 * p.y * p.y * pdd;
        return j;
    };
    auto value = [psi](Vec2 p) { return psi(p.x * p.x + p.y * p.y); };
    const double half = std::sqrt(profile.cutoff);
    FieldDescriptor desc{"radial_" + profile.name, {}};
    return ScalarField2D(jet, value, Rect{-half, -half, half, half}, desc);
}

ScalarField2D make_bump_mixture(const std::vector<Vec2>& centers,
                                const std::vector<double>& weights,
                                const std::vector<double>& widths) {
    const std::size_t k = centers.size();
    if (k == 0) throw std::invalid_argument("make_bump_mixture: empty component list");
    if (weights.size() != k || widths.size() != k)
        throw std::invalid_argument("make_bump_mixture: mismatched list lengths");
    for (std::size_t i = 0; i < k; ++i) {
        if (!(weights[i] > 0.0)) throw std::invalid_argument("make_bump_mixture: weight <= 0");
        if (!(widths[i] > 0.0)) throw std::invalid_argument("make_bump_mixture: width <= 0");
    }

    double wmin = weights[0];
    for (double w : weights) wmin = std::min(wmin, w);

    // Bump jets are written so that the single-bump case with w=1, sigma=1,
    // c=0 reproduces the radial exp field's arithmetic term by term.
    auto jet = [centers, weights, widths, k](Vec2 p) {
        Jet2 j;
        for (std::size_t i = 0; i < k; ++i) {
            const double dx = p.x - centers[i].x;
            const double dy = p.y - centers[i].y;
            const double inv = 1.0 / (widths[i] * widths[i]);
            const double u = (dx * dx + dy * dy) * inv;
            const double e = weights[i] * std::exp(-u);
            const double pd = -e * inv;
            const double pdd = e * inv * inv;
            j.value += e;
            j.gx += 2.0 * dx * pd;
            j.gy += 2.0 * dy * pd;
            j.hxx += 2.0 * pd + 4.0 * dx * dx * pdd;
            j.hxy += 4.0 * dx * dy * pdd;
            j.hyy += 2.0 * pd + 4.0 * dy * dy * pdd;
        }
        return j;
    };
    auto value = [centers, weights, widths, k](Vec2 p) {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double dx = p.x - centers[i].x;
            const double dy = p.y - centers[i].y;
            v += weights[i] * std::exp(-(dx * dx + dy * dy) / (widths[i] * widths[i]));
        }
        return v;
    };

    // bbox: union of per-bump discs where w_i e^{-d^2/s^2} < 1e-13 * wmin.
    Rect box{1e300, 1e300, -1e300, -1e300};
    for (std::size_t i = 0; i < k; ++i) {
        const double radius = widths[i] * std::sqrt(std::log(weights[i] / (1e-13 * wmin)));
        box.x0 = std::min(box.x0, centers[i].x - radius);
        box.y0 = std::min(box.y0, centers[i].y - radius);
        box.x1 = std::max(box.x1, centers[i].x + radius);
        box.y1 = std::max(box.y1, centers[i].y + radius);
    }

    FieldDescriptor desc{"bumps", {}};
    for (std::size_t i = 0; i < k; ++i) {
        desc.params.emplace_back("cx", centers[i].x);
        desc.params.emplace_back("cy", centers[i].y);
        desc.params.emplace_back("w", weights[i]);
        desc.params.emplace_back("s", widths[i]);
    }
    return ScalarField2D(jet, value, box, desc);
}

ScalarField2D make_affine_field(double a, double b1, double b2) {
    auto jet = [a, b1, b2](Vec2 p) {
        Jet2 j;
        j.value = a + b1 * p.x + b2 * p.y;
        j.gx = b1;
        j.gy = b2;
        return j;
    };
    auto value = [a, b1, b2](Vec2 p) { return a + b1 * p.x + b2 * p.y; };
    FieldDescriptor desc{"affine", {{"a", a}, {"b1", b1}, {"b2", b2}}};
    return ScalarField2D(jet, value, Rect{-1.0, -1.0, 1.0, 1.0}, desc, /*compact_support=*/false);
}

ScalarField2D add_scaled(const ScalarField2D& f, const ScalarField2D& g, double eta) {
    auto jet = [f, g, eta](Vec2 p) { return f.jet(p) + eta * g.jet(p); };
    auto value = [f, g, eta](Vec2 p) { return f.value(p) + eta * g.value(p); };
    FieldDescriptor desc = f.descriptor();
    desc.params.emplace_back("perturb_eta", eta);
    return ScalarField2D(jet, value, f.bbox(), desc, f.compact_support());
}

ScalarField2D with_bbox(const ScalarField2D& field, const Rect& box) {
    ScalarField2D f = field;
    return ScalarField2D([f](Vec2 p) { return f.jet(p); }, [f](Vec2 p) { return f.value(p); }, box,
                         field.descriptor(), field.compact_support());
}

ScalarField2D rotate_field(const ScalarField2D& field, int quarter_turns) {
    const int k = ((quarter_turns % 4) + 4) % 4;
    if (k == 0) return field;
    // clockwise rotation matrix for theta = k*pi/2, entries in {0,+-1}
    const double c = (k == 1 || k == 3) ? 0.0 : -1.0;
    const double s = (k == 1) ? 1.0 : (k == 3 ? -1.0 : 0.0);
    // r(x) = (c x + s y, -s x + c y)
    auto rot = [c, s](Vec2 p) { return Vec2{c * p.x + s * p.y, -s * p.x + c * p.y}; };

    auto jet = [field, rot, c, s](Vec2 p) {
        const Jet2 j = field.jet(rot(p));
        Jet2 out;
        out.value = j.value;
        // grad(f o r)(x) = R^T grad f(r x)
        out.gx = c * j.gx - s * j.gy;
        out.gy = s * j.gx + c * j.gy;
        // hess(f o r)(x) = R^T H(r x) R
        const double a = j.hxx, b = j.hxy, d = j.hyy;
        out.hxx = c * (c * a - s * b) - s * (c * b - s * d);
        out.hxy = c * (s * a + c * b) - s * (s * b + c * d);
        out.hyy = s * (s * a + c * b) + c * (s * b + c * d);
        return out;
    };
    auto value = [field, rot](Vec2 p) { return field.value(rot(p)); };

    // preimage of the bbox under r is axis-aligned for quarter turns
    const Rect bb = field.bbox();
    Rect out{};
    switch (k) {
        case 1: out = {bb.y0, -bb.x1, bb.y1, -bb.x0}; break;
        case 2: out = {-bb.x1, -bb.y1, -bb.x0, -bb.y0}; break;
        default: out = {-bb.y1, bb.x0, -bb.y0, bb.x1}; break;
    }
    FieldDescriptor desc = field.descriptor();
    desc.params.emplace_back("rot_quarter_turns", k);
    return ScalarField2D(jet, value, out, desc, field.compact_support());
}

RealTestFn make_bump_testfn(double a, double b, double scale) {
    if (!(0.0 < a && a < b)) throw std::invalid_argument("make_bump_testfn: need 0 < a < b");
    const double c = 2.0 / (b - a);
    auto tau_of = [a, b, c](double u) { return (2.0 * u - a - b) / (b - a); };
    auto h = [a, b, scale, tau_of](double u) {
        if (u <= a || u >= b) return 0.0;
        const double t = tau_of(u);
        return scale * std::exp(-1.0 / (1.0 - t * t));
    };
    auto dh = [a, b, scale, c, tau_of](double u) {
        if (u <= a || u >= b) return 0.0;
        const double t = tau_of(u);
        const double q = 1.0 - t * t;
        const double phi1 = -2.0 * t / (q * q);
        return scale * std::exp(-1.0 / q) * phi1 * c;
    };
    auto d2h = [a, b, scale, c, tau_of](double u) {
        if (u <= a || u >= b) return 0.0;
        const double t = tau_of(u);
        const double q = 1.0 - t * t;
        const double phi1 = -2.0 * t / (q * q);
        const double phi2 = -2.0 / (q * q) - 8.0 * t * t / (q * q * q);
        return scale * std::exp(-1.0 / q) * (phi1 * phi1 + phi2) * c * c;
    };

    // n2 from the closed forms on a dense grid (the extrema are interior;
    // all three functions vanish at the support edges)
    double sup = 0.0;
    const int n = 20001;
    for (int i = 1; i < n; ++i) {
        const double u = a + (b - a) * i / n;
        sup = std::max({sup, std::abs(h(u)), std::abs(dh(u)), std::abs(d2h(u))});
    }

    RealTestFn fn;
    fn.h = h;
    fn.dh = dh;
    fn.lo = a;
    fn.hi = b;
    fn.n2_bound = sup * (1.0 + 1e-12);
    fn.desc = FieldDescriptor{"bump", {{"a", a}, {"b", b}, {"scale", scale}}};
    return fn;
}

ComplexTestFn make_fourier_testfn(double t) {
    const std::complex<double> it(0.0, t);
    ComplexTestFn fn;
    fn.h = [t](double u) { return std::exp(std::complex<double>(0.0, t * u)); };
    fn.dh = [t, it](double u) { return it * std::exp(std::complex<double>(0.0, t * u)); };
    fn.lo = 0.0;
    fn.hi = std::numeric_limits<double>::infinity();
    fn.fourier = true;
    fn.n2_bound = std::max({1.0, std::abs(t), t * t});
    fn.desc = FieldDescriptor{"fourier", {{"t", t}}};
    return fn;
}

FieldDescriptor parse_descriptor(const std::string& spec) {
    FieldDescriptor desc;
    std::stringstream ss(spec);
    std::string tok;
    if (!std::getline(ss, tok, ':')) throw std::invalid_argument("empty descriptor");
    desc.family = tok;
    int i = 0;
    while (std::getline(ss, tok, ':')) {
        try {
            desc.params.emplace_back("p" + std::to_string(i++), std::stod(tok));
        } catch (const std::exception&) {
            throw std::invalid_argument("descriptor parameter not numeric: " + tok);
        }
    }
    return desc;
}

ScalarField2D make_field(const FieldDescriptor& desc) {
    const auto& ps = desc.params;
    if (desc.family == "radial_exp") {
        return make_radial_field(exp_profile());
    }
    if (desc.family == "single_bump") {
        return make_bump_mixture({{0.0, 0.0}}, {1.0}, {1.0});
    }
    if (desc.family == "two_bump") {
        return make_bump_mixture({{-1.0, 0.0}, {1.0, 0.0}}, {1.0, 1.0}, {1.0, 1.0});
    }
    if (desc.family == "bumps") {
        if (ps.empty() || ps.size() % 4 != 0)
            throw std::invalid_argument("bumps descriptor needs cx:cy:w:s groups");
        std::vector<Vec2> centers;
        std::vector<double> weights, widths;
        for (std::size_t i = 0; i < ps.size(); i += 4) {
            centers.push_back({ps[i].second, ps[i + 1].second});
            weights.push_back(ps[i + 2].second);
            widths.push_back(ps[i + 3].second);
        }
        return make_bump_mixture(centers, weights, widths);
    }
    if (desc.family == "affine") {
        if (ps.size() != 3) throw std::invalid_argument("affine descriptor needs a:b1:b2");
        return make_affine_field(ps[0].second, ps[1].second, ps[2].second);
    }
    throw std::invalid_argument("unknown field family: " + desc.family);
}

ScalarField2D make_field(const std::string& spec) { return make_field(parse_descriptor(spec)); }

RealTestFn make_real_testfn(const std::string& spec) {
    const FieldDescriptor desc = parse_descriptor(spec);
    if (desc.family == "bump") {
        if (desc.params.size() == 2)
            return make_bump_testfn(desc.params[0].second, desc.params[1].second);
        if (desc.params.size() == 3)
            return make_bump_testfn(desc.params[0].second, desc.params[1].second, desc.params[2].second);
        throw std::invalid_argument("bump testfn needs a:b[:scale]");
    }
    throw std::invalid_argument("unknown test-function family: " + desc.family);
}

Profile1D tent_profile() {
    Profile1D p;
    p.f = [](double x) { return std::max(0.0, 1.0 - std::abs(x)); };
    p.df = [](double x) {
        if (x <= -1.0 || x >= 1.0) return 0.0;
        return x < 0.0 ? 1.0 : -1.0;
    };
    p.a = -2.0;
    p.b = 2.0;
    p.breakpoints = {-1.0, 0.0, 1.0};
    p.name = "tent";
    return p;
}

Profile1D gauss1d_profile() {
    Profile1D p;
    p.f = [](double x) { return std::exp(-x * x); };
    p.df = [](double x) { return -2.0 * x * std::exp(-x * x); };
    p.a = -4.0;
    p.b = 4.0;
    p.breakpoints = {0.0};
    p.name = "gauss1d";
    return p;
}

Profile1D make_profile1d(const std::string& name) {
    if (name == "tent") return tent_profile();
    if (name == "gauss1d") return gauss1d_profile();
    throw std::invalid_argument("unknown 1d profile: " + name);
}

}  // namespace ecx
