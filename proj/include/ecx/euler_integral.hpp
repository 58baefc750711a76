#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecx/fields.hpp"
#include "ecx/geom.hpp"
#include "ecx/quadrature.hpp"
#include "ecx/topology.hpp"

namespace ecx {

enum class ECMethod { Cubical, Bicov, Morse };

ECMethod ec_method_from_string(const std::string& name);

/// Unsigned quarter-plane density at one jet: which Q_i is active and the
/// two contributions d_i f^2 h'(f) and d^2_ii f h(f). The global minus sign
/// of the identity lives in euler_primitive_integral.
template <class T>
struct GammaTerm {
    bool q1_active = false;
    bool q2_active = false;
    T grad_term{};
    T hess_term{};
};

template <class T>
GammaTerm<T> gamma_term(const Jet2& jet, const TestFunction<T>& h) {
    GammaTerm<T> out;
    const int q = quarter_plane(jet.gx, jet.gy);
    if (q == 0) return out;
    const T hv = h.h(jet.value);
    const T dhv = h.dh(jet.value);
    if (q == 1) {
        out.q1_active = true;
        out.grad_term = (jet.gx * jet.gx) * dhv;
        out.hess_term = jet.hxx * hv;
    } else {
        out.q2_active = true;
        out.grad_term = (jet.gy * jet.gy) * dhv;
        out.hess_term = jet.hyy * hv;
    }
    return out;
}

/// gamma(x,f,h) = sum_i 1{grad f in Q_i} [d_i f^2 h'(f) + d^2_ii f h(f)].
template <class T>
T gamma_density(const Jet2& jet, const TestFunction<T>& h) {
    const auto term = gamma_term(jet, h);
    if (!term.q1_active && !term.q2_active) return T{};
    return term.grad_term + term.hess_term;
}

namespace detail {
double magnitude(double v);
double magnitude(std::complex<double> v);
}  // namespace detail

/// I_f(h) = -integral of gamma over the bbox, composite rule per `quad`.
/// Evaluated at spatial_resolution and twice that; throws "I_f not
/// converged" when the two differ by more than 10*tol (relative); returns
/// the finer value.
template <class T>
T euler_primitive_integral(const ScalarField2D& field, const TestFunction<T>& h,
                           const QuadratureSpec& quad) {
    quad.check();
    if (!h.fourier && !(h.lo > 0.0))
        throw std::invalid_argument("euler_primitive_integral: supp(h) must lie in (0,inf)");
    auto density = [&](Vec2 p) { return gamma_density(field.jet(p), h); };
    const T coarse = -integrate_2d<T>(field.bbox(), quad.spatial_resolution, quad.rule, density);
    const T fine = -integrate_2d<T>(field.bbox(), 2 * quad.spatial_resolution, quad.rule, density);
    if (detail::magnitude(fine - coarse) >
        10.0 * quad.tol * std::max(1.0, detail::magnitude(fine)))
        throw std::runtime_error("I_f not converged");
    return fine;
}

/// Rotation-averaged form: -(1/4) sum_i int 1{|d_i' f| > |d_i f|}
/// [d_i f^2 h'(f) + d^2_ii f h(f)] dx, same convergence protocol.
template <class T>
T euler_primitive_rotavg(const ScalarField2D& field, const TestFunction<T>& h,
                         const QuadratureSpec& quad) {
    quad.check();
    if (!h.fourier && !(h.lo > 0.0))
        throw std::invalid_argument("euler_primitive_rotavg: supp(h) must lie in (0,inf)");
    auto density = [&](Vec2 p) -> T {
        const Jet2 jet = field.jet(p);
        const double ax = std::abs(jet.gx), ay = std::abs(jet.gy);
        if (ax == ay) return T{};
        const T hv = h.h(jet.value);
        const T dhv = h.dh(jet.value);
        if (ay > ax) return (jet.gx * jet.gx) * dhv + jet.hxx * hv;
        return (jet.gy * jet.gy) * dhv + jet.hyy * hv;
    };
    const T coarse =
        -0.25 * integrate_2d<T>(field.bbox(), quad.spatial_resolution, quad.rule, density);
    const T fine =
        -0.25 * integrate_2d<T>(field.bbox(), 2 * quad.spatial_resolution, quad.rule, density);
    if (detail::magnitude(fine - coarse) >
        10.0 * quad.tol * std::max(1.0, detail::magnitude(fine)))
        throw std::runtime_error("I_f rotavg not converged");
    return fine;
}

/// chi_f(h) = int h(u) chi({f>=u}) du with chi from the selected method per
/// level node. Nodes within the bicovariogram margin of a critical value
/// have chi evaluated at a snapped-in-plateau position (exact, chi is
/// piecewise constant).
double euler_primitive_direct(const ScalarField2D& field, const RealTestFn& h,
                              const QuadratureSpec& quad, ECMethod method);

struct KacRice1DResult {
    double lhs = 0.0;          // int h(u) N_u^+ du
    double rhs = 0.0;          // int h(f(x)) |f'(x)| dx
    double up_integral = 0.0;  // int_0^inf N_u^+ du
    double down_integral = 0.0;
};

/// Both sides of the 1D companion identity. The relation between them
/// (rhs = 2 lhs under the boundary condition) is asserted by the caller.
/// Throws if f at the interval ends reaches supp(h).
KacRice1DResult kac_rice_1d(const Profile1D& profile, const RealTestFn& h);

struct CoareaResult {
    double lhs = 0.0;  // int h(u) Per({f>=u}) du, marching-squares perimeters
    double rhs = 0.0;  // int h(f) |grad f| dx
};

CoareaResult coarea_check(const ScalarField2D& field, const RealTestFn& h,
                          const QuadratureSpec& quad);

struct GapBound {
    double actual = 0.0;
    double bound = 0.0;
};

/// Continuity bound at one point: actual = |gamma_i(f+g) - gamma_i(f)|,
/// bound = 6 N2(h) max(d_i f^2, |d2_ii f|, 2|d_i f|+|d_i g|)
///              * max(delta_x(f,g), |d_i g|, |g|, |d2_ii g|),
/// delta_x from the four directions u1, u2 and the diagonals.
GapBound continuity_gap_bound(const Jet2& jet_f, const Jet2& jet_g, const RealTestFn& h, int i);

using FieldSampler = std::function<ScalarField2D(std::uint64_t)>;

struct ContinuityMomentReport {
    double lhs_q = 0.0;            // MC estimate of E|I_f - I_{f+g}|^q
    double rhs_without_cq = 0.0;   // corollary right side with C_q omitted
    int reps = 0;
};

ContinuityMomentReport continuity_moment_report(const ScalarField2D& f,
                                                const FieldSampler& g_sampler,
                                                const RealTestFn& h, int q,
                                                const QuadratureSpec& quad, int reps,
                                                std::uint64_t seed);

/// Level nodes across [lo,hi] for the level integrals (midpoint or composite
/// Gauss-Legendre, level_count evaluation points).
std::vector<QuadNode> level_nodes(double lo, double hi, const QuadratureSpec& quad);

/// Marching-squares total contour length of {f = u} on the sampled lattice;
/// ambiguous cells are resolved by the field value at the cell center.
double contour_length(const SampledField& samples, const ScalarField2D& field, double u);

}  // namespace ecx
