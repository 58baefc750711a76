#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecx/fields.hpp"
#include "ecx/geom.hpp"
#include "ecx/quadrature.hpp"

namespace ecx {

using Complex = std::complex<double>;

/// Grain kernel g with analytic jets, hard truncation radius (g and all jet
/// entries below 1e-12 outside it), and the structural/decay constants of
/// its admissibility assumptions.
struct GrainKernel {
    std::string name;
    std::function<Jet2(Vec2)> jet_at;  // base jet, amplitude 1, no truncation
    double truncation_radius = 0.0;
    double decay_gamma = 0.0;  // > 4
    double decay_const = 0.0;
    double grad_alpha = 1.0;  // >= 1
    double grad_const = 0.0;
    double convex_level_threshold = 0.0;
    bool radial = false;
    // radial profile as functions of the squared radius (radial kernels)
    std::function<double(double)> g, dg, ddg;

    Jet2 jet(Vec2 p) const {
        if (p.x * p.x + p.y * p.y > truncation_radius * truncation_radius) return Jet2{};
        return jet_at(p);
    }
};

/// g0(x) = exp(-||x||^2).
GrainKernel gaussian_kernel();

/// g(x) = (1 + ||x||^2)^{-beta}, beta > 2 (decay_gamma = 2*beta,
/// grad_alpha = 2, grad_const ~ beta).
GrainKernel radial_power_kernel(double beta);

/// Kernel mixture with a uniform amplitude law on [amp_lo, amp_hi] and an
/// optional uniform random rotation (isotropy).
struct KernelModel {
    struct Component {
        GrainKernel kernel;
        double weight = 1.0;
    };
    std::vector<Component> components;
    double amp_lo = 0.5, amp_hi = 1.5;
    bool rotate = true;

    double max_truncation_radius() const;
    bool all_radial() const;
    void check() const;
};

/// Single-Gaussian-kernel model (the acceptance workhorse).
KernelModel gaussian_model();

struct Germ {
    Vec2 pos;
    int kernel_index = 0;
    double amplitude = 1.0;
    double rotation = 0.0;  // clockwise angle applied to the kernel
};

/// One Poisson realization: germ positions in the disc B(0, window_radius)
/// with per-germ realized kernel draws. Draw order per germ: position (2),
/// component (1), amplitude (1), rotation (1, only when the model rotates).
struct GermSample {
    double window_radius = 0.0;
    double intensity = 0.0;
    std::uint64_t seed = 0;
    std::vector<Germ> germs;

    std::string to_text() const;
    static GermSample from_text(std::istream& in);
};

GermSample sample_germs(double window_radius, double intensity, const KernelModel& model,
                        std::uint64_t seed);

/// Jet of one realized germ at x.
Jet2 germ_jet(const Germ& germ, const KernelModel& model, Vec2 x);

/// f(x) = sum of germ kernels; bbox is the window dilated by the largest
/// truncation radius. Evaluation uses a cell list over germs.
ScalarField2D shot_field(const GermSample& sample, const KernelModel& model);

/// Characteristic function psi_i(t, s, v) of (f(0), grad f(0), d2_ii f(0))
/// in exponential form; the exponent integral runs over the truncated plane
/// with sub-quadrature over amplitude (and rotation for non-radial kernels).
/// psi_2 pairs (s1, s2) with (d2 g, d1 g) and uses d2_22 g.
Complex psi(int i, double t, Vec2 s, double v, const KernelModel& model,
            const QuadratureSpec& quad, double intensity = 1.0);

/// d/dv psi_i(t,s,v) at v=0: i * psi_i(t,s) * integral of d2_ii g times the
/// phase factor.
Complex d4_psi(int i, double t, Vec2 s, const KernelModel& model, const QuadratureSpec& quad,
               double intensity = 1.0);

/// d^2/ds1^2 psi_i(t,(0,0)): -psi(t) [ (int d_i g e^{itg})^2 + int d_i g^2 e^{itg} ].
Complex d22_psi(int i, double t, const KernelModel& model, const QuadratureSpec& quad,
                double intensity = 1.0);

struct ImproperGridSpec {
    double s_max = 50.0;
    int s_grid = 200;  // log-spaced nodes per axis
    double eps0 = 1e-3;
};

struct ValueWithError {
    Complex value{};
    double error = 0.0;  // grid-doubling + tail/origin truncation estimate
};

/// Stationary limit of the mean Euler-primitive density E gamma(0,f,h^{(t)})
/// (with the identity's minus sign), assembled from psi-derivatives:
///   sum_i [ it (pi-2)/(8 pi) d22 psi_i + (i/4) d4 psi_i(t,0)
///           - (i/(2 pi^2)) int int (d4 psi_i(t,s1-s2,s2) - d4 psi_i(t,s1+s2,-s2))/(s1 s2) ]
/// The double integral uses a log-spaced grid on [eps0, s_max]^2 with
/// grid-doubling error estimates. Requires radial kernels (isotropy).
ValueWithError stationary_limit_density(double t, const KernelModel& model,
                                        const QuadratureSpec& quad,
                                        const ImproperGridSpec& improper = {},
                                        double intensity = 1.0);

struct McEstimate {
    Complex value{};
    double stderr_est = 0.0;  // sqrt((var Re + var Im)/reps)
};

/// MC average over replicates of
///   -sum_i 1{grad f(0) in Q_i} [ it d_i f(0)^2 + d2_ii f(0) ] e^{it f(0)},
/// germs sampled on B(0, window_radius); replicate seeds derived by the
/// SplitMix64 finalizer from (seed, replicate index).
McEstimate mc_gamma_at_origin(double t, const KernelModel& model, double window_radius,
                              double intensity, int reps, std::uint64_t seed);

/// Per replicate: germs on B(0,sqrt(n)), the same density integrated over
/// B(0,sqrt(n)) by polar quadrature, normalized by |W_n| = pi n.
McEstimate mc_euler_primitive_fourier(double t, const KernelModel& model, double n,
                                      double intensity, int reps, const QuadratureSpec& quad,
                                      std::uint64_t seed);

/// MC average of e^{it f(0)} (oracle for the characteristic function).
McEstimate empirical_cf(const KernelModel& model, double window_radius, double intensity,
                        double t, int reps, std::uint64_t seed);

struct IsotropyCheck {
    Complex lhs1{}, lhs2{};  // E[e^{itf} 1{grad f in Q_i} d_i f^2]
    Complex rhs{};           // (pi-2)/(16 pi) E[e^{itf} ||grad f||^2]
    double stderr_diff1 = 0.0;  // stderr of lhs_i - rhs (common random numbers)
    double stderr_diff2 = 0.0;
};

IsotropyCheck isotropy_factor_check(const KernelModel& model, double t, double window_radius,
                                    double intensity, int reps, std::uint64_t seed);

/// Quadrature of cos^2 (resp. sin^2) over [a,b]; the angular helper behind
/// the (pi-2)/8 sector constant.
double angular_cos2_integral(double a, double b);
double angular_sin2_integral(double a, double b);

}  // namespace ecx
