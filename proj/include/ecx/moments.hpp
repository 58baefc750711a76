#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ecx/fields.hpp"
#include "ecx/quadrature.hpp"
#include "ecx/shotnoise.hpp"

namespace ecx {

struct MomentReport {
    int q = 0;
    double p = 0.0;
    double empirical_qth = 0.0;
    double bound = 0.0;
    double constant_used = 0.0;
    double moment_cap = 0.0;            // the M fed to the bound
    double support_prob_integral = 0.0;
    int reps = 0;
    std::uint64_t seed = 0;
    std::string inputs;

    /// One CSV row: q,p,empirical_qth,bound,constant_used,moment_cap,
    /// support_prob_integral,reps,seed,inputs
    std::string to_csv_row() const;
    static std::string csv_header();
};

/// constant * (M^{1/p} (||h|| + ||h'||) * support_prob_integral)^q.
/// Requires p > 1; M is caller-supplied (see shot_moment_cap).
double moment_bound(int q, double p, double moment_cap, const RealTestFn& h,
                    double support_prob_integral, double constant);

/// mean of |value|^q over a non-empty sample.
double empirical_moment(const std::vector<double>& values, int q);
double empirical_moment(const std::vector<std::complex<double>>& values, int q);

/// Spatial integral of the MC-estimated P(f(x) in supp h)^{1-1/p} for the
/// shot model on B(0, window_radius).
double support_prob_integral(const KernelModel& model, double intensity, double window_radius,
                             const RealTestFn& h, double p, int reps, std::uint64_t seed);

/// Auditable upper bound for sup_x max(E d_i f(x)^{2pq}, E |d2_ii f(x)|^{pq})
/// of the stationary shot field: moments are bounded through
/// absolute-value cumulants kbar_j = intensity * E[M^j] int |entry|^j dx and
/// the standard moment-from-cumulant recursion (all coefficients positive).
double shot_moment_cap(const KernelModel& model, double intensity, int q, double p);

/// Full desk-scale experiment: `reps` windowed shot fields, empirical q-th
/// moment of I_f(h) against the bound with constant q 2^q.
MomentReport run_moment_experiment(const KernelModel& model, double intensity,
                                   double window_radius, const RealTestFn& h, int q, double p,
                                   int reps, std::uint64_t seed, const QuadratureSpec& quad);

}  // namespace ecx
