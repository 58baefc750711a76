#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ecx/geom.hpp"

namespace ecx {

/// Flat family-name + numeric-parameter record; the unit of field and
/// test-function serialization used by the CLI config format.
struct FieldDescriptor {
    std::string family;
    std::vector<std::pair<std::string, double>> params;

    std::string to_string() const;  // "family:v1:v2:..."
};

/// Immutable 2D field with exact first/second derivative jets. Evaluation is
/// pure; concurrent readers are safe. `value` is a cheaper value-only path
/// used by level sweeps.
class ScalarField2D {
  public:
    ScalarField2D() = default;
    ScalarField2D(std::function<Jet2(Vec2)> jet, std::function<double(Vec2)> value,
                  Rect bbox, FieldDescriptor desc, bool compact_support = true)
        : jet_(std::move(jet)), value_(std::move(value)), bbox_(bbox),
          desc_(std::move(desc)), compact_support_(compact_support) {}

    Jet2 jet(Vec2 p) const { return jet_(p); }
    double value(Vec2 p) const { return value_(p); }
    const Rect& bbox() const { return bbox_; }
    const FieldDescriptor& descriptor() const { return desc_; }
    bool compact_support() const { return compact_support_; }

  private:
    std::function<Jet2(Vec2)> jet_;
    std::function<double(Vec2)> value_;
    Rect bbox_;
    FieldDescriptor desc_;
    bool compact_support_ = true;
};

/// Non-negative radial profile psi with derivatives; the field is
/// f(x) = psi(||x||^2).
struct RadialProfile {
    std::function<double(double)> psi, dpsi, ddpsi;
    double psi0 = 0.0;     // psi(0)
    double cutoff = 0.0;   // psi(r) <= 1e-13 * psi0 for r >= cutoff (r is the squared radius)
    std::string name;
};

/// psi(r) = e^{-r}; the field it induces is the unit Gaussian bump.
RadialProfile exp_profile();

/// Compactly supported C^2 test function (or the flagged Fourier variant
/// h(u) = e^{itu}, which has no compact support and is exempt from the
/// support invariants). n2_bound >= sup(|h|, |h'|, |h''|).
template <class T>
struct TestFunction {
    std::function<T(double)> h;
    std::function<T(double)> dh;
    double lo = 0.0;
    double hi = 0.0;
    bool fourier = false;
    double n2_bound = 0.0;
    FieldDescriptor desc;
};

using RealTestFn = TestFunction<double>;
using ComplexTestFn = TestFunction<std::complex<double>>;

/// f(x) = psi(||x||^2) with jets from the closed-form radial derivatives.
ScalarField2D make_radial_field(const RadialProfile& profile);

/// f(x) = sum_k w_k exp(-||x - c_k||^2 / sigma_k^2), exact jets.
/// Throws std::invalid_argument on empty or mismatched inputs.
ScalarField2D make_bump_mixture(const std::vector<Vec2>& centers,
                                const std::vector<double>& weights,
                                const std::vector<double>& widths);

/// Affine field A + B1*x + B2*y (perturbation family; not compactly
/// supported, bbox is a placeholder).
ScalarField2D make_affine_field(double a, double b1, double b2);

/// f + eta * g, jets added termwise; bbox and descriptor come from f.
ScalarField2D add_scaled(const ScalarField2D& f, const ScalarField2D& g, double eta);

/// Same field with an overridden bbox (the bbox is the quadrature window;
/// callers may tighten it when the excursions of interest are known to live
/// in a smaller region).
ScalarField2D with_bbox(const ScalarField2D& field, const Rect& box);

/// f^theta(x) = f(r_theta(x)) for theta = quarter_turns * pi/2 (clockwise).
/// Gradient rotated, Hessian conjugated; exact for quarter turns.
ScalarField2D rotate_field(const ScalarField2D& field, int quarter_turns);

/// Smooth bump scale * exp(-1/(1-tau^2)) on (a,b), tau = (2u-a-b)/(b-a).
/// Requires 0 < a < b.
RealTestFn make_bump_testfn(double a, double b, double scale = 1.0);

/// Characteristic-function test function h^{(t)}(u) = e^{itu}.
ComplexTestFn make_fourier_testfn(double t);

/// Registry lookup: "radial_exp", "single_bump", "two_bump",
/// "bumps:cx:cy:w:s[:...]", "affine:a:b1:b2".
ScalarField2D make_field(const std::string& spec);
ScalarField2D make_field(const FieldDescriptor& desc);

/// Registry lookup for real test functions: "bump:a:b[:scale]".
RealTestFn make_real_testfn(const std::string& spec);

FieldDescriptor parse_descriptor(const std::string& spec);

/// 1D profile on [a,b] for the Kac-Rice companion. `breakpoints` are the
/// interior monotonicity breakpoints (f' has one sign between consecutive
/// entries of a,breakpoints...,b).
struct Profile1D {
    std::function<double(double)> f, df;
    double a = 0.0, b = 0.0;
    std::vector<double> breakpoints;
    std::string name;
};

/// f(x) = max(0, 1-|x|) on [-2,2].
Profile1D tent_profile();

/// f(x) = exp(-x^2) on [-4,4].
Profile1D gauss1d_profile();

Profile1D make_profile1d(const std::string& name);

}  // namespace ecx
