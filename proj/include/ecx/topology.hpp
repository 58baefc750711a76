#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecx/fields.hpp"
#include "ecx/geom.hpp"

namespace ecx {

/// Lattice discretizing the window; `spacing` is the epsilon of the
/// bicovariogram estimator.
struct GridSpec {
    Vec2 origin;
    double spacing = 0.0;
    int nx = 0, ny = 0;

    Vec2 point(int i, int j) const { return {origin.x + i * spacing, origin.y + j * spacing}; }
    bool covers(const Rect& r) const;

    /// Square-spacing grid covering rect with `resolution` points per
    /// (longest) side.
    static GridSpec cover(const Rect& rect, int resolution);
    /// Grid over rect with a prescribed spacing.
    static GridSpec with_spacing(const Rect& rect, double spacing);
};

/// Occupancy lattice of a binarized excursion set at one level. The boundary
/// ring must be unoccupied (compact excursion strictly inside the window).
struct BinaryGrid {
    GridSpec spec;
    double level = 0.0;
    std::vector<std::uint8_t> occ;  // nx*ny, index i + nx*j

    bool at(int i, int j) const {
        if (i < 0 || j < 0 || i >= spec.nx || j >= spec.ny) return false;
        return occ[static_cast<std::size_t>(i) + static_cast<std::size_t>(spec.nx) * j] != 0;
    }

    std::string to_text() const;
    static BinaryGrid from_text(std::istream& in);
};

/// Field values cached on a lattice; shared by level sweeps so the field is
/// evaluated once per point.
struct SampledField {
    GridSpec spec;
    std::vector<double> values;  // nx*ny

    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) + static_cast<std::size_t>(spec.nx) * j];
    }
};

SampledField sample_field(const ScalarField2D& field, const GridSpec& spec);

/// occupancy(i,j) = [f(grid point) >= u]. Throws if the boundary ring is
/// occupied ("excursion not compactly contained") or the grid does not cover
/// the field's bbox.
BinaryGrid binarize(const ScalarField2D& field, const GridSpec& spec, double u);
BinaryGrid binarize(const SampledField& samples, double u);

/// V - E + F of the union of closed unit pixels at occupied cells
/// (components minus holes; diagonal touch connects foreground).
long long euler_char_cubical(const BinaryGrid& grid);

/// Lattice realization of the two-pattern bicovariogram estimator:
///   #{x : f(x)>=u, f(x+eps e1)<u, f(x+eps e2)<u}
/// - #{x : f(x)<u,  f(x-eps e1)>=u, f(x-eps e2)>=u}.
long long euler_char_bicov(const ScalarField2D& field, const GridSpec& spec, double u);
long long euler_char_bicov(const BinaryGrid& grid);

/// Non-degenerate critical point; index = number of positive Hessian
/// eigenvalues (0 maximum, 1 saddle, 2 minimum).
struct CriticalPoint {
    Vec2 location;
    double value = 0.0;
    int index = 0;
    double hess_det = 0.0;
};

struct CriticalPointOptions {
    int seed_resolution = 64;
    double newton_tol = 1e-10;
    double degeneracy_tol = 1e-8;
    int max_iterations = 50;
    /// Converged points with f below this are discarded: the far field of a
    /// vanishing-at-infinity field is numerically flat, and only levels
    /// above 0 are in scope.
    double min_value = 1e-7;
};

/// Damped Newton on grad f from all seed-grid local minimizers of |grad f|,
/// deduplicated within 10*newton_tol (max-norm), classified by Hessian
/// eigenvalue signs, sorted by value descending. Throws "degenerate critical
/// point" if a converged point has |det H| <= degeneracy_tol.
std::vector<CriticalPoint> find_critical_points(const ScalarField2D& field, const Rect& region,
                                                const CriticalPointOptions& opts = {});

/// chi = mu_0 - mu_1 + mu_2 over points with value >= u. Throws "critical
/// level" if u is within value_tol of a listed critical value.
long long euler_char_morse(const std::vector<CriticalPoint>& points, double u,
                           double value_tol = 1e-9);

/// mu-triple (mu_0, mu_1, mu_2) at level u.
std::array<int, 3> morse_counts(const std::vector<CriticalPoint>& points, double u);

/// Critical inventories of f and f + eta*perturbation at level u.
std::pair<std::array<int, 3>, std::array<int, 3>> morse_count_stability(
    const ScalarField2D& field, double u, const ScalarField2D& perturbation, double eta,
    const CriticalPointOptions& opts = {});

/// chi at each of several levels in one pass over the lattice (exactly the
/// per-level euler_char_cubical / euler_char_bicov integers).
std::vector<long long> cubical_chi_at_levels(const SampledField& samples,
                                             const std::vector<double>& levels);
std::vector<long long> bicov_chi_at_levels(const SampledField& samples,
                                           const std::vector<double>& levels);

}  // namespace ecx
