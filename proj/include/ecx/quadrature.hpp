#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ecx/geom.hpp"
#include "ecx/parallel.hpp"

namespace ecx {

enum class QuadRule { Midpoint, GaussLegendre };

/// Resolutions and tolerance for the spatial/level quadratures.
struct QuadratureSpec {
    int spatial_resolution = 512;  // points per bbox side
    int level_count = 128;         // level nodes across supp(h)
    QuadRule rule = QuadRule::Midpoint;
    double tol = 1e-4;

    void check() const {
        if (spatial_resolution < 64) throw std::invalid_argument("spatial_resolution must be >= 64");
        if (level_count < 32) throw std::invalid_argument("level_count must be >= 32");
    }
};

struct QuadNode {
    double x;
    double w;
};

/// Gauss-Legendre rule of a fixed order (4, 8, 16 or 32) on [a,b].
std::vector<QuadNode> gauss_legendre(double a, double b, int order);

/// Composite 1D nodes on [a,b]: n midpoint cells, or n/4 cells with 4-point
/// Gauss-Legendre each (~n evaluation points either way).
std::vector<QuadNode> quad_nodes_1d(double a, double b, int n, QuadRule rule);

/// Composite 2D integral of fn(Vec2) over rect, `resolution` points per side.
/// One chunk per row, partials summed in row order: bitwise-deterministic
/// for any worker count.
template <class T, class Fn>
T integrate_2d(const Rect& rect, int resolution, QuadRule rule, Fn&& fn) {
    const auto xs = quad_nodes_1d(rect.x0, rect.x1, resolution, rule);
    const auto ys = quad_nodes_1d(rect.y0, rect.y1, resolution, rule);
    std::vector<T> rows(ys.size(), T{});
    parallel_for_chunks(ys.size(), [&](std::size_t j) {
        T acc{};
        for (const auto& nx : xs) acc += nx.w * fn(Vec2{nx.x, ys[j].x});
        rows[j] = ys[j].w * acc;
    });
    T total{};
    for (const T& r : rows) total += r;
    return total;
}

/// 1D integral with the same composite rules.
template <class T, class Fn>
T integrate_1d(double a, double b, int n, QuadRule rule, Fn&& fn) {
    T acc{};
    for (const auto& node : quad_nodes_1d(a, b, n, rule)) acc += node.w * fn(node.x);
    return acc;
}

}  // namespace ecx
