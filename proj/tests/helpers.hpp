#pragma once

// Test-side oracles, independent of the library implementation paths they
// check: finite differences for jets, union-find component/hole counting
// for Euler characteristics, dense-grid critical point search, and adaptive
// Simpson quadrature.

#include <cmath>
#include <functional>
#include <vector>

#include "ecx/fields.hpp"
#include "ecx/geom.hpp"
#include "ecx/topology.hpp"

namespace ecx_test {

/// Max relative disagreement (floored at scale 1) between analytic jets and
/// central finite differences of the value channel.
inline double jet_fd_error(const ecx::ScalarField2D& field, ecx::Vec2 p, double step = 1e-4) {
    const ecx::Jet2 jet = field.jet(p);
    auto v = [&](double dx, double dy) { return field.value({p.x + dx, p.y + dy}); };
    const double gx = (v(step, 0) - v(-step, 0)) / (2 * step);
    const double gy = (v(0, step) - v(0, -step)) / (2 * step);
    const double hxx = (v(step, 0) - 2 * v(0, 0) + v(-step, 0)) / (step * step);
    const double hyy = (v(0, step) - 2 * v(0, 0) + v(0, -step)) / (step * step);
    const double hxy = (v(step, step) - v(step, -step) - v(-step, step) + v(-step, -step)) /
                       (4 * step * step);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
    double err = rel(jet.gx, gx);
    err = std::max(err, rel(jet.gy, gy));
    err = std::max(err, rel(jet.hxx, hxx));
    err = std::max(err, rel(jet.hyy, hyy));
    err = std::max(err, rel(jet.hxy, hxy));
    return err;
}

/// Components (8-connectivity) minus holes (4-connectivity background
/// components not touching the border) -- the closed-pixel convention.
inline long long chi_union_find(const ecx::BinaryGrid& grid) {
    const int nx = grid.spec.nx, ny = grid.spec.ny;
    const int n = nx * ny;
    std::vector<int> parent(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) parent[static_cast<std::size_t>(i)] = i;
    std::function<int(int)> find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };
    auto id = [&](int i, int j) { return i + nx * j; };

    // foreground: 8-connectivity
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!grid.at(i, j)) continue;
            const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
            for (const auto& d : dirs) {
                const int ii = i + d[0], jj = j + d[1];
                if (ii >= 0 && jj >= 0 && ii < nx && jj < ny && grid.at(ii, jj))
                    unite(id(i, j), id(ii, jj));
            }
        }
    }
    // background: 4-connectivity, with a virtual outside node n
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (grid.at(i, j)) continue;
            if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) unite(id(i, j), n);
            if (i + 1 < nx && !grid.at(i + 1, j)) unite(id(i, j), id(i + 1, j));
            if (j + 1 < ny && !grid.at(i, j + 1)) unite(id(i, j), id(i, j + 1));
        }
    }

    long long components = 0, holes = 0;
    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int root = find(id(i, j));
            if (seen[static_cast<std::size_t>(root)]) continue;
            seen[static_cast<std::size_t>(root)] = 1;
            if (grid.at(i, j))
                ++components;
            else if (root != find(n))
                ++holes;
        }
    }
    return components - holes;
}

struct OracleCriticalPoint {
    ecx::Vec2 location;
    double value;
    int index;
};

/// Dense-grid argmin of |grad f| with local refinement; classification by
/// Hessian eigenvalue signs. Independent of the Newton path.
inline std::vector<OracleCriticalPoint> critical_points_oracle(const ecx::ScalarField2D& field,
                                                               const ecx::Rect& region,
                                                               int resolution = 600) {
    std::vector<OracleCriticalPoint> out;
    const double hx = region.width() / resolution;
    const double hy = region.height() / resolution;
    std::vector<double> g2(static_cast<std::size_t>(resolution + 1) * (resolution + 1));
    for (int j = 0; j <= resolution; ++j) {
        for (int i = 0; i <= resolution; ++i) {
            const ecx::Jet2 jet = field.jet({region.x0 + i * hx, region.y0 + j * hy});
            g2[static_cast<std::size_t>(i) + static_cast<std::size_t>(resolution + 1) * j] =
                jet.gx * jet.gx + jet.gy * jet.gy;
        }
    }
    auto at = [&](int i, int j) {
        return g2[static_cast<std::size_t>(i) + static_cast<std::size_t>(resolution + 1) * j];
    };
    for (int j = 1; j < resolution; ++j) {
        for (int i = 1; i < resolution; ++i) {
            const double v = at(i, j);
            if (v > 1e-4) continue;  // only near-critical grid minima matter
            bool is_min = true;
            for (int dj = -1; dj <= 1 && is_min; ++dj)
                for (int di = -1; di <= 1; ++di)
                    if ((di || dj) && at(i + di, j + dj) < v) {
                        is_min = false;
                        break;
                    }
            if (!is_min) continue;
            // local bisection refinement on the gradient norm
            ecx::Vec2 p{region.x0 + i * hx, region.y0 + j * hy};
            double span_x = hx, span_y = hy;
            for (int it = 0; it < 60; ++it) {
                ecx::Vec2 best = p;
                double best_v = norm2(ecx::Vec2{field.jet(p).gx, field.jet(p).gy});
                for (int dj = -1; dj <= 1; ++dj) {
                    for (int di = -1; di <= 1; ++di) {
                        const ecx::Vec2 c{p.x + di * span_x, p.y + dj * span_y};
                        const ecx::Jet2 jc = field.jet(c);
                        const double vc = jc.gx * jc.gx + jc.gy * jc.gy;
                        if (vc < best_v) {
                            best_v = vc;
                            best = c;
                        }
                    }
                }
                p = best;
                span_x *= 0.7;
                span_y *= 0.7;
            }
            const ecx::Jet2 jet = field.jet(p);
            if (std::hypot(jet.gx, jet.gy) > 1e-7) continue;
            if (jet.value < 1e-7) continue;
            bool dup = false;
            for (const auto& cp : out)
                if (std::abs(cp.location.x - p.x) < 1e-4 && std::abs(cp.location.y - p.y) < 1e-4)
                    dup = true;
            if (dup) continue;
            double lo, hi;
            ecx::hess_eigenvalues(jet, lo, hi);
            out.push_back({p, jet.value, (lo > 0 ? 1 : 0) + (hi > 0 ? 1 : 0)});
        }
    }
    return out;
}

/// Adaptive Simpson quadrature (oracle for smooth 1D integrals).
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 30) {
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            const double flm = f(lm), frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return rec(lo, mid, flo, flm, fmid, left, d - 1) +
                   rec(mid, hi, fmid, frm, fhi, right, d - 1);
        };
    const double mid = 0.5 * (a + b);
    const double fa = f(a), fm = f(mid), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return rec(a, b, fa, fm, fb, whole, depth);
}

}  // namespace ecx_test
