#pragma once

#include <algorithm>
#include <cmath>

namespace ecx {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double norm(Vec2 v) { return std::sqrt(norm2(v)); }

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool contains(Vec2 p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
};

inline Rect dilate(const Rect& r, double margin) {
    return {r.x0 - margin, r.y0 - margin, r.x1 + margin, r.y1 + margin};
}

/// Value and exact first/second derivatives of a scalar field at a point.
/// The Hessian is symmetric; only hxy is stored for the off-diagonal.
struct Jet2 {
    double value = 0.0;
    double gx = 0.0, gy = 0.0;
    double hxx = 0.0, hxy = 0.0, hyy = 0.0;
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.value + b.value, a.gx + b.gx, a.gy + b.gy,
            a.hxx + b.hxx, a.hxy + b.hxy, a.hyy + b.hyy};
}

inline Jet2 operator*(double s, const Jet2& j) {
    return {s * j.value, s * j.gx, s * j.gy, s * j.hxx, s * j.hxy, s * j.hyy};
}

inline double hess_det(const Jet2& j) { return j.hxx * j.hyy - j.hxy * j.hxy; }

/// Eigenvalues of the symmetric Hessian, ascending.
inline void hess_eigenvalues(const Jet2& j, double& lo, double& hi) {
    const double tr = j.hxx + j.hyy;
    const double d = std::sqrt(std::max(0.0, 0.25 * (j.hxx - j.hyy) * (j.hxx - j.hyy) + j.hxy * j.hxy));
    lo = 0.5 * tr - d;
    hi = 0.5 * tr + d;
}

/// Quarter-plane membership of a gradient (s,t) = (gx,gy):
///   returns 1 if t < s < 0, 2 if s < t < 0, 0 otherwise (strict inequalities).
inline int quarter_plane(double gx, double gy) {
    if (gy < gx && gx < 0.0) return 1;
    if (gx < gy && gy < 0.0) return 2;
    return 0;
}

}  // namespace ecx
