#include "ecx/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <stdexcept>

#include "ecx/parallel.hpp"

namespace ecx {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

}  // namespace

bool GridSpec::covers(const Rect& r) const {
    const double eps = 1e-9 * std::max(1.0, spacing);
    return origin.x <= r.x0 + eps && origin.y <= r.y0 + eps &&
           origin.x + (nx - 1) * spacing >= r.x1 - eps &&
           origin.y + (ny - 1) * spacing >= r.y1 - eps;
}

GridSpec GridSpec::cover(const Rect& rect, int resolution) {
    if (resolution < 2) fail("GridSpec::cover: resolution < 2");
    const double side = std::max(rect.width(), rect.height());
    return with_spacing(rect, side / (resolution - 1));
}

GridSpec GridSpec::with_spacing(const Rect& rect, double spacing) {
    if (!(spacing > 0.0)) fail("GridSpec::with_spacing: spacing <= 0");
    GridSpec spec;
    spec.origin = {rect.x0, rect.y0};
    spec.spacing = spacing;
    spec.nx = static_cast<int>(std::ceil(rect.width() / spacing - 1e-12)) + 1;
    spec.ny = static_cast<int>(std::ceil(rect.height() / spacing - 1e-12)) + 1;
    return spec;
}

SampledField sample_field(const ScalarField2D& field, const GridSpec& spec) {
    SampledField out;
    out.spec = spec;
    out.values.resize(static_cast<std::size_t>(spec.nx) * spec.ny);
    parallel_for_chunks(spec.ny, [&](std::size_t j) {
        const double y = spec.origin.y + static_cast<double>(j) * spec.spacing;
        double* row = out.values.data() + static_cast<std::size_t>(spec.nx) * j;
        for (int i = 0; i < spec.nx; ++i) row[i] = field.value({spec.origin.x + i * spec.spacing, y});
    });
    return out;
}

BinaryGrid binarize(const SampledField& samples, double u) {
    const GridSpec& spec = samples.spec;
    BinaryGrid grid;
    grid.spec = spec;
    grid.level = u;
    grid.occ.resize(samples.values.size());
    for (std::size_t k = 0; k < samples.values.size(); ++k)
        grid.occ[k] = samples.values[k] >= u ? 1 : 0;
    for (int i = 0; i < spec.nx; ++i)
        if (grid.at(i, 0) || grid.at(i, spec.ny - 1)) fail("excursion not compactly contained");
    for (int j = 0; j < spec.ny; ++j)
        if (grid.at(0, j) || grid.at(spec.nx - 1, j)) fail("excursion not compactly contained");
    return grid;
}

BinaryGrid binarize(const ScalarField2D& field, const GridSpec& spec, double u) {
    if (!spec.covers(field.bbox())) fail("binarize: grid does not cover field bbox");
    return binarize(sample_field(field, spec), u);
}

long long euler_char_cubical(const BinaryGrid& grid) {
    // One pass over the vertex lattice. Each vertex owns its east and north
    // edges and the cell whose lower-left corner it is; out-of-range cells
    // are unoccupied, so border vertices contribute the right counts.
    long long v = 0, e = 0, f = 0;
    const int nx = grid.spec.nx, ny = grid.spec.ny;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const bool c00 = grid.at(i - 1, j - 1);
            const bool c10 = grid.at(i, j - 1);
            const bool c01 = grid.at(i - 1, j);
            const bool c11 = grid.at(i, j);
            if (c00 || c10 || c01 || c11) ++v;
            if (c10 || c11) ++e;  // east edge, incident cells (i,j-1),(i,j)
            if (c01 || c11) ++e;  // north edge, incident cells (i-1,j),(i,j)
            if (c11) ++f;
        }
    }
    return v - e + f;
}

long long euler_char_bicov(const BinaryGrid& grid) {
    long long upper = 0, lower = 0;
    const int nx = grid.spec.nx, ny = grid.spec.ny;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const bool occ = grid.at(i, j);
            if (occ && !grid.at(i + 1, j) && !grid.at(i, j + 1)) ++upper;
            if (!occ && grid.at(i - 1, j) && grid.at(i, j - 1)) ++lower;
        }
    }
    return upper - lower;
}

long long euler_char_bicov(const ScalarField2D& field, const GridSpec& spec, double u) {
    return euler_char_bicov(binarize(field, spec, u));
}

namespace {

// Histogram counting: for each m in values, add one to every level <= m;
// returns per-level counts. Levels must be sorted ascending.
class LevelCounter {
  public:
    explicit LevelCounter(const std::vector<double>& levels)
        : levels_(levels), hist_(levels.size() + 1, 0) {}

    void add(double m) {
        const auto it = std::upper_bound(levels_.begin(), levels_.end(), m);
        ++hist_[static_cast<std::size_t>(it - levels_.begin())];
    }

    std::vector<long long> counts() const {
        std::vector<long long> out(levels_.size(), 0);
        long long acc = 0;
        for (std::size_t k = levels_.size(); k-- > 0;) {
            acc += hist_[k + 1];
            out[k] = acc;
        }
        return out;
    }

  private:
    const std::vector<double>& levels_;
    std::vector<long long> hist_;
};

void check_boundary_below(const SampledField& s, double min_level) {
    const int nx = s.spec.nx, ny = s.spec.ny;
    double m = kNegInf;
    for (int i = 0; i < nx; ++i) m = std::max({m, s.at(i, 0), s.at(i, ny - 1)});
    for (int j = 0; j < ny; ++j) m = std::max({m, s.at(0, j), s.at(nx - 1, j)});
    if (m >= min_level) fail("excursion not compactly contained");
}

std::vector<double> sorted_levels(const std::vector<double>& levels) {
    std::vector<double> s(levels);
    std::sort(s.begin(), s.end());
    if (s.empty()) fail("chi_at_levels: empty level list");
    return s;
}

}  // namespace

std::vector<long long> cubical_chi_at_levels(const SampledField& samples,
                                             const std::vector<double>& levels) {
    const auto sorted = sorted_levels(levels);
    check_boundary_below(samples, sorted.front());
    const int nx = samples.spec.nx, ny = samples.spec.ny;
    auto cell = [&](int i, int j) {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return kNegInf;
        return samples.at(i, j);
    };
    LevelCounter vc(sorted), ec(sorted), fc(sorted);
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double c10 = cell(i, j - 1);
            const double c01 = cell(i - 1, j);
            const double c11 = cell(i, j);
            const double c00 = cell(i - 1, j - 1);
            vc.add(std::max({c00, c10, c01, c11}));
            ec.add(std::max(c10, c11));
            ec.add(std::max(c01, c11));
            fc.add(c11);
        }
    }
    const auto v = vc.counts(), e = ec.counts(), f = fc.counts();
    std::vector<long long> chi(sorted.size());
    for (std::size_t k = 0; k < chi.size(); ++k) chi[k] = v[k] - e[k] + f[k];

    // map back to the caller's level order
    std::vector<long long> out(levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), levels[k]);
        out[k] = chi[static_cast<std::size_t>(it - sorted.begin())];
    }
    return out;
}

std::vector<long long> bicov_chi_at_levels(const SampledField& samples,
                                           const std::vector<double>& levels) {
    const auto sorted = sorted_levels(levels);
    check_boundary_below(samples, sorted.front());
    const int nx = samples.spec.nx, ny = samples.spec.ny;
    auto cell = [&](int i, int j) {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return kNegInf;
        return samples.at(i, j);
    };
    // site is an upper pattern iff u in (max(right, top), f(x)], a lower
    // pattern iff u in (f(x), min(left, bottom)]
    LevelCounter up_hi(sorted), up_lo(sorted), dn_hi(sorted), dn_lo(sorted);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double fx = samples.at(i, j);
            const double m = std::max(cell(i + 1, j), cell(i, j + 1));
            up_hi.add(fx);
            up_lo.add(std::min(fx, m));
            const double mm = std::min(cell(i - 1, j), cell(i, j - 1));
            dn_hi.add(mm);
            dn_lo.add(std::min(fx, mm));
        }
    }
    const auto a = up_hi.counts(), b = up_lo.counts(), c = dn_hi.counts(), d = dn_lo.counts();
    std::vector<long long> chi(sorted.size());
    for (std::size_t k = 0; k < chi.size(); ++k) chi[k] = (a[k] - b[k]) - (c[k] - d[k]);

    std::vector<long long> out(levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), levels[k]);
        out[k] = chi[static_cast<std::size_t>(it - sorted.begin())];
    }
    return out;
}

std::vector<CriticalPoint> find_critical_points(const ScalarField2D& field, const Rect& region,
                                                const CriticalPointOptions& opts) {
    const int n = opts.seed_resolution;
    if (n < 2) fail("find_critical_points: seed_resolution < 2");
    const double hx = region.width() / n;
    const double hy = region.height() / n;

    std::vector<double> g2(static_cast<std::size_t>(n) * n);
    parallel_for_chunks(n, [&](std::size_t j) {
        for (int i = 0; i < n; ++i) {
            const Vec2 p{region.x0 + (i + 0.5) * hx, region.y0 + (j + 0.5) * hy};
            const Jet2 jet = field.jet(p);
            g2[i + static_cast<std::size_t>(n) * j] = jet.gx * jet.gx + jet.gy * jet.gy;
        }
    });
    auto grad2 = [&](int i, int j) { return g2[i + static_cast<std::size_t>(n) * j]; };

    std::vector<CriticalPoint> found;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double v = grad2(i, j);
            bool is_min = true;
            for (int dj = -1; dj <= 1 && is_min; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
                    if (grad2(ii, jj) < v) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (!is_min) continue;

            // damped Newton on grad f
            Vec2 x{region.x0 + (i + 0.5) * hx, region.y0 + (j + 0.5) * hy};
            Jet2 jet = field.jet(x);
            double gn = std::hypot(jet.gx, jet.gy);
            bool converged = gn <= opts.newton_tol;
            for (int iter = 0; iter < opts.max_iterations && !converged; ++iter) {
                const double det = hess_det(jet);
                if (det == 0.0) break;
                Vec2 step{(-jet.gx * jet.hyy + jet.gy * jet.hxy) / det,
                          (-jet.gy * jet.hxx + jet.gx * jet.hxy) / det};
                bool moved = false;
                for (int halve = 0; halve < 30; ++halve) {
                    const Vec2 cand{x.x + step.x, x.y + step.y};
                    const Jet2 cj = field.jet(cand);
                    const double cn = std::hypot(cj.gx, cj.gy);
                    if (cn < gn) {
                        x = cand;
                        jet = cj;
                        gn = cn;
                        moved = true;
                        break;
                    }
                    step = 0.5 * step;
                }
                if (!moved) break;
                converged = gn <= opts.newton_tol;
            }
            if (!converged) continue;
            if (jet.value < opts.min_value) continue;
            if (!region.contains(x)) continue;

            bool duplicate = false;
            for (const auto& cp : found) {
                if (std::max(std::abs(cp.location.x - x.x), std::abs(cp.location.y - x.y)) <=
                    10.0 * opts.newton_tol) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) continue;

            const double det = hess_det(jet);
            if (std::abs(det) <= opts.degeneracy_tol) fail("degenerate critical point");
            double lo, hi;
            hess_eigenvalues(jet, lo, hi);
            CriticalPoint cp;
            cp.location = x;
            cp.value = jet.value;
            cp.index = (lo > 0.0 ? 1 : 0) + (hi > 0.0 ? 1 : 0);
            cp.hess_det = det;
            found.push_back(cp);
        }
    }
    std::sort(found.begin(), found.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.value > b.value; });
    return found;
}

std::array<int, 3> morse_counts(const std::vector<CriticalPoint>& points, double u) {
    std::array<int, 3> mu{0, 0, 0};
    for (const auto& cp : points)
        if (cp.value >= u) ++mu[static_cast<std::size_t>(cp.index)];
    return mu;
}

long long euler_char_morse(const std::vector<CriticalPoint>& points, double u, double value_tol) {
    for (const auto& cp : points)
        if (std::abs(cp.value - u) <= value_tol) fail("critical level");
    const auto mu = morse_counts(points, u);
    return static_cast<long long>(mu[0]) - mu[1] + mu[2];
}

std::pair<std::array<int, 3>, std::array<int, 3>> morse_count_stability(
    const ScalarField2D& field, double u, const ScalarField2D& perturbation, double eta,
    const CriticalPointOptions& opts) {
    const auto before = morse_counts(find_critical_points(field, field.bbox(), opts), u);
    const ScalarField2D perturbed = add_scaled(field, perturbation, eta);
    const auto after = morse_counts(find_critical_points(perturbed, field.bbox(), opts), u);
    return {before, after};
}

std::string BinaryGrid::to_text() const {
    char head[160];
    std::snprintf(head, sizeof(head), "%d %d %.17g %.17g %.17g %.17g\n", spec.nx, spec.ny,
                  spec.spacing, spec.origin.x, spec.origin.y, level);
    std::string out = head;
    out.reserve(out.size() + static_cast<std::size_t>(spec.ny) * (spec.nx + 1));
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) out += at(i, j) ? '1' : '0';
        out += '\n';
    }
    return out;
}

BinaryGrid BinaryGrid::from_text(std::istream& in) {
    BinaryGrid grid;
    if (!(in >> grid.spec.nx >> grid.spec.ny >> grid.spec.spacing >> grid.spec.origin.x >>
          grid.spec.origin.y >> grid.level))
        fail("BinaryGrid::from_text: bad header");
    grid.occ.assign(static_cast<std::size_t>(grid.spec.nx) * grid.spec.ny, 0);
    std::string row;
    for (int j = 0; j < grid.spec.ny; ++j) {
        if (!(in >> row) || static_cast<int>(row.size()) != grid.spec.nx)
            fail("BinaryGrid::from_text: bad row");
        for (int i = 0; i < grid.spec.nx; ++i)
            grid.occ[i + static_cast<std::size_t>(grid.spec.nx) * j] = row[i] == '1' ? 1 : 0;
    }
    return grid;
}

}  // namespace ecx
