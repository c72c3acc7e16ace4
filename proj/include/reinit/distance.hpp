#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "reinit/errors.hpp"
#include "reinit/grid.hpp"
#include "reinit/interface_mesh.hpp"
#include "reinit/norms.hpp"

namespace reinit {

// Nodal distances to an interface mesh, measured in the dual norm.
struct DistanceField {
    ScalarField values;
    NormSpec dual_norm;
    InterfaceMesh source;
};

namespace detail {

// Golden-section minimizer for a convex objective on [0, 1]; interval
// tolerance 1e-10, hard cap 200 iterations, endpoints always considered.
template <typename F>
double golden_min(const F& f) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = 0.0, b = 1.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-10; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return std::min({f(0.0), f(1.0), f1, f2});
}

struct MeshDistancer {
    const InterfaceMesh& mesh;
    NormSpec dual;
    double c_low, c_high;  // Euclidean equivalence constants of the dual norm
    mutable std::vector<double> de_buf;

    MeshDistancer(const InterfaceMesh& m, const NormSpec& d)
        : mesh(m), dual(d) {
        if (m.empty()) throw ConfigError("distance query against an empty mesh");
        const auto bounds = d.euclidean_bounds();
        c_low = bounds.first;
        c_high = bounds.second;
    }

    static double euclid_to_segment(const Point& x, const Segment& s) {
        const double dx = s.b[0] - s.a[0], dy = s.b[1] - s.a[1];
        const double dd = dx * dx + dy * dy;
        double t = 0.0;
        if (dd > 0.0)
            t = std::clamp(((x[0] - s.a[0]) * dx + (x[1] - s.a[1]) * dy) / dd,
                           0.0, 1.0);
        return std::hypot(x[0] - (s.a[0] + t * dx), x[1] - (s.a[1] + t * dy));
    }

    double dual_to_segment(const Point& x, const Segment& s) const {
        const double dx = s.b[0] - s.a[0], dy = s.b[1] - s.a[1];
        return golden_min([&](double t) {
            return norm_eval(dual,
                             Point{x[0] - (s.a[0] + t * dx), x[1] - (s.a[1] + t * dy)});
        });
    }

    // Exact (to the golden tolerance) unsigned dual-norm distance. Segments
    // whose Euclidean lower bound cannot beat the incumbent are skipped; the
    // bound c_low*|.|_2 <= ||.|| makes the pruning loss-free.
    double unsigned_distance(const Point& x) const {
        if (mesh.dim == 1) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : mesh.crossings)
                best = std::min(best, norm_eval(dual, Point{x[0] - c, 0.0}));
            return best;
        }
        const std::size_t n = mesh.segments.size();
        std::size_t nearest = 0;
        double de_min = std::numeric_limits<double>::infinity();
        std::vector<double>& de = de_buf;
        de.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            de[i] = euclid_to_segment(x, mesh.segments[i]);
            if (de[i] < de_min) {
                de_min = de[i];
                nearest = i;
            }
        }
        double best = dual_to_segment(x, mesh.segments[nearest]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == nearest || c_low * de[i] >= best) continue;
            best = std::min(best, dual_to_segment(x, mesh.segments[i]));
        }
        return best;
    }
};

}  // namespace detail

// Exhaustive per-node distance transform; the sign is inherited from the
// originating field (negative where sign_source < 0).
inline DistanceField brute_force_signed_distance(const InterfaceMesh& mesh,
                                                 const GridSpec& grid,
                                                 const NormSpec& dual,
                                                 const ScalarField& sign_source) {
    if (mesh.dim != grid.dim())
        throw ConfigError("mesh dimension does not match grid dimension");
    if (dual.dim() != grid.dim())
        throw ConfigError("norm dimension does not match grid dimension");
    if (sign_source.grid() != grid)
        throw ConfigError("sign source grid does not match query grid");

    const detail::MeshDistancer dist(mesh, dual);
    std::vector<double> out(grid.node_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = dist.unsigned_distance(grid.node(i));
        out[i] = sign_source[i] < 0.0 ? -d : d;
    }
    return DistanceField{ScalarField(grid, std::move(out)), dual, mesh};
}

// Gauss-Seidel fast sweeping of the unsigned dual-norm distance with
// alternating orderings. Nodes of mesh-crossed cells are seeded with exact
// values and frozen; interior updates take the best over axis neighbors and
// the four neighbor simplexes (linear interpolation along the opposite face,
// minimized by golden section).
inline DistanceField fast_sweeping_distance(const InterfaceMesh& mesh,
                                            const GridSpec& grid,
                                            const NormSpec& dual) {
    if (mesh.dim != grid.dim())
        throw ConfigError("mesh dimension does not match grid dimension");
    if (dual.dim() != grid.dim())
        throw ConfigError("norm dimension does not match grid dimension");

    const detail::MeshDistancer dist(mesh, dual);
    const std::size_t n = grid.node_count();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> phi(n, inf);
    std::vector<std::uint8_t> frozen(n, 0);

    const std::size_t nx = grid.points(0);
    const std::size_t ny = grid.dim() == 2 ? grid.points(1) : 1;
    const double hx = grid.spacing(0);
    const double hy = grid.dim() == 2 ? grid.spacing(1) : 0.0;

    auto seed_cell = [&](std::size_t cx, std::size_t cy) {
        frozen[grid.index(cx, cy)] = 1;
        frozen[grid.index(cx + 1, cy)] = 1;
        if (grid.dim() == 2) {
            frozen[grid.index(cx, cy + 1)] = 1;
            frozen[grid.index(cx + 1, cy + 1)] = 1;
        }
    };
    if (grid.dim() == 1) {
        for (double c : mesh.crossings) {
            const double s = (c - grid.lo(0)) / hx;
            const std::size_t cx = static_cast<std::size_t>(std::clamp(
                s, 0.0, static_cast<double>(nx - 2)));
            seed_cell(cx, 0);
        }
    } else {
        for (const Segment& s : mesh.segments) {
            const double mx = 0.5 * (s.a[0] + s.b[0]);
            const double my = 0.5 * (s.a[1] + s.b[1]);
            const std::size_t cx = static_cast<std::size_t>(std::clamp(
                (mx - grid.lo(0)) / hx, 0.0, static_cast<double>(nx - 2)));
            const std::size_t cy = static_cast<std::size_t>(std::clamp(
                (my - grid.lo(1)) / hy, 0.0, static_cast<double>(ny - 2)));
            seed_cell(cx, cy);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (frozen[i]) phi[i] = dist.unsigned_distance(grid.node(i));

    const double step_x = norm_eval(dual, Point{hx, 0.0});
    const double step_y = grid.dim() == 2 ? norm_eval(dual, Point{0.0, hy}) : 0.0;

    auto update_node = [&](std::size_t ix, std::size_t iy) -> double {
        const std::size_t i = grid.index(ix, iy);
        if (frozen[i]) return 0.0;
        double cand = phi[i];
        const double left = ix > 0 ? phi[i - 1] : inf;
        const double right = ix + 1 < nx ? phi[i + 1] : inf;
        if (left < inf) cand = std::min(cand, left + step_x);
        if (right < inf) cand = std::min(cand, right + step_x);
        if (grid.dim() == 2) {
            const double down = iy > 0 ? phi[i - nx] : inf;
            const double up = iy + 1 < ny ? phi[i + nx] : inf;
            if (down < inf) cand = std::min(cand, down + step_y);
            if (up < inf) cand = std::min(cand, up + step_y);
            for (int sx = -1; sx <= 1; sx += 2) {
                const double px = sx < 0 ? left : right;
                if (px == inf) continue;
                for (int sy = -1; sy <= 1; sy += 2) {
                    const double py = sy < 0 ? down : up;
                    if (py == inf) continue;
                    const double vx = static_cast<double>(sx) * hx;
                    const double vy = static_cast<double>(sy) * hy;
                    cand = std::min(cand, detail::golden_min([&](double t) {
                        return (1.0 - t) * px + t * py +
                               norm_eval(dual, Point{(1.0 - t) * vx, t * vy});
                    }));
                }
            }
        }
        const double delta = phi[i] - cand;
        phi[i] = cand;
        return delta;
    };

    const int orderings = grid.dim() == 2 ? 4 : 2;
    for (int cycle = 0; cycle < 100; ++cycle) {
        double max_update = 0.0;
        for (int ord = 0; ord < orderings; ++ord) {
            const bool xf = (ord & 1) == 0;
            const bool yf = (ord & 2) == 0;
            for (std::size_t jy = 0; jy < ny; ++jy) {
                const std::size_t iy = yf ? jy : ny - 1 - jy;
                for (std::size_t jx = 0; jx < nx; ++jx) {
                    const std::size_t ix = xf ? jx : nx - 1 - jx;
                    max_update = std::max(max_update, update_node(ix, iy));
                }
            }
        }
        if (max_update < 1e-12)
            return DistanceField{ScalarField(grid, std::move(phi)), dual, mesh};
    }
    throw NumericalError("fast sweeping did not converge within 100 cycles");
}

// Largest sampled difference quotient |phi(a) - phi(b)| / ||a - b||_dual over
// seeded random node pairs. Distance fields certify at 1 + O(h).
inline double lipschitz_certificate(const ScalarField& field, const NormSpec& dual,
                                    std::size_t sample_pairs, std::uint64_t seed) {
    if (dual.dim() != field.grid().dim())
        throw ConfigError("norm dimension does not match grid dimension");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, field.size() - 1);
    const GridSpec& g = field.grid();
    double worst = 0.0;
    for (std::size_t k = 0; k < sample_pairs; ++k) {
        std::size_t a = pick(rng);
        std::size_t b = pick(rng);
        while (b == a) b = pick(rng);
        const Point pa = g.node(a);
        const Point pb = g.node(b);
        const double sep = norm_eval(dual, Point{pa[0] - pb[0], pa[1] - pb[1]});
        worst = std::max(worst, std::abs(field[a] - field[b]) / sep);
    }
    return worst;
}

}  // namespace reinit
