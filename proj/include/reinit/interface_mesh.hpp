#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "reinit/errors.hpp"
#include "reinit/grid.hpp"

namespace reinit {

struct Segment {
    Point a;
    Point b;
};

// Piecewise-linear zero level set: segments in 2D, crossing points in 1D.
// Orientation is not meaningful; the sign of a distance field comes from the
// originating scalar field, never from element order.
struct InterfaceMesh {
    int dim = 2;
    std::vector<Segment> segments;   // 2D elements
    std::vector<double> crossings;   // 1D elements

    bool empty() const { return dim == 2 ? segments.empty() : crossings.empty(); }

    std::size_t element_count() const {
        return dim == 2 ? segments.size() : crossings.size();
    }

    double total_length() const {
        double len = 0.0;
        for (const Segment& s : segments)
            len += std::hypot(s.b[0] - s.a[0], s.b[1] - s.a[1]);
        return len;
    }
};

namespace detail {

// Nodes classify as "nonnegative" or "negative"; a crossing lies on any cell
// edge whose endpoints classify differently. t = va/(va - vb) is exact when
// va = 0 and never divides by zero across a class change.
inline bool nonneg(double v) { return v >= 0.0; }

inline double edge_t(double va, double vb) { return va / (va - vb); }

}  // namespace detail

inline InterfaceMesh extract_interface(const ScalarField& u0, double level = 0.0) {
    const GridSpec& g = u0.grid();
    double vmin = u0[0] - level, vmax = u0[0] - level;
    for (std::size_t i = 1; i < u0.size(); ++i) {
        vmin = std::min(vmin, u0[i] - level);
        vmax = std::max(vmax, u0[i] - level);
    }
    if (!(vmin < 0.0) || !(vmax >= 0.0))
        throw ConfigError("no interface in domain: field range [" +
                          std::to_string(vmin + level) + ", " +
                          std::to_string(vmax + level) +
                          "] does not straddle level " + std::to_string(level));

    InterfaceMesh mesh;
    mesh.dim = g.dim();

    if (g.dim() == 1) {
        const std::size_t n = g.points(0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double va = u0[i] - level;
            const double vb = u0[i + 1] - level;
            if (detail::nonneg(va) == detail::nonneg(vb)) continue;
            mesh.crossings.push_back(g.coord(0, i) +
                                     detail::edge_t(va, vb) * g.spacing(0));
        }
        return mesh;
    }

    // Marching squares. Corner order: 0 = (ix,iy), 1 = (ix+1,iy),
    // 2 = (ix+1,iy+1), 3 = (ix,iy+1). Ambiguous diagonal cases resolve by the
    // sign of the cell average.
    const std::size_t nx = g.points(0);
    const std::size_t ny = g.points(1);
    for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
        for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
            const double v0 = u0.at(ix, iy) - level;
            const double v1 = u0.at(ix + 1, iy) - level;
            const double v2 = u0.at(ix + 1, iy + 1) - level;
            const double v3 = u0.at(ix, iy + 1) - level;
            const int code = (detail::nonneg(v0) ? 1 : 0) |
                             (detail::nonneg(v1) ? 2 : 0) |
                             (detail::nonneg(v2) ? 4 : 0) |
                             (detail::nonneg(v3) ? 8 : 0);
            if (code == 0 || code == 15) continue;

            const double x0 = g.coord(0, ix), x1 = g.coord(0, ix + 1);
            const double y0 = g.coord(1, iy), y1 = g.coord(1, iy + 1);
            // Crossing points on the four edges (valid only where used).
            const Point pb{x0 + detail::edge_t(v0, v1) * (x1 - x0), y0};
            const Point pr{x1, y0 + detail::edge_t(v1, v2) * (y1 - y0)};
            const Point pt{x0 + detail::edge_t(v3, v2) * (x1 - x0), y1};
            const Point pl{x0, y0 + detail::edge_t(v0, v3) * (y1 - y0)};

            switch (code) {
                case 1: case 14: mesh.segments.push_back({pb, pl}); break;
                case 2: case 13: mesh.segments.push_back({pb, pr}); break;
                case 4: case 11: mesh.segments.push_back({pr, pt}); break;
                case 8: case 7:  mesh.segments.push_back({pt, pl}); break;
                case 3: case 12: mesh.segments.push_back({pl, pr}); break;
                case 6: case 9:  mesh.segments.push_back({pb, pt}); break;
                case 5: {
                    const bool joined = detail::nonneg(0.25 * (v0 + v1 + v2 + v3));
                    if (joined) {
                        mesh.segments.push_back({pb, pr});
                        mesh.segments.push_back({pt, pl});
                    } else {
                        mesh.segments.push_back({pb, pl});
                        mesh.segments.push_back({pr, pt});
                    }
                    break;
                }
                case 10: {
                    const bool joined = detail::nonneg(0.25 * (v0 + v1 + v2 + v3));
                    if (joined) {
                        mesh.segments.push_back({pb, pl});
                        mesh.segments.push_back({pr, pt});
                    } else {
                        mesh.segments.push_back({pb, pr});
                        mesh.segments.push_back({pt, pl});
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return mesh;
}

}  // namespace reinit
