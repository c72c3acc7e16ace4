#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "reinit/errors.hpp"

namespace reinit {

// A point in the plane; 1D problems use only the first component.
using Point = std::array<double, 2>;

struct AxisSpec {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t points = 3;
};

// Uniform tensor grid, 1 or 2 axes, at least 3 points per axis.
// Node coordinates are reproducible exactly as lo + i*spacing.
class GridSpec {
public:
    explicit GridSpec(AxisSpec x) : dim_(1), axes_{x, AxisSpec{}} { validate(); }
    GridSpec(AxisSpec x, AxisSpec y) : dim_(2), axes_{x, y} { validate(); }

    int dim() const { return dim_; }

    std::size_t points(int axis) const { return axes_[check_axis(axis)].points; }

    double lo(int axis) const { return axes_[check_axis(axis)].lo; }
    double hi(int axis) const { return axes_[check_axis(axis)].hi; }

    double spacing(int axis) const {
        const AxisSpec& a = axes_[check_axis(axis)];
        return (a.hi - a.lo) / static_cast<double>(a.points - 1);
    }

    double min_spacing() const {
        double h = spacing(0);
        if (dim_ == 2) h = std::min(h, spacing(1));
        return h;
    }

    double coord(int axis, std::size_t i) const {
        return axes_[check_axis(axis)].lo + static_cast<double>(i) * spacing(axis);
    }

    std::size_t node_count() const {
        std::size_t n = axes_[0].points;
        if (dim_ == 2) n *= axes_[1].points;
        return n;
    }

    // Row-major flat index: rows are grid lines of constant y.
    std::size_t index(std::size_t ix, std::size_t iy = 0) const {
        return iy * axes_[0].points + ix;
    }

    Point node(std::size_t flat) const {
        const std::size_t nx = axes_[0].points;
        const std::size_t ix = flat % nx;
        const std::size_t iy = flat / nx;
        Point p{coord(0, ix), 0.0};
        if (dim_ == 2) p[1] = coord(1, iy);
        return p;
    }

    bool operator==(const GridSpec& o) const {
        if (dim_ != o.dim_) return false;
        for (int a = 0; a < dim_; ++a) {
            if (axes_[a].lo != o.axes_[a].lo || axes_[a].hi != o.axes_[a].hi ||
                axes_[a].points != o.axes_[a].points)
                return false;
        }
        return true;
    }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

private:
    int check_axis(int axis) const {
        if (axis < 0 || axis >= dim_)
            throw ConfigError("grid axis out of range: " + std::to_string(axis));
        return axis;
    }

    void validate() const {
        for (int a = 0; a < dim_; ++a) {
            if (axes_[a].points < 3)
                throw ConfigError("grid needs at least 3 points per axis");
            if (!(axes_[a].lo < axes_[a].hi))
                throw ConfigError("grid axis bounds must satisfy lo < hi");
            if (!std::isfinite(axes_[a].lo) || !std::isfinite(axes_[a].hi))
                throw ConfigError("grid axis bounds must be finite");
        }
    }

    int dim_;
    std::array<AxisSpec, 2> axes_;
};

// Immutable nodal values over a GridSpec, stored flat row-major.
// Every constructed field is finite at every node.
class ScalarField {
public:
    ScalarField(GridSpec grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.node_count())
            throw ConfigError("field size does not match grid node count");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                const Point p = grid_.node(i);
                throw NumericalError(
                    "non-finite field value at node (" + std::to_string(p[0]) +
                    ", " + std::to_string(p[1]) + ")");
            }
        }
    }

    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t flat) const { return values_[flat]; }
    double at(std::size_t ix, std::size_t iy = 0) const {
        return values_[grid_.index(ix, iy)];
    }
    std::size_t size() const { return values_.size(); }

private:
    GridSpec grid_;
    std::vector<double> values_;
};

inline ScalarField sample_function(const GridSpec& grid,
                                   const std::function<double(const Point&)>& fn) {
    std::vector<double> v(grid.node_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.node(i));
    return ScalarField(grid, std::move(v));  // constructor rejects non-finite samples
}

// Backward/forward difference quotients along one axis. At the low boundary
// the backward value copies the forward one, and vice versa at the high
// boundary, so both fields are defined at every node.
inline std::pair<ScalarField, ScalarField> one_sided_differences(
    const ScalarField& u, int axis) {
    const GridSpec& g = u.grid();
    if (axis < 0 || axis >= g.dim())
        throw ConfigError("difference axis out of range: " + std::to_string(axis));
    const double h = g.spacing(axis);
    const std::size_t nx = g.points(0);
    const std::size_t ny = g.dim() == 2 ? g.points(1) : 1;
    const std::size_t n_axis = g.points(axis);
    const std::size_t stride = axis == 0 ? 1 : nx;

    std::vector<double> dm(u.size()), dp(u.size());
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t i = g.index(ix, iy);
            const std::size_t ia = axis == 0 ? ix : iy;
            const double bwd =
                ia > 0 ? (u[i] - u[i - stride]) / h : 0.0;
            const double fwd =
                ia + 1 < n_axis ? (u[i + stride] - u[i]) / h : 0.0;
            dm[i] = ia > 0 ? bwd : fwd;
            dp[i] = ia + 1 < n_axis ? fwd : bwd;
        }
    }
    return {ScalarField(g, std::move(dm)), ScalarField(g, std::move(dp))};
}

// Stack of fields on a shared grid with strictly increasing times,
// starting at t = 0 with the initial data.
struct TimeSeries {
    struct Snapshot {
        double time;
        ScalarField field;
    };

    std::vector<Snapshot> snapshots;

    void append(double time, ScalarField field) {
        if (snapshots.empty()) {
            if (time != 0.0)
                throw ConfigError("time series must start at t = 0");
        } else {
            if (time <= snapshots.back().time)
                throw ConfigError("time series times must strictly increase");
            if (field.grid() != snapshots.front().field.grid())
                throw ConfigError("time series snapshots must share one grid");
        }
        snapshots.push_back(Snapshot{time, std::move(field)});
    }

    bool empty() const { return snapshots.empty(); }
    std::size_t size() const { return snapshots.size(); }
    const Snapshot& front() const { return snapshots.front(); }
    const Snapshot& back() const { return snapshots.back(); }
};

}  // namespace reinit
