#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "reinit/errors.hpp"
#include "reinit/grid.hpp"

namespace reinit {

// Symmetric matrix sized to the problem dimension (1x1 or 2x2).
struct SymMatrix2 {
    int dim = 2;
    double a00 = 1.0;
    double a01 = 0.0;
    double a11 = 1.0;

    bool operator==(const SymMatrix2& o) const {
        if (dim != o.dim || a00 != o.a00) return false;
        return dim == 1 || (a01 == o.a01 && a11 == o.a11);
    }
};

// A norm on R^1 or R^2: either an l^p norm (p in [1, inf], with p = inf the
// genuine infinity value) or an ellipsoidal norm sqrt(v' A v) for SPD A.
class NormSpec {
public:
    enum class Kind { PNorm, Ellipsoidal };

    static NormSpec p_norm(int dim, double p) {
        if (dim != 1 && dim != 2) throw ConfigError("norm dimension must be 1 or 2");
        if (std::isnan(p) || p < 1.0)
            throw ConfigError("p-norm exponent must satisfy p >= 1");
        NormSpec n;
        n.kind_ = Kind::PNorm;
        n.dim_ = dim;
        n.p_ = p;
        return n;
    }

    static NormSpec ellipsoidal(const SymMatrix2& a) {
        if (a.dim != 1 && a.dim != 2)
            throw ConfigError("norm dimension must be 1 or 2");
        if (a.dim == 1) {
            if (!(a.a00 > 0.0)) throw ConfigError("ellipsoidal matrix must be SPD");
        } else {
            const double det = a.a00 * a.a11 - a.a01 * a.a01;
            if (!(a.a00 > 0.0) || !(det > 0.0))
                throw ConfigError("ellipsoidal matrix must be SPD");
        }
        NormSpec n;
        n.kind_ = Kind::Ellipsoidal;
        n.dim_ = a.dim;
        n.a_ = a;
        return n;
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double p() const { return p_; }
    const SymMatrix2& matrix() const { return a_; }

    bool operator==(const NormSpec& o) const {
        if (kind_ != o.kind_ || dim_ != o.dim_) return false;
        return kind_ == Kind::PNorm ? p_ == o.p_ : a_ == o.a_;
    }
    bool operator!=(const NormSpec& o) const { return !(*this == o); }

    // Axis-separable norms admit componentwise upwinding: they are monotone
    // functions of the per-axis magnitudes with no cross terms.
    bool axis_separable() const {
        if (dim_ == 1) return true;
        if (kind_ == Kind::PNorm)
            return p_ == 1.0 || p_ == 2.0 || std::isinf(p_);
        return a_.a01 == 0.0;
    }

    // Norm of the a-th basis vector; bounds the per-axis slope of the norm.
    double basis_norm(int axis) const {
        if (kind_ == Kind::PNorm) return 1.0;
        if (dim_ == 1 || axis == 0) return std::sqrt(a_.a00);
        return std::sqrt(a_.a11);
    }

    // Exact constants c_low, c_high with c_low*|v|_2 <= ||v|| <= c_high*|v|_2.
    std::pair<double, double> euclidean_bounds() const {
        if (kind_ == Kind::Ellipsoidal) {
            if (dim_ == 1) {
                const double s = std::sqrt(a_.a00);
                return {s, s};
            }
            const double tr = a_.a00 + a_.a11;
            const double det = a_.a00 * a_.a11 - a_.a01 * a_.a01;
            const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
            const double lmin = 0.5 * (tr - disc);
            const double lmax = 0.5 * (tr + disc);
            return {std::sqrt(std::max(0.0, lmin)), std::sqrt(lmax)};
        }
        if (dim_ == 1) return {1.0, 1.0};
        // |v|_p vs |v|_2 in 2D: the ratio extremes are 1 and 2^(1/p - 1/2).
        const double r = std::isinf(p_)
                             ? std::pow(2.0, -0.5)
                             : std::pow(2.0, 1.0 / p_ - 0.5);
        return {std::min(1.0, r), std::max(1.0, r)};
    }

private:
    Kind kind_ = Kind::PNorm;
    int dim_ = 2;
    double p_ = 2.0;
    SymMatrix2 a_{};
};

inline double norm_eval(const NormSpec& n, const Point& v) {
    const double vx = v[0];
    const double vy = n.dim() == 2 ? v[1] : 0.0;
    if (n.kind() == NormSpec::Kind::Ellipsoidal) {
        const SymMatrix2& a = n.matrix();
        if (n.dim() == 1) return std::sqrt(a.a00) * std::abs(vx);
        const double q =
            a.a00 * vx * vx + 2.0 * a.a01 * vx * vy + a.a11 * vy * vy;
        return std::sqrt(std::max(0.0, q));
    }
    const double ax = std::abs(vx);
    const double ay = std::abs(vy);
    if (n.dim() == 1) return ax;
    if (std::isinf(n.p())) return std::max(ax, ay);
    if (n.p() == 1.0) return ax + ay;
    if (n.p() == 2.0) return std::hypot(ax, ay);
    if (ax == 0.0 && ay == 0.0) return 0.0;
    const double m = std::max(ax, ay);
    return m * std::pow(std::pow(ax / m, n.p()) + std::pow(ay / m, n.p()),
                        1.0 / n.p());
}

// Dual norm in closed form: p <-> p/(p-1) with 1 <-> inf, ellipsoidal A -> A^-1.
inline NormSpec dual_of(const NormSpec& n) {
    if (n.kind() == NormSpec::Kind::PNorm) {
        const double p = n.p();
        if (p == 1.0)
            return NormSpec::p_norm(n.dim(), std::numeric_limits<double>::infinity());
        if (std::isinf(p)) return NormSpec::p_norm(n.dim(), 1.0);
        if (p == 2.0) return NormSpec::p_norm(n.dim(), 2.0);
        return NormSpec::p_norm(n.dim(), p / (p - 1.0));
    }
    const SymMatrix2& a = n.matrix();
    SymMatrix2 inv;
    inv.dim = a.dim;
    if (a.dim == 1) {
        inv.a00 = 1.0 / a.a00;
    } else {
        const double det = a.a00 * a.a11 - a.a01 * a.a01;
        inv.a00 = a.a11 / det;
        inv.a01 = -a.a01 / det;
        inv.a11 = a.a00 / det;
    }
    return NormSpec::ellipsoidal(inv);
}

// Central-difference gradient magnitude under the given norm; one-sided at
// boundary nodes. Second-order accurate at interior nodes of smooth fields.
inline ScalarField central_gradient_norm(const ScalarField& u, const NormSpec& n) {
    const GridSpec& g = u.grid();
    if (n.dim() != g.dim())
        throw ConfigError("norm dimension does not match grid dimension");
    const std::size_t nx = g.points(0);
    const std::size_t ny = g.dim() == 2 ? g.points(1) : 1;

    std::vector<double> out(u.size());
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t i = g.index(ix, iy);
            Point grad{0.0, 0.0};
            {
                const double h = g.spacing(0);
                if (ix == 0)
                    grad[0] = (u[i + 1] - u[i]) / h;
                else if (ix + 1 == nx)
                    grad[0] = (u[i] - u[i - 1]) / h;
                else
                    grad[0] = (u[i + 1] - u[i - 1]) / (2.0 * h);
            }
            if (g.dim() == 2) {
                const double h = g.spacing(1);
                if (iy == 0)
                    grad[1] = (u[i + nx] - u[i]) / h;
                else if (iy + 1 == ny)
                    grad[1] = (u[i] - u[i - nx]) / h;
                else
                    grad[1] = (u[i + nx] - u[i - nx]) / (2.0 * h);
            }
            out[i] = norm_eval(n, grad);
        }
    }
    return ScalarField(g, std::move(out));
}

}  // namespace reinit
