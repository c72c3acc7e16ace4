#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <json.hpp>

#include "reinit/errors.hpp"
#include "reinit/grid.hpp"
#include "reinit/norms.hpp"
#include "reinit/problem.hpp"
#include "reinit/solver.hpp"

namespace reinit {

// Parameters of the sub/supersolution pair built from u0:
//   upper = k1*u0 on {0 <= u0 <= sigma},  k1*u0*e^{k2 t (u0-sigma)^2} above,
//           c*u0 on {u0 < 0}; lower mirrored.
struct BarrierSpec {
    double sigma = 0.0;  // half-width of the frozen band around the zero set
    double k1 = 0.0;
    double k2 = 0.0;
    double c = 0.0;  // scale of the strict subsolution profile c*u0
    double M = 0.0;  // gradient floor: ||grad u0|| >= M on {|u0| <= 2 sigma}
};

namespace detail {

// Exponent clamp keeps the outer-region barrier finite (and serializable);
// the bound is astronomically slack long before the clamp engages.
inline double barrier_growth(double exponent) {
    return std::exp(std::min(exponent, 700.0));
}

// Smallest gradient magnitude over the band {|u0| <= width}; +inf when the
// band is empty (only possible for widths below the audited one).
inline double band_gradient_floor(const ScalarField& u0, const ScalarField& gn,
                                  double width) {
    double floor = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u0.size(); ++i)
        if (std::abs(u0[i]) <= width) floor = std::min(floor, gn[i]);
    return floor;
}

}  // namespace detail

// Piecewise barrier values at one node. utilde_scale is the factor of the
// strict subsolution profile (pass spec.c for the canonical pair).
inline std::pair<double, double> eval_barriers(const BarrierSpec& spec,
                                               const ScalarField& u0,
                                               double utilde_scale,
                                               std::size_t node, double t) {
    if (t < 0.0) throw ConfigError("barrier evaluation time must be nonnegative");
    const double v = u0[node];
    if (v == 0.0) return {0.0, 0.0};
    if (v > 0.0) {
        const double upper =
            v <= spec.sigma
                ? spec.k1 * v
                : spec.k1 * v *
                      detail::barrier_growth(spec.k2 * t * (v - spec.sigma) *
                                             (v - spec.sigma));
        return {utilde_scale * v, upper};
    }
    const double lower =
        v >= -spec.sigma
            ? spec.k1 * v
            : spec.k1 * v *
                  detail::barrier_growth(spec.k2 * t * (v + spec.sigma) *
                                         (v + spec.sigma));
    return {lower, utilde_scale * v};
}

struct BarrierPair {
    BarrierSpec spec;
    ScalarField u0;

    double lower(std::size_t node, double t) const {
        return eval_barriers(spec, u0, spec.c, node, t).first;
    }
    double upper(std::size_t node, double t) const {
        return eval_barriers(spec, u0, spec.c, node, t).second;
    }
};

// Derive the barrier parameters from a passing audit:
//   M = half the audited gradient floor;
//   sigma = largest half-width keeping ||grad u0|| >= M on {|u0| <= 2 sigma}
//           (bisection over band widths, re-querying the discrete audit);
//   k1 = twice the smallest value with H(k1*M) >= 0;
//   k2 = 2 * C1 * |inf H over [0, slope_cap]| / (k1 * sigma^3);
//   c = the audited witness scale.
inline BarrierSpec choose_barrier_params(const ProblemSpec& problem,
                                         const AuditReport& audit,
                                         double slope_cap) {
    if (!audit.pass())
        throw ConfigError(
            "barrier construction needs a passing audit "
            "(gradient floor > 0, matching signs, negative witness alpha)");
    if (!(slope_cap > 0.0)) throw ConfigError("slope cap must be positive");

    BarrierSpec spec;
    spec.M = 0.5 * audit.grad_floor;
    spec.c = audit.witness_scale;

    const Hamiltonian& H = problem.hamiltonian;
    const double k1_min = H.root() / spec.M;
    if (k1_min > 1e6)
        throw ConfigError("H not coercive enough at slope_cap: no k1 <= 1e6 "
                          "satisfies H(k1*M) >= 0");
    spec.k1 = 2.0 * k1_min;

    // widest band on which the floor M survives
    const ScalarField& u0 = problem.u0;
    const ScalarField gn = central_gradient_norm(u0, problem.norm);
    double sup_u0 = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i)
        sup_u0 = std::max(sup_u0, std::abs(u0[i]));
    double lo = audit.band_width;  // floor here is 2M by construction
    double hi = sup_u0;
    if (detail::band_gradient_floor(u0, gn, hi) >= spec.M) {
        lo = hi;
    } else {
        for (int iter = 0; iter < 60; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (detail::band_gradient_floor(u0, gn, mid) >= spec.M)
                lo = mid;
            else
                hi = mid;
        }
    }
    spec.sigma = 0.5 * lo;

    const double inf_h = std::abs(H.min_on(slope_cap));
    spec.k2 = 2.0 * audit.sup_speed * inf_h /
              (spec.k1 * spec.sigma * spec.sigma * spec.sigma);

    // the three BarrierSpec invariants, re-checked on the discrete data
    if (detail::band_gradient_floor(u0, gn, 2.0 * spec.sigma) < spec.M)
        throw NumericalError("barrier band lost the gradient floor");
    if (H.value(spec.k1 * spec.M) < 0.0)
        throw NumericalError("k1 fails the supersolution condition");
    return spec;
}

struct SandwichReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_gap = -std::numeric_limits<double>::infinity();
    Point worst_node{0.0, 0.0};
    double worst_time = 0.0;
    double tol = 0.0;
    BarrierSpec params;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["checked"] = checked;
        j["violations"] = violations;
        j["worst_gap"] = worst_gap;
        j["worst_node"] = {worst_node[0], worst_node[1]};
        j["worst_time"] = worst_time;
        j["tol"] = tol;
        j["params"] = {{"sigma", params.sigma},
                       {"k1", params.k1},
                       {"k2", params.k2},
                       {"c", params.c},
                       {"M", params.M}};
        return j;
    }
};

// Count nodes/snapshots where the computed trajectory escapes the barriers
// by more than tol. Snapshot labels are mapped back to intrinsic PDE time
// for rescaled runs (the barriers live in unscaled time).
inline SandwichReport sandwich_check(const SolveResult& result,
                                     const BarrierPair& pair, double tol) {
    if (tol < 0.0) throw ConfigError("sandwich tolerance must be nonnegative");
    if (result.series.empty())
        throw ConfigError("sandwich check needs at least one snapshot");
    const GridSpec& grid = pair.u0.grid();
    if (result.series.front().field.grid() != grid)
        throw ConfigError("sandwich check grid mismatch");

    SandwichReport report;
    report.tol = tol;
    report.params = pair.spec;
    for (const auto& snap : result.series.snapshots) {
        const double t = snap.time / result.time_scale;
        for (std::size_t i = 0; i < pair.u0.size(); ++i) {
            const auto [lower, upper] = eval_barriers(pair.spec, pair.u0,
                                                      pair.spec.c, i, t);
            ++report.checked;
            const double gap =
                std::max(lower - snap.field[i], snap.field[i] - upper);
            if (gap > report.worst_gap) {
                report.worst_gap = gap;
                report.worst_node = grid.node(i);
                report.worst_time = t;
            }
            if (gap > tol) ++report.violations;
        }
    }
    return report;
}

}  // namespace reinit
