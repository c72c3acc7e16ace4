#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "reinit/distance.hpp"
#include "reinit/errors.hpp"
#include "reinit/grid.hpp"
#include "reinit/interface_mesh.hpp"
#include "reinit/norms.hpp"
#include "reinit/problem.hpp"
#include "reinit/solver.hpp"

namespace reinit {

// Node set standing in for "a compact subset": a predicate intersected with
// the sub-box at least `margin` away from the computational boundary. The
// recipe string documents the construction in reports.
struct CompactMask {
    GridSpec grid;
    std::vector<char> inside;
    std::size_t count = 0;
    double margin = 0.0;
    std::string recipe;

    bool operator()(std::size_t node) const { return inside[node] != 0; }
};

inline CompactMask make_compact_mask(
    const GridSpec& grid, double margin,
    const std::function<bool(const Point&)>& predicate, std::string recipe) {
    const double h = grid.min_spacing();
    if (!(margin >= 5.0 * h - 1e-12 * h))
        throw ConfigError("compact mask margin must be at least 5h");
    CompactMask mask{grid, std::vector<char>(grid.node_count(), 0), 0, margin,
                     std::move(recipe)};
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const Point p = grid.node(i);
        double boundary_gap = std::min(p[0] - grid.lo(0), grid.hi(0) - p[0]);
        if (grid.dim() == 2)
            boundary_gap = std::min(
                {boundary_gap, p[1] - grid.lo(1), grid.hi(1) - p[1]});
        if (boundary_gap + 1e-12 < margin) continue;
        if (!predicate(p)) continue;
        mask.inside[i] = 1;
        ++mask.count;
    }
    return mask;
}

struct ErrorReport {
    double sup_error = 0.0;
    double l1_error = 0.0;  // mean absolute error over the mask
    Point node_of_max{0.0, 0.0};
    double time = 0.0;

    nlohmann::json to_json() const {
        return {{"sup_error", sup_error},
                {"l1_error", l1_error},
                {"node_of_max", {node_of_max[0], node_of_max[1]}},
                {"time", time}};
    }
};

inline ErrorReport sup_error_on_compact(const ScalarField& u,
                                        const DistanceField& d,
                                        const CompactMask& mask) {
    if (u.grid() != d.values.grid() || u.grid() != mask.grid)
        throw ConfigError("error report needs one shared grid");
    if (mask.count == 0)
        throw ConfigError("compact mask selects no nodes");
    ErrorReport report;
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!mask(i)) continue;
        const double err = std::abs(u[i] - d.values[i]);
        sum += err;
        if (err > report.sup_error) {
            report.sup_error = err;
            report.node_of_max = u.grid().node(i);
        }
    }
    report.l1_error = sum / static_cast<double>(mask.count);
    return report;
}

namespace detail {

inline double point_segment_sq(const Point& p, const Segment& s) {
    const double dx = s.b[0] - s.a[0], dy = s.b[1] - s.a[1];
    const double dd = dx * dx + dy * dy;
    double t = 0.0;
    if (dd > 0.0)
        t = std::clamp(((p[0] - s.a[0]) * dx + (p[1] - s.a[1]) * dy) / dd, 0.0,
                       1.0);
    const double cx = s.a[0] + t * dx - p[0], cy = s.a[1] + t * dy - p[1];
    return cx * cx + cy * cy;
}

// One-sided Hausdorff in the euclidean metric, sampling segment endpoints
// and midpoints of `from` against whole segments of `to`.
inline double directed_hausdorff(const InterfaceMesh& from,
                                 const InterfaceMesh& to) {
    double worst_sq = 0.0;
    if (from.dim == 1) {
        for (double a : from.crossings) {
            double best = std::numeric_limits<double>::infinity();
            for (double b : to.crossings) best = std::min(best, std::abs(a - b));
            worst_sq = std::max(worst_sq, best * best);
        }
        return std::sqrt(worst_sq);
    }
    for (const Segment& s : from.segments) {
        const Point samples[3] = {s.a, s.b,
                                  {s.a[0] + 0.5 * (s.b[0] - s.a[0]),
                                   s.a[1] + 0.5 * (s.b[1] - s.a[1])}};
        for (const Point& p : samples) {
            double best = std::numeric_limits<double>::infinity();
            for (const Segment& t : to.segments) {
                // a sample drawn from a segment lies on any bitwise-equal
                // segment, so the distance is zero without rounding noise
                if (t.a == s.a && t.b == s.b) {
                    best = 0.0;
                    break;
                }
                best = std::min(best, point_segment_sq(p, t));
            }
            worst_sq = std::max(worst_sq, best);
        }
    }
    return std::sqrt(worst_sq);
}

inline bool attains_both_signs(const ScalarField& u) {
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < u.size(); ++i) {
        pos = pos || u[i] >= 0.0;
        neg = neg || u[i] <= 0.0;
        if (pos && neg) return true;
    }
    return false;
}

}  // namespace detail

// Per snapshot, the symmetric euclidean Hausdorff distance between the
// snapshot's zero level set and `reference`. A snapshot whose values no
// longer change sign has lost the interface: reported as +inf, not thrown.
inline std::vector<std::pair<double, double>> interface_drift(
    const TimeSeries& series, const InterfaceMesh& reference) {
    if (series.empty()) throw ConfigError("interface drift needs snapshots");
    if (reference.empty())
        throw ConfigError("interface drift needs a nonempty reference mesh");
    std::vector<std::pair<double, double>> drift;
    drift.reserve(series.size());
    for (const auto& snap : series.snapshots) {
        if (!detail::attains_both_signs(snap.field)) {
            drift.emplace_back(snap.time,
                               std::numeric_limits<double>::infinity());
            continue;
        }
        const InterfaceMesh mesh = extract_interface(snap.field);
        if (mesh.empty()) {  // zero set collapsed to isolated nodes
            drift.emplace_back(snap.time,
                               std::numeric_limits<double>::infinity());
            continue;
        }
        const double d = std::max(detail::directed_hausdorff(mesh, reference),
                                  detail::directed_hausdorff(reference, mesh));
        drift.emplace_back(snap.time, d);
    }
    return drift;
}

struct GradientStats {
    double median = 0.0;
    double p95 = 0.0;
    std::size_t count = 0;

    nlohmann::json to_json() const {
        return {{"median", median}, {"p95", p95}, {"count", count}};
    }
};

// Statistics of | ||grad u|| - 1 | over the mask (central differences).
inline GradientStats gradient_unit_deviation(const ScalarField& u,
                                             const NormSpec& norm,
                                             const CompactMask& mask) {
    if (u.grid() != mask.grid)
        throw ConfigError("gradient statistics need one shared grid");
    if (mask.count == 0)
        throw ConfigError("compact mask selects no nodes");
    const ScalarField gn = central_gradient_norm(u, norm);
    std::vector<double> dev;
    dev.reserve(mask.count);
    for (std::size_t i = 0; i < gn.size(); ++i)
        if (mask(i)) dev.push_back(std::abs(gn[i] - 1.0));
    std::sort(dev.begin(), dev.end());
    GradientStats stats;
    stats.count = dev.size();
    stats.median = dev[dev.size() / 2];
    stats.p95 = dev[static_cast<std::size_t>(
        std::floor(0.95 * static_cast<double>(dev.size() - 1)))];
    return stats;
}

struct AprioriReport {
    double c_t = 0.0;          // max over consecutive snapshots of |du|/dt
    double onelip_bound = 0.0; // C1 * max |H| on [0, slope_cap]
    double tolerance = 0.0;
    std::size_t offband_nodes = 0;
    std::size_t twolip_violations = 0;
    double twolip_worst = 0.0;  // max of ||grad u||*|f| - c_t over off-band
    std::vector<std::size_t> per_snapshot_violations;
    std::vector<std::pair<double, double>> bounded_trace;  // (t, max |u| on mask)

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["c_t"] = c_t;
        j["onelip_bound"] = onelip_bound;
        j["tolerance"] = tolerance;
        j["offband_nodes"] = offband_nodes;
        j["twolip_violations"] = twolip_violations;
        j["twolip_worst"] = twolip_worst;
        j["per_snapshot_violations"] = per_snapshot_violations;
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& [t, b] : bounded_trace) trace.push_back({t, b});
        j["bounded_trace"] = trace;
        return j;
    }
};

// Discrete shadows of the a priori estimates:
//  (a) c_t, the observed uniform time-Lipschitz constant;
//  (b) off the interface band (|f| at least half its max), count where
//      ||grad u|| * |f| exceeds c_t + tolerance at any snapshot;
//  (c) max |u| over the mask per snapshot (local boundedness trace).
inline AprioriReport apriori_checks(const SolveResult& result,
                                    const SpeedField& f, const Hamiltonian& H,
                                    const NormSpec& norm, const CompactMask& mask,
                                    double slope_cap, double tolerance) {
    if (result.series.size() < 2)
        throw ConfigError("a priori checks need at least two snapshots");
    const GridSpec& grid = result.series.front().field.grid();
    if (f.values.grid() != grid || mask.grid != grid)
        throw ConfigError("a priori checks need one shared grid");
    if (tolerance < 0.0) throw ConfigError("tolerance must be nonnegative");

    AprioriReport report;
    report.tolerance = tolerance;
    report.onelip_bound = f.sup_bound * H.max_abs_on(slope_cap);

    const auto& snaps = result.series.snapshots;
    for (std::size_t k = 1; k < snaps.size(); ++k) {
        const double dt = snaps[k].time - snaps[k - 1].time;
        double worst = 0.0;
        for (std::size_t i = 0; i < snaps[k].field.size(); ++i)
            worst = std::max(worst,
                             std::abs(snaps[k].field[i] - snaps[k - 1].field[i]));
        report.c_t = std::max(report.c_t, worst / dt);
    }

    double f_max = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f_max = std::max(f_max, std::abs(f.values[i]));
    std::vector<char> offband(f.values.size(), 0);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (std::abs(f.values[i]) >= 0.5 * f_max) {
            offband[i] = 1;
            ++report.offband_nodes;
        }

    report.twolip_worst = -std::numeric_limits<double>::infinity();
    for (const auto& snap : snaps) {
        const ScalarField gn = central_gradient_norm(snap.field, norm);
        std::size_t violations = 0;
        for (std::size_t i = 0; i < gn.size(); ++i) {
            if (!offband[i]) continue;
            const double load = gn[i] * std::abs(f.values[i]);
            report.twolip_worst = std::max(report.twolip_worst,
                                           load - report.c_t);
            if (load > report.c_t + tolerance) ++violations;
        }
        report.per_snapshot_violations.push_back(violations);
        report.twolip_violations += violations;

        double bound = 0.0;
        for (std::size_t i = 0; i < snap.field.size(); ++i)
            if (mask(i)) bound = std::max(bound, std::abs(snap.field[i]));
        report.bounded_trace.emplace_back(snap.time, bound);
    }
    return report;
}

struct RefinementRow {
    std::size_t resolution = 0;
    double h = std::numeric_limits<double>::quiet_NaN();
    double sup_error = std::numeric_limits<double>::quiet_NaN();
    double observed_order = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string note;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["resolution"] = resolution;
        j["ok"] = ok;
        if (ok) {
            j["h"] = h;
            j["sup_error"] = sup_error;
            if (std::isfinite(observed_order)) j["observed_order"] = observed_order;
        }
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

// Rerun the caller-supplied pipeline per resolution; on a shared box each
// step must (roughly) halve h, i.e. (n_next - 1)/(n - 1) within 10% of 2.
// A failing run yields a partial table with the failure noted.
inline std::vector<RefinementRow> refinement_study(
    const std::function<std::pair<double, double>(std::size_t)>& run_at,
    std::span<const std::size_t> resolutions) {
    if (resolutions.size() < 3)
        throw ConfigError("refinement study needs at least three resolutions");
    for (std::size_t k = 1; k < resolutions.size(); ++k) {
        const double ratio = static_cast<double>(resolutions[k] - 1) /
                             static_cast<double>(resolutions[k - 1] - 1);
        if (!(std::abs(ratio - 2.0) <= 0.1))
            throw ConfigError("refinement resolutions must halve h");
    }

    std::vector<RefinementRow> table;
    table.reserve(resolutions.size());
    for (std::size_t n : resolutions) {
        RefinementRow row;
        row.resolution = n;
        try {
            const auto [h, err] = run_at(n);
            row.h = h;
            row.sup_error = err;
            row.ok = true;
        } catch (const std::exception& e) {
            row.note = e.what();
        }
        if (row.ok && !table.empty() && table.back().ok)
            row.observed_order = std::log2(table.back().sup_error / row.sup_error);
        table.push_back(std::move(row));
    }
    return table;
}

struct RescaleRow {
    double epsilon = 0.0;
    double lookup_time = 0.0;    // 1/epsilon in the run's own time labels
    double snapshot_time = 0.0;  // nearest stored time actually used
    double offset = 0.0;         // |lookup - snapshot|
    double sup_error = 0.0;

    nlohmann::json to_json() const {
        return {{"epsilon", epsilon},
                {"lookup_time", lookup_time},
                {"snapshot_time", snapshot_time},
                {"offset", offset},
                {"sup_error", sup_error}};
    }
};

// Convergence of the rescaled family at its unit time: u^eps(.,1) = u(.,1/eps)
// read off the stored snapshots (nearest time, offset recorded). A steady run
// may clamp lookups past its last stored time; otherwise times beyond the
// configured horizon are rejected, naming the horizon required.
inline std::vector<RescaleRow> rescale_convergence(
    const SolveResult& result, const DistanceField& d, const CompactMask& mask,
    std::span<const double> epsilons) {
    if (epsilons.empty()) throw ConfigError("rescale study needs epsilons");
    for (double e : epsilons)
        if (!(e > 0.0)) throw ConfigError("rescale epsilons must be positive");
    const auto& snaps = result.series.snapshots;
    if (snaps.empty()) throw ConfigError("rescale study needs snapshots");

    std::vector<RescaleRow> table;
    table.reserve(epsilons.size());
    for (double eps : epsilons) {
        RescaleRow row;
        row.epsilon = eps;
        row.lookup_time = 1.0 / eps;
        if (row.lookup_time > result.t_final_config * (1.0 + 1e-9)) {
            throw ConfigError(
                "rescale study at epsilon " + std::to_string(eps) +
                " needs t_final >= " + std::to_string(row.lookup_time) +
                ", run covers " + std::to_string(result.t_final_config));
        }
        std::size_t best = 0;
        for (std::size_t k = 1; k < snaps.size(); ++k)
            if (std::abs(snaps[k].time - row.lookup_time) <
                std::abs(snaps[best].time - row.lookup_time))
                best = k;
        row.snapshot_time = snaps[best].time;
        row.offset = std::abs(row.snapshot_time - row.lookup_time);
        row.sup_error =
            sup_error_on_compact(snaps[best].field, d, mask).sup_error;
        table.push_back(row);
    }
    return table;
}

}  // namespace reinit
