#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "reinit/errors.hpp"
#include "reinit/grid.hpp"
#include "reinit/norms.hpp"
#include "reinit/problem.hpp"

namespace reinit {

enum class SchemeVariant { Godunov, LaxFriedrichs };
enum class Integrator { Euler, TvdRk2 };

struct SchemeSpec {
    SchemeVariant variant = SchemeVariant::Godunov;
    double cfl = 0.5;
    // Per-axis dissipation; zero entries are auto-estimated from the speed
    // bound and the Hamiltonian slope over [0, slope_cap].
    std::array<double, 2> lf_dissipation{0.0, 0.0};
    // Scale dissipation by min(1, |f|/f_ref) so the zero set is not smeared.
    bool preserve_interface = true;
};

struct SolveConfig {
    double t_final = 1.0;
    double residual_tol = 1e-6;
    std::size_t snapshot_stride = 1;
    Integrator integrator = Integrator::TvdRk2;
    // 0 means auto: 3x the sampled sup of ||grad u0||.
    double slope_cap = 0.0;
};

struct SolveResult {
    TimeSeries series;
    std::vector<std::pair<double, double>> residual_history;  // (time, residual)
    bool steady_reached = false;
    double dt_used = 0.0;
    double t_final_config = 0.0;
    double slope_cap = 0.0;
    std::array<double, 2> lf_sigma{0.0, 0.0};
    double time_scale = 1.0;  // snapshot relabeling factor (rescaled runs)
};

namespace detail {

// Scratch views over the per-axis one-sided difference quotients at a node.
struct NodeDiffs {
    double dm[2];
    double dp[2];
};

inline void one_sided_at(const std::vector<double>& u, const GridSpec& g,
                         std::size_t ix, std::size_t iy, NodeDiffs& out) {
    const std::size_t nx = g.points(0);
    const std::size_t i = g.index(ix, iy);
    {
        const double h = g.spacing(0);
        const double bwd = ix > 0 ? (u[i] - u[i - 1]) / h : 0.0;
        const double fwd = ix + 1 < nx ? (u[i + 1] - u[i]) / h : 0.0;
        out.dm[0] = ix > 0 ? bwd : fwd;
        out.dp[0] = ix + 1 < nx ? fwd : bwd;
    }
    if (g.dim() == 2) {
        const std::size_t ny = g.points(1);
        const double h = g.spacing(1);
        const double bwd = iy > 0 ? (u[i] - u[i - nx]) / h : 0.0;
        const double fwd = iy + 1 < ny ? (u[i + nx] - u[i]) / h : 0.0;
        out.dm[1] = iy > 0 ? bwd : fwd;
        out.dp[1] = iy + 1 < ny ? fwd : bwd;
    } else {
        out.dm[1] = 0.0;
        out.dp[1] = 0.0;
    }
}

// Rouy-Tourin selection: for advancing fronts (f > 0) take the larger of the
// entering slopes per axis, clamped at zero so kink minima rarefy.
inline double upwind_component(double dm, double dp, double speed_sign) {
    if (speed_sign > 0.0) return std::max(std::max(dm, 0.0), -std::min(dp, 0.0));
    if (speed_sign < 0.0) return std::max(-std::min(dm, 0.0), std::max(dp, 0.0));
    return 0.0;
}

inline double godunov_flux(const NodeDiffs& d, double f, const Hamiltonian& H,
                           const NormSpec& norm) {
    const Point g{upwind_component(d.dm[0], d.dp[0], f),
                  upwind_component(d.dm[1], d.dp[1], f)};
    return f * H.value(norm_eval(norm, g));
}

inline double lf_flux(const NodeDiffs& d, double f, const Hamiltonian& H,
                      const NormSpec& norm, const std::array<double, 2>& sigma,
                      double preserve_factor) {
    const Point avg{0.5 * (d.dm[0] + d.dp[0]), 0.5 * (d.dm[1] + d.dp[1])};
    double diss = sigma[0] * preserve_factor * 0.5 * (d.dp[0] - d.dm[0]);
    diss += sigma[1] * preserve_factor * 0.5 * (d.dp[1] - d.dm[1]);
    return f * H.value(norm_eval(norm, avg)) - diss;
}

// Reference speed for interface-preserving dissipation scaling: the median
// of |f| over its saturated region (|f| at least half the field maximum).
inline double preserve_reference(const ScalarField& f) {
    double fmax = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        fmax = std::max(fmax, std::abs(f[i]));
    if (fmax == 0.0) return 0.0;
    std::vector<double> tail;
    tail.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        if (std::abs(f[i]) >= 0.5 * fmax) tail.push_back(std::abs(f[i]));
    std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
    return tail[tail.size() / 2];
}

}  // namespace detail

// Upwind gradient magnitude from precomputed one-sided differences.
inline ScalarField upwind_grad_norm(const ScalarField& dminus_x,
                                    const ScalarField& dplus_x,
                                    const ScalarField& dminus_y,
                                    const ScalarField& dplus_y,
                                    const ScalarField& speed_sign,
                                    const NormSpec& norm) {
    const GridSpec& g = dminus_x.grid();
    std::vector<double> out(g.node_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Point gr{detail::upwind_component(dminus_x[i], dplus_x[i],
                                                speed_sign[i]),
                       g.dim() == 2
                           ? detail::upwind_component(dminus_y[i], dplus_y[i],
                                                      speed_sign[i])
                           : 0.0};
        out[i] = norm_eval(norm, gr);
    }
    return ScalarField(g, std::move(out));
}

// 1D overload: the y differences vanish.
inline ScalarField upwind_grad_norm(const ScalarField& dminus_x,
                                    const ScalarField& dplus_x,
                                    const ScalarField& speed_sign,
                                    const NormSpec& norm) {
    std::vector<double> zero(dminus_x.size(), 0.0);
    ScalarField z(dminus_x.grid(), zero);
    return upwind_grad_norm(dminus_x, dplus_x, z, z, speed_sign, norm);
}

// Local Lax-Friedrichs numerical Hamiltonian on central averages with
// per-axis dissipation; preserve_interface scales the dissipation by
// min(1, |f|/f_ref) so it vanishes with f at the interface.
inline ScalarField lf_numerical_hamiltonian(
    const ScalarField& dminus_x, const ScalarField& dplus_x,
    const ScalarField& dminus_y, const ScalarField& dplus_y,
    const ScalarField& f, const Hamiltonian& H, const NormSpec& norm,
    const std::array<double, 2>& sigma, bool preserve_interface) {
    const GridSpec& g = dminus_x.grid();
    const double f_ref = preserve_interface ? detail::preserve_reference(f) : 0.0;
    std::vector<double> out(g.node_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        detail::NodeDiffs d{{dminus_x[i], dminus_y[i]}, {dplus_x[i], dplus_y[i]}};
        double factor = 1.0;
        if (preserve_interface)
            factor = f_ref > 0.0 ? std::min(1.0, std::abs(f[i]) / f_ref) : 0.0;
        out[i] = detail::lf_flux(d, f[i], H, norm, sigma, factor);
    }
    return ScalarField(g, std::move(out));
}

// Stable explicit step: dt = cfl * h / (C1 * Lambda * sum_a ||e_a||), with
// Lambda the Hamiltonian slope over [0, slope_cap]. The basis-norm factor
// equals the dimension for p-norms and keeps ellipsoidal updates monotone.
inline double cfl_timestep(const ProblemSpec& problem, const SchemeSpec& scheme,
                           const GridSpec& grid, double slope_cap) {
    if (!(scheme.cfl > 0.0) || scheme.cfl > 1.0)
        throw ConfigError("cfl must lie in (0, 1]");
    if (!(slope_cap > 0.0))
        throw ConfigError("slope cap must be positive");
    const double h = grid.min_spacing();
    const double lambda = problem.hamiltonian.max_slope(slope_cap);
    const double c1 = std::max(problem.f.sup_bound, 1e-300);
    double basis_sum = problem.norm.basis_norm(0);
    if (grid.dim() == 2) basis_sum += problem.norm.basis_norm(1);
    double dt = scheme.cfl * h / (c1 * lambda * basis_sum);
    if (scheme.variant == SchemeVariant::LaxFriedrichs) {
        std::array<double, 2> sigma = scheme.lf_dissipation;
        for (int a = 0; a < grid.dim(); ++a)
            if (sigma[a] == 0.0)
                sigma[a] = c1 * lambda * problem.norm.basis_norm(a);
        const double sum = sigma[0] + (grid.dim() == 2 ? sigma[1] : 0.0);
        dt = std::min(dt, scheme.cfl * h / sum);
    }
    return dt;
}

namespace detail {

struct StepKernel {
    const ProblemSpec& problem;
    const SchemeSpec& scheme;
    const GridSpec& grid;
    std::array<double, 2> sigma{0.0, 0.0};
    double f_ref = 0.0;

    // max upwind slope magnitude seen while evaluating fluxes
    double observed_slope = 0.0;

    void flux(const std::vector<double>& u, std::vector<double>& out) {
        const std::size_t nx = grid.points(0);
        const std::size_t ny = grid.dim() == 2 ? grid.points(1) : 1;
        const ScalarField& f = problem.f.values;
        double slope = observed_slope;
        NodeDiffs d;
        for (std::size_t iy = 0; iy < ny; ++iy) {
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const std::size_t i = grid.index(ix, iy);
                one_sided_at(u, grid, ix, iy, d);
                const Point amax{std::max(std::abs(d.dm[0]), std::abs(d.dp[0])),
                                 std::max(std::abs(d.dm[1]), std::abs(d.dp[1]))};
                slope = std::max(slope, norm_eval(problem.norm, amax));
                if (scheme.variant == SchemeVariant::Godunov) {
                    out[i] = godunov_flux(d, f[i], problem.hamiltonian,
                                          problem.norm);
                } else {
                    double factor = 1.0;
                    if (scheme.preserve_interface)
                        factor = f_ref > 0.0
                                     ? std::min(1.0, std::abs(f[i]) / f_ref)
                                     : 0.0;
                    out[i] = lf_flux(d, f[i], problem.hamiltonian, problem.norm,
                                     sigma, factor);
                }
            }
        }
        observed_slope = slope;
    }
};

}  // namespace detail

// March u_t + f H(||grad u||) = 0 to t_final or to a sup-norm steady state.
// Snapshots are stored every snapshot_stride steps plus the initial and final
// states. If the upwind slopes outgrow slope_cap the step restarts with a
// larger cap (and freshly derived dt and dissipation).
inline SolveResult solve(const ProblemSpec& problem, const GridSpec& grid,
                         const SchemeSpec& scheme, const SolveConfig& config) {
    if (problem.u0.grid() != grid)
        throw ConfigError("initial data grid does not match solve grid");
    if (!(config.t_final > 0.0))
        throw ConfigError("t_final must be positive");
    if (!(config.residual_tol > 0.0))
        throw ConfigError("residual_tol must be positive");
    if (config.snapshot_stride == 0)
        throw ConfigError("snapshot_stride must be positive");
    if (scheme.variant == SchemeVariant::Godunov && !problem.norm.axis_separable())
        throw ConfigError(
            "godunov upwinding needs an axis-separable norm "
            "(p in {1,2,inf} or diagonal ellipsoidal); use lax_friedrichs");

    double slope_cap = config.slope_cap;
    if (slope_cap == 0.0) {
        const ScalarField gn = central_gradient_norm(problem.u0, problem.norm);
        double sup = 0.0;
        for (std::size_t i = 0; i < gn.size(); ++i) sup = std::max(sup, gn[i]);
        slope_cap = 3.0 * std::max(sup, 1.0);
    }

    detail::StepKernel kernel{problem, scheme, grid};
    if (scheme.variant == SchemeVariant::LaxFriedrichs && scheme.preserve_interface)
        kernel.f_ref = detail::preserve_reference(problem.f.values);

    auto derive = [&](double cap) {
        kernel.sigma = scheme.lf_dissipation;
        const double lambda = problem.hamiltonian.max_slope(cap);
        for (int a = 0; a < grid.dim(); ++a)
            if (kernel.sigma[a] == 0.0)
                kernel.sigma[a] =
                    problem.f.sup_bound * lambda * problem.norm.basis_norm(a);
        return cfl_timestep(problem, scheme, grid, cap);
    };
    double dt = derive(slope_cap);

    SolveResult result;
    result.t_final_config = config.t_final;

    std::vector<double> u = problem.u0.values();
    std::vector<double> flux(u.size()), stage(u.size()), next(u.size());

    result.series.append(0.0, problem.u0);

    double t = 0.0;
    std::size_t step = 0;
    bool final_stored = true;
    while (config.t_final - t > 1e-12 * config.t_final && !result.steady_reached) {
        double step_dt = std::min(dt, config.t_final - t);

        // re-derive dt when slopes outgrow the cap, then redo the step
        for (int attempt = 0;; ++attempt) {
            kernel.observed_slope = 0.0;
            kernel.flux(u, flux);
            next = u;
            if (config.integrator == Integrator::Euler) {
                for (std::size_t i = 0; i < u.size(); ++i)
                    next[i] -= step_dt * flux[i];
            } else {
                for (std::size_t i = 0; i < u.size(); ++i)
                    stage[i] = u[i] - step_dt * flux[i];
                kernel.flux(stage, flux);
                for (std::size_t i = 0; i < u.size(); ++i)
                    next[i] = 0.5 * (u[i] + stage[i] - step_dt * flux[i]);
            }
            if (kernel.observed_slope <= slope_cap) break;
            if (attempt >= 60)
                throw NumericalError("slope cap kept growing; solution gradient "
                                     "appears unbounded");
            slope_cap = 1.25 * kernel.observed_slope;
            dt = derive(slope_cap);
            step_dt = std::min(dt, config.t_final - t);
        }

        double residual = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double change = std::abs(next[i] - u[i]);
            residual = std::max(residual, change);
            if (!std::isfinite(next[i])) {
                const Point p = grid.node(i);
                throw NumericalError(
                    "non-finite state at step " + std::to_string(step + 1) +
                    ", node (" + std::to_string(p[0]) + ", " +
                    std::to_string(p[1]) + ")");
            }
        }
        residual /= step_dt;

        u.swap(next);
        t += step_dt;
        ++step;
        result.residual_history.emplace_back(t, residual);
        if (residual < config.residual_tol) result.steady_reached = true;

        final_stored = false;
        if (step % config.snapshot_stride == 0 || t >= config.t_final ||
            result.steady_reached) {
            result.series.append(t, ScalarField(grid, u));
            final_stored = true;
        }
    }
    if (!final_stored) result.series.append(t, ScalarField(grid, u));

    result.dt_used = dt;
    result.slope_cap = slope_cap;
    result.lf_sigma = kernel.sigma;
    return result;
}

// Time rescaling u^eps(x,t) = u(x, t/eps) is an exact relabeling: run the
// solve as configured, then multiply every recorded time by eps.
inline SolveResult rescaled_solve(const ProblemSpec& problem, const GridSpec& grid,
                                  const SchemeSpec& scheme,
                                  const SolveConfig& config, double epsilon) {
    if (!(epsilon > 0.0))
        throw ConfigError("rescaling epsilon must be positive");
    SolveResult r = solve(problem, grid, scheme, config);
    TimeSeries relabeled;
    for (const auto& snap : r.series.snapshots)
        relabeled.append(snap.time * epsilon, snap.field);
    r.series = std::move(relabeled);
    for (auto& [time, res] : r.residual_history) time *= epsilon;
    r.t_final_config = config.t_final * epsilon;
    r.time_scale = epsilon;
    return r;
}

}  // namespace reinit
