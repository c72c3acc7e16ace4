#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "reinit/errors.hpp"
#include "reinit/grid.hpp"
#include "reinit/norms.hpp"

namespace reinit {

// H acting on the gradient magnitude. Two variants: H(p) = p - 1 and
// H(p) = p^m - 1 (m >= 1). Both are continuous, nondecreasing, coercive,
// and vanish exactly at p = 1.
class Hamiltonian {
public:
    enum class Kind { ShiftedLinear, ShiftedPower };

    static Hamiltonian shifted_linear() { return Hamiltonian{Kind::ShiftedLinear, 1.0}; }

    static Hamiltonian shifted_power(double m) {
        if (!(m >= 1.0) || !std::isfinite(m))
            throw ConfigError("shifted_power exponent must satisfy m >= 1");
        return Hamiltonian{Kind::ShiftedPower, m};
    }

    Kind kind() const { return kind_; }
    double power() const { return m_; }

    double value(double p) const {
        if (p < 0.0)
            throw ConfigError("Hamiltonian argument must be nonnegative");
        if (kind_ == Kind::ShiftedLinear) return p - 1.0;
        return std::pow(p, m_) - 1.0;
    }

    double root() const { return 1.0; }

    // Largest difference quotient of H over [0, cap].  H' is nondecreasing
    // for both variants, so the slope is attained at cap.
    double max_slope(double cap) const {
        if (cap < 0.0) throw ConfigError("slope cap must be nonnegative");
        if (kind_ == Kind::ShiftedLinear || m_ == 1.0) return 1.0;
        return m_ * std::pow(cap, m_ - 1.0);
    }

    double min_on(double cap) const {
        (void)cap;
        return -1.0;  // attained at p = 0 for both variants
    }

    double max_abs_on(double cap) const {
        if (cap < 0.0) throw ConfigError("slope cap must be nonnegative");
        return std::max(1.0, std::abs(value(cap)));
    }

    // Whether |H(p)| <= C*(1 + p) holds globally.
    bool linear_growth() const {
        return kind_ == Kind::ShiftedLinear || m_ == 1.0;
    }

    bool operator==(const Hamiltonian& o) const {
        return kind_ == o.kind_ && m_ == o.m_;
    }

private:
    Hamiltonian(Kind kind, double m) : kind_(kind), m_(m) {}
    Kind kind_;
    double m_;
};

inline double hamiltonian_eval(const Hamiltonian& h, double p) { return h.value(p); }

// Regularized sign of u0: f = u0 / sqrt(u0^2 + delta^2). Bounded by 1,
// Lipschitz, vanishing exactly on the zero set of u0.
struct SpeedField {
    ScalarField values;
    double delta;
    double lipschitz_estimate;  // max over grid edges of |df| / edge length
    double sup_bound;           // max |f|
};

inline SpeedField build_speed_field(const ScalarField& u0, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw ConfigError("speed regularization delta must be positive");
    const GridSpec& g = u0.grid();
    std::vector<double> f(u0.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = u0[i] / std::sqrt(u0[i] * u0[i] + delta * delta);
        sup = std::max(sup, std::abs(f[i]));
    }
    double lip = 0.0;
    const std::size_t nx = g.points(0);
    const std::size_t ny = g.dim() == 2 ? g.points(1) : 1;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t i = g.index(ix, iy);
            if (ix + 1 < nx)
                lip = std::max(lip, std::abs(f[i + 1] - f[i]) / g.spacing(0));
            if (iy + 1 < ny)
                lip = std::max(lip, std::abs(f[i + nx] - f[i]) / g.spacing(1));
        }
    }
    return SpeedField{ScalarField(g, std::move(f)), delta, lip, sup};
}

// The full problem: initial data, speed, Hamiltonian variant, gradient norm.
// The speed is usually built from u0 but may be supplied independently
// (comparison experiments evolve different data under one speed).
struct ProblemSpec {
    ScalarField u0;
    SpeedField f;
    Hamiltonian hamiltonian;
    NormSpec norm;

    ProblemSpec(ScalarField u0_, SpeedField f_, Hamiltonian h_, NormSpec n_)
        : u0(std::move(u0_)), f(std::move(f_)), hamiltonian(h_), norm(std::move(n_)) {
        if (f.values.grid() != u0.grid())
            throw ConfigError("speed field grid does not match initial data grid");
        if (norm.dim() != u0.grid().dim())
            throw ConfigError("norm dimension does not match grid dimension");
    }
};

inline ProblemSpec make_problem(ScalarField u0, double delta, Hamiltonian h,
                                NormSpec norm) {
    SpeedField f = build_speed_field(u0, delta);
    return ProblemSpec(std::move(u0), std::move(f), h, std::move(norm));
}

struct HypothesisStatus {
    bool pass = true;
    bool warn = false;
    std::string note;
};

// Measured standing of the structural hypotheses on a concrete problem.
// Estimates come from grid sampling: central differences for gradients,
// neighbor difference quotients for Lipschitz constants.
struct AuditReport {
    double band_width = 0.0;
    std::size_t band_nodes = 0;

    double lipschitz_estimate = 0.0;   // g1
    double sup_speed = 0.0;            // g2
    std::size_t sign_violations = 0;   // g3
    double grad_floor = 0.0;           // g4: inf ||grad u0|| over the band
    double grad_sup = 0.0;             // g5: max ||grad u0|| over the grid
    double growth_constant =           // h3 (NaN when no global constant exists)
        std::numeric_limits<double>::quiet_NaN();
    double witness_scale = 0.0;        // h4: scanned scale with most negative alpha
    double witness_alpha = 0.0;        // h4: max H(c*||grad u0||) at that scale
    std::vector<std::pair<double, double>> witness_scan;  // (c, alpha) per scale
    double h_root = 1.0;               // h5

    HypothesisStatus g1, g2, g3, g4, g5, h1, h2, h3, h4, h5;

    bool pass() const {
        return grad_floor > 0.0 && sign_violations == 0 && witness_alpha < 0.0;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["band_width"] = band_width;
        j["g1"] = {{"pass", g1.pass}, {"lipschitz_estimate", lipschitz_estimate}};
        j["g2"] = {{"pass", g2.pass}, {"sup_speed", sup_speed}};
        j["g3"] = {{"pass", g3.pass}, {"sign_violations", sign_violations}};
        j["g4"] = {{"pass", g4.pass},
                   {"grad_floor", grad_floor},
                   {"band_nodes", band_nodes}};
        j["g5"] = {{"pass", g5.pass}, {"grad_sup", grad_sup}};
        j["h1"] = {{"pass", h1.pass}};
        j["h2"] = {{"pass", h2.pass}};
        j["h3"] = {{"pass", h3.pass}, {"warn", h3.warn}};
        if (std::isfinite(growth_constant))
            j["h3"]["growth_constant"] = growth_constant;
        if (!h3.note.empty()) j["h3"]["note"] = h3.note;
        j["h4"] = {{"pass", h4.pass},
                   {"warn", h4.warn},
                   {"witness_scale", witness_scale},
                   {"witness_alpha", witness_alpha}};
        {
            nlohmann::json scan = nlohmann::json::array();
            for (const auto& [c, a] : witness_scan)
                scan.push_back({{"scale", c}, {"alpha", a}});
            j["h4"]["scan"] = scan;
        }
        j["h5"] = {{"pass", h5.pass}, {"root", h_root}};
        j["pass"] = pass();
        return j;
    }
};

// Grid-sampled audit. The band is {|u0| <= band_width}; each scale in c_grid
// is tried as the profile of a strict subsolution c*u0.
inline AuditReport audit_hypotheses(const ProblemSpec& problem, double band_width,
                                    std::span<const double> c_grid) {
    if (!(band_width > 0.0))
        throw ConfigError("audit band width must be positive");
    if (c_grid.empty())
        throw ConfigError("audit scale grid must be nonempty");
    for (double c : c_grid)
        if (!(c > 0.0 && c < 1.0))
            throw ConfigError("audit witness scales must lie in (0, 1)");

    const ScalarField& u0 = problem.u0;
    const ScalarField& f = problem.f.values;
    const ScalarField gn = central_gradient_norm(u0, problem.norm);

    AuditReport r;
    r.band_width = band_width;
    r.lipschitz_estimate = problem.f.lipschitz_estimate;
    r.sup_speed = problem.f.sup_bound;

    double floor = std::numeric_limits<double>::infinity();
    double sup_grad = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        sup_grad = std::max(sup_grad, gn[i]);
        if (std::abs(u0[i]) <= band_width) {
            ++r.band_nodes;
            floor = std::min(floor, gn[i]);
        }
        const bool sign_mismatch = (u0[i] > 0.0 && f[i] <= 0.0) ||
                                   (u0[i] < 0.0 && f[i] >= 0.0) ||
                                   (u0[i] == 0.0 && f[i] != 0.0);
        if (sign_mismatch) ++r.sign_violations;
    }
    if (r.band_nodes == 0)
        throw ConfigError("no interface in domain: no grid nodes satisfy |u0| <= band_width");
    r.grad_floor = floor;
    r.grad_sup = sup_grad;

    const Hamiltonian& H = problem.hamiltonian;
    if (H.linear_growth()) {
        r.growth_constant = 1.0;
    } else {
        r.h3.warn = true;
        r.h3.note = "superlinear growth: no global linear bound";
    }

    // Witness scan: alpha(c) = max H(c * ||grad u0||) over nodes with u0 != 0.
    double best_alpha = std::numeric_limits<double>::infinity();
    double best_c = 0.0;
    for (double c : c_grid) {
        double alpha = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < u0.size(); ++i) {
            if (u0[i] == 0.0) continue;
            alpha = std::max(alpha, H.value(c * gn[i]));
        }
        r.witness_scan.emplace_back(c, alpha);
        if (alpha < best_alpha) {
            best_alpha = alpha;
            best_c = c;
        }
    }
    r.witness_scale = best_c;
    r.witness_alpha = best_alpha;

    r.g3.pass = r.sign_violations == 0;
    r.g4.pass = r.grad_floor > 0.0;
    r.h4.pass = r.witness_alpha < 0.0;
    r.h4.warn = !r.h4.pass;
    if (r.h4.warn) r.h4.note = "no scanned scale yields a strict subsolution";

    // h1/h2/h5 hold by construction of the variants; verify the root anyway.
    if (std::abs(H.value(H.root())) > 1e-12) r.h5.pass = false;
    r.h_root = H.root();

    return r;
}

}  // namespace reinit
