#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "reinit/errors.hpp"
#include "reinit/expression.hpp"
#include "reinit/grid.hpp"
#include "reinit/norms.hpp"
#include "reinit/problem.hpp"
#include "reinit/solver.hpp"

namespace reinit {

// Experiment configuration: plain data mirroring the JSON layout, with
// builders producing the typed specs. Parsing is strict — unknown keys are
// rejected at every level — and parse(serialize(c)) == c for anything
// parse accepts.

struct NormConfig {
    std::string kind = "p";  // "p" | "ellipsoidal"
    double p = 2.0;          // infinity spelled "inf" in JSON
    std::array<double, 3> matrix{1.0, 0.0, 1.0};  // a00, a01, a11

    bool operator==(const NormConfig&) const = default;

    NormSpec build(int dim) const {
        if (kind == "p") return NormSpec::p_norm(dim, p);
        if (kind == "ellipsoidal")
            return NormSpec::ellipsoidal(
                SymMatrix2{dim, matrix[0], matrix[1], matrix[2]});
        throw ConfigError("unknown norm kind '" + kind + "'");
    }
};

struct HamiltonianConfig {
    std::string kind = "shifted_linear";  // | "shifted_power"
    double power = 1.0;

    bool operator==(const HamiltonianConfig&) const = default;

    Hamiltonian build() const {
        if (kind == "shifted_linear") return Hamiltonian::shifted_linear();
        if (kind == "shifted_power") return Hamiltonian::shifted_power(power);
        throw ConfigError("unknown hamiltonian kind '" + kind + "'");
    }
};

struct ProblemConfig {
    std::string u0;  // expression in x (and y on 2d grids)
    double delta = 0.1;
    NormConfig norm;
    HamiltonianConfig hamiltonian;

    bool operator==(const ProblemConfig&) const = default;
};

struct GridConfig {
    int dim = 2;
    std::array<std::array<double, 2>, 2> bounds{{{0.0, 1.0}, {0.0, 1.0}}};
    std::array<std::size_t, 2> points{0, 0};

    bool operator==(const GridConfig&) const = default;

    GridSpec build() const {
        const AxisSpec x{bounds[0][0], bounds[0][1], points[0]};
        if (dim == 1) return GridSpec(x);
        return GridSpec(x, AxisSpec{bounds[1][0], bounds[1][1], points[1]});
    }
};

struct SchemeConfig {
    std::string variant = "godunov";  // | "lax_friedrichs"
    double cfl = 0.5;
    bool preserve_interface = true;

    bool operator==(const SchemeConfig&) const = default;

    SchemeSpec build() const {
        SchemeSpec s;
        if (variant == "godunov")
            s.variant = SchemeVariant::Godunov;
        else if (variant == "lax_friedrichs")
            s.variant = SchemeVariant::LaxFriedrichs;
        else
            throw ConfigError("unknown scheme variant '" + variant + "'");
        s.cfl = cfl;
        s.preserve_interface = preserve_interface;
        return s;
    }
};

struct RunConfig {
    double t_final = 0.0;
    double residual_tol = 1e-6;
    std::size_t snapshot_stride = 1;
    std::string integrator = "tvd_rk2";  // | "euler"
    double slope_cap = 0.0;              // 0 = auto

    bool operator==(const RunConfig&) const = default;

    SolveConfig build() const {
        SolveConfig c;
        c.t_final = t_final;
        c.residual_tol = residual_tol;
        c.snapshot_stride = snapshot_stride;
        if (integrator == "euler")
            c.integrator = Integrator::Euler;
        else if (integrator == "tvd_rk2")
            c.integrator = Integrator::TvdRk2;
        else
            throw ConfigError("unknown integrator '" + integrator + "'");
        c.slope_cap = slope_cap;
        return c;
    }
};

// Mask recipes name compact evaluation regions; margin 0 means the 5h
// boundary minimum.
struct MaskConfig {
    std::string kind = "all";  // | "annulus" | "slab"
    double r_lo = 0.0, r_hi = 0.0;        // annulus, euclidean radius
    int axis = 0;                          // slab
    double lo = 0.0, hi = 0.0;             // slab
    double margin = 0.0;

    bool operator==(const MaskConfig&) const = default;
};

struct AnalysisConfig {
    MaskConfig mask;
    double band_width = 0.2;  // audit band {|u0| <= band_width}
    std::vector<double> c_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> epsilons{1.0, 0.5, 0.25, 0.125};
    std::vector<std::size_t> resolutions{63, 126, 251};
    // tolerances in units of h
    double barrier_tol_h = 5.0;
    double apriori_tol_h = 10.0;
    double drift_tol_h = 2.0;
    double error_tol_h = 5.0;
    double oracle_tol_h = 2.0;
    double lipschitz_tol_h = 10.0;
    std::size_t lipschitz_pairs = 10000;

    bool operator==(const AnalysisConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> emit{"report"};  // report|fields|interface|curves

    bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
    ProblemConfig problem;
    GridConfig grid;
    SchemeConfig scheme;
    RunConfig run;
    AnalysisConfig analysis;
    OutputConfig output;
    std::uint64_t seed = 2026;

    bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline void check_keys(const nlohmann::json& j, std::string_view where,
                       std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known)
            throw ConfigError("unknown key '" + item.key() + "' in " +
                              std::string(where));
    }
}

template <class T>
T field_as(const nlohmann::json& j, std::string_view where, const char* key,
           T def) {
    if (!j.contains(key)) return def;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("bad value for '" + std::string(key) + "' in " +
                          std::string(where));
    }
}

inline std::size_t index_field(const nlohmann::json& j, std::string_view where,
                               const char* key, std::size_t def) {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError("'" + std::string(key) + "' in " + std::string(where) +
                          " must be a nonnegative integer");
    const std::int64_t raw = v.get<std::int64_t>();
    if (raw < 0)
        throw ConfigError("'" + std::string(key) + "' in " + std::string(where) +
                          " must be a nonnegative integer");
    return static_cast<std::size_t>(raw);
}

// p = infinity crosses JSON as the string "inf".
inline double p_field(const nlohmann::json& j, std::string_view where,
                      double def) {
    if (!j.contains("p")) return def;
    const auto& v = j.at("p");
    if (v.is_string()) {
        if (v.get<std::string>() == "inf")
            return std::numeric_limits<double>::infinity();
        throw ConfigError("bad value for 'p' in " + std::string(where) +
                          " (number or \"inf\")");
    }
    if (!v.is_number())
        throw ConfigError("bad value for 'p' in " + std::string(where) +
                          " (number or \"inf\")");
    return v.get<double>();
}

}  // namespace detail

inline NormConfig parse_norm_config(const nlohmann::json& j) {
    detail::check_keys(j, "problem.norm", {"kind", "p", "matrix"});
    NormConfig n;
    n.kind = detail::field_as<std::string>(j, "problem.norm", "kind", n.kind);
    n.p = detail::p_field(j, "problem.norm", n.p);
    n.matrix = detail::field_as<std::array<double, 3>>(j, "problem.norm",
                                                       "matrix", n.matrix);
    return n;
}

inline HamiltonianConfig parse_hamiltonian_config(const nlohmann::json& j) {
    detail::check_keys(j, "problem.hamiltonian", {"kind", "power"});
    HamiltonianConfig h;
    h.kind =
        detail::field_as<std::string>(j, "problem.hamiltonian", "kind", h.kind);
    h.power =
        detail::field_as<double>(j, "problem.hamiltonian", "power", h.power);
    return h;
}

inline ProblemConfig parse_problem_config(const nlohmann::json& j) {
    detail::check_keys(j, "problem", {"u0", "delta", "norm", "hamiltonian"});
    ProblemConfig p;
    p.u0 = detail::field_as<std::string>(j, "problem", "u0", "");
    if (p.u0.empty()) throw ConfigError("problem needs a 'u0' expression");
    p.delta = detail::field_as<double>(j, "problem", "delta", p.delta);
    if (j.contains("norm")) p.norm = parse_norm_config(j.at("norm"));
    if (j.contains("hamiltonian"))
        p.hamiltonian = parse_hamiltonian_config(j.at("hamiltonian"));
    return p;
}

inline GridConfig parse_grid_config(const nlohmann::json& j) {
    detail::check_keys(j, "grid", {"bounds", "points"});
    if (!j.contains("bounds") || !j.contains("points"))
        throw ConfigError("grid needs 'bounds' and 'points'");
    const auto& b = j.at("bounds");
    const auto& p = j.at("points");
    if (!b.is_array() || (b.size() != 1 && b.size() != 2))
        throw ConfigError("grid bounds must be one or two [lo, hi] pairs");
    if (!p.is_array() || p.size() != b.size())
        throw ConfigError("grid points must have one count per axis");
    GridConfig g;
    g.dim = static_cast<int>(b.size());
    for (std::size_t a = 0; a < b.size(); ++a) {
        try {
            g.bounds[a] = b.at(a).get<std::array<double, 2>>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("grid bounds must be [lo, hi] number pairs");
        }
        if (!p.at(a).is_number_integer() && !p.at(a).is_number_unsigned())
            throw ConfigError("grid points must be integers");
        const std::int64_t n = p.at(a).get<std::int64_t>();
        if (n < 0) throw ConfigError("grid points must be integers");
        g.points[a] = static_cast<std::size_t>(n);
    }
    return g;
}

inline SchemeConfig parse_scheme_config(const nlohmann::json& j) {
    detail::check_keys(j, "scheme", {"variant", "cfl", "preserve_interface"});
    SchemeConfig s;
    s.variant = detail::field_as<std::string>(j, "scheme", "variant", s.variant);
    s.cfl = detail::field_as<double>(j, "scheme", "cfl", s.cfl);
    s.preserve_interface = detail::field_as<bool>(j, "scheme",
                                                  "preserve_interface",
                                                  s.preserve_interface);
    return s;
}

inline RunConfig parse_run_config(const nlohmann::json& j) {
    detail::check_keys(
        j, "run",
        {"t_final", "residual_tol", "snapshot_stride", "integrator",
         "slope_cap"});
    RunConfig r;
    r.t_final = detail::field_as<double>(j, "run", "t_final", r.t_final);
    r.residual_tol =
        detail::field_as<double>(j, "run", "residual_tol", r.residual_tol);
    r.snapshot_stride =
        detail::index_field(j, "run", "snapshot_stride", r.snapshot_stride);
    r.integrator =
        detail::field_as<std::string>(j, "run", "integrator", r.integrator);
    r.slope_cap = detail::field_as<double>(j, "run", "slope_cap", r.slope_cap);
    return r;
}

inline MaskConfig parse_mask_config(const nlohmann::json& j) {
    detail::check_keys(j, "analysis.mask",
                       {"kind", "r_lo", "r_hi", "axis", "lo", "hi", "margin"});
    MaskConfig m;
    m.kind = detail::field_as<std::string>(j, "analysis.mask", "kind", m.kind);
    m.r_lo = detail::field_as<double>(j, "analysis.mask", "r_lo", m.r_lo);
    m.r_hi = detail::field_as<double>(j, "analysis.mask", "r_hi", m.r_hi);
    m.axis = detail::field_as<int>(j, "analysis.mask", "axis", m.axis);
    m.lo = detail::field_as<double>(j, "analysis.mask", "lo", m.lo);
    m.hi = detail::field_as<double>(j, "analysis.mask", "hi", m.hi);
    m.margin = detail::field_as<double>(j, "analysis.mask", "margin", m.margin);
    return m;
}

inline AnalysisConfig parse_analysis_config(const nlohmann::json& j) {
    detail::check_keys(j, "analysis",
                       {"mask", "band_width", "c_grid", "epsilons",
                        "resolutions", "barrier_tol_h", "apriori_tol_h",
                        "drift_tol_h", "error_tol_h", "oracle_tol_h",
                        "lipschitz_tol_h", "lipschitz_pairs"});
    AnalysisConfig a;
    if (j.contains("mask")) a.mask = parse_mask_config(j.at("mask"));
    a.band_width =
        detail::field_as<double>(j, "analysis", "band_width", a.band_width);
    a.c_grid =
        detail::field_as<std::vector<double>>(j, "analysis", "c_grid", a.c_grid);
    a.epsilons = detail::field_as<std::vector<double>>(j, "analysis", "epsilons",
                                                       a.epsilons);
    a.resolutions = detail::field_as<std::vector<std::size_t>>(
        j, "analysis", "resolutions", a.resolutions);
    a.barrier_tol_h =
        detail::field_as<double>(j, "analysis", "barrier_tol_h", a.barrier_tol_h);
    a.apriori_tol_h =
        detail::field_as<double>(j, "analysis", "apriori_tol_h", a.apriori_tol_h);
    a.drift_tol_h =
        detail::field_as<double>(j, "analysis", "drift_tol_h", a.drift_tol_h);
    a.error_tol_h =
        detail::field_as<double>(j, "analysis", "error_tol_h", a.error_tol_h);
    a.oracle_tol_h =
        detail::field_as<double>(j, "analysis", "oracle_tol_h", a.oracle_tol_h);
    a.lipschitz_tol_h = detail::field_as<double>(j, "analysis", "lipschitz_tol_h",
                                                 a.lipschitz_tol_h);
    a.lipschitz_pairs =
        detail::index_field(j, "analysis", "lipschitz_pairs", a.lipschitz_pairs);
    return a;
}

inline OutputConfig parse_output_config(const nlohmann::json& j) {
    detail::check_keys(j, "output", {"directory", "emit"});
    OutputConfig o;
    o.directory =
        detail::field_as<std::string>(j, "output", "directory", o.directory);
    o.emit = detail::field_as<std::vector<std::string>>(j, "output", "emit",
                                                        o.emit);
    return o;
}

// Cheap structural validation at parse time: every builder is exercised once
// so a bad config fails before any computation starts.
inline void validate_config(const ExperimentConfig& c) {
    const GridSpec g = c.grid.build();
    const Expression u0 = Expression::parse(c.problem.u0);
    if (g.dim() == 1 && u0.uses_y())
        throw ConfigError("u0 uses y but the grid is one-dimensional");
    if (!(c.problem.delta > 0.0) || !std::isfinite(c.problem.delta))
        throw ConfigError("delta must be positive");
    c.problem.norm.build(g.dim());
    c.problem.hamiltonian.build();
    c.scheme.build();
    if (!(c.scheme.cfl > 0.0 && c.scheme.cfl <= 1.0))
        throw ConfigError("cfl must lie in (0, 1]");
    if (!(c.run.t_final > 0.0))
        throw ConfigError("t_final must be positive");
    c.run.build();

    const MaskConfig& m = c.analysis.mask;
    if (m.kind != "all" && m.kind != "annulus" && m.kind != "slab")
        throw ConfigError("unknown mask kind '" + m.kind + "'");
    if (m.kind == "annulus" && !(m.r_lo >= 0.0 && m.r_lo < m.r_hi))
        throw ConfigError("annulus mask needs 0 <= r_lo < r_hi");
    if (m.kind == "slab") {
        if (m.axis < 0 || m.axis >= g.dim())
            throw ConfigError("slab mask axis out of range");
        if (!(m.lo < m.hi)) throw ConfigError("slab mask needs lo < hi");
    }
    if (m.margin < 0.0) throw ConfigError("mask margin must be nonnegative");

    if (!(c.analysis.band_width > 0.0))
        throw ConfigError("band_width must be positive");
    for (double s : c.analysis.c_grid)
        if (!(s > 0.0 && s < 1.0))
            throw ConfigError("c_grid scales must lie in (0, 1)");
    for (double e : c.analysis.epsilons)
        if (!(e > 0.0)) throw ConfigError("epsilons must be positive");
    for (double tol :
         {c.analysis.barrier_tol_h, c.analysis.apriori_tol_h,
          c.analysis.drift_tol_h, c.analysis.error_tol_h,
          c.analysis.oracle_tol_h, c.analysis.lipschitz_tol_h})
        if (!(tol >= 0.0)) throw ConfigError("tolerances must be nonnegative");
    if (c.analysis.lipschitz_pairs == 0)
        throw ConfigError("lipschitz_pairs must be positive");

    for (const std::string& e : c.output.emit)
        if (e != "report" && e != "fields" && e != "interface" && e != "curves")
            throw ConfigError("unknown emit target '" + e + "'");
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    detail::check_keys(
        j, "config",
        {"problem", "grid", "scheme", "run", "analysis", "output", "seed"});
    for (const char* required : {"problem", "grid", "run"})
        if (!j.contains(required))
            throw ConfigError(std::string("config needs a '") + required +
                              "' section");
    ExperimentConfig c;
    c.problem = parse_problem_config(j.at("problem"));
    c.grid = parse_grid_config(j.at("grid"));
    if (j.contains("scheme")) c.scheme = parse_scheme_config(j.at("scheme"));
    c.run = parse_run_config(j.at("run"));
    if (j.contains("analysis"))
        c.analysis = parse_analysis_config(j.at("analysis"));
    if (j.contains("output")) c.output = parse_output_config(j.at("output"));
    c.seed = detail::index_field(j, "config", "seed", c.seed);
    validate_config(c);
    return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream text;
    text << f.rdbuf();
    return parse_config_text(text.str());
}

// Canonical full form: every field emitted, object keys sorted by the JSON
// library, doubles as shortest round-trip decimals.
inline nlohmann::json serialize_config(const ExperimentConfig& c) {
    nlohmann::json j;
    j["problem"]["u0"] = c.problem.u0;
    j["problem"]["delta"] = c.problem.delta;
    j["problem"]["norm"]["kind"] = c.problem.norm.kind;
    if (std::isinf(c.problem.norm.p))
        j["problem"]["norm"]["p"] = "inf";
    else
        j["problem"]["norm"]["p"] = c.problem.norm.p;
    j["problem"]["norm"]["matrix"] = c.problem.norm.matrix;
    j["problem"]["hamiltonian"]["kind"] = c.problem.hamiltonian.kind;
    j["problem"]["hamiltonian"]["power"] = c.problem.hamiltonian.power;

    for (int a = 0; a < c.grid.dim; ++a) {
        j["grid"]["bounds"].push_back(c.grid.bounds[a]);
        j["grid"]["points"].push_back(c.grid.points[a]);
    }

    j["scheme"]["variant"] = c.scheme.variant;
    j["scheme"]["cfl"] = c.scheme.cfl;
    j["scheme"]["preserve_interface"] = c.scheme.preserve_interface;

    j["run"]["t_final"] = c.run.t_final;
    j["run"]["residual_tol"] = c.run.residual_tol;
    j["run"]["snapshot_stride"] = c.run.snapshot_stride;
    j["run"]["integrator"] = c.run.integrator;
    j["run"]["slope_cap"] = c.run.slope_cap;

    const MaskConfig& m = c.analysis.mask;
    j["analysis"]["mask"] = {{"kind", m.kind}, {"r_lo", m.r_lo},
                             {"r_hi", m.r_hi}, {"axis", m.axis},
                             {"lo", m.lo},     {"hi", m.hi},
                             {"margin", m.margin}};
    j["analysis"]["band_width"] = c.analysis.band_width;
    j["analysis"]["c_grid"] = c.analysis.c_grid;
    j["analysis"]["epsilons"] = c.analysis.epsilons;
    j["analysis"]["resolutions"] = c.analysis.resolutions;
    j["analysis"]["barrier_tol_h"] = c.analysis.barrier_tol_h;
    j["analysis"]["apriori_tol_h"] = c.analysis.apriori_tol_h;
    j["analysis"]["drift_tol_h"] = c.analysis.drift_tol_h;
    j["analysis"]["error_tol_h"] = c.analysis.error_tol_h;
    j["analysis"]["oracle_tol_h"] = c.analysis.oracle_tol_h;
    j["analysis"]["lipschitz_tol_h"] = c.analysis.lipschitz_tol_h;
    j["analysis"]["lipschitz_pairs"] = c.analysis.lipschitz_pairs;

    j["output"]["directory"] = c.output.directory;
    j["output"]["emit"] = c.output.emit;

    j["seed"] = c.seed;
    return j;
}

}  // namespace reinit
