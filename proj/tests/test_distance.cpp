#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "reinit/distance.hpp"

using namespace reinit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ScalarField circle_u0(const GridSpec& g) {
    return sample_function(g, [](const Point& p) {
        return p[0] * p[0] + p[1] * p[1] - 1.0;
    });
}

// Independent oracle: dense parameter scan of the dual-norm distance from a
// point to the exact unit circle.
double circle_distance_by_scan(const NormSpec& dual, const Point& x,
                               int samples = 1000000) {
    double best = kInf;
    for (int k = 0; k < samples; ++k) {
        const double th = 2.0 * std::acos(-1.0) * k / samples;
        best = std::min(best, norm_eval(dual, Point{x[0] - std::cos(th),
                                                    x[1] - std::sin(th)}));
    }
    return best;
}

}  // namespace

TEST_CASE("brute force distance to the circle in several dual norms") {
    GridSpec g(AxisSpec{-2.0, 2.0, 201}, AxisSpec{-2.0, 2.0, 201});
    ScalarField u0 = circle_u0(g);
    const InterfaceMesh mesh = extract_interface(u0);
    const double h = g.spacing(0);

    struct Probe {
        Point x;
        NormSpec dual;
    };
    SymMatrix2 a;
    a.a00 = 4.0;
    a.a11 = 1.0;
    const std::vector<Probe> probes{
        {{2.0, 0.0}, NormSpec::p_norm(2, kInf)},
        {{2.0, 0.0}, NormSpec::p_norm(2, 2.0)},
        {{2.0, 0.0}, NormSpec::p_norm(2, 1.0)},
        {{0.0, 0.0}, NormSpec::p_norm(2, kInf)},
        {{1.5, 1.5}, NormSpec::p_norm(2, 1.0)},
        {{2.0, 0.0}, NormSpec::ellipsoidal(a)},
        {{0.5, -0.5}, NormSpec::ellipsoidal(a)},
    };
    for (const Probe& probe : probes) {
        const DistanceField d = brute_force_signed_distance(mesh, g, probe.dual, u0);
        const std::size_t ix = static_cast<std::size_t>(
            std::lround((probe.x[0] + 2.0) / h));
        const std::size_t iy = static_cast<std::size_t>(
            std::lround((probe.x[1] + 2.0) / h));
        const double got = d.values.at(ix, iy);
        const double expected = circle_distance_by_scan(probe.dual, probe.x);
        const double r = std::hypot(probe.x[0], probe.x[1]);
        const double sign = r < 1.0 ? -1.0 : 1.0;
        REQUIRE(std::abs(got - sign * expected) <= 2.0 * h);
    }
}

TEST_CASE("distance from the origin in the sup norm hits the diagonal") {
    // min over the circle of max(|cos|,|sin|) = 1/sqrt(2), attained at 45 deg
    GridSpec g(AxisSpec{-2.0, 2.0, 201}, AxisSpec{-2.0, 2.0, 201});
    ScalarField u0 = circle_u0(g);
    const InterfaceMesh mesh = extract_interface(u0);
    const DistanceField d =
        brute_force_signed_distance(mesh, g, NormSpec::p_norm(2, kInf), u0);
    REQUIRE(d.values.at(100, 100) ==
            Catch::Approx(-1.0 / std::sqrt(2.0)).margin(2.0 * g.spacing(0)));
}

TEST_CASE("1d signed distance from crossings") {
    GridSpec g(AxisSpec{-3.0, 3.0, 61});
    ScalarField u0 = sample_function(g, [](const Point& p) {
        return p[0] * (2.0 + std::sin(p[0]));
    });
    const InterfaceMesh mesh = extract_interface(u0);
    REQUIRE(mesh.crossings.size() == 1);
    const DistanceField d =
        brute_force_signed_distance(mesh, g, NormSpec::p_norm(1, 2.0), u0);
    for (std::size_t i = 0; i < d.values.size(); ++i)
        REQUIRE(d.values[i] == Catch::Approx(g.coord(0, i)).margin(1e-9));
}

TEST_CASE("sign comes from the field not the mesh") {
    GridSpec g(AxisSpec{-2.0, 2.0, 101}, AxisSpec{-2.0, 2.0, 101});
    ScalarField u0 = circle_u0(g);
    // negate the data: inside becomes positive
    std::vector<double> neg(u0.values());
    for (double& v : neg) v = -v;
    ScalarField u0n(g, neg);
    const InterfaceMesh mesh = extract_interface(u0n);
    const DistanceField d =
        brute_force_signed_distance(mesh, g, NormSpec::p_norm(2, 2.0), u0n);
    REQUIRE(d.values.at(50, 50) > 0.0);   // origin now positive
    REQUIRE(d.values.at(0, 0) < 0.0);     // far corner negative
}

TEST_CASE("fast sweeping matches brute force on the circle") {
    GridSpec g(AxisSpec{-2.0, 2.0, 101}, AxisSpec{-2.0, 2.0, 101});
    ScalarField u0 = circle_u0(g);
    const InterfaceMesh mesh = extract_interface(u0);
    const double h = g.spacing(0);
    for (const NormSpec& dual :
         {NormSpec::p_norm(2, 2.0), NormSpec::p_norm(2, 1.0)}) {
        const DistanceField bf = brute_force_signed_distance(mesh, g, dual, u0);
        const DistanceField fs = fast_sweeping_distance(mesh, g, dual);
        double worst = 0.0;
        for (std::size_t i = 0; i < bf.values.size(); ++i)
            worst = std::max(worst,
                             std::abs(fs.values[i] - std::abs(bf.values[i])));
        REQUIRE(worst <= 2.0 * h);
    }
}

TEST_CASE("fast sweeping fills the taxicab cone from a point seed") {
    GridSpec g(AxisSpec{-2.0, 2.0, 101}, AxisSpec{-2.0, 2.0, 101});
    InterfaceMesh mesh;
    mesh.dim = 2;
    mesh.segments.push_back({{0.0, 0.0}, {0.0, 0.0}});
    const DistanceField fs =
        fast_sweeping_distance(mesh, g, NormSpec::p_norm(2, 1.0));
    const double h = g.spacing(0);
    double worst = 0.0;
    for (std::size_t i = 0; i < fs.values.size(); ++i) {
        const Point p = g.node(i);
        worst = std::max(worst,
                         std::abs(fs.values[i] - (std::abs(p[0]) + std::abs(p[1]))));
    }
    REQUIRE(worst <= 2.0 * h);
}

TEST_CASE("1d fast sweeping") {
    GridSpec g(AxisSpec{-1.0, 1.0, 41});
    ScalarField u0 = sample_function(g, [](const Point& p) { return p[0] + 0.1; });
    const InterfaceMesh mesh = extract_interface(u0);
    const DistanceField fs =
        fast_sweeping_distance(mesh, g, NormSpec::p_norm(1, 2.0));
    for (std::size_t i = 0; i < fs.values.size(); ++i)
        REQUIRE(fs.values[i] ==
                Catch::Approx(std::abs(g.coord(0, i) + 0.1)).margin(1e-9));
}

TEST_CASE("queries against an empty mesh are rejected") {
    GridSpec g(AxisSpec{-1.0, 1.0, 5}, AxisSpec{-1.0, 1.0, 5});
    ScalarField u0 = sample_function(g, [](const Point&) { return 1.0; });
    InterfaceMesh mesh;
    mesh.dim = 2;
    REQUIRE_THROWS_AS(
        brute_force_signed_distance(mesh, g, NormSpec::p_norm(2, 2.0), u0),
        ConfigError);
    REQUIRE_THROWS_AS(fast_sweeping_distance(mesh, g, NormSpec::p_norm(2, 2.0)),
                      ConfigError);
}

TEST_CASE("lipschitz certificate of a distance field") {
    GridSpec g(AxisSpec{-2.0, 2.0, 101}, AxisSpec{-2.0, 2.0, 101});
    ScalarField u0 = circle_u0(g);
    const InterfaceMesh mesh = extract_interface(u0);
    const double h = g.spacing(0);
    for (const NormSpec& dual :
         {NormSpec::p_norm(2, 2.0), NormSpec::p_norm(2, kInf)}) {
        const DistanceField d = brute_force_signed_distance(mesh, g, dual, u0);
        const double cert = lipschitz_certificate(d.values, dual, 5000, 42);
        REQUIRE(cert <= 1.0 + 10.0 * h);
        REQUIRE(cert > 0.5);
        // deterministic given the seed
        REQUIRE(cert == lipschitz_certificate(d.values, dual, 5000, 42));
    }
}
