#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "reinit/problem.hpp"

using namespace reinit;

namespace {

ScalarField circle_u0(const GridSpec& g) {
    return sample_function(g, [](const Point& p) {
        return p[0] * p[0] + p[1] * p[1] - 1.0;
    });
}

}  // namespace

TEST_CASE("hamiltonian variants") {
    const Hamiltonian lin = Hamiltonian::shifted_linear();
    REQUIRE(lin.value(1.0) == 0.0);
    REQUIRE(lin.value(0.0) == -1.0);
    REQUIRE(lin.value(3.0) == 2.0);
    REQUIRE(lin.max_slope(3.0) == 1.0);
    REQUIRE(lin.min_on(3.0) == -1.0);
    REQUIRE(lin.max_abs_on(3.0) == 2.0);
    REQUIRE(lin.linear_growth());

    const Hamiltonian sq = Hamiltonian::shifted_power(2.0);
    REQUIRE(sq.value(1.0) == 0.0);
    REQUIRE(sq.value(3.0) == 8.0);
    REQUIRE(sq.max_slope(3.0) == Catch::Approx(6.0));  // 2p on [0,3]
    REQUIRE_FALSE(sq.linear_growth());

    REQUIRE_THROWS_AS(lin.value(-0.1), ConfigError);
    REQUIRE_THROWS_AS(Hamiltonian::shifted_power(0.5), ConfigError);
}

TEST_CASE("speed field is a bounded regularized sign") {
    GridSpec g(AxisSpec{-2.0, 2.0, 81}, AxisSpec{-2.0, 2.0, 81});
    ScalarField u0 = circle_u0(g);
    const SpeedField f = build_speed_field(u0, 0.1);
    REQUIRE(f.sup_bound <= 1.0);
    REQUIRE(f.sup_bound > 0.99);
    for (std::size_t i = 0; i < u0.size(); ++i) {
        REQUIRE(std::abs(f.values[i]) <= 1.0);
        if (u0[i] > 0.0) REQUIRE(f.values[i] > 0.0);
        if (u0[i] < 0.0) REQUIRE(f.values[i] < 0.0);
        if (u0[i] == 0.0) REQUIRE(f.values[i] == 0.0);
    }
    // f(u0 = delta) = 1/sqrt(2)
    GridSpec g1(AxisSpec{0.0, 1.0, 3});
    ScalarField c = sample_function(g1, [](const Point&) { return 0.1; });
    REQUIRE(build_speed_field(c, 0.1).values[0] == Catch::Approx(1.0 / std::sqrt(2.0)));

    REQUIRE_THROWS_AS(build_speed_field(u0, 0.0), ConfigError);
    REQUIRE_THROWS_AS(build_speed_field(u0, -1.0), ConfigError);
}

TEST_CASE("smaller delta sharpens the sign") {
    GridSpec g(AxisSpec{-2.0, 2.0, 101});
    ScalarField u0 = sample_function(g, [](const Point& p) { return p[0]; });
    const SpeedField coarse = build_speed_field(u0, 0.5);
    const SpeedField sharp = build_speed_field(u0, 0.01);
    // away from the zero the sharp one saturates
    const std::size_t i = 75;  // x = 1
    REQUIRE(std::abs(sharp.values[i]) > std::abs(coarse.values[i]));
    REQUIRE(std::abs(sharp.values[i]) > 0.999);
    // Lipschitz estimate grows as delta shrinks (slope at zero ~ 1/delta)
    REQUIRE(sharp.lipschitz_estimate > coarse.lipschitz_estimate);
}

TEST_CASE("audit on the unit circle") {
    GridSpec g(AxisSpec{-2.0, 2.0, 101}, AxisSpec{-2.0, 2.0, 101});
    ScalarField u0 = circle_u0(g);
    ProblemSpec prob = make_problem(u0, 0.1, Hamiltonian::shifted_linear(),
                                    NormSpec::p_norm(2, 2.0));
    const std::vector<double> c_grid{0.05, 0.1, 0.2};
    const AuditReport rep = audit_hypotheses(prob, 0.2, c_grid);

    // independent oracle: analytic gradient 2r over band / grid nodes
    double floor_exact = 1e300, sup_exact = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        const Point p = g.node(i);
        const double two_r = 2.0 * std::hypot(p[0], p[1]);
        sup_exact = std::max(sup_exact, two_r);
        if (std::abs(u0[i]) <= 0.2) floor_exact = std::min(floor_exact, two_r);
    }
    REQUIRE(rep.grad_floor >= 1.6);
    REQUIRE(rep.grad_floor == Catch::Approx(floor_exact).margin(0.05));
    REQUIRE(rep.grad_sup == Catch::Approx(sup_exact).margin(0.1));
    REQUIRE(rep.sign_violations == 0);
    REQUIRE(rep.sup_speed <= 1.0);
    REQUIRE(rep.lipschitz_estimate > 0.0);

    // witness scan oracle: alpha(c) = c * grad_sup - 1 for the linear variant
    REQUIRE(rep.witness_scan.size() == 3);
    for (const auto& [c, alpha] : rep.witness_scan)
        REQUIRE(alpha == Catch::Approx(c * rep.grad_sup - 1.0).margin(1e-12));
    REQUIRE(rep.witness_scale == Catch::Approx(0.05));
    REQUIRE(rep.witness_alpha <= -0.6);
    REQUIRE(rep.pass());
    REQUIRE(rep.h_root == 1.0);
}

TEST_CASE("audit json has one key per hypothesis") {
    GridSpec g(AxisSpec{-2.0, 2.0, 41}, AxisSpec{-2.0, 2.0, 41});
    ProblemSpec prob = make_problem(circle_u0(g), 0.1,
                                    Hamiltonian::shifted_linear(),
                                    NormSpec::p_norm(2, 2.0));
    const std::vector<double> c_grid{0.05};
    const nlohmann::json j = audit_hypotheses(prob, 0.2, c_grid).to_json();
    for (const char* key : {"g1", "g2", "g3", "g4", "g5", "h1", "h2", "h3", "h4", "h5"})
        REQUIRE(j.contains(key));
    REQUIRE(j["pass"].is_boolean());
    REQUIRE(j["g4"]["grad_floor"].get<double>() > 0.0);
}

TEST_CASE("audit rejects an empty band") {
    GridSpec g(AxisSpec{-2.0, 2.0, 41}, AxisSpec{-2.0, 2.0, 41});
    // u0 >= 1 everywhere: no sign change and no band nodes
    ScalarField u0 = sample_function(g, [](const Point& p) {
        return p[0] * p[0] + p[1] * p[1] + 1.0;
    });
    ProblemSpec prob = make_problem(u0, 0.1, Hamiltonian::shifted_linear(),
                                    NormSpec::p_norm(2, 2.0));
    const std::vector<double> c_grid{0.05};
    REQUIRE_THROWS_AS(audit_hypotheses(prob, 0.2, c_grid), ConfigError);
    REQUIRE_THROWS_WITH(audit_hypotheses(prob, 0.2, c_grid),
                        Catch::Matchers::ContainsSubstring("no interface in domain"));
}

TEST_CASE("audit flags superlinear growth") {
    GridSpec g(AxisSpec{-2.0, 2.0, 41}, AxisSpec{-2.0, 2.0, 41});
    ProblemSpec prob = make_problem(circle_u0(g), 0.1,
                                    Hamiltonian::shifted_power(2.0),
                                    NormSpec::p_norm(2, 2.0));
    const std::vector<double> c_grid{0.05};
    const AuditReport rep = audit_hypotheses(prob, 0.2, c_grid);
    REQUIRE(rep.h3.warn);
    REQUIRE_FALSE(std::isfinite(rep.growth_constant));
    // witness alpha for the power variant: (c*grad_sup)^2 - 1
    REQUIRE(rep.witness_alpha ==
            Catch::Approx(std::pow(0.05 * rep.grad_sup, 2.0) - 1.0).margin(1e-12));
}

TEST_CASE("audit scale validation") {
    GridSpec g(AxisSpec{-2.0, 2.0, 41}, AxisSpec{-2.0, 2.0, 41});
    ProblemSpec prob = make_problem(circle_u0(g), 0.1,
                                    Hamiltonian::shifted_linear(),
                                    NormSpec::p_norm(2, 2.0));
    std::vector<double> bad{1.5};
    REQUIRE_THROWS_AS(audit_hypotheses(prob, 0.2, bad), ConfigError);
    std::vector<double> empty;
    REQUIRE_THROWS_AS(audit_hypotheses(prob, 0.2, empty), ConfigError);
}
