#include <doctest.h>

#include <cmath>
#include <string>

#include "crn/error.hpp"
#include "crn/rate_eq.hpp"
#include "oracles.hpp"

using crn::rate_eq::integrate_rate;
using crn::rate_eq::rate_rhs;

namespace {

double decay_error(double dt) {
    const auto traj = integrate_rate(oracle::decay(), {1.0}, 1.0, dt);
    return std::abs(traj.states.back()[0] - std::exp(-1.0));
}

}  // namespace

TEST_CASE("HIV right-hand side") {
    const auto d = rate_rhs(oracle::hiv(), crn::ClassicalState{100, 10, 50});
    CHECK(d[0] == doctest::Approx(-10.0).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(d[2] == doctest::Approx(-20.0).epsilon(1e-14));
}

TEST_CASE("right-hand side vanishes when every source is nonempty and x is zero") {
    const auto d = rate_rhs(crn::dsl::parse_network("species A, B\n"
                                                    "reaction r: A + B -> 2 B @ 3\n"
                                                    "reaction s: B -> A @ 1\n"),
                            crn::ClassicalState{0.0, 0.0});
    CHECK(d == std::vector<double>{0.0, 0.0});
}

TEST_CASE("decay right-hand side") {
    CHECK(rate_rhs(oracle::decay(0.7), crn::ClassicalState{3.0})[0] == doctest::Approx(-2.1));
    CHECK_THROWS_AS(rate_rhs(oracle::decay(), crn::ClassicalState{1.0, 2.0}), crn::PreconditionError);
}

TEST_CASE("right-hand side is homogeneous in the rate constants") {
    oracle::Gen g(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto net = g.network(g.uint(1, 3), g.uint(1, 5), 2);
        const double lambda = std::ldexp(1.0, static_cast<int>(g.uint(0, 8)) - 4);
        std::vector<crn::Reaction> scaled = net.reactions();
        for (auto& rx : scaled) rx.rate *= lambda;
        const crn::StochasticReactionNetwork net2(net.species(), scaled);
        std::vector<double> x(net.k());
        for (auto& v : x) v = g.real(0.0, 5.0);
        const auto a = rate_rhs(net, x);
        const auto b = rate_rhs(net2, x);
        // Power-of-two scaling is exact in floating point.
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(b[i] == a[i] * lambda);
    }
}

TEST_CASE("decay against the exponential") {
    CHECK(decay_error(1e-3) <= 1e-9);
    const double ratio = decay_error(0.1) / decay_error(0.05);
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 32.0);
    const double ratio2 = decay_error(0.02) / decay_error(0.01);
    CHECK(ratio2 >= 8.0);
    CHECK(ratio2 <= 32.0);
}

TEST_CASE("empty reaction list gives a constant trajectory") {
    const crn::StochasticReactionNetwork net(crn::SpeciesTable({"A", "B"}), {});
    const auto traj = integrate_rate(net, {1.5, 0.25}, 2.0, 0.1);
    for (const auto& s : traj.states) CHECK(s == std::vector<double>{1.5, 0.25});
}

TEST_CASE("constant production grows linearly") {
    const auto net = crn::dsl::parse_network("species A\nreaction birth: 0 -> A @ 0.75");
    const auto traj = integrate_rate(net, {0.0}, 2.0);
    CHECK(traj.times.back() == 2.0);
    CHECK(traj.states.back()[0] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("time grid") {
    const auto traj = integrate_rate(oracle::decay(), {1.0}, 1.0, 0.3);
    REQUIRE(traj.times.size() == 5);
    CHECK(traj.times[0] == 0.0);
    CHECK(traj.times[3] == doctest::Approx(0.9));
    CHECK(traj.times[4] == 1.0);
    for (std::size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);

    // The shortened last step still lands on the closed form to RK4 accuracy.
    const auto fine = integrate_rate(oracle::decay(), {1.0}, 1.0, 0.3e-2);
    CHECK(std::abs(fine.states.back()[0] - std::exp(-1.0)) <= 1e-9);

    const auto sparse = integrate_rate(oracle::decay(), {1.0}, 1.0, 1e-3, 100);
    CHECK(sparse.times.size() == 11);
    CHECK(sparse.times.back() == 1.0);
    CHECK_THROWS_AS(integrate_rate(oracle::decay(), {1.0}, 0.0, 1e-3), crn::PreconditionError);
    CHECK_THROWS_AS(integrate_rate(oracle::decay(), {1.0}, 1.0, -1e-3), crn::PreconditionError);
}

TEST_CASE("blow-up names the time") {
    const auto net = crn::dsl::parse_network("species A\nreaction boom: 2 A -> 3 A @ 1");
    try {
        integrate_rate(net, {10.0}, 1.0, 1e-3);
        FAIL("expected a numeric error");
    } catch (const crn::NumericError& e) {
        const std::string what = e.what();
        CHECK(what.find("t = ") != std::string::npos);
        CHECK(what.find("A") != std::string::npos);
    }
}

TEST_CASE("undershoot is flagged, not clamped") {
    const auto net = crn::dsl::parse_network("species A\nreaction pair: 2 A -> 0 @ 1");
    const auto coarse = integrate_rate(net, {10.0}, 1.0, 0.5);
    CHECK(coarse.negative_warning);
    CHECK(coarse.states[1][0] < 0.0);
    CHECK_FALSE(integrate_rate(net, {10.0}, 1.0, 1e-3).negative_warning);
}
