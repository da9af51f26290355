#include <doctest.h>

#include <cmath>
#include <limits>

#include "crn/core_model.hpp"
#include "crn/error.hpp"
#include "oracles.hpp"

using crn::Count;
using crn::MultiIndex;

TEST_CASE("falling_power examples") {
    CHECK(crn::falling_power(5, 2) == 20);
    CHECK(crn::falling_power(3, 5) == 0);
    CHECK(crn::falling_power(7, 0) == 1);
    CHECK(crn::falling_power(0, 0) == 1);
    CHECK(crn::falling_power(0, 1) == 0);
}

TEST_CASE("falling_power counts injective maps") {
    for (unsigned n = 0; n <= 6; ++n) {
        for (unsigned p = 0; p <= 6; ++p) {
            CAPTURE(n);
            CAPTURE(p);
            CHECK(crn::falling_power(n, p) == oracle::count_injections(n, p));
        }
    }
}

TEST_CASE("falling_power overflow is reported") {
    const Count big = Count{1} << 32;
    CHECK(crn::falling_power(big, 2) == big * (big - 1));
    CHECK_THROWS_AS(crn::falling_power(big, 3), crn::NumericError);
    CHECK(crn::falling_power(std::numeric_limits<Count>::max(), 1) ==
          std::numeric_limits<Count>::max());
    // p > n vanishes even when the running product would overflow first.
    CHECK(crn::falling_power(40, 41) == 0);
}

TEST_CASE("multi_falling_power examples") {
    CHECK(crn::multi_falling_power({2, 1}, {1, 1}) == 2);
    CHECK(crn::multi_falling_power({4, 4}, {0, 0}) == 1);
    CHECK(crn::multi_falling_power({1, 3}, {2, 1}) == 0);
    CHECK_THROWS_AS(crn::multi_falling_power({1, 2}, {1}), crn::PreconditionError);
}

TEST_CASE("multi_falling_power is the product of coordinate falling powers") {
    oracle::Gen g(11);
    for (int trial = 0; trial < 500; ++trial) {
        const auto k = g.uint(1, 4);
        const auto l = g.multi_index(k, 8);
        const auto m = g.multi_index(k, 8);
        Count product = 1;
        for (std::size_t i = 0; i < k; ++i) product *= crn::falling_power(l[i], m[i]);
        CHECK(crn::multi_falling_power(l, m) == product);

        // Small entries: against brute-force counting directly.
        const auto ls = g.multi_index(k, 5);
        const auto ms = g.multi_index(k, 4);
        Count counted = 1;
        for (std::size_t i = 0; i < k; ++i) {
            counted *= oracle::count_injections(static_cast<unsigned>(ls[i]),
                                                static_cast<unsigned>(ms[i]));
        }
        CHECK(crn::multi_falling_power(ls, ms) == counted);
    }
}

TEST_CASE("multi_falling_power with a vanishing factor does not overflow") {
    const Count big = Count{1} << 40;
    CHECK(crn::multi_falling_power({big, 1}, {2, 2}) == 0);
    CHECK_THROWS_AS(crn::multi_falling_power({big, big}, {1, 2}), crn::NumericError);
}

TEST_CASE("multi_power examples") {
    CHECK(crn::multi_power(crn::ClassicalState{2.0, 3.0}, {1, 2}) == 18.0);
    CHECK(crn::multi_power(crn::ClassicalState{0.0, 5.0}, {0, 1}) == 5.0);
    CHECK(crn::multi_power(crn::ClassicalState{100, 10, 50}, {1, 0, 1}) == 5000.0);
    CHECK(crn::multi_power(crn::ClassicalState{0.0}, {0}) == 1.0);
    CHECK_THROWS_AS(crn::multi_power(crn::ClassicalState{1.0}, {1, 1}), crn::PreconditionError);
}

TEST_CASE("multi_power is multiplicative in x") {
    oracle::Gen g(12);
    for (int trial = 0; trial < 500; ++trial) {
        const auto k = g.uint(1, 4);
        std::vector<double> x(k), y(k), xy(k);
        for (std::size_t i = 0; i < k; ++i) {
            x[i] = g.real(0.0, 3.0);
            y[i] = g.real(0.0, 3.0);
            xy[i] = x[i] * y[i];
        }
        const auto m = g.multi_index(k, 5);
        const double lhs = crn::multi_power(x, m) * crn::multi_power(y, m);
        const double rhs = crn::multi_power(xy, m);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("MultiIndex arithmetic") {
    const MultiIndex a{2, 0, 1};
    const MultiIndex b{1, 0, 1};
    CHECK(a + b == MultiIndex{3, 0, 2});
    CHECK(a.checked_minus(b) == MultiIndex{1, 0, 0});
    CHECK_FALSE(b.checked_minus(a).has_value());
    CHECK(a.dominates(b));
    CHECK_FALSE(b.dominates(a));
    CHECK(a.total() == 3);
    CHECK_THROWS_AS(MultiIndex{std::numeric_limits<Count>::max()} + MultiIndex{1}, crn::NumericError);
    CHECK_THROWS_AS(a + MultiIndex{1}, crn::PreconditionError);
}

TEST_CASE("NetChange") {
    const auto d = crn::NetChange::between({1, 0, 1}, {0, 1, 0});
    CHECK(d == crn::NetChange({-1, 1, -1}));
    CHECK(d.apply({3, 0, 2}) == MultiIndex{2, 1, 1});
    CHECK_FALSE(d.apply({0, 0, 2}).has_value());
}

TEST_CASE("SpeciesTable validation") {
    CHECK_THROWS_AS(crn::SpeciesTable(std::vector<std::string>{}), crn::PreconditionError);
    CHECK_THROWS_AS(crn::SpeciesTable({"A", "A"}), crn::PreconditionError);
    CHECK_THROWS_AS(crn::SpeciesTable({""}), crn::PreconditionError);
    const crn::SpeciesTable t({"H", "I", "V"});
    CHECK(t.size() == 3);
    CHECK(t.find("V") == 2u);
    CHECK_FALSE(t.find("X").has_value());
}

TEST_CASE("network validation") {
    const crn::SpeciesTable s({"A", "B"});
    CHECK_THROWS_AS(crn::StochasticReactionNetwork(s, {{"r", {1, 0}, {0, 1}, 0.0}}),
                    crn::PreconditionError);
    CHECK_THROWS_AS(crn::StochasticReactionNetwork(s, {{"r", {1, 0}, {0, 1}, -2.0}}),
                    crn::PreconditionError);
    CHECK_THROWS_AS(
        crn::StochasticReactionNetwork(s, {{"r", {1, 0}, {0, 1}, std::numeric_limits<double>::infinity()}}),
        crn::PreconditionError);
    CHECK_THROWS_AS(crn::StochasticReactionNetwork(s, {{"r", {1}, {0, 1}, 1.0}}), crn::PreconditionError);
    CHECK_THROWS_AS(
        crn::StochasticReactionNetwork(s, {{"r", {1, 0}, {0, 1}, 1.0}, {"r", {0, 1}, {1, 0}, 1.0}}),
        crn::PreconditionError);

    // No-op reactions and parallel edges are legal.
    const crn::StochasticReactionNetwork net(
        s, {{"noop", {1, 1}, {1, 1}, 1.0}, {"p", {1, 0}, {0, 1}, 1.0}, {"q", {1, 0}, {0, 1}, 2.0}});
    CHECK(net.reactions().size() == 3);
    CHECK(net.complexes() == std::vector<MultiIndex>{{0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("ClassicalState rejects negative and non-finite entries") {
    CHECK_THROWS_AS(crn::ClassicalState({1.0, -0.5}), crn::PreconditionError);
    CHECK_THROWS_AS(crn::ClassicalState({std::nan("")}), crn::PreconditionError);
    CHECK(crn::ClassicalState({0.0, 2.5})[1] == 2.5);
}

TEST_CASE("graded-lex enumeration") {
    using V = std::vector<MultiIndex>;
    CHECK(crn::enumerate_graded_lex(1, crn::Truncation::per_species_max({3}), 100) ==
          V{{0}, {1}, {2}, {3}});
    CHECK(crn::enumerate_graded_lex(2, crn::Truncation::total_count(2), 100) ==
          V{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}});
    CHECK(crn::enumerate_graded_lex(3, crn::Truncation::total_count(20), 10'000).size() ==
          oracle::binomial(23, 3));
    CHECK_THROWS_AS(crn::enumerate_graded_lex(3, crn::Truncation::total_count(20), 1770),
                    crn::StateSpaceLimitError);

    // Box and simplex together.
    crn::Truncation both{std::vector<Count>{1, 3}, Count{2}};
    CHECK(crn::enumerate_graded_lex(2, both, 100) == V{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}});
    CHECK_THROWS_AS(crn::Truncation{}.validate(2), crn::PreconditionError);
}
