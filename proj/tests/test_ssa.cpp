#include <doctest.h>

#include <cmath>

#include "crn/error.hpp"
#include "crn/rng.hpp"
#include "crn/ssa.hpp"
#include "oracles.hpp"

using crn::MultiIndex;

TEST_CASE("SplitMix64 and xoshiro256** reference outputs") {
    // First outputs of the reference C implementations.
    crn::SplitMix64 sm(1234567);
    CHECK(sm.next() == 6457827717110365317ULL);
    CHECK(sm.next() == 3203168211198807973ULL);
    CHECK(sm.next() == 9817491932198370423ULL);

    crn::Xoshiro256StarStar x(0);
    CHECK(x() == 11091344671253066420ULL);
    CHECK(x() == 13793997310169335082ULL);

    crn::Xoshiro256StarStar u(99);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("streams are distinct and reproducible") {
    auto a = crn::Xoshiro256StarStar::stream(5, 0);
    auto b = crn::Xoshiro256StarStar::stream(5, 1);
    auto a2 = crn::Xoshiro256StarStar::stream(5, 0);
    const auto first = a();
    CHECK(first == a2());
    CHECK(first != b());
}

TEST_CASE("propensities") {
    const auto net = crn::dsl::parse_network("species H, I, V\n"
                                             "reaction gamma: H + V -> I @ 0.002\n"
                                             "reaction pair: 2 V -> 0 @ 1\n"
                                             "reaction alpha: 0 -> H @ 3\n");
    const auto a = crn::ssa::propensities(net, {3, 0, 2});
    CHECK(a[0] == doctest::Approx(6 * 0.002).epsilon(1e-15));
    CHECK(a[1] == 2.0);
    CHECK(a[2] == 3.0);
    const auto b = crn::ssa::propensities(net, {0, 4, 1});
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 0.0);
    CHECK(b[2] == 3.0);
    CHECK_THROWS_AS(crn::ssa::propensities(net, {1, 1}), crn::PreconditionError);
}

TEST_CASE("no reactions: held to the end") {
    const crn::StochasticReactionNetwork net(crn::SpeciesTable({"A"}), {});
    const auto tr = crn::ssa::simulate(net, {4}, 3.0, std::uint64_t{1});
    CHECK(tr.jump_times.empty());
    CHECK(tr.absorbed);
    CHECK(tr.state_at(2.9) == MultiIndex{4});
    CHECK(tr.t_end == 3.0);
}

TEST_CASE("single decay jump and extinction time") {
    const auto net = oracle::decay();
    double total = 0.0;
    const int runs = 10'000;
    for (int i = 0; i < runs; ++i) {
        const auto tr = crn::ssa::simulate(net, {1}, 1e6, static_cast<std::uint64_t>(i));
        REQUIRE(tr.jump_times.size() == 1);
        CHECK(tr.states[0] == MultiIndex{0});
        CHECK(tr.absorbed);
        CHECK(tr.state_at(tr.jump_times[0]) == MultiIndex{0});
        CHECK(tr.state_at(std::nextafter(tr.jump_times[0], 0.0)) == MultiIndex{1});
        total += tr.jump_times[0];
    }
    const double mean = total / runs;
    CHECK(std::abs(mean - 1.0) <= 3.0 / std::sqrt(runs));
}

TEST_CASE("trajectories are well formed") {
    const auto net = oracle::hiv();
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto tr = crn::ssa::simulate(net, {10, 0, 5}, 5.0, seed);
        MultiIndex prev = tr.initial;
        double t_prev = 0.0;
        for (std::size_t j = 0; j < tr.jump_times.size(); ++j) {
            CHECK(tr.jump_times[j] > t_prev);
            CHECK(tr.jump_times[j] <= 5.0);
            const auto& rx = net.reactions()[tr.reactions[j]];
            CHECK(prev.dominates(rx.source));
            CHECK(rx.net_change().apply(prev) == tr.states[j]);
            prev = tr.states[j];
            t_prev = tr.jump_times[j];
        }
    }
    const auto a = crn::ssa::simulate(net, {10, 0, 5}, 5.0, std::uint64_t{9});
    const auto b = crn::ssa::simulate(net, {10, 0, 5}, 5.0, std::uint64_t{9});
    CHECK(a.jump_times == b.jump_times);
    CHECK(a.states == b.states);
    CHECK_THROWS_AS(crn::ssa::simulate(net, {1, 1, 1}, 0.0, std::uint64_t{1}), crn::PreconditionError);
}

TEST_CASE("sample grid") {
    CHECK(crn::ssa::sample_grid(1.0, 0.25) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    const auto g = crn::ssa::sample_grid(1.0, 0.3);
    CHECK(g.size() == 5);
    CHECK(g.back() == 1.0);
    CHECK_THROWS_AS(crn::ssa::sample_grid(1.0, 0.0), crn::PreconditionError);
}

TEST_CASE("single-trajectory ensemble is that trajectory") {
    const auto net = oracle::hiv();
    const auto stats = crn::ssa::ensemble(net, {10, 0, 5}, 2.0, 0.5, 1, 17);
    auto rng = crn::Xoshiro256StarStar::stream(17, 0);
    const auto same = crn::ssa::simulate(net, {10, 0, 5}, 2.0, rng);
    for (std::size_t i = 0; i < stats.times.size(); ++i) {
        const auto& l = same.state_at(stats.times[i]);
        for (std::size_t s = 0; s < 3; ++s) {
            CHECK(stats.mean[i][s] == static_cast<double>(l[s]));
            CHECK(stats.variance[i][s] == 0.0);
        }
    }
    CHECK(stats.n_traj == 1);
    CHECK(stats.seed == 17);
    CHECK(stats.rng == crn::Xoshiro256StarStar::name);
}

TEST_CASE("decay ensemble mean") {
    const auto stats = crn::ssa::ensemble(oracle::decay(), {20}, 2.0, 0.25, 10'000, 3);
    for (std::size_t i = 0; i < stats.times.size(); ++i) {
        const double want = 20.0 * std::exp(-stats.times[i]);
        const double se = std::sqrt(stats.variance[i][0] / 10'000.0);
        if (se == 0.0) {
            CHECK(stats.mean[i][0] == want);
        } else {
            CHECK(std::abs(stats.mean[i][0] - want) <= 3.0 * se);
        }
        CHECK(stats.variance[i][0] >= 0.0);
    }
}

TEST_CASE("ensembles are reproducible and independent of thread count") {
    const auto net = oracle::hiv();
    const auto a = crn::ssa::ensemble(net, {10, 0, 5}, 3.0, 0.5, 500, 11);
    const auto b = crn::ssa::ensemble(net, {10, 0, 5}, 3.0, 0.5, 500, 11);
    CHECK(a == b);
    for (int threads : {2, 3, 7}) {
        CHECK(crn::ssa::ensemble(net, {10, 0, 5}, 3.0, 0.5, 500, 11, crn::Exec{threads}) == a);
    }
    CHECK_FALSE(crn::ssa::ensemble(net, {10, 0, 5}, 3.0, 0.5, 500, 12) == a);
    for (const auto& row : a.variance)
        for (double v : row) CHECK(v >= 0.0);
    CHECK_THROWS_AS(crn::ssa::ensemble(net, {10, 0, 5}, 3.0, 0.5, 0, 11), crn::PreconditionError);
}
