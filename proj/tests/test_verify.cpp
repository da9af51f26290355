#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <string>

#include "crn/error.hpp"
#include "crn/verify.hpp"
#include "oracles.hpp"

using crn::Truncation;
namespace verify = crn::verify;

TEST_CASE("generator check on HIV") {
    const auto rep = verify::check_generator(oracle::hiv(), Truncation::total_count(15));
    CHECK(rep.passed);
    CHECK(rep.failures.empty());
    CHECK(rep.residuals.at("max_abs_column_sum") <= 1e-12);
    CHECK(rep.residuals.at("operator_form_max_abs_diff") <= 1e-12);
    CHECK(rep.info.at("states") == std::to_string(oracle::binomial(18, 3)));
}

TEST_CASE("generator check with integer entries is exact") {
    const auto net = crn::dsl::parse_network("species A, B\nreaction r: A -> B @ 1");
    const auto rep = verify::check_generator(net, Truncation::total_count(5));
    CHECK(rep.passed);
    CHECK(rep.residuals.at("max_abs_column_sum") == 0.0);
    CHECK(rep.residuals.at("operator_form_max_abs_diff") == 0.0);
    CHECK(rep.residuals.at("negative_offdiagonal") == 0.0);
}

TEST_CASE("corrupted generator is caught and located") {
    const auto net = oracle::hiv();
    auto space = std::make_shared<const crn::StateSpace>(3, Truncation::total_count(6));
    const auto good = crn::build_hamiltonian(net, space);
    auto bad = good.matrix();
    // Flip the sign of the first off-diagonal entry of column 7.
    const std::size_t col = 7;
    std::size_t p = bad.col_ptr[col];
    while (bad.row[p] == col) ++p;
    const std::size_t row = bad.row[p];
    bad.value[p] = -bad.value[p];
    const auto rep = verify::check_generator(net, crn::Generator(space, bad));
    CHECK_FALSE(rep.passed);
    CHECK(rep.residuals.at("negative_offdiagonal") > 0.0);
    CHECK(rep.residuals.at("max_abs_column_sum") > 1e-12);
    CHECK(rep.residuals.at("operator_form_max_abs_diff") > 1e-12);
    const auto& where = rep.info.at("negative_offdiagonal_at");
    CHECK(where.find("row " + std::to_string(row)) != std::string::npos);
    CHECK(where.find("column " + std::to_string(col)) != std::string::npos);
    CHECK(rep.info.at("worst_column").rfind(std::to_string(col) + " ", 0) == 0);
}

TEST_CASE("operator form agrees with the direct build on random networks") {
    oracle::Gen g(61);
    for (int trial = 0; trial < 40; ++trial) {
        const auto k = g.uint(1, 3);
        const auto net = g.network(k, g.uint(1, 5), 2);
        const crn::StateSpace space(k, Truncation::total_count(9 - 2 * k));
        const auto direct = crn::build_hamiltonian(net, space);
        CHECK(verify::max_abs_difference(direct.matrix(), verify::assemble_operator_form(net, space)) <= 1e-12);
    }
}

TEST_CASE("expected-value theorem on pure death") {
    const auto rep = verify::check_expected_value_theorem(oracle::decay(), crn::fock::pure_state({5}),
                                                          Truncation::total_count(5));
    CHECK(rep.passed);
    CHECK(rep.info.at("matching_convention") == "target-minus-source");
    CHECK(rep.info.at("difference_scheme") == "central");
    CHECK(rep.residuals.at("residual_h") <= 1e-6);
    // d<N>/dt = -5 exp(-t); the opposite sign misses by twice that.
    CHECK(rep.residuals.at("residual_source_minus_target") ==
          doctest::Approx(10.0 * std::exp(-0.5)).epsilon(1e-6));
    const double ratio = rep.residuals.at("halving_ratio");
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
    CHECK(verify::resolve_sign_convention() == crn::SignConvention::target_minus_source);
}

TEST_CASE("expected-value theorem on an empty network") {
    const crn::StochasticReactionNetwork none(crn::SpeciesTable({"A"}), {});
    const auto rep = verify::check_expected_value_theorem(none, crn::fock::pure_state({2}),
                                                          Truncation::total_count(4));
    CHECK(rep.passed);
    CHECK(rep.residuals.at("residual_source_minus_target") == 0.0);
    CHECK(rep.residuals.at("residual_target_minus_source") == 0.0);
}

TEST_CASE("expected-value theorem on HIV from coherent data") {
    const auto cap = Truncation::per_species_max({45, 20, 30});
    const auto psi0 = crn::fock::coherent_state({10.0, 1.0, 5.0}, cap);
    REQUIRE(psi0.tail_mass < 1e-10);
    // Renormalise the truncated state so it is a mixed state on the box.
    const auto mixed = psi0.series.scaled(1.0 / crn::fock::sum_functional(psi0.series));
    for (double t : {0.0, 0.5}) {
        verify::TheoremCheckOptions opt;
        opt.t = t;
        const auto rep = verify::check_expected_value_theorem(oracle::hiv(), mixed, cap, opt);
        CAPTURE(t);
        CHECK(rep.passed);
        CHECK(rep.info.at("matching_convention") == "target-minus-source");
        CHECK(rep.residuals.at("residual_h") <= 1e-6);
    }
}

TEST_CASE("coherent states obey the rate equation") {
    const auto decay = verify::check_coherent_rate_match(oracle::decay(), {2.0}, Truncation::per_species_max({60}));
    CHECK(decay.passed);
    CHECK(decay.info.at("convention") == "target-minus-source");

    // All sources nonempty except the production term: only production survives at c = 0.
    const auto net = crn::dsl::parse_network("species A, B\n"
                                             "reaction make: 0 -> A @ 2\n"
                                             "reaction conv: A -> B @ 1\n"
                                             "reaction pair: A + B -> 0 @ 4\n");
    const auto zero = verify::check_coherent_rate_match(net, {0.0, 0.0}, Truncation::total_count(6));
    CHECK(zero.passed);
    CHECK(zero.residuals.at("expected_value_rhs_vs_rate_rhs") == 0.0);

    const auto hiv = verify::check_coherent_rate_match(oracle::hiv(), {10.0, 1.0, 5.0},
                                                       Truncation::per_species_max({60, 60, 60}));
    CHECK(hiv.passed);
    CHECK(hiv.residuals.at("expected_value_rhs_vs_rate_rhs") <= 1e-8);
    CHECK(hiv.residuals.at("master_derivative_vs_rate_rhs") <= 1e-8);

    // A cap that cuts into the distribution is reported, not hidden.
    const auto tight = verify::check_coherent_rate_match(oracle::hiv(), {10.0, 1.0, 5.0},
                                                         Truncation::per_species_max({12, 4, 8}));
    CHECK_FALSE(tight.passed);
}

TEST_CASE("coherence preservation") {
    const auto decay = verify::check_coherence_preservation(oracle::decay(), {2.0}, {1.0},
                                                            Truncation::per_species_max({40}));
    CHECK(decay.passed);
    CHECK(decay.residuals.at("max_coeff_diff") <= 1e-6);

    const auto bd = verify::check_coherence_preservation(oracle::birth_death(), {1.0}, {0.5, 1.0, 2.0, 8.0},
                                                         Truncation::per_species_max({40}));
    CHECK(bd.passed);

    const auto chain = crn::dsl::parse_network("species A, B\n"
                                               "reaction in: 0 -> A @ 2\n"
                                               "reaction convert: A -> B @ 1\n"
                                               "reaction out: B -> 0 @ 0.5\n");
    CHECK(verify::check_coherence_preservation(chain, {0.5, 3.0}, {0.3, 1.5},
                                               Truncation::per_species_max({30, 30}))
              .passed);

    try {
        verify::check_coherence_preservation(oracle::hiv(), {1.0, 1.0, 1.0}, {1.0},
                                             Truncation::total_count(10));
        FAIL("expected a precondition error");
    } catch (const crn::PreconditionError& e) {
        CHECK(std::string(e.what()).find("gamma") != std::string::npos);
    }
}

TEST_CASE("SSA agrees with the master equation") {
    verify::SsaCheckOptions opt;
    const auto decay = verify::check_ssa_vs_master(oracle::decay(), {10}, Truncation::per_species_max({10}), opt);
    CHECK(decay.passed);
    CHECK(decay.residuals.at("worst_abs_z") <= 3.0);
    CHECK(decay.residuals.at("boundary_mass") == 0.0);

    verify::SsaCheckOptions hiv_opt;
    hiv_opt.t_end = 5.0;
    hiv_opt.sample_dt = 0.5;
    const auto hiv = verify::check_ssa_vs_master(oracle::hiv(), {10, 0, 5}, Truncation::total_count(40), hiv_opt);
    CHECK(hiv.passed);

    verify::SsaCheckOptions one;
    one.n_traj = 1;
    one.seed = 99;
    const auto a = verify::check_ssa_vs_master(oracle::decay(), {10}, Truncation::per_species_max({10}), one);
    const auto b = verify::check_ssa_vs_master(oracle::decay(), {10}, Truncation::per_species_max({10}), one);
    CHECK(a.residuals == b.residuals);
    CHECK(a.info == b.info);
    CHECK(a.passed == b.passed);
    CHECK(verify::render_json({a}) == verify::render_json({b}));
}

TEST_CASE("JSON rendering") {
    const auto rep = verify::check_generator(oracle::decay(), Truncation::per_species_max({4}));
    const auto doc = nlohmann::json::parse(verify::render_json({rep}));
    CHECK(doc.at("all_passed") == true);
    const auto& r = doc.at("reports").at(0);
    CHECK(r.at("check") == "generator");
    CHECK(r.at("passed") == true);
    CHECK(r.at("inputs_digest").get<std::string>().size() == 16);
    CHECK(r.at("residuals").contains("max_abs_column_sum"));
    CHECK(r.at("tolerances").at("max_abs_column_sum") == 1e-12);

    verify::Report failing = rep;
    failing.gate("made_up", 2.0, 1.0);
    CHECK(nlohmann::json::parse(verify::render_json({rep, failing})).at("all_passed") == false);

    // Digest depends on the inputs.
    CHECK(verify::inputs_digest(oracle::decay(), "x") != verify::inputs_digest(oracle::decay(2.0), "x"));
    CHECK(verify::inputs_digest(oracle::decay(), "x") == verify::inputs_digest(oracle::decay(), "x"));
}
