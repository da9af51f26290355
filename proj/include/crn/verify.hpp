#pragma once

// Mechanical checks tying the three engines together. Each check is a pure
// function returning a structured report; nothing here prints.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "crn/core_model.hpp"
#include "crn/fock.hpp"
#include "crn/master_eq.hpp"

namespace crn::verify {

struct Report {
    std::string check;
    std::string inputs_digest;
    bool passed = true;
    std::map<std::string, double> residuals;
    std::map<std::string, double> tolerances;
    std::map<std::string, std::string> info;
    std::vector<std::string> failures;

    /// Records residual and tolerance; fails the report when value > tolerance
    /// (or value is NaN).
    void gate(const std::string& name, double value, double tolerance);
    void fail(std::string why);
};

/// JSON document {"all_passed": bool, "reports": [...]}.
std::string render_json(const std::vector<Report>& reports);

/// 64-bit FNV-1a of the canonical network text and a parameter string, as hex.
std::string inputs_digest(const StochasticReactionNetwork& net, const std::string& params);

/// Generator assembled column by column from the operator expression
/// sum_tau r(tau) (a†^{t} - a†^{s}) a^{s} applied to each basis monomial, with
/// the same clamping rule as build_hamiltonian. Independent of the direct
/// matrix-element formula.
CscMatrix assemble_operator_form(const StochasticReactionNetwork& net, const StateSpace& space);

/// Largest entrywise difference between two matrices of equal size.
double max_abs_difference(const CscMatrix& a, const CscMatrix& b);

/// Off-diagonals >= 0, diagonal <= 0, |column sums| <= 1e-12, and agreement
/// with the operator form to 1e-12.
Report check_generator(const StochasticReactionNetwork& net, const Generator& h);
Report check_generator(const StochasticReactionNetwork& net, const Truncation& cap, Exec exec = {});

struct TheoremCheckOptions {
    double t = 0.5;
    double h = 1e-4;
    double tolerance = 1e-6;
    Exec exec;
};

/// Finite-difference derivative of <N psi(t)> against expected_value_rhs under
/// both sign conventions, at steps h and h/2. Central differences when
/// t >= h, else the second-order one-sided formula. Reports which convention
/// matches (info["matching_convention"]).
Report check_expected_value_theorem(const StochasticReactionNetwork& net,
                                    const fock::FockSeries& psi0, const Truncation& cap,
                                    const TheoremCheckOptions& options = {});

/// The sign convention confirmed by the finite-difference check on the pure
/// death network A -> 0 @ 1 from z^5 at t = 0.5. Computed once.
SignConvention resolve_sign_convention();

/// d<N psi>/dt at a coherent state versus rate_rhs(net, c), both through
/// expected_value_rhs (resolved convention) and through <N H psi_c>.
Report check_coherent_rate_match(const StochasticReactionNetwork& net, const ClassicalState& c,
                                 const Truncation& cap, Exec exec = {});

/// Single-species-complex networks keep coherent states coherent: evolves
/// psi_c and compares with coherent_state(x(t)) at each time. Throws
/// PreconditionError naming the first reaction with a complex of size >= 2.
Report check_coherence_preservation(const StochasticReactionNetwork& net, const ClassicalState& c,
                                    const std::vector<double>& times, const Truncation& cap,
                                    Exec exec = {});

struct SsaCheckOptions {
    double t_end = 2.0;
    double sample_dt = 0.2;
    std::size_t n_traj = 10'000;
    std::uint64_t seed = 1;
    double z_limit = 3.0;
    Exec exec;
};

/// Ensemble means against master-equation expected values on a shared time grid.
Report check_ssa_vs_master(const StochasticReactionNetwork& net, const MultiIndex& l0,
                           const Truncation& cap, const SsaCheckOptions& options = {});

}  // namespace crn::verify
