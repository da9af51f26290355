#pragma once

// Truncated master equation: enumerate a finite set of pure states, assemble
// the generator H with H_{l'l} = sum_tau r(tau) l^{s(tau) falling}
// (delta_{l', l + t - s} - delta_{l' l}), and evolve mixed states by
// uniformization.
//
// Transitions that would leave the truncated space are dropped together with
// their loss term, so H stays infinitesimal stochastic (off-diagonals >= 0,
// columns sum to zero) and probability is conserved. Pick caps so the mass
// on boundary states stays negligible.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "crn/core_model.hpp"
#include "crn/fock.hpp"
#include "crn/kernels.hpp"

namespace crn {

inline constexpr std::size_t kDefaultStateLimit = 2'000'000;

/// Graded-lexicographic enumeration of the states inside a truncation; the
/// zero state is ordinal 0.
class StateSpace {
public:
    StateSpace(std::size_t k, Truncation cap, std::size_t limit = kDefaultStateLimit);

    std::size_t k() const noexcept { return k_; }
    std::size_t size() const noexcept { return states_.size(); }
    const Truncation& cap() const noexcept { return cap_; }
    const std::vector<MultiIndex>& states() const noexcept { return states_; }
    const MultiIndex& state(std::size_t ordinal) const { return states_.at(ordinal); }
    std::optional<std::size_t> ordinal(const MultiIndex& l) const;

    /// Dense coefficient vector in ordinal order. Throws PreconditionError
    /// listing indices of psi that lie outside the space.
    std::vector<double> to_dense(const fock::FockSeries& psi) const;
    fock::FockSeries from_dense(std::span<const double> v) const;

private:
    std::size_t k_;
    Truncation cap_;
    std::vector<MultiIndex> states_;
    std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> index_;
};

StateSpace enumerate_states(std::size_t k, const Truncation& cap,
                            std::size_t limit = kDefaultStateLimit);

/// Sparse generator over a state space. Column j holds the rates out of state j.
class Generator {
public:
    Generator(std::shared_ptr<const StateSpace> space, CscMatrix matrix);

    const StateSpace& space() const noexcept { return *space_; }
    std::shared_ptr<const StateSpace> space_ptr() const noexcept { return space_; }
    const CscMatrix& matrix() const noexcept { return csc_; }
    const CsrMatrix& matrix_rows() const noexcept { return csr_; }

    double entry(std::size_t row, std::size_t col) const;
    /// max_l |H_ll|.
    double uniformization_rate() const noexcept { return lambda_; }

private:
    std::shared_ptr<const StateSpace> space_;
    CscMatrix csc_;
    CsrMatrix csr_;
    double lambda_ = 0.0;
};

Generator build_hamiltonian(const StochasticReactionNetwork& net,
                            std::shared_ptr<const StateSpace> space, Exec exec = {});
inline Generator build_hamiltonian(const StochasticReactionNetwork& net, const StateSpace& space,
                                   Exec exec = {}) {
    return build_hamiltonian(net, std::make_shared<const StateSpace>(space), exec);
}

/// H psi. Throws PreconditionError when psi has support outside the space.
fock::FockSeries apply_generator(const Generator& h, const fock::FockSeries& psi);

struct EvolveOptions {
    /// Poisson mass allowed outside the summation window (weights are then
    /// renormalised over the window).
    double poisson_tail = 1e-12;
    /// Tolerance on sum(psi0) = 1 for the mixed-state precondition.
    double mixed_eps = 1e-9;
    Exec exec;
};

/// exp(tH) on dense vectors, with P = I + H / Lambda precomputed.
class Uniformizer {
public:
    explicit Uniformizer(const Generator& h, EvolveOptions options = {});

    /// Throws NumericError if a coefficient below -1e-14 appears or the total
    /// mass drifts by more than 1e-10.
    std::vector<double> advance(std::span<const double> psi, double t) const;

    double rate() const noexcept { return lambda_; }

private:
    double lambda_;
    CscMatrix p_csc_;
    CsrMatrix p_csr_;
    EvolveOptions options_;
};

/// psi(t) = exp(tH) psi0 by uniformization. psi0 must be a mixed state inside the space.
fock::FockSeries evolve(const Generator& h, const fock::FockSeries& psi0, double t,
                        EvolveOptions options = {});

/// Which sign multiplies the falling-power expectations in the expected-value
/// derivative. Only target_minus_source (the rate equation's sign) agrees with
/// finite differences of the master equation; the other is kept so the
/// verifier can test both.
enum class SignConvention { source_minus_target, target_minus_source };

std::string_view to_string(SignConvention c);

/// sum_tau r(tau) * sign(tau) * <N^{s(tau) falling} psi>, with sign(tau) =
/// s(tau) - t(tau) (source_minus_target) or t(tau) - s(tau) (target_minus_source).
std::vector<double> expected_value_rhs(const StochasticReactionNetwork& net,
                                       const fock::FockSeries& psi,
                                       SignConvention convention = SignConvention::source_minus_target);

/// Ordinals of states where some reaction with nonzero propensity would leave the space.
std::vector<std::size_t> boundary_states(const StochasticReactionNetwork& net,
                                         const StateSpace& space);

/// <N psi> straight from a dense vector.
std::vector<double> expected_counts(const StateSpace& space, std::span<const double> psi);

}  // namespace crn
