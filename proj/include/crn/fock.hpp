#pragma once

// Finitely supported formal power series in z_1..z_k with real coefficients,
// and the creation/annihilation/number operators acting on them. A coefficient
// psi_l multiplies the monomial z^l; mixed states are the series with
// nonnegative coefficients summing to one.

#include <cstddef>
#include <map>
#include <vector>

#include "crn/core_model.hpp"

namespace crn::fock {

class FockSeries {
public:
    using Terms = std::map<MultiIndex, double>;

    explicit FockSeries(std::size_t k) : k_(k) {}
    /// Throws PreconditionError on a wrong-length index or a non-finite
    /// coefficient. Exact zeros are dropped.
    FockSeries(std::size_t k, Terms terms);

    std::size_t k() const noexcept { return k_; }
    const Terms& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }
    double coeff(const MultiIndex& l) const;

    FockSeries operator+(const FockSeries& other) const;
    FockSeries operator-(const FockSeries& other) const;
    FockSeries scaled(double factor) const;

    bool operator==(const FockSeries&) const = default;

private:
    std::size_t k_;
    Terms terms_;
};

/// z^l with coefficient 1.
FockSeries pure_state(const MultiIndex& l);

/// a†^m: z^l -> z^{l+m}.
FockSeries apply_creation(const MultiIndex& m, const FockSeries& psi);

/// a^m: z^l -> l^{m falling} z^{l-m}; terms with some m_i > l_i vanish.
FockSeries apply_annihilation(const MultiIndex& m, const FockSeries& psi);

/// N^{m falling}: z^l -> l^{m falling} z^l.
FockSeries apply_number_falling(const MultiIndex& m, const FockSeries& psi);

/// <psi> = sum of coefficients.
double sum_functional(const FockSeries& psi);

/// (<N_1 psi>, ..., <N_k psi>).
std::vector<double> expect_number(const FockSeries& psi);

/// <N^{m falling} psi>.
double expect_number_falling(const MultiIndex& m, const FockSeries& psi);

/// A series checked to be a probability distribution up to `eps`.
class MixedStateView {
public:
    /// Throws PreconditionError naming the first violation.
    MixedStateView(FockSeries psi, double eps);

    /// Empty string when psi is mixed within eps, otherwise the reason.
    static std::string violation(const FockSeries& psi, double eps);

    const FockSeries& series() const noexcept { return psi_; }

private:
    FockSeries psi_;
};

struct CoherentState {
    FockSeries series;
    /// 1 - (probability mass kept inside the cap).
    double tail_mass = 0.0;
};

/// Product of independent Poisson(c_i) laws restricted to `cap`, computed in
/// log space. The series is not renormalised; the missing mass is reported.
CoherentState coherent_state(const ClassicalState& c, const Truncation& cap,
                             std::size_t limit = 2'000'000);

/// P(X > n) for X ~ Poisson(mean).
double poisson_upper_tail(double mean, Count n);

}  // namespace crn::fock
