#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crn {

/// Particle counts. 64-bit; arithmetic that would overflow raises NumericError.
using Count = std::uint64_t;

/// Ordered, duplicate-free list of species names. Indices are 0-based and stable.
class SpeciesTable {
public:
    SpeciesTable() = default;
    /// Throws PreconditionError on an empty list, an empty name, or a duplicate.
    explicit SpeciesTable(std::vector<std::string> names);

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::optional<std::size_t> find(std::string_view name) const;

    bool operator==(const SpeciesTable& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// A point of N^k: a complex, a pure state, or a reaction's source/target.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::size_t k) : v_(k, 0) {}
    explicit MultiIndex(std::vector<Count> v) : v_(std::move(v)) {}
    MultiIndex(std::initializer_list<Count> v) : v_(v) {}

    std::size_t size() const noexcept { return v_.size(); }
    Count operator[](std::size_t i) const { return v_[i]; }
    Count& operator[](std::size_t i) { return v_[i]; }
    auto begin() const noexcept { return v_.begin(); }
    auto end() const noexcept { return v_.end(); }
    std::span<const Count> values() const noexcept { return v_; }

    /// Sum of entries (the size of the complex). Throws NumericError on overflow.
    Count total() const;

    /// Entrywise sum. Throws PreconditionError on length mismatch, NumericError on overflow.
    MultiIndex operator+(const MultiIndex& other) const;

    /// Entrywise difference; nullopt when some entry would go negative.
    std::optional<MultiIndex> checked_minus(const MultiIndex& other) const;

    /// True when every entry of *this is >= the matching entry of other.
    bool dominates(const MultiIndex& other) const;

    auto operator<=>(const MultiIndex&) const = default;
    bool operator==(const MultiIndex&) const = default;

private:
    std::vector<Count> v_;
};

struct MultiIndexHash {
    std::size_t operator()(const MultiIndex& m) const noexcept;
};

/// t(tau) - s(tau), entrywise.
class NetChange {
public:
    NetChange() = default;
    explicit NetChange(std::vector<std::int64_t> v) : v_(std::move(v)) {}
    static NetChange between(const MultiIndex& source, const MultiIndex& target);

    std::size_t size() const noexcept { return v_.size(); }
    std::int64_t operator[](std::size_t i) const { return v_[i]; }
    std::span<const std::int64_t> values() const noexcept { return v_; }

    /// l + change, or nullopt if an entry would go negative.
    std::optional<MultiIndex> apply(const MultiIndex& l) const;

    bool operator==(const NetChange&) const = default;

private:
    std::vector<std::int64_t> v_;
};

struct Reaction {
    std::string name;
    MultiIndex source;
    MultiIndex target;
    double rate = 0.0;

    NetChange net_change() const { return NetChange::between(source, target); }
    bool operator==(const Reaction&) const = default;
};

/// Species, reactions and rate constants. Immutable once built.
class StochasticReactionNetwork {
public:
    /// Validates: k >= 1, source/target lengths equal k, names unique, rate > 0 and finite.
    StochasticReactionNetwork(SpeciesTable species, std::vector<Reaction> reactions);

    std::size_t k() const noexcept { return species_.size(); }
    const SpeciesTable& species() const noexcept { return species_; }
    const std::vector<Reaction>& reactions() const noexcept { return reactions_; }

    /// The complex set: all distinct sources and targets, sorted.
    std::vector<MultiIndex> complexes() const;

    bool operator==(const StochasticReactionNetwork& other) const;

private:
    SpeciesTable species_;
    std::vector<Reaction> reactions_;
};

/// A vector of nonnegative reals: expected counts or concentrations.
class ClassicalState {
public:
    ClassicalState() = default;
    /// Throws PreconditionError if any entry is negative or not finite.
    explicit ClassicalState(std::vector<double> values);
    ClassicalState(std::initializer_list<double> values)
        : ClassicalState(std::vector<double>(values)) {}

    std::size_t size() const noexcept { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    std::span<const double> values() const noexcept { return v_; }

private:
    std::vector<double> v_;
};

/// Truncation of N^k to a finite box and/or simplex.
struct Truncation {
    std::optional<std::vector<Count>> per_species;
    std::optional<Count> total;

    static Truncation total_count(Count n) { return {std::nullopt, n}; }
    static Truncation per_species_max(std::vector<Count> caps) { return {std::move(caps), std::nullopt}; }

    bool contains(const MultiIndex& l) const;
    /// Throws PreconditionError if neither bound is set or per_species has the wrong length.
    void validate(std::size_t k) const;
};

/// n(n-1)...(n-p+1); 1 for p = 0, 0 for p > n. Throws NumericError on overflow.
Count falling_power(Count n, Count p);

/// Product of per-coordinate falling powers.
Count multi_falling_power(const MultiIndex& l, const MultiIndex& m);

/// x_1^{m_1} ... x_k^{m_k} with 0^0 = 1.
double multi_power(std::span<const double> x, const MultiIndex& m);
inline double multi_power(const ClassicalState& x, const MultiIndex& m) {
    return multi_power(x.values(), m);
}

/// Every multi-index inside the truncation in graded-lexicographic order
/// (by total count, then lexicographically). Throws StateSpaceLimitError when
/// the count would exceed `limit`.
std::vector<MultiIndex> enumerate_graded_lex(std::size_t k, const Truncation& cap,
                                             std::size_t limit);

}  // namespace crn
