#include "crn/core_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "crn/error.hpp"

namespace crn {

namespace {

Count checked_mul(Count a, Count b) {
    Count out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw NumericError("count overflow in product " + std::to_string(a) + " * " +
                           std::to_string(b));
    }
    return out;
}

Count checked_add(Count a, Count b) {
    Count out = 0;
    if (__builtin_add_overflow(a, b, &out)) {
        throw NumericError("count overflow in sum " + std::to_string(a) + " + " +
                           std::to_string(b));
    }
    return out;
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw PreconditionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
    }
}

}  // namespace

SpeciesTable::SpeciesTable(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw PreconditionError("species table must contain at least one species");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) throw PreconditionError("species name must be non-empty");
        if (!index_.emplace(names_[i], i).second) {
            throw PreconditionError("duplicate species '" + names_[i] + "'");
        }
    }
}

std::optional<std::size_t> SpeciesTable::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Count MultiIndex::total() const {
    Count s = 0;
    for (Count c : v_) s = checked_add(s, c);
    return s;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    require_same_length(size(), other.size(), "MultiIndex +");
    MultiIndex out(size());
    for (std::size_t i = 0; i < size(); ++i) out.v_[i] = checked_add(v_[i], other.v_[i]);
    return out;
}

std::optional<MultiIndex> MultiIndex::checked_minus(const MultiIndex& other) const {
    require_same_length(size(), other.size(), "MultiIndex -");
    MultiIndex out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        if (other.v_[i] > v_[i]) return std::nullopt;
        out.v_[i] = v_[i] - other.v_[i];
    }
    return out;
}

bool MultiIndex::dominates(const MultiIndex& other) const {
    require_same_length(size(), other.size(), "MultiIndex::dominates");
    for (std::size_t i = 0; i < size(); ++i) {
        if (v_[i] < other.v_[i]) return false;
    }
    return true;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& m) const noexcept {
    // FNV-1a over the entries.
    std::uint64_t h = 1469598103934665603ULL;
    for (Count c : m) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

NetChange NetChange::between(const MultiIndex& source, const MultiIndex& target) {
    require_same_length(source.size(), target.size(), "NetChange");
    std::vector<std::int64_t> v(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        v[i] = static_cast<std::int64_t>(target[i]) - static_cast<std::int64_t>(source[i]);
    }
    return NetChange(std::move(v));
}

std::optional<MultiIndex> NetChange::apply(const MultiIndex& l) const {
    require_same_length(l.size(), size(), "NetChange::apply");
    MultiIndex out(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) {
        const auto d = v_[i];
        if (d < 0 && static_cast<Count>(-d) > l[i]) return std::nullopt;
        out[i] = d < 0 ? l[i] - static_cast<Count>(-d) : checked_add(l[i], static_cast<Count>(d));
    }
    return out;
}

StochasticReactionNetwork::StochasticReactionNetwork(SpeciesTable species,
                                                     std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
    if (species_.size() == 0) throw PreconditionError("network needs at least one species");
    std::set<std::string> seen;
    for (const auto& r : reactions_) {
        if (r.source.size() != k() || r.target.size() != k()) {
            throw PreconditionError("reaction '" + r.name + "' has complexes of the wrong length");
        }
        if (!(r.rate > 0.0) || !std::isfinite(r.rate)) {
            throw PreconditionError("reaction '" + r.name + "' needs a positive finite rate");
        }
        if (!seen.insert(r.name).second) {
            throw PreconditionError("duplicate reaction name '" + r.name + "'");
        }
    }
}

std::vector<MultiIndex> StochasticReactionNetwork::complexes() const {
    std::set<MultiIndex> all;
    for (const auto& r : reactions_) {
        all.insert(r.source);
        all.insert(r.target);
    }
    return {all.begin(), all.end()};
}

bool StochasticReactionNetwork::operator==(const StochasticReactionNetwork& other) const {
    if (!(species_ == other.species_) || reactions_.size() != other.reactions_.size()) return false;
    for (std::size_t i = 0; i < reactions_.size(); ++i) {
        const auto& a = reactions_[i];
        const auto& b = other.reactions_[i];
        // Rates compare by bit pattern; they are positive and finite by construction.
        if (a.name != b.name || a.source != b.source || a.target != b.target ||
            std::bit_cast<std::uint64_t>(a.rate) != std::bit_cast<std::uint64_t>(b.rate)) {
            return false;
        }
    }
    return true;
}

ClassicalState::ClassicalState(std::vector<double> values) : v_(std::move(values)) {
    for (std::size_t i = 0; i < v_.size(); ++i) {
        if (!std::isfinite(v_[i]) || v_[i] < 0.0) {
            throw PreconditionError("classical state entry " + std::to_string(i) +
                                    " must be finite and nonnegative");
        }
    }
}

bool Truncation::contains(const MultiIndex& l) const {
    if (per_species) {
        if (per_species->size() != l.size()) return false;
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (l[i] > (*per_species)[i]) return false;
        }
    }
    if (total) {
        Count s = 0;
        for (Count c : l) {
            if (__builtin_add_overflow(s, c, &s) || s > *total) return false;
        }
    }
    return true;
}

void Truncation::validate(std::size_t k) const {
    if (!per_species && !total) throw PreconditionError("truncation needs a per-species or total cap");
    if (per_species && per_species->size() != k) {
        throw PreconditionError("per-species cap has " + std::to_string(per_species->size()) +
                                " entries, network has " + std::to_string(k) + " species");
    }
}

Count falling_power(Count n, Count p) {
    if (p > n) return 0;
    Count out = 1;
    for (Count j = 0; j < p; ++j) out = checked_mul(out, n - j);
    return out;
}

Count multi_falling_power(const MultiIndex& l, const MultiIndex& m) {
    require_same_length(l.size(), m.size(), "multi_falling_power");
    // Any vanishing factor wins before a later one can overflow.
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (m[i] > l[i]) return 0;
    }
    Count out = 1;
    for (std::size_t i = 0; i < l.size(); ++i) out = checked_mul(out, falling_power(l[i], m[i]));
    return out;
}

double multi_power(std::span<const double> x, const MultiIndex& m) {
    require_same_length(x.size(), m.size(), "multi_power");
    double out = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (Count e = 0; e < m[i]; ++e) out *= x[i];
    }
    return out;
}

std::vector<MultiIndex> enumerate_graded_lex(std::size_t k, const Truncation& cap,
                                             std::size_t limit) {
    if (k == 0) throw PreconditionError("cannot enumerate states of zero species");
    cap.validate(k);
    constexpr Count kUnbounded = std::numeric_limits<Count>::max();

    std::vector<Count> bound(k, cap.total ? *cap.total : kUnbounded);
    if (cap.per_species) {
        for (std::size_t i = 0; i < k; ++i) bound[i] = std::min(bound[i], (*cap.per_species)[i]);
    }
    // suffix[i] = capacity of coordinates i..k-1, saturating.
    std::vector<Count> suffix(k + 1, 0);
    for (std::size_t i = k; i-- > 0;) {
        Count s = 0;
        suffix[i] = __builtin_add_overflow(suffix[i + 1], bound[i], &s) ? kUnbounded : s;
    }
    const Count max_grade = cap.total ? std::min(*cap.total, suffix[0]) : suffix[0];

    std::vector<MultiIndex> out;
    MultiIndex cur(k);
    std::function<void(std::size_t, Count)> fill = [&](std::size_t i, Count remaining) {
        if (i + 1 == k) {
            cur[i] = remaining;
            if (out.size() >= limit) {
                throw StateSpaceLimitError("truncated state space exceeds the limit of " +
                                           std::to_string(limit) + " states");
            }
            out.push_back(cur);
            return;
        }
        const Count rest = suffix[i + 1];
        const Count lo = remaining > rest ? remaining - rest : 0;
        const Count hi = std::min(bound[i], remaining);
        for (Count v = lo; v <= hi; ++v) {
            cur[i] = v;
            fill(i + 1, remaining - v);
        }
    };
    for (Count g = 0; g <= max_grade; ++g) fill(0, g);
    return out;
}

}  // namespace crn
