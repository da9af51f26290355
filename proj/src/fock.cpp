#include "crn/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crn/detail/compensated_sum.hpp"
#include "crn/error.hpp"

namespace crn::fock {

namespace {

void require_k(const MultiIndex& m, const FockSeries& psi, const char* op) {
    if (m.size() != psi.k()) {
        throw PreconditionError(std::string(op) + ": multi-index has " + std::to_string(m.size()) +
                                " entries, series has k = " + std::to_string(psi.k()));
    }
}

double log_poisson_pmf(double mean, Count n) {
    const auto nd = static_cast<double>(n);
    return -mean + nd * std::log(mean) - std::lgamma(nd + 1.0);
}

}  // namespace

FockSeries::FockSeries(std::size_t k, Terms terms) : k_(k), terms_(std::move(terms)) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->first.size() != k_) throw PreconditionError("FockSeries: index of wrong length");
        if (!std::isfinite(it->second)) throw PreconditionError("FockSeries: non-finite coefficient");
        it = it->second == 0.0 ? terms_.erase(it) : std::next(it);
    }
}

double FockSeries::coeff(const MultiIndex& l) const {
    auto it = terms_.find(l);
    return it == terms_.end() ? 0.0 : it->second;
}

FockSeries FockSeries::operator+(const FockSeries& other) const {
    if (other.k_ != k_) throw PreconditionError("FockSeries +: species count mismatch");
    Terms out = terms_;
    for (const auto& [l, v] : other.terms_) out[l] += v;
    return FockSeries(k_, std::move(out));
}

FockSeries FockSeries::operator-(const FockSeries& other) const {
    return *this + other.scaled(-1.0);
}

FockSeries FockSeries::scaled(double factor) const {
    Terms out;
    for (const auto& [l, v] : terms_) out.emplace_hint(out.end(), l, v * factor);
    return FockSeries(k_, std::move(out));
}

FockSeries pure_state(const MultiIndex& l) {
    return FockSeries(l.size(), {{l, 1.0}});
}

// Adding or subtracting a fixed vector preserves lexicographic order, so the
// shifted terms can be appended in order.
FockSeries apply_creation(const MultiIndex& m, const FockSeries& psi) {
    require_k(m, psi, "apply_creation");
    FockSeries::Terms out;
    for (const auto& [l, v] : psi.terms()) out.emplace_hint(out.end(), l + m, v);
    return FockSeries(psi.k(), std::move(out));
}

FockSeries apply_annihilation(const MultiIndex& m, const FockSeries& psi) {
    require_k(m, psi, "apply_annihilation");
    FockSeries::Terms out;
    for (const auto& [l, v] : psi.terms()) {
        auto lowered = l.checked_minus(m);
        if (!lowered) continue;
        out.emplace_hint(out.end(), std::move(*lowered),
                         static_cast<double>(multi_falling_power(l, m)) * v);
    }
    return FockSeries(psi.k(), std::move(out));
}

FockSeries apply_number_falling(const MultiIndex& m, const FockSeries& psi) {
    require_k(m, psi, "apply_number_falling");
    FockSeries::Terms out;
    for (const auto& [l, v] : psi.terms()) {
        out.emplace_hint(out.end(), l, static_cast<double>(multi_falling_power(l, m)) * v);
    }
    return FockSeries(psi.k(), std::move(out));
}

double sum_functional(const FockSeries& psi) {
    detail::CompensatedSum s;
    for (const auto& [l, v] : psi.terms()) s.add(v);
    return s.value();
}

std::vector<double> expect_number(const FockSeries& psi) {
    std::vector<detail::CompensatedSum> acc(psi.k());
    for (const auto& [l, v] : psi.terms()) {
        for (std::size_t i = 0; i < psi.k(); ++i) {
            if (l[i] != 0) acc[i].add(static_cast<double>(l[i]) * v);
        }
    }
    std::vector<double> out(psi.k());
    for (std::size_t i = 0; i < psi.k(); ++i) out[i] = acc[i].value();
    return out;
}

double expect_number_falling(const MultiIndex& m, const FockSeries& psi) {
    require_k(m, psi, "expect_number_falling");
    detail::CompensatedSum s;
    for (const auto& [l, v] : psi.terms()) {
        const Count w = multi_falling_power(l, m);
        if (w != 0) s.add(static_cast<double>(w) * v);
    }
    return s.value();
}

std::string MixedStateView::violation(const FockSeries& psi, double eps) {
    for (const auto& [l, v] : psi.terms()) {
        if (v < 0.0) {
            std::ostringstream msg;
            msg << "negative coefficient " << v << " at index (";
            for (std::size_t i = 0; i < l.size(); ++i) msg << (i ? "," : "") << l[i];
            msg << ")";
            return msg.str();
        }
    }
    const double total = sum_functional(psi);
    if (std::abs(total - 1.0) > eps) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "coefficients sum to " << total << ", not 1 within " << eps;
        return msg.str();
    }
    return {};
}

MixedStateView::MixedStateView(FockSeries psi, double eps) : psi_(std::move(psi)) {
    if (auto why = violation(psi_, eps); !why.empty()) {
        throw PreconditionError("not a mixed state: " + why);
    }
}

double poisson_upper_tail(double mean, Count n) {
    if (mean <= 0.0) return 0.0;
    const auto nd = static_cast<double>(n);
    if (nd < mean) {
        detail::CompensatedSum cdf;
        for (Count j = 0; j <= n; ++j) cdf.add(std::exp(log_poisson_pmf(mean, j)));
        return std::max(0.0, 1.0 - cdf.value());
    }
    // Terms decrease past the mode; stop once they no longer register.
    detail::CompensatedSum tail;
    for (Count j = n + 1;; ++j) {
        const double term = std::exp(log_poisson_pmf(mean, j));
        tail.add(term);
        if (term <= 1e-20 * tail.value() || term == 0.0) break;
    }
    return tail.value();
}

CoherentState coherent_state(const ClassicalState& c, const Truncation& cap, std::size_t limit) {
    const std::size_t k = c.size();
    cap.validate(k);
    std::vector<double> log_c(k);
    for (std::size_t i = 0; i < k; ++i) log_c[i] = c[i] > 0.0 ? std::log(c[i]) : 0.0;

    FockSeries::Terms terms;
    detail::CompensatedSum kept;
    for (auto& l : enumerate_graded_lex(k, cap, limit)) {
        double log_coeff = 0.0;
        bool zero = false;
        for (std::size_t i = 0; i < k; ++i) {
            if (c[i] == 0.0) {
                if (l[i] != 0) zero = true;
                continue;
            }
            const auto n = static_cast<double>(l[i]);
            log_coeff += -c[i] + n * log_c[i] - std::lgamma(n + 1.0);
        }
        if (zero) continue;
        const double v = std::exp(log_coeff);
        if (v == 0.0) continue;
        kept.add(v);
        terms.emplace(std::move(l), v);
    }

    CoherentState out{FockSeries(k, std::move(terms)), 0.0};
    if (cap.per_species && !cap.total) {
        // 1 - prod(1 - q_i), evaluated without cancellation.
        double log_kept = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            log_kept += std::log1p(-poisson_upper_tail(c[i], (*cap.per_species)[i]));
        }
        out.tail_mass = -std::expm1(log_kept);
    } else if (cap.total && !cap.per_species) {
        double mean = 0.0;
        for (std::size_t i = 0; i < k; ++i) mean += c[i];
        out.tail_mass = poisson_upper_tail(mean, *cap.total);
    } else {
        out.tail_mass = std::max(0.0, 1.0 - kept.value());
    }
    return out;
}

}  // namespace crn::fock
