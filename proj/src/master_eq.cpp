#include "crn/master_eq.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crn/detail/compensated_sum.hpp"
#include "crn/error.hpp"

namespace crn {

StateSpace::StateSpace(std::size_t k, Truncation cap, std::size_t limit)
    : k_(k), cap_(std::move(cap)), states_(enumerate_graded_lex(k, cap_, limit)) {
    index_.reserve(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
}

std::optional<std::size_t> StateSpace::ordinal(const MultiIndex& l) const {
    auto it = index_.find(l);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<double> StateSpace::to_dense(const fock::FockSeries& psi) const {
    if (psi.k() != k_) throw PreconditionError("series species count does not match the state space");
    std::vector<double> v(size(), 0.0);
    std::vector<const MultiIndex*> outside;
    for (const auto& [l, c] : psi.terms()) {
        if (auto i = ordinal(l)) {
            v[*i] = c;
        } else {
            outside.push_back(&l);
        }
    }
    if (!outside.empty()) {
        std::ostringstream msg;
        msg << outside.size() << " coefficient(s) outside the truncated state space:";
        for (std::size_t n = 0; n < outside.size() && n < 10; ++n) {
            msg << " (";
            for (std::size_t i = 0; i < k_; ++i) msg << (i ? "," : "") << (*outside[n])[i];
            msg << ")";
        }
        if (outside.size() > 10) msg << " ...";
        throw PreconditionError(msg.str());
    }
    return v;
}

fock::FockSeries StateSpace::from_dense(std::span<const double> v) const {
    fock::FockSeries::Terms terms;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) terms.emplace(states_[i], v[i]);
    }
    return fock::FockSeries(k_, std::move(terms));
}

StateSpace enumerate_states(std::size_t k, const Truncation& cap, std::size_t limit) {
    return StateSpace(k, cap, limit);
}

Generator::Generator(std::shared_ptr<const StateSpace> space, CscMatrix matrix)
    : space_(std::move(space)), csc_(std::move(matrix)) {
    if (!space_ || csc_.n != space_->size() || csc_.col_ptr.size() != csc_.n + 1) {
        throw PreconditionError("generator matrix does not match its state space");
    }
    csr_ = to_csr(csc_);
    for (std::size_t j = 0; j < csc_.n; ++j) lambda_ = std::max(lambda_, std::abs(entry(j, j)));
}

double Generator::entry(std::size_t row, std::size_t col) const {
    const auto first = csc_.row.begin() + static_cast<std::ptrdiff_t>(csc_.col_ptr.at(col));
    const auto last = csc_.row.begin() + static_cast<std::ptrdiff_t>(csc_.col_ptr.at(col + 1));
    auto it = std::lower_bound(first, last, row);
    if (it == last || *it != row) return 0.0;
    return csc_.value[static_cast<std::size_t>(it - csc_.row.begin())];
}

Generator build_hamiltonian(const StochasticReactionNetwork& net,
                            std::shared_ptr<const StateSpace> space, Exec exec) {
    if (net.k() != space->k()) {
        throw PreconditionError("network has " + std::to_string(net.k()) +
                                " species, state space has " + std::to_string(space->k()));
    }
    CscMatrix m = exec.threads <= 1 ? kernels::assemble_generator_serial(net, *space)
                                    : kernels::assemble_generator_omp(net, *space, exec.threads);
    return Generator(std::move(space), std::move(m));
}

fock::FockSeries apply_generator(const Generator& h, const fock::FockSeries& psi) {
    const auto x = h.space().to_dense(psi);
    std::vector<double> y(x.size());
    kernels::spmv_serial(h.matrix(), x, y);
    return h.space().from_dense(y);
}

namespace {

// P = I + H / lambda; its columns are probability vectors.
CscMatrix uniformized(const CscMatrix& h, double lambda) {
    CscMatrix p;
    p.n = h.n;
    p.col_ptr.reserve(h.n + 1);
    for (std::size_t j = 0; j < h.n; ++j) {
        bool diag_done = false;
        auto push_diag = [&](double hjj) {
            const double d = 1.0 + hjj / lambda;
            if (d != 0.0) {
                p.row.push_back(j);
                p.value.push_back(d);
            }
            diag_done = true;
        };
        for (std::size_t q = h.col_ptr[j]; q < h.col_ptr[j + 1]; ++q) {
            const std::size_t i = h.row[q];
            if (!diag_done && i >= j) {
                push_diag(i == j ? h.value[q] : 0.0);
                if (i == j) continue;
            }
            p.row.push_back(i);
            p.value.push_back(h.value[q] / lambda);
        }
        if (!diag_done) push_diag(0.0);
        p.col_ptr.push_back(p.row.size());
    }
    return p;
}

double dense_sum(std::span<const double> v) {
    detail::CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value();
}

// Poisson(x) weights on a window [left, left + w.size()), normalised over the
// window. Built by the ratio recurrence outward from the mode: summing log
// increments instead drifts by about j * eps * |log x|, which is visible at
// x ~ 1e5. Each side stops once the geometric bound on what is left beyond
// it falls below half the allowed tail.
struct PoissonWindow {
    std::size_t left = 0;
    std::vector<double> w;
};

PoissonWindow poisson_window(double x, double tail) {
    const auto mode = static_cast<std::size_t>(std::floor(x));
    std::vector<double> below;  // mode - 1, mode - 2, ...
    std::vector<double> above{1.0};  // mode, mode + 1, ...
    double total = 1.0;
    for (std::size_t j = mode + 1;; ++j) {
        const double term = above.back() * x / static_cast<double>(j);
        if (term == 0.0) break;
        above.push_back(term);
        total += term;
        const double q = x / static_cast<double>(j + 1);
        if (q < 1.0 && term * q / (1.0 - q) <= 0.5 * tail * total) break;
    }
    for (std::size_t j = mode; j > 0; --j) {
        const double prev = below.empty() ? 1.0 : below.back();
        const double term = prev * static_cast<double>(j) / x;
        if (term == 0.0) break;
        below.push_back(term);
        total += term;
        const double q = static_cast<double>(j - 1) / x;
        if (term * q / (1.0 - q) <= 0.5 * tail * total) break;
    }
    PoissonWindow out;
    out.left = mode - below.size();
    out.w.assign(below.rbegin(), below.rend());
    out.w.insert(out.w.end(), above.begin(), above.end());
    detail::CompensatedSum s;
    for (double v : out.w) s.add(v);
    const double norm = s.value();
    for (double& v : out.w) v /= norm;
    return out;
}

}  // namespace

Uniformizer::Uniformizer(const Generator& h, EvolveOptions options)
    : lambda_(h.uniformization_rate()), options_(options) {
    if (lambda_ > 0.0) {
        p_csc_ = uniformized(h.matrix(), lambda_);
        if (options_.exec.threads > 1) p_csr_ = to_csr(p_csc_);
    }
}

std::vector<double> Uniformizer::advance(std::span<const double> psi, double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw PreconditionError("evolution time must be >= 0");
    std::vector<double> v(psi.begin(), psi.end());
    if (t == 0.0 || lambda_ == 0.0) return v;

    const int threads = options_.exec.threads;
    const auto window = poisson_window(lambda_ * t, options_.poisson_tail);
    const std::size_t last = window.left + window.w.size() - 1;
    std::vector<double> result(v.size(), 0.0);
    std::vector<double> next(v.size());
    for (std::size_t j = 0;; ++j) {
        if (j >= window.left) {
            const double w = window.w[j - window.left];
            if (threads > 1) {
                kernels::axpy_omp(w, v, result, threads);
            } else {
                kernels::axpy_serial(w, v, result);
            }
        }
        if (j == last) break;
        if (threads > 1) {
            kernels::spmv_omp(p_csr_, v, next, threads);
        } else {
            kernels::spmv_serial(p_csc_, v, next);
        }
        v.swap(next);
    }

    for (std::size_t i = 0; i < result.size(); ++i) {
        if (result[i] < -1e-14) {
            throw NumericError("uniformization produced a negative coefficient " +
                               std::to_string(result[i]) + " at state ordinal " +
                               std::to_string(i));
        }
    }
    const double before = dense_sum(psi);
    const double after = dense_sum(result);
    if (std::abs(after - before) > 1e-10) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "uniformization lost probability mass: " << before << " -> " << after;
        throw NumericError(msg.str());
    }
    return result;
}

fock::FockSeries evolve(const Generator& h, const fock::FockSeries& psi0, double t,
                        EvolveOptions options) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw PreconditionError("evolution time must be >= 0");
    if (auto why = fock::MixedStateView::violation(psi0, options.mixed_eps); !why.empty()) {
        throw PreconditionError("evolve needs a mixed state: " + why);
    }
    if (t == 0.0 || h.uniformization_rate() == 0.0) {
        h.space().to_dense(psi0);  // support check
        return psi0;
    }
    const auto dense = h.space().to_dense(psi0);
    return h.space().from_dense(Uniformizer(h, options).advance(dense, t));
}

std::string_view to_string(SignConvention c) {
    return c == SignConvention::source_minus_target ? "source-minus-target" : "target-minus-source";
}

std::vector<double> expected_value_rhs(const StochasticReactionNetwork& net,
                                       const fock::FockSeries& psi, SignConvention convention) {
    if (psi.k() != net.k()) throw PreconditionError("series species count does not match network");
    std::vector<double> out(net.k(), 0.0);
    for (const auto& r : net.reactions()) {
        const double moment = fock::expect_number_falling(r.source, psi);
        for (std::size_t i = 0; i < net.k(); ++i) {
            double sign = static_cast<double>(r.source[i]) - static_cast<double>(r.target[i]);
            if (convention == SignConvention::target_minus_source) sign = -sign;
            if (sign != 0.0) out[i] += r.rate * sign * moment;
        }
    }
    return out;
}

std::vector<std::size_t> boundary_states(const StochasticReactionNetwork& net,
                                         const StateSpace& space) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < space.size(); ++j) {
        const MultiIndex& l = space.state(j);
        for (const auto& r : net.reactions()) {
            auto rest = l.checked_minus(r.source);
            if (!rest) continue;
            if (!space.ordinal(*rest + r.target)) {
                out.push_back(j);
                break;
            }
        }
    }
    return out;
}

std::vector<double> expected_counts(const StateSpace& space, std::span<const double> psi) {
    std::vector<detail::CompensatedSum> acc(space.k());
    for (std::size_t j = 0; j < space.size(); ++j) {
        if (psi[j] == 0.0) continue;
        const MultiIndex& l = space.state(j);
        for (std::size_t i = 0; i < space.k(); ++i) {
            if (l[i] != 0) acc[i].add(static_cast<double>(l[i]) * psi[j]);
        }
    }
    std::vector<double> out(space.k());
    for (std::size_t i = 0; i < space.k(); ++i) out[i] = acc[i].value();
    return out;
}

}  // namespace crn
