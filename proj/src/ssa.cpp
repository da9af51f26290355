#include "crn/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crn/error.hpp"

namespace crn::ssa {

std::vector<double> propensities(const StochasticReactionNetwork& net, const MultiIndex& l) {
    if (l.size() != net.k()) throw PreconditionError("propensities: state has the wrong length");
    std::vector<double> a;
    a.reserve(net.reactions().size());
    for (const auto& r : net.reactions()) {
        a.push_back(r.rate * static_cast<double>(multi_falling_power(l, r.source)));
    }
    return a;
}

const MultiIndex& SsaTrajectory::state_at(double t) const {
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return initial;
    return states[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

SsaTrajectory simulate(const StochasticReactionNetwork& net, const MultiIndex& l0, double t_end,
                       Xoshiro256StarStar& rng) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw PreconditionError("t_end must be positive");
    if (l0.size() != net.k()) throw PreconditionError("initial state has the wrong length");

    std::vector<NetChange> changes;
    for (const auto& r : net.reactions()) changes.push_back(r.net_change());

    SsaTrajectory traj;
    traj.initial = l0;
    traj.t_end = t_end;
    MultiIndex l = l0;
    double t = 0.0;
    for (;;) {
        const auto a = propensities(net, l);
        double a0 = 0.0;
        for (double ai : a) a0 += ai;
        if (a0 == 0.0) {
            traj.absorbed = true;
            break;
        }
        const double wait = rng.exponential(a0);
        if (t + wait > t_end) break;
        t += wait;

        // Cumulative scan in file order; a draw landing exactly on a boundary
        // goes to the later reaction.
        const double target = rng.uniform() * a0;
        std::size_t chosen = a.size();
        double cumulative = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            cumulative += a[i];
            if (target < cumulative) {
                chosen = i;
                break;
            }
        }
        if (chosen == a.size()) {
            // Rounding pushed the draw past the running total.
            for (std::size_t i = a.size(); i-- > 0;) {
                if (a[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        auto next = changes[chosen].apply(l);
        if (!next) throw std::logic_error("SSA step produced a negative count");
        l = std::move(*next);
        traj.jump_times.push_back(t);
        traj.states.push_back(l);
        traj.reactions.push_back(chosen);
    }
    return traj;
}

SsaTrajectory simulate(const StochasticReactionNetwork& net, const MultiIndex& l0, double t_end,
                       std::uint64_t seed) {
    Xoshiro256StarStar rng(seed);
    return simulate(net, l0, t_end, rng);
}

std::vector<double> sample_grid(double t_end, double sample_dt) {
    if (!(t_end > 0.0) || !(sample_dt > 0.0)) {
        throw PreconditionError("sample grid needs positive t_end and sample_dt");
    }
    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        const double t = static_cast<double>(i) * sample_dt;
        if (t >= t_end - 1e-9 * sample_dt) break;
        grid.push_back(t);
    }
    grid.push_back(t_end);
    return grid;
}

EnsembleStats ensemble(const StochasticReactionNetwork& net, const MultiIndex& l0, double t_end,
                       double sample_dt, std::size_t n_traj, std::uint64_t seed, Exec exec) {
    if (n_traj == 0) throw PreconditionError("ensemble needs at least one trajectory");
    const auto grid = sample_grid(t_end, sample_dt);
    const std::size_t k = net.k();
    const std::size_t n_times = grid.size();

    // samples[(traj * n_times + time) * k + species]
    std::vector<double> samples(n_traj * n_times * k);
    kernels::parallel_for(n_traj, exec.threads, [&](std::size_t traj) {
        auto rng = Xoshiro256StarStar::stream(seed, traj);
        const auto path = simulate(net, l0, t_end, rng);
        for (std::size_t ti = 0; ti < n_times; ++ti) {
            const MultiIndex& l = path.state_at(grid[ti]);
            for (std::size_t i = 0; i < k; ++i) {
                samples[(traj * n_times + ti) * k + i] = static_cast<double>(l[i]);
            }
        }
    });

    // Fixed trajectory order, so the reduction is independent of scheduling.
    EnsembleStats stats;
    stats.times = grid;
    stats.n_traj = n_traj;
    stats.seed = seed;
    stats.rng = std::string(Xoshiro256StarStar::name);
    stats.mean.assign(n_times, std::vector<double>(k, 0.0));
    stats.variance.assign(n_times, std::vector<double>(k, 0.0));
    const double n = static_cast<double>(n_traj);
    for (std::size_t ti = 0; ti < n_times; ++ti) {
        for (std::size_t i = 0; i < k; ++i) {
            double sum = 0.0;
            for (std::size_t traj = 0; traj < n_traj; ++traj) sum += samples[(traj * n_times + ti) * k + i];
            const double mean = sum / n;
            double sq = 0.0;
            for (std::size_t traj = 0; traj < n_traj; ++traj) {
                const double d = samples[(traj * n_times + ti) * k + i] - mean;
                sq += d * d;
            }
            stats.mean[ti][i] = mean;
            stats.variance[ti][i] = n_traj > 1 ? sq / (n - 1.0) : 0.0;
        }
    }
    return stats;
}

}  // namespace crn::ssa
