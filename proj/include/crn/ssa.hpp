#pragma once

// Gillespie direct-method sampling of the continuous-time Markov chain whose
// jump rates are the master-equation generator's off-diagonal entries.

#include <cstdint>
#include <string>
#include <vector>

#include "crn/core_model.hpp"
#include "crn/kernels.hpp"
#include "crn/rng.hpp"

namespace crn::ssa {

/// r(tau) * l^{s(tau) falling} per reaction, in file order.
std::vector<double> propensities(const StochasticReactionNetwork& net, const MultiIndex& l);

struct SsaTrajectory {
    MultiIndex initial;
    std::vector<double> jump_times;
    std::vector<MultiIndex> states;      // state right after each jump
    std::vector<std::size_t> reactions;  // which reaction fired at each jump
    double t_end = 0.0;
    bool absorbed = false;               // stopped early because all propensities vanished

    /// State at time t: the state after the last jump at or before t.
    const MultiIndex& state_at(double t) const;
};

SsaTrajectory simulate(const StochasticReactionNetwork& net, const MultiIndex& l0, double t_end,
                       Xoshiro256StarStar& rng);
SsaTrajectory simulate(const StochasticReactionNetwork& net, const MultiIndex& l0, double t_end,
                       std::uint64_t seed);

struct EnsembleStats {
    std::vector<double> times;
    std::vector<std::vector<double>> mean;      // [time][species]
    std::vector<std::vector<double>> variance;  // unbiased; 0 when n_traj == 1
    std::size_t n_traj = 0;
    std::uint64_t seed = 0;
    std::string rng;

    bool operator==(const EnsembleStats&) const = default;
};

/// 0, dt, 2 dt, ... and finally t_end.
std::vector<double> sample_grid(double t_end, double sample_dt);

/// n_traj independent runs; run i draws from stream i of `seed`. Results do
/// not depend on exec.threads.
EnsembleStats ensemble(const StochasticReactionNetwork& net, const MultiIndex& l0, double t_end,
                       double sample_dt, std::size_t n_traj, std::uint64_t seed, Exec exec = {});

}  // namespace crn::ssa
