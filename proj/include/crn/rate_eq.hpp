#pragma once

#include <span>
#include <vector>

#include "crn/core_model.hpp"

namespace crn::rate_eq {

/// Sampled solution of the rate equation. States are not clamped, so an entry
/// may dip below zero through integration error; `negative_warning` records
/// whether any entry went below -1e-9.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    bool negative_warning = false;
};

/// dx/dt = sum over reactions of rate * (target - source) * x^source.
std::vector<double> rate_rhs(const StochasticReactionNetwork& net, std::span<const double> x);
inline std::vector<double> rate_rhs(const StochasticReactionNetwork& net, const ClassicalState& x) {
    return rate_rhs(net, x.values());
}

/// Fixed-step classical RK4 from 0 to t_end. The last step is shortened to land
/// exactly on t_end. Every `save_every`-th step is recorded, plus t = 0 and
/// t = t_end. Throws NumericError naming the time of the first non-finite state.
Trajectory integrate_rate(const StochasticReactionNetwork& net, const ClassicalState& x0,
                          double t_end, double dt = 1e-3, std::size_t save_every = 1);

}  // namespace crn::rate_eq
