#include "crn/rate_eq.hpp"

#include <cmath>
#include <sstream>

#include "crn/error.hpp"

namespace crn::rate_eq {

std::vector<double> rate_rhs(const StochasticReactionNetwork& net, std::span<const double> x) {
    if (x.size() != net.k()) {
        throw PreconditionError("rate_rhs: state has " + std::to_string(x.size()) +
                                " entries, network has " + std::to_string(net.k()) + " species");
    }
    std::vector<double> dx(net.k(), 0.0);
    for (const auto& r : net.reactions()) {
        const double flux = r.rate * multi_power(x, r.source);
        for (std::size_t i = 0; i < net.k(); ++i) {
            const double change =
                static_cast<double>(r.target[i]) - static_cast<double>(r.source[i]);
            if (change != 0.0) dx[i] += change * flux;
        }
    }
    return dx;
}

namespace {

void axpy_into(std::vector<double>& out, const std::vector<double>& x, double a,
               const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
}

}  // namespace

Trajectory integrate_rate(const StochasticReactionNetwork& net, const ClassicalState& x0,
                          double t_end, double dt, std::size_t save_every) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw PreconditionError("t_end must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive");
    if (x0.size() != net.k()) throw PreconditionError("initial state has the wrong length");
    if (save_every == 0) save_every = 1;

    // Step times are i*dt (no accumulated drift); a remainder below 1e-9 dt is
    // absorbed into the last full step.
    auto full = static_cast<std::size_t>(std::floor(t_end / dt));
    const double remainder = t_end - static_cast<double>(full) * dt;
    const bool partial = remainder > 1e-9 * dt;
    if (full == 0 && !partial) full = 1;
    const std::size_t steps = full + (partial ? 1 : 0);

    Trajectory traj;
    std::vector<double> x(x0.values().begin(), x0.values().end());
    traj.times.push_back(0.0);
    traj.states.push_back(x);

    const std::size_t k = net.k();
    std::vector<double> stage(k), k1, k2, k3, k4;
    double t = 0.0;
    for (std::size_t n = 1; n <= steps; ++n) {
        const double t_next = n == steps ? t_end : static_cast<double>(n) * dt;
        const double h = t_next - t;

        k1 = rate_rhs(net, x);
        axpy_into(stage, x, 0.5 * h, k1);
        k2 = rate_rhs(net, stage);
        axpy_into(stage, x, 0.5 * h, k2);
        k3 = rate_rhs(net, stage);
        axpy_into(stage, x, h, k3);
        k4 = rate_rhs(net, stage);
        for (std::size_t i = 0; i < k; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = t_next;

        for (std::size_t i = 0; i < k; ++i) {
            if (!std::isfinite(x[i])) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "rate equation blew up at t = " << t << " (species "
                    << net.species().name(i) << ")";
                throw NumericError(msg.str());
            }
            if (x[i] < -1e-9) traj.negative_warning = true;
        }
        if (n % save_every == 0 || n == steps) {
            traj.times.push_back(t);
            traj.states.push_back(x);
        }
    }
    return traj;
}

}  // namespace crn::rate_eq
