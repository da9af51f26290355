#include "crn/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "crn/dsl.hpp"
#include "crn/error.hpp"
#include "crn/rate_eq.hpp"
#include "crn/ssa.hpp"

namespace crn::verify {

namespace {

std::string format_index(const MultiIndex& l) {
    std::string out = "(";
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(l[i]);
    }
    return out + ")";
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
    return out;
}

std::string cap_string(const Truncation& cap) {
    std::string s;
    if (cap.total) s += "total=" + std::to_string(*cap.total) + ";";
    if (cap.per_species) {
        s += "per=";
        for (Count c : *cap.per_species) s += std::to_string(c) + ",";
    }
    return s;
}

std::string series_string(const fock::FockSeries& psi) {
    std::string s;
    for (const auto& [l, v] : psi.terms()) s += format_index(l) + ":" + fmt(v) + ";";
    return s;
}

}  // namespace

void Report::gate(const std::string& name, double value, double tolerance) {
    residuals[name] = value;
    tolerances[name] = tolerance;
    if (!(value <= tolerance)) {
        fail(name + " = " + fmt(value) + " exceeds " + fmt(tolerance));
    }
}

void Report::fail(std::string why) {
    passed = false;
    failures.push_back(std::move(why));
}

std::string render_json(const std::vector<Report>& reports) {
    nlohmann::json doc;
    bool all = true;
    doc["reports"] = nlohmann::json::array();
    for (const auto& r : reports) {
        all = all && r.passed;
        nlohmann::json j;
        j["check"] = r.check;
        j["inputs_digest"] = r.inputs_digest;
        j["passed"] = r.passed;
        j["residuals"] = r.residuals;
        j["tolerances"] = r.tolerances;
        j["info"] = r.info;
        j["failures"] = r.failures;
        doc["reports"].push_back(std::move(j));
    }
    doc["all_passed"] = all;
    return doc.dump(2) + "\n";
}

std::string inputs_digest(const StochasticReactionNetwork& net, const std::string& params) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
    };
    feed(dsl::format_network(net));
    feed("|");
    feed(params);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CscMatrix assemble_operator_form(const StochasticReactionNetwork& net, const StateSpace& space) {
    CscMatrix m;
    m.n = space.size();
    m.col_ptr.reserve(m.n + 1);
    for (std::size_t j = 0; j < m.n; ++j) {
        const auto basis = fock::pure_state(space.state(j));
        fock::FockSeries column(space.k());
        for (const auto& r : net.reactions()) {
            const auto lowered = fock::apply_annihilation(r.source, basis);
            const auto gain = fock::apply_creation(r.target, lowered);
            const auto loss = fock::apply_creation(r.source, lowered);
            // Same clamping as the direct assembly: a gain outside the space
            // drops the whole reaction for this column.
            bool inside = true;
            for (const auto& [l, v] : gain.terms()) inside = inside && space.ordinal(l).has_value();
            if (!inside) continue;
            column = column + (gain - loss).scaled(r.rate);
        }
        std::vector<std::pair<std::size_t, double>> entries;
        for (const auto& [l, v] : column.terms()) entries.emplace_back(*space.ordinal(l), v);
        std::sort(entries.begin(), entries.end());
        for (const auto& [row, v] : entries) {
            m.row.push_back(row);
            m.value.push_back(v);
        }
        m.col_ptr.push_back(m.row.size());
    }
    return m;
}

double max_abs_difference(const CscMatrix& a, const CscMatrix& b) {
    if (a.n != b.n) return std::numeric_limits<double>::infinity();
    double out = 0.0;
    for (std::size_t j = 0; j < a.n; ++j) {
        std::map<std::size_t, double> diff;
        for (std::size_t p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) diff[a.row[p]] += a.value[p];
        for (std::size_t p = b.col_ptr[j]; p < b.col_ptr[j + 1]; ++p) diff[b.row[p]] -= b.value[p];
        for (const auto& [row, d] : diff) out = std::max(out, std::abs(d));
    }
    return out;
}

Report check_generator(const StochasticReactionNetwork& net, const Generator& h) {
    Report rep;
    rep.check = "generator";
    const auto& space = h.space();
    rep.inputs_digest = inputs_digest(net, "cap:" + cap_string(space.cap()));
    rep.info["states"] = std::to_string(space.size());

    const auto& m = h.matrix();
    double worst_offdiag = 0.0;  // most negative off-diagonal, as a positive violation
    double worst_diag = 0.0;     // most positive diagonal
    double worst_colsum = 0.0;
    std::size_t worst_offdiag_row = 0, worst_offdiag_col = 0, worst_col = 0;
    for (std::size_t j = 0; j < m.n; ++j) {
        double colsum = 0.0;
        for (std::size_t p = m.col_ptr[j]; p < m.col_ptr[j + 1]; ++p) {
            const std::size_t i = m.row[p];
            const double v = m.value[p];
            colsum += v;
            if (i != j && -v > worst_offdiag) {
                worst_offdiag = -v;
                worst_offdiag_row = i;
                worst_offdiag_col = j;
            }
            if (i == j) worst_diag = std::max(worst_diag, v);
        }
        if (std::abs(colsum) > worst_colsum) {
            worst_colsum = std::abs(colsum);
            worst_col = j;
        }
    }
    rep.gate("negative_offdiagonal", worst_offdiag, 0.0);
    if (worst_offdiag > 0.0) {
        rep.info["negative_offdiagonal_at"] =
            "row " + std::to_string(worst_offdiag_row) + " " +
            format_index(space.state(worst_offdiag_row)) + ", column " +
            std::to_string(worst_offdiag_col) + " " + format_index(space.state(worst_offdiag_col));
    }
    rep.gate("positive_diagonal", worst_diag, 0.0);
    rep.gate("max_abs_column_sum", worst_colsum, 1e-12);
    rep.info["worst_column"] =
        std::to_string(worst_col) + " " + format_index(m.n ? space.state(worst_col) : MultiIndex{});

    const auto op = assemble_operator_form(net, space);
    rep.gate("operator_form_max_abs_diff", max_abs_difference(m, op), 1e-12);
    return rep;
}

Report check_generator(const StochasticReactionNetwork& net, const Truncation& cap, Exec exec) {
    auto space = std::make_shared<const StateSpace>(net.k(), cap);
    return check_generator(net, build_hamiltonian(net, space, exec));
}

namespace {

struct Derivatives {
    std::vector<double> fd;             // finite-difference d<N>/dt
    std::vector<double> rhs_source_minus_target;    // expected_value_rhs, (s - t)
    std::vector<double> rhs_rate;       // expected_value_rhs, (t - s)
    std::vector<double> generator;      // <N H psi(t)>
};

}  // namespace

Report check_expected_value_theorem(const StochasticReactionNetwork& net,
                                    const fock::FockSeries& psi0, const Truncation& cap,
                                    const TheoremCheckOptions& options) {
    Report rep;
    rep.check = "theorem2";
    rep.inputs_digest =
        inputs_digest(net, "psi0:" + series_string(psi0) + "|cap:" + cap_string(cap) +
                               "|t:" + fmt(options.t) + "|h:" + fmt(options.h));

    auto space = std::make_shared<const StateSpace>(net.k(), cap);
    const Generator gen = build_hamiltonian(net, space, options.exec);
    EvolveOptions evo;
    evo.poisson_tail = 1e-15;  // keep truncation noise far below the O(h^2) signal
    evo.exec = options.exec;
    const Uniformizer u(gen, evo);
    const auto start = space->to_dense(psi0);
    if (auto why = fock::MixedStateView::violation(psi0, evo.mixed_eps); !why.empty()) {
        rep.fail("psi0 is not a mixed state: " + why);
        return rep;
    }

    auto counts_at = [&](double t) { return expected_counts(*space, u.advance(start, t)); };
    const double t = options.t;
    const bool central = t >= options.h;
    rep.info["difference_scheme"] = central ? "central" : "one-sided second order";

    auto finite_difference = [&](double h) {
        std::vector<double> d(net.k());
        if (central) {
            const auto plus = counts_at(t + h);
            const auto minus = counts_at(t - h);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = (plus[i] - minus[i]) / (2.0 * h);
        } else {
            const auto f0 = counts_at(t);
            const auto f1 = counts_at(t + h);
            const auto f2 = counts_at(t + 2.0 * h);
            for (std::size_t i = 0; i < d.size(); ++i) {
                d[i] = (-3.0 * f0[i] + 4.0 * f1[i] - f2[i]) / (2.0 * h);
            }
        }
        return d;
    };

    const auto psi_t_dense = u.advance(start, t);
    const auto psi_t = space->from_dense(psi_t_dense);
    Derivatives d;
    d.rhs_source_minus_target = expected_value_rhs(net, psi_t, SignConvention::source_minus_target);
    d.rhs_rate = expected_value_rhs(net, psi_t, SignConvention::target_minus_source);
    {
        std::vector<double> hpsi(space->size());
        kernels::spmv_serial(gen.matrix(), psi_t_dense, hpsi);
        d.generator = expected_counts(*space, hpsi);
    }

    const auto fd_h = finite_difference(options.h);
    const auto fd_half = finite_difference(options.h / 2.0);
    const double source_minus_target_h = max_abs_diff(fd_h, d.rhs_source_minus_target);
    const double rate_h = max_abs_diff(fd_h, d.rhs_rate);
    const bool rate_matches = rate_h <= source_minus_target_h;
    const auto& matching = rate_matches ? d.rhs_rate : d.rhs_source_minus_target;
    const double residual_h = rate_matches ? rate_h : source_minus_target_h;
    const double residual_half = max_abs_diff(fd_half, matching);

    rep.info["matching_convention"] =
        std::string(to_string(rate_matches ? SignConvention::target_minus_source : SignConvention::source_minus_target));
    rep.residuals["residual_source_minus_target"] = source_minus_target_h;
    rep.residuals["residual_target_minus_source"] = rate_h;
    rep.gate("residual_h", residual_h, options.tolerance);
    rep.residuals["residual_h_half"] = residual_half;

    // Order confirmation: with C = r(h/2) / (h/2)^2, require r(h) <= 1.25 C h^2 + 1e-9.
    const double c_est = residual_half / ((options.h / 2.0) * (options.h / 2.0));
    rep.residuals["order_constant"] = c_est;
    rep.residuals["halving_ratio"] = residual_half > 0.0 ? residual_h / residual_half : 0.0;
    rep.gate("order_excess", residual_h - (1.25 * c_est * options.h * options.h + 1e-9), 0.0);

    // The matching convention must also agree with <N H psi(t)>, the exact derivative.
    rep.gate("rhs_vs_generator_derivative", max_abs_diff(matching, d.generator), 1e-9);
    return rep;
}

SignConvention resolve_sign_convention() {
    static const SignConvention resolved = [] {
        const auto net = dsl::parse_network("species A\nreaction death: A -> 0 @ 1\n");
        const auto rep = check_expected_value_theorem(net, fock::pure_state(MultiIndex{5}),
                                                      Truncation::total_count(5));
        if (!rep.passed) {
            throw NumericError("sign-convention oracle failed on the pure death network");
        }
        return rep.info.at("matching_convention") == to_string(SignConvention::target_minus_source)
                   ? SignConvention::target_minus_source
                   : SignConvention::source_minus_target;
    }();
    return resolved;
}

Report check_coherent_rate_match(const StochasticReactionNetwork& net, const ClassicalState& c,
                                 const Truncation& cap, Exec exec) {
    Report rep;
    rep.check = "coherent";
    std::string cs;
    for (double v : c.values()) cs += fmt(v) + ",";
    rep.inputs_digest = inputs_digest(net, "c:" + cs + "|cap:" + cap_string(cap));
    if (c.size() != net.k()) throw PreconditionError("coherent check: c has the wrong length");

    const auto coherent = fock::coherent_state(c, cap);
    rep.gate("coherent_tail_mass", coherent.tail_mass, 1e-10);

    const SignConvention convention = resolve_sign_convention();
    rep.info["convention"] = std::string(to_string(convention));
    const auto expected = expected_value_rhs(net, coherent.series, convention);
    const auto rate = rate_eq::rate_rhs(net, c);

    // Tail allowance: the truncated mass times a bound on each reaction's
    // contribution near the cap.
    double cmax = 0.0;
    for (double v : c.values()) cmax = std::max(cmax, v);
    double scale = 0.0;
    for (const auto& r : net.reactions()) {
        double change = 0.0;
        const auto nc = r.net_change();
        for (std::size_t i = 0; i < nc.size(); ++i) change = std::max(change, std::abs(double(nc[i])));
        scale += r.rate * change * std::pow(1.0 + cmax, static_cast<double>(r.source.total()));
    }
    const double tolerance = 1e-8 + 10.0 * coherent.tail_mass * scale;

    rep.gate("expected_value_rhs_vs_rate_rhs", max_abs_diff(expected, rate), tolerance);

    auto space = std::make_shared<const StateSpace>(net.k(), cap);
    const Generator gen = build_hamiltonian(net, space, exec);
    const auto psi = space->to_dense(coherent.series);
    std::vector<double> hpsi(psi.size());
    kernels::spmv_serial(gen.matrix(), psi, hpsi);
    rep.gate("master_derivative_vs_rate_rhs", max_abs_diff(expected_counts(*space, hpsi), rate),
             tolerance);
    return rep;
}

Report check_coherence_preservation(const StochasticReactionNetwork& net, const ClassicalState& c,
                                    const std::vector<double>& times, const Truncation& cap,
                                    Exec exec) {
    for (const auto& r : net.reactions()) {
        if (r.source.total() > 1 || r.target.total() > 1) {
            throw PreconditionError("coherence preservation needs complexes of size <= 1; reaction '" +
                                    r.name + "' has a larger complex");
        }
    }
    Report rep;
    rep.check = "preserve";
    std::string params = "c:";
    for (double v : c.values()) params += fmt(v) + ",";
    params += "|times:";
    for (double t : times) params += fmt(t) + ",";
    rep.inputs_digest = inputs_digest(net, params + "|cap:" + cap_string(cap));

    const auto initial = fock::coherent_state(c, cap);
    rep.gate("initial_tail_mass", initial.tail_mass, 1e-10);
    auto space = std::make_shared<const StateSpace>(net.k(), cap);
    const Generator gen = build_hamiltonian(net, space, exec);
    EvolveOptions evo;
    evo.exec = exec;
    const Uniformizer u(gen, evo);
    const auto start = space->to_dense(initial.series);

    auto sorted = times;
    std::sort(sorted.begin(), sorted.end());
    double worst = 0.0;
    for (double t : sorted) {
        const auto psi_t = t > 0.0 ? u.advance(start, t) : start;
        std::vector<double> x(c.values().begin(), c.values().end());
        if (t > 0.0) x = rate_eq::integrate_rate(net, c, t, 1e-3, 1u << 30).states.back();
        for (double& v : x) v = std::max(v, 0.0);
        const auto reference = space->to_dense(fock::coherent_state(ClassicalState(x), cap).series);
        double diff = 0.0;
        for (std::size_t i = 0; i < psi_t.size(); ++i) diff = std::max(diff, std::abs(psi_t[i] - reference[i]));
        rep.residuals["max_coeff_diff_t=" + fmt(t)] = diff;
        std::string xs;
        for (double v : x) xs += fmt(v) + " ";
        rep.info["rate_solution_t=" + fmt(t)] = xs;
        worst = std::max(worst, diff);
    }
    rep.gate("max_coeff_diff", worst, 1e-6);
    return rep;
}

Report check_ssa_vs_master(const StochasticReactionNetwork& net, const MultiIndex& l0,
                           const Truncation& cap, const SsaCheckOptions& options) {
    Report rep;
    rep.check = "ssa-vs-master";
    rep.inputs_digest = inputs_digest(
        net, "l0:" + format_index(l0) + "|cap:" + cap_string(cap) + "|t_end:" + fmt(options.t_end) +
                 "|dt:" + fmt(options.sample_dt) + "|n:" + std::to_string(options.n_traj) +
                 "|seed:" + std::to_string(options.seed));
    rep.info["seed"] = std::to_string(options.seed);
    rep.info["n_traj"] = std::to_string(options.n_traj);

    const auto stats = ssa::ensemble(net, l0, options.t_end, options.sample_dt, options.n_traj,
                                     options.seed, options.exec);
    rep.info["rng"] = stats.rng;

    auto space = std::make_shared<const StateSpace>(net.k(), cap);
    const Generator gen = build_hamiltonian(net, space, options.exec);
    EvolveOptions evo;
    evo.exec = options.exec;
    const Uniformizer u(gen, evo);
    std::vector<double> psi = space->to_dense(fock::pure_state(l0));
    const auto boundary = boundary_states(net, *space);

    double worst_z = 0.0;
    double worst_boundary = 0.0;
    std::string worst_at = "none";
    double previous = 0.0;
    const double n = static_cast<double>(stats.n_traj);
    for (std::size_t ti = 0; ti < stats.times.size(); ++ti) {
        const double t = stats.times[ti];
        psi = u.advance(psi, t - previous);
        previous = t;
        double mass = 0.0;
        for (std::size_t j : boundary) mass += psi[j];
        worst_boundary = std::max(worst_boundary, mass);
        const auto exact = expected_counts(*space, psi);
        for (std::size_t i = 0; i < net.k(); ++i) {
            const double diff = stats.mean[ti][i] - exact[i];
            const double se = std::sqrt(stats.variance[ti][i] / n);
            // A zero-variance sample is compared exactly (up to roundoff).
            double z = 0.0;
            if (se > 0.0) {
                z = std::abs(diff) / se;
            } else if (std::abs(diff) > 1e-9) {
                z = std::numeric_limits<double>::infinity();
            }
            if (z > worst_z) {
                worst_z = z;
                worst_at = "t=" + fmt(t) + " species=" + net.species().name(i) +
                           " ssa_mean=" + fmt(stats.mean[ti][i]) + " master_mean=" + fmt(exact[i]);
            }
        }
    }
    rep.info["worst_point"] = worst_at;
    rep.gate("worst_abs_z", worst_z, options.z_limit);
    rep.gate("boundary_mass", worst_boundary, 1e-10);
    return rep;
}

}  // namespace crn::verify
