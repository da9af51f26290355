// crn: command-line front end for parsing, integrating, evolving, sampling and
// verifying stochastic reaction networks.
//
// Exit codes: 0 success, 1 a verification check failed, 2 usage or parse
// error, 3 numeric error (blow-up, state-space limit).

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crn/csv.hpp"
#include "crn/dsl.hpp"
#include "crn/error.hpp"
#include "crn/fock.hpp"
#include "crn/master_eq.hpp"
#include "crn/rate_eq.hpp"
#include "crn/ssa.hpp"
#include "crn/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kNumeric = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// "H=100,I=10" -> (species index, value text) pairs.
std::vector<std::pair<std::size_t, std::string>> split_assignments(const crn::SpeciesTable& species,
                                                                   const std::string& assignments) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::stringstream ss(assignments);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("expected name=value, got '" + item + "'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string name = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        auto idx = species.find(name);
        if (!idx) throw UsageError("unknown species '" + name + "' in '" + assignments + "'");
        out.emplace_back(*idx, value);
    }
    return out;
}

crn::MultiIndex parse_counts(const crn::SpeciesTable& species, const std::string& assignments) {
    crn::MultiIndex l(species.size());
    for (const auto& [i, text] : split_assignments(species, assignments)) {
        crn::Count v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw UsageError("expected a natural number for '" + species.name(i) + "', got '" + text + "'");
        }
        l[i] = v;
    }
    return l;
}

crn::ClassicalState parse_reals(const crn::SpeciesTable& species, const std::string& assignments) {
    std::vector<double> x(species.size(), 0.0);
    for (const auto& [i, text] : split_assignments(species, assignments)) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size() || !(v >= 0.0)) {
            throw UsageError("expected a nonnegative number for '" + species.name(i) + "', got '" +
                             text + "'");
        }
        x[i] = v;
    }
    return crn::ClassicalState(std::move(x));
}

crn::Truncation make_cap(const crn::SpeciesTable& species, std::optional<crn::Count> total,
                         const std::string& per, crn::Count fallback_total) {
    crn::Truncation cap;
    if (total) cap.total = *total;
    if (!per.empty()) {
        std::vector<crn::Count> caps(species.size(), 0);
        std::vector<bool> given(species.size(), false);
        for (const auto& [i, text] : split_assignments(species, per)) {
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), caps[i]);
            if (ec != std::errc() || ptr != text.data() + text.size()) {
                throw UsageError("bad cap for '" + species.name(i) + "'");
            }
            given[i] = true;
        }
        for (std::size_t i = 0; i < species.size(); ++i) {
            if (!given[i]) throw UsageError("--cap-per is missing species '" + species.name(i) + "'");
        }
        cap.per_species = std::move(caps);
    }
    if (!cap.total && !cap.per_species) cap.total = fallback_total;
    return cap;
}

/// Writes to `path`, or stdout when empty.
template <class Writer>
void emit(const std::string& path, Writer&& write) {
    if (path.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    write(out);
}

struct Options {
    int threads = 1;
    std::string file;
    std::string out;
    std::string init;
    std::string init_pure;
    std::string init_coherent;
    std::optional<crn::Count> cap_total;
    std::string cap_per;
    double t_end = 1.0;
    double dt = 1e-3;
    double sample_dt = 0.0;
    std::size_t save_every = 1;
    std::size_t traj = 1000;
    std::uint64_t seed = 1;
    std::string check = "all";
    double t = 0.5;
    double h = 1e-4;
    std::string times = "0.5,1,2";
    std::string dump_generator;
};

int cmd_parse(const Options& o) {
    const auto net = crn::dsl::load_network(o.file);
    std::cout << crn::dsl::format_network(net);
    return kOk;
}

int cmd_rate(const Options& o) {
    const auto net = crn::dsl::load_network(o.file);
    const auto x0 = parse_reals(net.species(), o.init);
    const auto traj = crn::rate_eq::integrate_rate(net, x0, o.t_end, o.dt, o.save_every);
    if (traj.negative_warning) {
        std::cerr << "warning: integration produced entries below -1e-9; consider a smaller --dt\n";
    }
    emit(o.out, [&](std::ostream& s) { crn::csv::write_trajectory(s, net.species(), traj); });
    return kOk;
}

int cmd_master(const Options& o) {
    const auto net = crn::dsl::load_network(o.file);
    if (o.init_pure.empty() == o.init_coherent.empty()) {
        throw UsageError("give exactly one of --init-pure or --init-coherent");
    }
    if (!o.cap_total && o.cap_per.empty()) throw UsageError("give --cap-total or --cap-per");
    const auto cap = make_cap(net.species(), o.cap_total, o.cap_per, 0);
    auto space = std::make_shared<const crn::StateSpace>(net.k(), cap);

    crn::fock::FockSeries psi0(net.k());
    double initial_tail = 0.0;
    if (!o.init_pure.empty()) {
        psi0 = crn::fock::pure_state(parse_counts(net.species(), o.init_pure));
    } else {
        auto coherent = crn::fock::coherent_state(parse_reals(net.species(), o.init_coherent), cap);
        psi0 = std::move(coherent.series);
        initial_tail = coherent.tail_mass;
    }
    crn::EvolveOptions evo;
    evo.exec.threads = o.threads;
    if (auto why = crn::fock::MixedStateView::violation(psi0, evo.mixed_eps); !why.empty()) {
        throw UsageError("initial state is not a mixed state inside the cap (" + why +
                         "); enlarge the cap");
    }

    const auto gen = crn::build_hamiltonian(net, space, evo.exec);
    if (!o.dump_generator.empty()) {
        emit(o.dump_generator, [&](std::ostream& s) { crn::csv::write_generator(s, gen); });
    }
    const crn::Uniformizer u(gen, evo);
    const auto boundary = crn::boundary_states(net, *space);
    const double sample_dt = o.sample_dt > 0.0 ? o.sample_dt : o.t_end / 10.0;

    std::vector<crn::csv::ExpectedRow> rows;
    auto psi = space->to_dense(psi0);
    double previous = 0.0;
    for (double t : crn::ssa::sample_grid(o.t_end, sample_dt)) {
        psi = u.advance(psi, t - previous);
        previous = t;
        double edge = 0.0;
        for (std::size_t j : boundary) edge += psi[j];
        rows.push_back({t, crn::expected_counts(*space, psi), initial_tail + edge});
    }
    emit(o.out, [&](std::ostream& s) { crn::csv::write_expected_values(s, net.species(), rows); });
    return kOk;
}

int cmd_ssa(const Options& o) {
    const auto net = crn::dsl::load_network(o.file);
    if (o.init_pure.empty()) throw UsageError("--init-pure is required");
    const auto l0 = parse_counts(net.species(), o.init_pure);
    const double sample_dt = o.sample_dt > 0.0 ? o.sample_dt : o.t_end / 10.0;
    const auto stats =
        crn::ssa::ensemble(net, l0, o.t_end, sample_dt, o.traj, o.seed, crn::Exec{o.threads});
    emit(o.out, [&](std::ostream& s) { crn::csv::write_ensemble(s, net.species(), stats); });
    return kOk;
}

int cmd_verify(const Options& o) {
    const auto net = crn::dsl::load_network(o.file);
    const auto& species = net.species();
    const auto cap = make_cap(species, o.cap_total, o.cap_per, 30);
    const crn::Exec exec{o.threads};

    const crn::MultiIndex pure =
        o.init_pure.empty() ? crn::MultiIndex(std::vector<crn::Count>(net.k(), 5))
                            : parse_counts(species, o.init_pure);
    const crn::ClassicalState coherent_mean =
        o.init_coherent.empty() ? crn::ClassicalState(std::vector<double>(net.k(), 1.0))
                                : parse_reals(species, o.init_coherent);

    std::vector<double> times;
    {
        std::stringstream ss(o.times);
        std::string item;
        while (std::getline(ss, item, ',')) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc() || ptr != item.data() + item.size() || !(v >= 0.0)) {
                throw UsageError("bad time '" + item + "' in --times");
            }
            times.push_back(v);
        }
    }

    const bool all = o.check == "all";
    const std::vector<std::string> known = {"generator", "theorem2", "coherent", "preserve",
                                            "ssa-vs-master"};
    if (!all && std::find(known.begin(), known.end(), o.check) == known.end()) {
        throw UsageError("unknown check '" + o.check + "'");
    }
    auto wanted = [&](const std::string& name) { return all || o.check == name; };

    std::vector<crn::verify::Report> reports;
    if (wanted("generator")) reports.push_back(crn::verify::check_generator(net, cap, exec));
    if (wanted("theorem2")) {
        crn::verify::TheoremCheckOptions opt;
        opt.t = o.t;
        opt.h = o.h;
        opt.exec = exec;
        const auto psi0 = o.init_coherent.empty()
                              ? crn::fock::pure_state(pure)
                              : crn::fock::coherent_state(coherent_mean, cap).series;
        reports.push_back(crn::verify::check_expected_value_theorem(net, psi0, cap, opt));
    }
    if (wanted("coherent")) {
        reports.push_back(crn::verify::check_coherent_rate_match(net, coherent_mean, cap, exec));
    }
    if (wanted("preserve")) {
        try {
            reports.push_back(
                crn::verify::check_coherence_preservation(net, coherent_mean, times, cap, exec));
        } catch (const crn::PreconditionError& e) {
            if (!all) throw;
            std::cerr << "note: skipping preserve: " << e.what() << "\n";
        }
    }
    if (wanted("ssa-vs-master")) {
        crn::verify::SsaCheckOptions opt;
        opt.t_end = o.t_end;
        opt.sample_dt = o.sample_dt > 0.0 ? o.sample_dt : o.t_end / 10.0;
        opt.n_traj = o.traj;
        opt.seed = o.seed;
        opt.exec = exec;
        reports.push_back(crn::verify::check_ssa_vs_master(net, pure, cap, opt));
    }

    emit(o.out, [&](std::ostream& s) { s << crn::verify::render_json(reports); });
    bool ok = true;
    for (const auto& r : reports) {
        if (!r.passed) {
            ok = false;
            for (const auto& f : r.failures) std::cerr << r.check << ": " << f << "\n";
        }
    }
    return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic reaction network toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--threads", o.threads, "Worker threads (1 = serial reference kernels)")
        ->check(CLI::PositiveNumber);

    auto* parse = app.add_subcommand("parse", "Validate a .rxn file and print its canonical form");
    parse->add_option("file", o.file)->required();

    auto* rate = app.add_subcommand("rate", "Integrate the rate equation (RK4)");
    rate->add_option("file", o.file)->required();
    rate->add_option("--init", o.init, "Initial concentrations, e.g. \"H=100,I=10\"")->required();
    rate->add_option("--t-end", o.t_end)->required();
    rate->add_option("--dt", o.dt)->capture_default_str();
    rate->add_option("--save-every", o.save_every, "Record every n-th step")->capture_default_str();
    rate->add_option("--out", o.out, "Output CSV (stdout if omitted)");

    auto* master = app.add_subcommand("master", "Evolve the truncated master equation");
    master->add_option("file", o.file)->required();
    auto* mp = master->add_option("--init-pure", o.init_pure, "Initial counts, e.g. \"A=5\"");
    auto* mc = master->add_option("--init-coherent", o.init_coherent, "Poisson means, e.g. \"A=2.0\"");
    mp->excludes(mc);
    auto* ct = master->add_option("--cap-total", o.cap_total, "Cap on the total count");
    master->add_option("--cap-per", o.cap_per, "Per-species caps, e.g. \"H=30,I=20\"");
    (void)ct;
    master->add_option("--t-end", o.t_end)->required();
    master->add_option("--sample-dt", o.sample_dt, "Sampling interval (default t_end/10)");
    master->add_option("--out", o.out, "Output CSV (stdout if omitted)");
    master->add_option("--dump-generator", o.dump_generator, "Write the generator as 'row col value'");

    auto* ssa = app.add_subcommand("ssa", "Gillespie ensemble statistics");
    ssa->add_option("file", o.file)->required();
    ssa->add_option("--init-pure", o.init_pure)->required();
    ssa->add_option("--t-end", o.t_end)->required();
    ssa->add_option("--sample-dt", o.sample_dt, "Sampling interval (default t_end/10)");
    ssa->add_option("--traj", o.traj)->capture_default_str();
    ssa->add_option("--seed", o.seed)->capture_default_str();
    ssa->add_option("--out", o.out, "Output CSV (stdout if omitted)");

    auto* verify = app.add_subcommand("verify", "Run the cross-engine checks; JSON report");
    verify->add_option("file", o.file)->required();
    verify->add_option("--check", o.check, "generator|theorem2|coherent|preserve|ssa-vs-master|all")
        ->capture_default_str();
    verify->add_option("--cap-total", o.cap_total, "Cap on the total count (default 30)");
    verify->add_option("--cap-per", o.cap_per, "Per-species caps");
    verify->add_option("--init-pure", o.init_pure, "Pure initial state (default 5 of each)");
    verify->add_option("--init-coherent", o.init_coherent, "Coherent means (default 1 of each)");
    verify->add_option("--t", o.t, "Time of the theorem2 derivative")->capture_default_str();
    verify->add_option("--step", o.h, "Finite-difference step h for theorem2")->capture_default_str();
    verify->add_option("--times", o.times, "Times for preserve")->capture_default_str();
    verify->add_option("--t-end", o.t_end, "Horizon for ssa-vs-master (default 1)");
    verify->add_option("--sample-dt", o.sample_dt, "Sampling interval (default t_end/10)");
    verify->add_option("--traj", o.traj, "Trajectories for ssa-vs-master")->capture_default_str();
    verify->add_option("--seed", o.seed)->capture_default_str();
    verify->add_option("--out", o.out, "Output JSON (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*parse) return cmd_parse(o);
        if (*rate) return cmd_rate(o);
        if (*master) return cmd_master(o);
        if (*ssa) return cmd_ssa(o);
        if (*verify) return cmd_verify(o);
    } catch (const crn::dsl::ParseError& e) {
        std::cerr << o.file << ":" << e.what() << "\n";
        return kUsage;
    } catch (const crn::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumeric;
    } catch (const crn::PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
