#include "crn/csv.hpp"

#include <charconv>

namespace crn::csv {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trajectory(std::ostream& out, const SpeciesTable& species,
                      const rate_eq::Trajectory& traj) {
    out << "t";
    for (const auto& n : species.names()) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        out << format_double(traj.times[r]);
        for (double v : traj.states[r]) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_series(std::ostream& out, const SpeciesTable& species, const fock::FockSeries& psi) {
    for (const auto& n : species.names()) out << n << ',';
    out << "coeff\n";
    for (const auto& [l, v] : psi.terms()) {
        for (Count c : l) out << c << ',';
        out << format_double(v) << '\n';
    }
}

void write_expected_values(std::ostream& out, const SpeciesTable& species,
                           std::span<const ExpectedRow> rows) {
    out << "t";
    for (const auto& n : species.names()) out << ',' << n;
    out << ",tail_mass\n";
    for (const auto& row : rows) {
        out << format_double(row.t);
        for (double v : row.means) out << ',' << format_double(v);
        out << ',' << format_double(row.tail_mass) << '\n';
    }
}

void write_ensemble(std::ostream& out, const SpeciesTable& species, const ssa::EnsembleStats& stats) {
    out << "t";
    for (const auto& n : species.names()) out << ',' << n << "_mean";
    for (const auto& n : species.names()) out << ',' << n << "_var";
    out << '\n';
    for (std::size_t r = 0; r < stats.times.size(); ++r) {
        out << format_double(stats.times[r]);
        for (double v : stats.mean[r]) out << ',' << format_double(v);
        for (double v : stats.variance[r]) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_generator(std::ostream& out, const Generator& h) {
    const auto& m = h.matrix();
    for (std::size_t j = 0; j < m.n; ++j) {
        for (std::size_t p = m.col_ptr[j]; p < m.col_ptr[j + 1]; ++p) {
            out << m.row[p] << ' ' << j << ' ' << format_double(m.value[p]) << '\n';
        }
    }
}

}  // namespace crn::csv
