#pragma once

// CSV and text exports. Numbers use the shortest round-trip decimal form,
// '.' as decimal separator and '\n' line endings.

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "crn/core_model.hpp"
#include "crn/fock.hpp"
#include "crn/master_eq.hpp"
#include "crn/rate_eq.hpp"
#include "crn/ssa.hpp"

namespace crn::csv {

std::string format_double(double v);

/// t,<species...>
void write_trajectory(std::ostream& out, const SpeciesTable& species,
                      const rate_eq::Trajectory& traj);

/// <species counts...>,coeff
void write_series(std::ostream& out, const SpeciesTable& species, const fock::FockSeries& psi);

struct ExpectedRow {
    double t;
    std::vector<double> means;
    double tail_mass;
};

/// t,<species...>,tail_mass
void write_expected_values(std::ostream& out, const SpeciesTable& species,
                           std::span<const ExpectedRow> rows);

/// t,<species>_mean...,<species>_var...
void write_ensemble(std::ostream& out, const SpeciesTable& species, const ssa::EnsembleStats& stats);

/// One "row col value" line per stored entry (state ordinals).
void write_generator(std::ostream& out, const Generator& h);

}  // namespace crn::csv
