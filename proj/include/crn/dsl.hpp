#pragma once

// Line-oriented text format for stochastic reaction networks (`.rxn`).
//
//   # comment to end of line
//   species H, I, V
//   reaction alpha: 0 -> H @ 1
//   reaction gamma: H + V -> I @ 0.002
//   reaction dimer: 2 A -> A2 @ 1e-3
//
// Species lines may repeat; the declaration order fixes species indices.
// Repeated species inside one complex add their coefficients.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "crn/core_model.hpp"

namespace crn::dsl {

enum class ParseErrorKind {
    syntax,
    unknown_species,
    duplicate_species,
    duplicate_reaction,
    nonpositive_rate,
    bad_number,
};

std::string_view to_string(ParseErrorKind kind);

/// A positioned parse failure. Line and column are 1-based; a column one past
/// the end of the line points at a missing token.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, ParseErrorKind kind, std::string message);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    ParseErrorKind kind() const noexcept { return kind_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    ParseErrorKind kind_;
    std::string message_;
};

StochasticReactionNetwork parse_network(std::string_view text);

/// Canonical text; parse_network(format_network(n)) == n, rates bit-identical.
std::string format_network(const StochasticReactionNetwork& net);

/// Reads and parses a file. I/O failures throw std::runtime_error.
StochasticReactionNetwork load_network(const std::string& path);

}  // namespace crn::dsl
