#include "crn/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "crn/error.hpp"

namespace crn::dsl {

std::string_view to_string(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::syntax: return "syntax";
        case ParseErrorKind::unknown_species: return "unknown-species";
        case ParseErrorKind::duplicate_species: return "duplicate-species";
        case ParseErrorKind::duplicate_reaction: return "duplicate-reaction";
        case ParseErrorKind::nonpositive_rate: return "nonpositive-rate";
        case ParseErrorKind::bad_number: return "bad-number";
    }
    return "unknown";
}

ParseError::ParseError(std::size_t line, std::size_t column, ParseErrorKind kind,
                       std::string message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " +
                         std::string(to_string(kind)) + ": " + message),
      line_(line),
      column_(column),
      kind_(kind),
      message_(std::move(message)) {}

namespace {

bool is_name_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '+' || c == '\'' || c == '-';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct Term {
    Count coeff;
    std::string species;
    std::size_t line;
    std::size_t column;
};

struct PendingReaction {
    std::string name;
    std::vector<Term> source;
    std::vector<Term> target;
    double rate;
};

/// Cursor over one line with the comment already stripped.
class LineCursor {
public:
    LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }
    std::string_view rest() const { return text_.substr(std::min(pos_, text_.size())); }
    std::size_t column() const { return pos_ + 1; }
    std::size_t line() const { return line_; }

    bool consume(std::string_view token) {
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(ParseErrorKind kind, std::string message) const {
        throw ParseError(line_, column(), kind, std::move(message));
    }

    void expect(std::string_view token) {
        skip_ws();
        if (!consume(token)) fail(ParseErrorKind::syntax, "expected '" + std::string(token) + "'");
    }

    std::string name(const char* what) {
        skip_ws();
        if (!is_name_start(peek())) fail(ParseErrorKind::syntax, std::string("expected ") + what);
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_name_char(text_[pos_])) {
            // "A->B": the arrow is never part of a name.
            if (text_[pos_] == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') break;
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    /// Maximal run of [0-9.eE] starting at a digit, or a leading sign.
    std::string_view number_token() {
        const std::size_t start = pos_;
        if (peek() == '-') ++pos_;
        while (pos_ < text_.size() && (is_digit(text_[pos_]) || text_[pos_] == '.')) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    /// Everything up to the next blank.
    std::string_view word() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\t') ++pos_;
        return text_.substr(start, pos_ - start);
    }

    void require_end() {
        skip_ws();
        if (!at_end()) fail(ParseErrorKind::syntax, "unexpected trailing text");
    }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

std::vector<Term> parse_complex(LineCursor& cur) {
    std::vector<Term> terms;
    cur.skip_ws();
    const char first = cur.peek();
    if (first == '0') {
        // Either the empty complex or a (bad) coefficient starting with 0.
        const std::size_t col = cur.column();
        auto tok = cur.number_token();
        LineCursor probe = cur;
        probe.skip_ws();
        if (tok == "0" && !is_name_start(probe.peek())) return terms;
        throw ParseError(cur.line(), col, ParseErrorKind::bad_number,
                         "coefficient must be a positive integer, got '" + std::string(tok) + "'");
    }
    for (;;) {
        cur.skip_ws();
        Count coeff = 1;
        const std::size_t term_col = cur.column();
        const char c = cur.peek();
        if (c == '-' && cur.rest().starts_with("->")) {
            cur.fail(ParseErrorKind::syntax, "expected a species before '->'");
        }
        if (is_digit(c) || c == '-' || c == '.') {
            auto tok = cur.number_token();
            Count value = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (ec != std::errc() || ptr != tok.data() + tok.size() || value == 0) {
                throw ParseError(cur.line(), term_col, ParseErrorKind::bad_number,
                                 "coefficient must be a positive integer, got '" + std::string(tok) +
                                     "'");
            }
            coeff = value;
        }
        cur.skip_ws();
        const std::size_t name_col = cur.column();
        std::string species = cur.name("species name");
        terms.push_back({coeff, std::move(species), cur.line(), name_col});
        cur.skip_ws();
        if (cur.peek() == '+') {
            cur.consume("+");
            continue;
        }
        return terms;
    }
}

double parse_rate(LineCursor& cur) {
    cur.skip_ws();
    const std::size_t col = cur.column();
    auto tok = cur.word();
    if (tok.empty()) cur.fail(ParseErrorKind::syntax, "expected a rate constant");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(value)) {
        throw ParseError(cur.line(), col, ParseErrorKind::bad_number,
                         "malformed rate constant '" + std::string(tok) + "'");
    }
    if (!(value > 0.0)) {
        throw ParseError(cur.line(), col, ParseErrorKind::nonpositive_rate,
                         "rate constant must be positive, got '" + std::string(tok) + "'");
    }
    return value;
}

MultiIndex resolve(const std::vector<Term>& terms, const SpeciesTable& species) {
    MultiIndex out(species.size());
    for (const auto& t : terms) {
        auto idx = species.find(t.species);
        if (!idx) {
            throw ParseError(t.line, t.column, ParseErrorKind::unknown_species,
                             "species '" + t.species + "' is not declared");
        }
        if (__builtin_add_overflow(out[*idx], t.coeff, &out[*idx])) {
            throw ParseError(t.line, t.column, ParseErrorKind::bad_number,
                             "coefficient overflow for '" + t.species + "'");
        }
    }
    return out;
}

void append_complex(std::string& out, const MultiIndex& c, const SpeciesTable& species) {
    bool first = true;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        if (!first) out += " + ";
        if (c[i] != 1) out += std::to_string(c[i]) + " ";
        out += species.name(i);
        first = false;
    }
    if (first) out += "0";
}

}  // namespace

StochasticReactionNetwork parse_network(std::string_view text) {
    std::vector<std::string> names;
    std::set<std::string> declared;
    std::vector<PendingReaction> pending;
    std::set<std::string> reaction_names;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(start, nl - start);
        ++line_no;
        start = nl + 1;

        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        LineCursor cur(line, line_no);
        cur.skip_ws();
        if (cur.at_end()) continue;

        const std::size_t kw_col = cur.column();
        std::string keyword = cur.at_end() || !is_name_start(cur.peek()) ? "" : cur.name("keyword");
        if (keyword == "species") {
            for (;;) {
                cur.skip_ws();
                const std::size_t col = cur.column();
                std::string n = cur.name("species name");
                if (!declared.insert(n).second) {
                    throw ParseError(line_no, col, ParseErrorKind::duplicate_species,
                                     "species '" + n + "' declared twice");
                }
                names.push_back(std::move(n));
                cur.skip_ws();
                if (!cur.consume(",")) break;
            }
            cur.require_end();
        } else if (keyword == "reaction") {
            cur.skip_ws();
            const std::size_t name_col = cur.column();
            PendingReaction r;
            r.name = cur.name("reaction name");
            if (!reaction_names.insert(r.name).second) {
                throw ParseError(line_no, name_col, ParseErrorKind::duplicate_reaction,
                                 "reaction '" + r.name + "' defined twice");
            }
            cur.expect(":");
            r.source = parse_complex(cur);
            cur.expect("->");
            r.target = parse_complex(cur);
            cur.expect("@");
            r.rate = parse_rate(cur);
            cur.require_end();
            pending.push_back(std::move(r));
        } else {
            throw ParseError(line_no, kw_col, ParseErrorKind::syntax,
                             "expected 'species' or 'reaction'");
        }
    }

    if (names.empty()) {
        throw ParseError(1, 1, ParseErrorKind::syntax, "no species declared");
    }
    SpeciesTable species(names);
    std::vector<Reaction> reactions;
    reactions.reserve(pending.size());
    for (const auto& p : pending) {
        // Resolved into locals: some compilers leak already-built members when a
        // later aggregate initializer throws.
        auto source = resolve(p.source, species);
        auto target = resolve(p.target, species);
        reactions.push_back({p.name, std::move(source), std::move(target), p.rate});
    }
    return StochasticReactionNetwork(std::move(species), std::move(reactions));
}

std::string format_network(const StochasticReactionNetwork& net) {
    std::string out = "species ";
    const auto& names = net.species().names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    out += "\n";
    for (const auto& r : net.reactions()) {
        out += "reaction " + r.name + ": ";
        append_complex(out, r.source, net.species());
        out += " -> ";
        append_complex(out, r.target, net.species());
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, r.rate);
        out += " @ ";
        out.append(buf, res.ptr);
        out += "\n";
    }
    return out;
}

StochasticReactionNetwork load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str());
}

}  // namespace crn::dsl
