#pragma once

// CNF/WCNF problem representation and DIMACS parsing.
//
// Variables are 1-based throughout, matching DIMACS. State vectors
// (spins, oscillator amplitudes) are 0-based arrays where variable v
// lives at index v-1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hoim {

struct Literal {
    int variable = 0;     // >= 1
    bool negated = false;

    friend bool operator==(const Literal&, const Literal&) = default;
};

struct Clause {
    std::vector<Literal> literals;
    double weight = 1.0;

    friend bool operator==(const Clause&, const Clause&) = default;
};

struct CnfFormula {
    int num_vars = 0;
    std::vector<Clause> clauses;
    bool weighted = false;  // WCNF origin

    friend bool operator==(const CnfFormula&, const CnfFormula&) = default;
};

/// Parse failure with the 1-based input line it was detected on.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

namespace detail {

// Whitespace tokenizer that remembers the line each token came from.
class LineTokenizer {
public:
    explicit LineTokenizer(std::istream& in) : in_(in) {}

    bool next(std::string& tok) {
        while (true) {
            if (pos_ >= line_.size()) {
                if (!std::getline(in_, line_)) return false;
                ++line_no_;
                pos_ = 0;
                continue;
            }
            while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
            if (pos_ >= line_.size()) continue;
            size_t start = pos_;
            while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
            tok = line_.substr(start, pos_ - start);
            return true;
        }
    }

    // Skip the remainder of the current line (DIMACS comments).
    void skip_line() { pos_ = line_.size(); }

    int line() const { return line_no_; }

private:
    std::istream& in_;
    std::string line_;
    size_t pos_ = 0;
    int line_no_ = 0;
};

inline long long to_int(const std::string& tok, const char* what, int line) {
    size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(std::string("malformed ") + what + " '" + tok + "'", line);
    }
    if (used != tok.size())
        throw ParseError(std::string("malformed ") + what + " '" + tok + "'", line);
    return v;
}

inline double to_weight(const std::string& tok, int line) {
    size_t used = 0;
    double v = 0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError("malformed clause weight '" + tok + "'", line);
    }
    if (used != tok.size() || !std::isfinite(v))
        throw ParseError("malformed clause weight '" + tok + "'", line);
    return v;
}

}  // namespace detail

/// Parse a DIMACS CNF (`p cnf n m`) or WCNF (`p wcnf n m [top]`) document.
/// Comment lines start with 'c'; a '%' token ends the clause section
/// (SATLIB trailer). Throws ParseError with the offending line number.
inline CnfFormula parse_dimacs(std::istream& in) {
    detail::LineTokenizer tok(in);
    std::string t;

    // header
    bool wcnf = false;
    long long declared_vars = -1, declared_clauses = -1;
    while (true) {
        if (!tok.next(t)) throw ParseError("missing 'p' header", tok.line());
        if (t == "c" || t[0] == 'c') { tok.skip_line(); continue; }
        if (t != "p") throw ParseError("expected 'p' header, got '" + t + "'", tok.line());
        const int header_line = tok.line();
        std::string fmt;
        if (!tok.next(fmt) || tok.line() != header_line)
            throw ParseError("truncated 'p' header", header_line);
        if (fmt == "cnf") wcnf = false;
        else if (fmt == "wcnf") wcnf = true;
        else throw ParseError("unknown format '" + fmt + "' (expected cnf or wcnf)", header_line);
        std::string ns, ms;
        if (!tok.next(ns) || tok.line() != header_line || !tok.next(ms) || tok.line() != header_line)
            throw ParseError("header must declare variable and clause counts", header_line);
        declared_vars = detail::to_int(ns, "variable count", header_line);
        declared_clauses = detail::to_int(ms, "clause count", header_line);
        if (declared_vars < 0) throw ParseError("negative variable count", header_line);
        if (declared_clauses <= 0) throw ParseError("zero clauses declared", header_line);
        if (wcnf) tok.skip_line();  // optional 'top' value, unused
        break;
    }

    CnfFormula formula;
    formula.num_vars = static_cast<int>(declared_vars);
    formula.weighted = wcnf;

    Clause current;
    bool in_clause = false;
    bool want_weight = wcnf;
    bool done = false;
    while (!done && tok.next(t)) {
        if (t[0] == 'c' && !in_clause) { tok.skip_line(); continue; }
        if (t == "%") { done = true; break; }
        const int line = tok.line();
        if (want_weight && !in_clause) {
            double w = detail::to_weight(t, line);
            if (w <= 0) throw ParseError("clause weight must be positive", line);
            current.weight = w;
            in_clause = true;
            continue;
        }
        long long lit = detail::to_int(t, "literal", line);
        if (lit == 0) {
            if (current.literals.empty()) throw ParseError("empty clause", line);
            if (static_cast<long long>(formula.clauses.size()) == declared_clauses)
                throw ParseError("more clauses than declared", line);
            formula.clauses.push_back(std::move(current));
            current = Clause{};
            in_clause = false;
            continue;
        }
        in_clause = true;
        long long var = lit > 0 ? lit : -lit;
        if (var > declared_vars)
            throw ParseError("literal " + std::to_string(lit) + " exceeds declared variable count", line);
        Literal l{static_cast<int>(var), lit < 0};
        for (const Literal& seen : current.literals) {
            if (seen.variable == l.variable)
                throw ParseError(seen.negated == l.negated
                                     ? "duplicate literal in clause"
                                     : "complementary literals in clause", line);
        }
        current.literals.push_back(l);
    }
    if (in_clause)
        throw ParseError("clause not 0-terminated at end of input", tok.line());
    if (static_cast<long long>(formula.clauses.size()) != declared_clauses)
        throw ParseError("declared " + std::to_string(declared_clauses) + " clauses but found " +
                             std::to_string(formula.clauses.size()), tok.line());
    return formula;
}

inline CnfFormula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

inline CnfFormula parse_dimacs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return parse_dimacs(in);
}

namespace detail {

inline void format_weight(std::ostream& out, double w) {
    if (w == std::floor(w) && std::abs(w) < 1e15) {
        out << static_cast<long long>(w);
    } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", w);
        out << buf;
    }
}

}  // namespace detail

/// Canonical re-emission; parse_dimacs(write_dimacs(f)) == f.
inline void write_dimacs(const CnfFormula& f, std::ostream& out) {
    out << "p " << (f.weighted ? "wcnf" : "cnf") << ' ' << f.num_vars << ' ' << f.clauses.size() << '\n';
    for (const Clause& c : f.clauses) {
        if (f.weighted) {
            detail::format_weight(out, c.weight);
            out << ' ';
        }
        for (const Literal& l : c.literals) out << (l.negated ? -l.variable : l.variable) << ' ';
        out << "0\n";
    }
}

inline std::string write_dimacs(const CnfFormula& f) {
    std::ostringstream out;
    write_dimacs(f, out);
    return out.str();
}

struct InstanceStats {
    int num_vars = 0;
    int num_clauses = 0;
    std::map<int, int> clause_size_histogram;
    int max_clause_size = 0;
    long total_literals = 0;
};

inline InstanceStats formula_stats(const CnfFormula& f) {
    InstanceStats s;
    s.num_vars = f.num_vars;
    s.num_clauses = static_cast<int>(f.clauses.size());
    for (const Clause& c : f.clauses) {
        int k = static_cast<int>(c.literals.size());
        ++s.clause_size_histogram[k];
        s.max_clause_size = std::max(s.max_clause_size, k);
        s.total_literals += k;
    }
    return s;
}

/// True when the literal holds under the bipolar assignment (+1 = true).
inline bool literal_true(const Literal& l, std::span<const int> spins) {
    int s = spins[l.variable - 1];
    return l.negated ? s < 0 : s > 0;
}

inline bool clause_satisfied(const Clause& c, std::span<const int> spins) {
    for (const Literal& l : c.literals)
        if (literal_true(l, spins)) return true;
    return false;
}

inline int count_satisfied(const CnfFormula& f, std::span<const int> spins) {
    int n = 0;
    for (const Clause& c : f.clauses)
        if (clause_satisfied(c, spins)) ++n;
    return n;
}

}  // namespace hoim
