#pragma once

// CNF data model: DIMACS-encoded literals, clauses, formulas, tri-state
// assignments and the clause/formula evaluation primitives every other
// component builds on.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace bcpsim {

using Var = std::uint32_t;

/// A variable or its negation, DIMACS-encoded: +v asserts v, -v negates it.
class Literal {
public:
  constexpr Literal() = default;
  constexpr explicit Literal(std::int32_t dimacs) : value_(dimacs) {}
  constexpr Literal(Var var, bool negated)
      : value_(negated ? -static_cast<std::int32_t>(var) : static_cast<std::int32_t>(var)) {}

  constexpr std::int32_t dimacs() const { return value_; }
  constexpr Var var() const { return static_cast<Var>(value_ < 0 ? -value_ : value_); }
  constexpr bool negated() const { return value_ < 0; }
  constexpr bool valid() const { return value_ != 0; }

  constexpr Literal operator-() const { return Literal{-value_}; }
  constexpr auto operator<=>(const Literal&) const = default;

  friend std::ostream& operator<<(std::ostream& os, Literal lit) { return os << lit.value_; }

private:
  std::int32_t value_ = 0;
};

using Clause = std::vector<Literal>;

enum class Value : std::uint8_t { Unassigned, True, False };

constexpr Value operator!(Value v) {
  switch (v) {
  case Value::True: return Value::False;
  case Value::False: return Value::True;
  default: return Value::Unassigned;
  }
}

/// Tri-state value per variable, indexed 1..num_vars.
class Assignment {
public:
  Assignment() = default;
  explicit Assignment(std::size_t num_vars) : values_(num_vars + 1, Value::Unassigned) {}

  std::size_t num_vars() const { return values_.empty() ? 0 : values_.size() - 1; }

  Value operator[](Var v) const { return values_.at(v); }

  /// Value of the literal (not the variable) under this assignment.
  Value value(Literal lit) const {
    Value v = values_.at(lit.var());
    return lit.negated() ? !v : v;
  }

  bool is_assigned(Var v) const { return values_.at(v) != Value::Unassigned; }

  /// Makes `lit` true.
  void assign(Literal lit) { values_.at(lit.var()) = lit.negated() ? Value::False : Value::True; }
  void set(Var v, Value value) { values_.at(v) = value; }
  void unassign(Var v) { values_.at(v) = Value::Unassigned; }

  std::size_t assigned_count() const {
    return static_cast<std::size_t>(
        std::count_if(values_.begin() + (values_.empty() ? 0 : 1), values_.end(),
                      [](Value v) { return v != Value::Unassigned; }));
  }

  /// All assigned variables as true literals, ascending by variable.
  std::vector<Literal> literals() const {
    std::vector<Literal> out;
    for (Var v = 1; v < values_.size(); ++v) {
      if (values_[v] != Value::Unassigned) out.emplace_back(v, values_[v] == Value::False);
    }
    return out;
  }

  bool operator==(const Assignment&) const = default;

private:
  std::vector<Value> values_;
};

struct ClauseStatus {
  enum class Kind : std::uint8_t { Satisfied, Falsified, Unit, Unresolved };

  Kind kind = Kind::Unresolved;
  Literal unit;               // set only for Unit
  std::size_t free_count = 0; // unassigned literal count when not satisfied

  static ClauseStatus satisfied() { return {Kind::Satisfied, {}, 0}; }
  static ClauseStatus falsified() { return {Kind::Falsified, {}, 0}; }

  bool operator==(const ClauseStatus&) const = default;
};

inline ClauseStatus clause_status(const Clause& clause, const Assignment& assignment) {
  std::size_t free_count = 0;
  Literal last_free;
  for (Literal lit : clause) {
    switch (assignment.value(lit)) {
    case Value::True: return ClauseStatus::satisfied();
    case Value::Unassigned:
      ++free_count;
      last_free = lit;
      break;
    case Value::False: break;
    }
  }
  if (free_count == 0) return ClauseStatus::falsified();
  if (free_count == 1) return {ClauseStatus::Kind::Unit, last_free, 1};
  return {ClauseStatus::Kind::Unresolved, {}, free_count};
}

struct Formula {
  std::size_t num_vars = 0;
  std::vector<Clause> clauses;
  /// Input contained an empty clause; the formula is UNSAT regardless of `clauses`.
  bool has_empty_clause = false;
  /// Preprocessing and header-reconciliation warnings, in input order.
  std::vector<std::string> notes;

  std::size_t num_clauses() const { return clauses.size(); }

  friend bool operator==(const Formula& a, const Formula& b) {
    return a.num_vars == b.num_vars && a.has_empty_clause == b.has_empty_clause &&
           a.clauses == b.clauses;
  }
};

enum class Evaluation : std::uint8_t { Satisfied, Falsified, Undetermined };

inline Evaluation evaluate(const Formula& formula, const Assignment& assignment) {
  if (formula.has_empty_clause) return Evaluation::Falsified;
  bool all_satisfied = true;
  for (const Clause& clause : formula.clauses) {
    switch (clause_status(clause, assignment).kind) {
    case ClauseStatus::Kind::Falsified: return Evaluation::Falsified;
    case ClauseStatus::Kind::Satisfied: break;
    default: all_satisfied = false;
    }
  }
  return all_satisfied ? Evaluation::Satisfied : Evaluation::Undetermined;
}

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Int> bool parse_int(std::string_view tok, Int& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

} // namespace detail

/// Parses DIMACS CNF. Duplicate literals are removed, tautologies dropped and
/// an empty clause sets `has_empty_clause`; each of these leaves a note.
inline Formula parse_dimacs(std::istream& in) {
  Formula f;
  bool have_header = false;
  std::size_t declared_clauses = 0;
  std::size_t parsed_clauses = 0; // including dropped tautologies and empty clauses
  std::size_t line_no = 0;
  std::size_t clause_start_line = 0;
  Clause current;
  bool in_clause = false;

  auto finish_clause = [&] {
    ++parsed_clauses;
    Clause deduped;
    deduped.reserve(current.size());
    std::unordered_set<std::int32_t> seen;
    bool tautology = false;
    for (Literal lit : current) {
      if (seen.contains(-lit.dimacs())) tautology = true;
      if (seen.insert(lit.dimacs()).second) deduped.push_back(lit);
    }
    if (deduped.size() != current.size()) {
      f.notes.push_back("clause " + std::to_string(parsed_clauses) +
                        " (line " + std::to_string(clause_start_line) +
                        "): duplicate literals removed");
    }
    if (current.empty()) {
      f.has_empty_clause = true;
      f.notes.push_back("clause " + std::to_string(parsed_clauses) + " (line " +
                        std::to_string(clause_start_line) + "): empty clause, formula is UNSAT");
    } else if (tautology) {
      f.notes.push_back("clause " + std::to_string(parsed_clauses) + " (line " +
                        std::to_string(clause_start_line) + "): tautology dropped");
    } else {
      f.clauses.push_back(std::move(deduped));
    }
    current.clear();
    in_clause = false;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.front().front() == 'c') continue;
    if (tokens.front().front() == '%') break; // SATLIB end-of-data marker
    if (tokens.front() == "p") {
      if (have_header) throw ParseError(line_no, "duplicate problem line");
      if (tokens.size() != 4 || tokens[1] != "cnf")
        throw ParseError(line_no, "malformed problem line, expected 'p cnf <vars> <clauses>'");
      long long vars = 0, clauses = 0;
      if (!detail::parse_int(tokens[2], vars) || !detail::parse_int(tokens[3], clauses) ||
          vars < 0 || clauses < 0)
        throw ParseError(line_no, "malformed counts in problem line");
      f.num_vars = static_cast<std::size_t>(vars);
      declared_clauses = static_cast<std::size_t>(clauses);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "clause data before 'p cnf' header");
    for (auto tok : tokens) {
      std::int64_t v = 0;
      if (!detail::parse_int(tok, v))
        throw ParseError(line_no, "invalid literal '" + std::string(tok) + "'");
      if (!in_clause) {
        clause_start_line = line_no;
        in_clause = true;
      }
      if (v == 0) {
        finish_clause();
        continue;
      }
      std::uint64_t var = static_cast<std::uint64_t>(v < 0 ? -v : v);
      if (var > f.num_vars)
        throw ParseError(line_no, "variable " + std::to_string(var) +
                                      " exceeds declared count " + std::to_string(f.num_vars));
      current.emplace_back(static_cast<std::int32_t>(v));
    }
  }
  if (!have_header) throw ParseError(line_no, "missing 'p cnf' header");
  if (in_clause) {
    f.notes.push_back("last clause not terminated by 0; accepted");
    finish_clause();
  }
  if (parsed_clauses != declared_clauses) {
    f.notes.push_back("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                      std::to_string(parsed_clauses));
  }
  return f;
}

inline Formula parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

inline void write_dimacs(std::ostream& out, const Formula& f) {
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() + (f.has_empty_clause ? 1 : 0) << '\n';
  for (const Clause& clause : f.clauses) {
    for (Literal lit : clause) out << lit << ' ';
    out << "0\n";
  }
  if (f.has_empty_clause) out << "0\n";
}

inline std::string write_dimacs(const Formula& f) {
  std::ostringstream out;
  write_dimacs(out, f);
  return out.str();
}

/// Builds a formula directly from DIMACS integer lists, applying the same
/// preprocessing as the parser. num_vars is the largest variable seen.
inline Formula make_formula(const std::vector<std::vector<int>>& clauses, std::size_t num_vars = 0) {
  std::ostringstream text;
  std::size_t max_var = num_vars;
  for (const auto& c : clauses)
    for (int l : c) max_var = std::max<std::size_t>(max_var, static_cast<std::size_t>(std::abs(l)));
  text << "p cnf " << max_var << ' ' << clauses.size() << '\n';
  for (const auto& c : clauses) {
    for (int l : c) text << l << ' ';
    text << "0\n";
  }
  return parse_dimacs(text.str());
}

} // namespace bcpsim
