#pragma once
#include <aog/grammar.hpp>

#include <map>
#include <string>
#include <vector>

namespace aog {

enum class LogicDialect { Fol, Slp };

const char* to_string(LogicDialect d);
/// "fol" or "slp"; throws ConfigError otherwise.
LogicDialect parse_dialect(const std::string& name);

struct LogicDocument {
    std::vector<std::string> lines;
    LogicDialect dialect = LogicDialect::Fol;

    /// Lines joined with '\n', newline-terminated.
    std::string text() const;
};

/// Predicate/atom names for every node: lowercase, non-alphanumerics become
/// '_', a leading digit or '_' gets an "n_" prefix, collisions get "_2",
/// "_3", ... in NodeId order.
std::map<NodeId, std::string> logic_names(const Grammar& g);

/// Probability rendered with the fewest digits that round-trip; always has
/// a decimal point or exponent ("1.0", "0.6", "1e-20").
std::string format_probability(double p);

/// First-order rendering. Per nonterminal in NodeId order:
///
///     ∀x ∃y1,y2, a(x) → b(y1) ∧ r_1_a(x,y1) ∧ c(y2) ∧ r_2_a(x,y2) ∧ r_theta_a(θ(x),θ(y1),θ(y2))
///     ∀x, o(x) → b(x) : 0.6
///     ∀x, o(x) → b(x) ↑ c(x)           one per unordered pair of alternatives
///     ∀x, o(x) → b(x) ∨ c(x)           coverage
///
/// Relation atoms are explained by `%` comment lines naming the domain
/// relation and function. The possible-world constraints (a single root
/// object, distinct objects per tree node, nothing beyond the tree) appear
/// only as comments.
/// Throws UnsupportedGrammar when g is invalid.
LogicDocument emit_fol(const Grammar& g);

/// Stochastic logic program: one clause per rule in NodeId order,
///
///     1.0: a(X,P) :- b(X_1,P_1), c(X_2,P_2), append([X_1,X_2],X), r_1_a(X,X_1), r_2_a(X,X_2), r_theta_a(P,P_1,P_2).
///     0.6: o(X,P) :- b(X,P).
///     0.4: o([t],[P]).                 terminal child; [null] over the null domain
///
/// then commented stubs for the domain-defined r_* predicates and the goal
/// `:- s(X,P).`. Throws UnsupportedGrammar when g is invalid.
LogicDocument emit_slp(const Grammar& g);

LogicDocument emit_logic(const Grammar& g, LogicDialect d);

} // namespace aog
