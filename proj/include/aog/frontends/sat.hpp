#pragma once
#include <aog/grammar.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace aog {

/// CNF formula with at most three literals per clause. Literal +i is x_i and
/// -i is the negation (1-based).
struct Cnf3Sat {
    std::size_t num_vars = 0;
    std::vector<std::vector<int>> clauses;
};

/// DIMACS CNF: comment lines `c ...`, header `p cnf <vars> <clauses>`,
/// clauses terminated by 0. Throws FormatError.
Cnf3Sat parse_dimacs(std::string_view text);

std::vector<std::string> sat_violations(const Cnf3Sat& f);

struct SatConversion {
    Grammar grammar;
    /// One instance per clause terminal C_j, ids "c<j>".
    DataSample sample;
};

/// Grammar whose parses of {C_1..C_k} are the satisfying assignments, each
/// clause credited to one true literal.
///
/// Built over the null domain as S -> {A_1..A_n}, A_i -> X_i | NX_i, X_i ->
/// {B_j : x_i in c_j}, B_j -> C_j | ε, with 1/2 on every Or-choice. And-rules
/// are first chained into binary rules so ε can be removed without blowing
/// up: each symbol is replaced by its conditioned non-empty version, and a
/// binary And-node becomes a choice among "both children", "left only" and
/// "right only", weighted by the children's ε-probabilities. The root keeps
/// the ε mass on a terminal `eps` that never occurs in the sample, so a
/// parse scores the probability of its original derivation with every
/// ε-choice summed out. Throws InvalidModel when sat_violations is non-empty.
SatConversion sat_to_aog(const Cnf3Sat& f);

} // namespace aog
