#pragma once
#include <aog/grammar.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace aog {

struct SpnNode {
    enum class Kind { Indicator, Sum, Product };
    std::string id;
    Kind kind = Kind::Indicator;
    // Indicator: variable (1-based) and polarity.
    std::size_t var = 0;
    bool positive = true;
    // Sum/Product: child node indices; Sum also has one weight per child.
    std::vector<std::size_t> children;
    std::vector<double> weights;
};

/// Sum-product network over Boolean variables x_1..x_d.
struct Spn {
    std::size_t num_vars = 0;
    std::vector<SpnNode> nodes;
    std::size_t root = 0;
};

/// Line-based DAG listing, children may be referenced before definition:
///
///     vars 2
///     l1 = ind x1
///     l2 = ind !x1
///     s = sum 0.3*l1 0.7*l2
///     p = prod s l3
///     root p
///
/// Throws FormatError on syntax errors, duplicate ids and unknown references.
Spn parse_spn(std::string_view text);

struct SpnReport {
    std::vector<std::string> issues;
    /// Sorted variable indices per node; empty for nodes on a cycle.
    std::vector<std::vector<std::size_t>> scopes;
    bool ok() const { return issues.empty(); }
};

/// Checks acyclicity, completeness of sums, decomposability of products,
/// product arity, weights and the root scope.
SpnReport spn_validate(const Spn& s);

/// Bottom-up value under a full 0/1 assignment (size d).
double spn_evaluate(const Spn& s, const std::vector<bool>& assignment);
/// Root value with every indicator set to 1, i.e. the sum over assignments
/// for a valid network.
double spn_partition(const Spn& s);

struct SpnConversion {
    Grammar grammar;
    /// Unnormalized partition constant of the input network.
    double partition = 0.0;
};

/// Null-domain AOG: products become And-nodes (true/null), sums Or-nodes
/// with normalized weights, indicators terminals `x<i>` / `~x<i>`. Throws
/// InvalidModel when spn_validate reports issues.
SpnConversion spn_to_aog(const Spn& s);

/// The d indicator instances an assignment makes true, ids "v<i>".
DataSample spn_assignment_sample(const Spn& s, const std::vector<bool>& assignment);

} // namespace aog
