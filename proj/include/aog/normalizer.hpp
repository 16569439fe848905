#pragma once
#include <aog/grammar.hpp>
#include <aog/parser.hpp>

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace aog {

/// Where a node of the normalized grammar came from.
struct NodeOrigin {
    enum class Role {
        Original,  // node of the input grammar
        Bin,       // intermediate And-node of a binarized rule, `<orig>#bin<i>`
        Alt,       // Or-node wrapping an And/terminal child, `<orig>#alt`
        Start,     // Or-node above an And start symbol, `<orig>#start`
    };
    NodeId id;
    Role role = Role::Original;
    NodeId origin;
    /// Position i of a Bin node in its chain (1-based); 0 otherwise.
    std::size_t position = 0;

    friend bool operator==(const NodeOrigin&, const NodeOrigin&) = default;
};

const char* to_string(NodeOrigin::Role role);

/// One original Or-rule collapsed into a normalized Or-rule.
struct ChainLink {
    std::size_t rule;
    NodeId head;
    NodeId child;

    friend bool operator==(const ChainLink&, const ChainLink&) = default;
};

/// Relates a normalized grammar to the grammar it was derived from.
struct NodeMap {
    std::vector<NodeOrigin> nodes;
    /// Per normalized Or-rule: the original Or-rules it stands for, outermost
    /// first. Empty for rules introduced by START or ALT.
    std::vector<std::vector<ChainLink>> or_rule_chains;

    const NodeOrigin* find(const NodeId& id) const;

    friend bool operator==(const NodeMap&, const NodeMap&) = default;
};

struct Normalized {
    GcnfGrammar grammar;
    NodeMap map;
};

/// Converts a valid grammar to generalized Chomsky normal form.
///
/// Steps, in order: START (Or-node over an And start symbol), BIN (left-deep
/// chains with cached tuple parameters; intermediate relations always hold
/// and the last rule applies the original relation and function to the
/// unpacked tuple), UNIT (Or-chains collapsed in topological order with
/// multiplied probabilities; parallel rules are kept distinct), ALT (And
/// children that are not Or-nodes get a probability-1 wrapper).
///
/// Throws UnsupportedGrammar for invalid input or unary And-rules and
/// UnitCycle for cyclic Or-chains.
Normalized to_gcnf(const Grammar& g);

/// Maps a parse over the normalized grammar back onto the original one:
/// wrapper nodes are dropped, binarized chains are flattened and collapsed
/// Or-chains are expanded. Throws MapMismatch on nodes unknown to `map`.
ParseTree project_parse(const ParseTree& tree, const NodeMap& map);

/// Normalizes `g`, runs the chart parser and projects the Viterbi tree back
/// onto `g`. Scores and statistics are those of the normalized parse.
ParseResult parse_grammar(const Grammar& g, const DataSample& x, ParseMode mode, const ParserBudget& budget = {});

} // namespace aog
