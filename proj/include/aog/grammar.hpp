#pragma once
#include <aog/domain.hpp>
#include <aog/param.hpp>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace aog {

using NodeId = std::string;

enum class NodeKind : std::uint8_t { Terminal, And, Or };

const char* to_string(NodeKind kind);

struct Node {
    NodeId id;
    NodeKind kind;

    friend bool operator==(const Node&, const Node&) = default;
};

/// A -> {x_1, ..., x_n} with parameter relation and parameter function.
struct AndRule {
    NodeId head;
    std::vector<NodeId> children;
    DomainRef relation;
    DomainRef function;

    friend bool operator==(const AndRule&, const AndRule&) = default;
};

/// O -> x with conditional probability p (linear space).
struct OrRule {
    NodeId head;
    NodeId child;
    double prob;

    friend bool operator==(const OrRule&, const OrRule&) = default;
};

/// Stochastic context-free And-Or grammar <Σ, N, S, θ, R>.
///
/// Rule lists preserve authoring order; that order drives sampling and the
/// chart's tie-breaks. A grammar is a plain value: build it, validate it,
/// then treat it as immutable.
struct Grammar {
    DomainSpec domain;
    std::vector<Node> nodes;
    NodeId start;
    std::vector<AndRule> and_rules;
    std::vector<OrRule> or_rules;

    std::optional<NodeKind> kind_of(const NodeId& id) const;
    const Node* find(const NodeId& id) const;
    /// Index of the And-rule headed by `head`, if any (first one when the
    /// grammar is invalid and has several).
    std::optional<std::size_t> and_rule_of(const NodeId& head) const;
    std::vector<std::size_t> or_rules_of(const NodeId& head) const;

    /// Number of rules, |R|.
    std::size_t rule_count() const { return and_rules.size() + or_rules.size(); }
    /// Symbol size: every rule counts its head plus its right-hand side.
    std::size_t symbol_size() const;

    friend bool operator==(const Grammar&, const Grammar&) = default;
};

/// Must match Or-rule probability sums within this tolerance.
inline constexpr double kProbSumTolerance = 1e-9;

struct ValidationIssue {
    enum class Code {
        DuplicateNode,
        EmptyId,
        UnknownStart,
        StartNotNonterminal,
        UnknownNode,
        WrongHeadKind,
        MissingAndRule,
        MultipleAndRules,
        AndArity,
        NoOrRules,
        ProbRange,
        ProbSum,
        UnresolvedRef,
        UnknownDomain,
    };
    Code code;
    std::string message;

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

using ValidationReport = std::vector<ValidationIssue>;

/// Lists every violated structural invariant. An empty report means valid.
ValidationReport validate_grammar(const Grammar& g);

/// Rescales each Or-node's rule probabilities to sum to one.
Grammar renormalized(Grammar g);

struct TerminalInstance {
    std::string id;
    NodeId terminal;
    Param param;

    friend bool operator==(const TerminalInstance&, const TerminalInstance&) = default;
};

/// Instances in a sample are kept in a fixed order; ids must be unique.
struct DataSample {
    std::vector<TerminalInstance> instances;

    std::size_t size() const { return instances.size(); }
    bool empty() const { return instances.empty(); }

    friend bool operator==(const DataSample&, const DataSample&) = default;
};

/// Throws InvalidSample on duplicate ids or terminals unknown to `g`.
void check_sample(const Grammar& g, const DataSample& x);

struct TreeNode {
    NodeId node;
    Param param;
    std::vector<TreeNode> children;
    /// Index into Grammar::or_rules for Or-nodes; resolved from (head, child)
    /// when absent and unambiguous.
    std::optional<std::size_t> or_rule;
    /// Terminal-instance id for leaves.
    std::optional<std::string> instance;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct ParseTree {
    TreeNode root;
    double log_prob = -std::numeric_limits<double>::infinity();

    friend bool operator==(const ParseTree&, const ParseTree&) = default;
};

/// Σ log p over the tree's Or-edges. Throws InvalidTree when any node
/// violates its rule or the domain relation/function.
double tree_probability(const Grammar& g, const ParseTree& tree);
double tree_probability(const Grammar& g, const TreeNode& root);

/// How many times each Or-rule (by index) is used in the tree.
std::map<std::size_t, std::size_t> or_rule_usage(const Grammar& g, const TreeNode& root);

/// Possible-world form Σ_r |g_r| log p_r built from or_rule_usage.
double grouped_log_probability(const Grammar& g, const TreeNode& root);

/// Leaf instances in left-to-right order.
std::vector<TerminalInstance> tree_leaves(const TreeNode& root);

/// Tree is a compositional structure of `x`: root is the start symbol, it
/// passes tree_probability checks and its leaves are exactly `x`.
bool explains_sample(const Grammar& g, const TreeNode& root, const DataSample& x);

inline constexpr std::size_t kDefaultMaxDepth = 64;

struct Sampled {
    ParseTree tree;
    DataSample sample;
};

/// Forward generation from the start symbol. Or-rules are chosen by
/// cumulative-probability inversion in authoring order; parameters are
/// assigned bottom-up from domain leaf positions when the domain supports
/// it, otherwise top-down from the domain's default root.
///
/// Throws DepthExceeded past `max_depth` and DomainError when the domain
/// cannot realize child parameters.
Sampled sample(const Grammar& g, std::uint64_t seed, std::size_t max_depth = kDefaultMaxDepth);

/// id -> index lookups and per-node rule lists, used by the algorithms.
class GrammarIndex {
public:
    explicit GrammarIndex(const Grammar& g);

    const Grammar& grammar() const { return *g_; }
    std::optional<std::size_t> node_index(const NodeId& id) const;
    std::size_t require(const NodeId& id) const;
    NodeKind kind(std::size_t node) const { return g_->nodes[node].kind; }
    const std::vector<std::size_t>& or_rules_of(std::size_t node) const { return or_by_head_[node]; }
    std::optional<std::size_t> and_rule_of(std::size_t node) const;

private:
    const Grammar* g_;
    std::unordered_map<NodeId, std::size_t> ids_;
    std::vector<std::vector<std::size_t>> or_by_head_;
    std::vector<std::optional<std::size_t>> and_by_head_;
};

} // namespace aog
