#include <aog/error.hpp>
#include <aog/grammar.hpp>

#include <cmath>
#include <set>
#include <unordered_set>

namespace aog {

const char* to_string(NodeKind kind)
{
    switch (kind) {
    case NodeKind::Terminal: return "terminal";
    case NodeKind::And: return "and";
    case NodeKind::Or: return "or";
    }
    return "?";
}

const Node* Grammar::find(const NodeId& id) const
{
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

std::optional<NodeKind> Grammar::kind_of(const NodeId& id) const
{
    if (const auto* n = find(id)) return n->kind;
    return std::nullopt;
}

std::optional<std::size_t> Grammar::and_rule_of(const NodeId& head) const
{
    for (std::size_t i = 0; i < and_rules.size(); ++i) {
        if (and_rules[i].head == head) return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> Grammar::or_rules_of(const NodeId& head) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < or_rules.size(); ++i) {
        if (or_rules[i].head == head) out.push_back(i);
    }
    return out;
}

std::size_t Grammar::symbol_size() const
{
    std::size_t total = 0;
    for (const auto& r : and_rules) total += 1 + r.children.size();
    return total + 2 * or_rules.size();
}

GrammarIndex::GrammarIndex(const Grammar& g) : g_(&g)
{
    for (std::size_t i = 0; i < g.nodes.size(); ++i) ids_.emplace(g.nodes[i].id, i);
    or_by_head_.resize(g.nodes.size());
    and_by_head_.resize(g.nodes.size());
    for (std::size_t r = 0; r < g.or_rules.size(); ++r) {
        if (auto h = node_index(g.or_rules[r].head)) or_by_head_[*h].push_back(r);
    }
    for (std::size_t r = 0; r < g.and_rules.size(); ++r) {
        if (auto h = node_index(g.and_rules[r].head); h && !and_by_head_[*h]) and_by_head_[*h] = r;
    }
}

std::optional<std::size_t> GrammarIndex::node_index(const NodeId& id) const
{
    auto it = ids_.find(id);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

std::size_t GrammarIndex::require(const NodeId& id) const
{
    auto idx = node_index(id);
    if (!idx) throw InvalidTree("unknown node '" + id + "'");
    return *idx;
}

std::optional<std::size_t> GrammarIndex::and_rule_of(std::size_t node) const { return and_by_head_[node]; }

ValidationReport validate_grammar(const Grammar& g)
{
    using Code = ValidationIssue::Code;
    ValidationReport report;
    auto add = [&](Code c, std::string msg) { report.push_back({c, std::move(msg)}); };

    std::unordered_map<NodeId, NodeKind> kinds;
    for (const auto& n : g.nodes) {
        if (n.id.empty()) add(Code::EmptyId, "node with empty id");
        if (!kinds.emplace(n.id, n.kind).second) add(Code::DuplicateNode, "duplicate node id '" + n.id + "'");
    }

    auto kind = [&](const NodeId& id) -> std::optional<NodeKind> {
        auto it = kinds.find(id);
        if (it == kinds.end()) return std::nullopt;
        return it->second;
    };

    if (auto k = kind(g.start); !k) {
        add(Code::UnknownStart, "start symbol '" + g.start + "' is not a node");
    } else if (*k == NodeKind::Terminal) {
        add(Code::StartNotNonterminal, "start symbol '" + g.start + "' is a terminal");
    }

    DomainPtr domain;
    try {
        domain = make_domain(g.domain);
    } catch (const Error& e) {
        add(Code::UnknownDomain, std::string("domain: ") + e.what());
    }

    std::map<NodeId, std::size_t> and_count;
    for (std::size_t i = 0; i < g.and_rules.size(); ++i) {
        const auto& r = g.and_rules[i];
        const auto where = "and-rule #" + std::to_string(i) + " (" + r.head + ")";
        if (auto k = kind(r.head); !k) {
            add(Code::UnknownNode, where + ": unknown head '" + r.head + "'");
        } else if (*k != NodeKind::And) {
            add(Code::WrongHeadKind, where + ": head is a " + to_string(*k) + " node");
        } else {
            ++and_count[r.head];
        }
        if (r.children.size() < 2) {
            add(Code::AndArity, where + ": has " + std::to_string(r.children.size()) + " children, needs at least 2");
        }
        for (const auto& c : r.children) {
            if (!kind(c)) add(Code::UnknownNode, where + ": unknown child '" + c + "'");
        }
        if (domain && !r.children.empty()) {
            try {
                (void)domain->relation(r.relation, r.children.size());
            } catch (const Error& e) {
                add(Code::UnresolvedRef, where + ": relation: " + e.what());
            }
            try {
                (void)domain->function(r.function, r.children.size());
            } catch (const Error& e) {
                add(Code::UnresolvedRef, where + ": function: " + e.what());
            }
        }
    }

    std::map<NodeId, double> or_sum;
    std::map<NodeId, std::size_t> or_count;
    for (std::size_t i = 0; i < g.or_rules.size(); ++i) {
        const auto& r = g.or_rules[i];
        const auto where = "or-rule #" + std::to_string(i) + " (" + r.head + " -> " + r.child + ")";
        if (auto k = kind(r.head); !k) {
            add(Code::UnknownNode, where + ": unknown head '" + r.head + "'");
        } else if (*k != NodeKind::Or) {
            add(Code::WrongHeadKind, where + ": head is a " + to_string(*k) + " node");
        } else {
            or_sum[r.head] += r.prob;
            ++or_count[r.head];
        }
        if (!kind(r.child)) add(Code::UnknownNode, where + ": unknown child '" + r.child + "'");
        if (!(r.prob > 0.0 && r.prob <= 1.0)) {
            add(Code::ProbRange, where + ": probability " + std::to_string(r.prob) + " outside (0, 1]");
        }
    }

    for (const auto& n : g.nodes) {
        if (n.kind == NodeKind::And) {
            const auto c = and_count[n.id];
            if (c == 0) add(Code::MissingAndRule, "and-node '" + n.id + "' heads no and-rule");
            if (c > 1) add(Code::MultipleAndRules, "multiple and-rules per and-node '" + n.id + "'");
        } else if (n.kind == NodeKind::Or) {
            if (or_count[n.id] == 0) {
                add(Code::NoOrRules, "or-node '" + n.id + "' heads no or-rule");
            } else if (std::abs(or_sum[n.id] - 1.0) > kProbSumTolerance) {
                add(Code::ProbSum, "or-node '" + n.id + "': probabilities sum to " + std::to_string(or_sum[n.id])
                                       + " (probabilities sum != 1)");
            }
        }
    }
    return report;
}

Grammar renormalized(Grammar g)
{
    std::map<NodeId, double> sums;
    for (const auto& r : g.or_rules) sums[r.head] += r.prob;
    for (auto& r : g.or_rules) {
        if (sums[r.head] > 0) r.prob /= sums[r.head];
    }
    return g;
}

void check_sample(const Grammar& g, const DataSample& x)
{
    std::unordered_set<std::string> ids;
    for (const auto& inst : x.instances) {
        if (!ids.insert(inst.id).second) throw InvalidSample("duplicate instance id '" + inst.id + "'");
        auto k = g.kind_of(inst.terminal);
        if (!k) throw InvalidSample("instance '" + inst.id + "' refers to unknown terminal '" + inst.terminal + "'");
        if (*k != NodeKind::Terminal) {
            throw InvalidSample("instance '" + inst.id + "' refers to non-terminal '" + inst.terminal + "'");
        }
    }
}

namespace {

class TreeChecker {
public:
    explicit TreeChecker(const Grammar& g) : g_(g), index_(g), domain_(make_domain(g.domain)) {}

    double run(const TreeNode& root)
    {
        if (root.node != g_.start) throw InvalidTree("root is '" + root.node + "', expected start '" + g_.start + "'");
        seen_.clear();
        return visit(root);
    }

    std::map<std::size_t, std::size_t> usage;

private:
    std::size_t resolve_or_rule(const TreeNode& n, std::size_t head) const
    {
        if (n.children.size() != 1) {
            throw InvalidTree("or-node '" + n.node + "' must have exactly one child");
        }
        const auto& child = n.children.front().node;
        if (n.or_rule) {
            const auto r = *n.or_rule;
            if (r >= g_.or_rules.size() || g_.or_rules[r].head != n.node || g_.or_rules[r].child != child) {
                throw InvalidTree("or-node '" + n.node + "' cites or-rule #" + std::to_string(r)
                                  + " which is not " + n.node + " -> " + child);
            }
            return r;
        }
        std::optional<std::size_t> found;
        for (auto r : index_.or_rules_of(head)) {
            if (g_.or_rules[r].child != child) continue;
            if (found) throw InvalidTree("or-edge " + n.node + " -> " + child + " is ambiguous without a rule index");
            found = r;
        }
        if (!found) throw InvalidTree("no or-rule " + n.node + " -> " + child);
        return *found;
    }

    double visit(const TreeNode& n)
    {
        const auto idx = index_.require(n.node);
        switch (index_.kind(idx)) {
        case NodeKind::Terminal:
            if (!n.children.empty()) throw InvalidTree("terminal '" + n.node + "' has children");
            if (!n.instance) throw InvalidTree("terminal '" + n.node + "' carries no instance id");
            if (!seen_.insert(*n.instance).second) {
                throw InvalidTree("terminal instance '" + *n.instance + "' used twice");
            }
            return 0.0;
        case NodeKind::Or: {
            const auto r = resolve_or_rule(n, idx);
            const auto& child = n.children.front();
            if (!(child.param == n.param)) {
                throw InvalidTree("or-node '" + n.node + "' parameter " + n.param.to_string()
                                  + " differs from child parameter " + child.param.to_string());
            }
            ++usage[r];
            return std::log(g_.or_rules[r].prob) + visit(child);
        }
        case NodeKind::And: {
            auto ar = index_.and_rule_of(idx);
            if (!ar) throw InvalidTree("and-node '" + n.node + "' has no and-rule");
            const auto& rule = g_.and_rules[*ar];
            if (n.children.size() != rule.children.size()) {
                throw InvalidTree("and-node '" + n.node + "' has " + std::to_string(n.children.size())
                                  + " children, rule has " + std::to_string(rule.children.size()));
            }
            std::vector<Param> params;
            for (std::size_t i = 0; i < rule.children.size(); ++i) {
                if (n.children[i].node != rule.children[i]) {
                    throw InvalidTree("and-node '" + n.node + "' child " + std::to_string(i) + " is '"
                                      + n.children[i].node + "', rule expects '" + rule.children[i] + "'");
                }
                params.push_back(n.children[i].param);
            }
            const auto rel = domain_->relation(rule.relation, params.size());
            const auto fn = domain_->function(rule.function, params.size());
            if (!rel(params)) throw InvalidTree("relation of and-node '" + n.node + "' does not hold");
            if (!(fn(params) == n.param)) {
                throw InvalidTree("and-node '" + n.node + "' parameter " + n.param.to_string()
                                  + " differs from the parameter function's value");
            }
            double total = 0.0;
            for (const auto& c : n.children) total += visit(c);
            return total;
        }
        }
        return 0.0;
    }

    const Grammar& g_;
    GrammarIndex index_;
    DomainPtr domain_;
    std::unordered_set<std::string> seen_;
};

void collect_leaves(const TreeNode& n, std::vector<TerminalInstance>& out)
{
    if (n.instance) {
        out.push_back({*n.instance, n.node, n.param});
        return;
    }
    for (const auto& c : n.children) collect_leaves(c, out);
}

} // namespace

double tree_probability(const Grammar& g, const TreeNode& root)
{
    TreeChecker checker(g);
    return checker.run(root);
}

double tree_probability(const Grammar& g, const ParseTree& tree) { return tree_probability(g, tree.root); }

std::map<std::size_t, std::size_t> or_rule_usage(const Grammar& g, const TreeNode& root)
{
    TreeChecker checker(g);
    checker.run(root);
    return checker.usage;
}

double grouped_log_probability(const Grammar& g, const TreeNode& root)
{
    double total = 0.0;
    for (const auto& [rule, count] : or_rule_usage(g, root)) {
        total += static_cast<double>(count) * std::log(g.or_rules[rule].prob);
    }
    return total;
}

std::vector<TerminalInstance> tree_leaves(const TreeNode& root)
{
    std::vector<TerminalInstance> out;
    collect_leaves(root, out);
    return out;
}

bool explains_sample(const Grammar& g, const TreeNode& root, const DataSample& x)
{
    try {
        tree_probability(g, root);
    } catch (const Error&) {
        return false;
    }
    auto leaves = tree_leaves(root);
    if (leaves.size() != x.size()) return false;
    std::map<std::string, const TerminalInstance*> by_id;
    for (const auto& inst : x.instances) by_id[inst.id] = &inst;
    for (const auto& leaf : leaves) {
        auto it = by_id.find(leaf.id);
        if (it == by_id.end() || !(*it->second == leaf)) return false;
    }
    return true;
}

} // namespace aog
