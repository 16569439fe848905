#include <aog/enumerate.hpp>
#include <aog/error.hpp>
#include <aog/terminal_set.hpp>

#include <cmath>
#include <limits>
#include <memory>
#include <unordered_map>
#include <unordered_set>

namespace aog {

namespace {

struct DerivNode {
    std::size_t node;
    Param param;
    std::optional<std::size_t> or_rule;
    std::optional<std::size_t> instance;
    std::vector<std::shared_ptr<const DerivNode>> children;
};

struct Derivation {
    Param param;
    double log_prob;
    std::shared_ptr<const DerivNode> tree;
};

struct MemoKey {
    std::size_t node;
    TerminalSet terminals;
    friend bool operator==(const MemoKey&, const MemoKey&) = default;
};

struct MemoHash {
    std::size_t operator()(const MemoKey& k) const { return hash_combine(k.node, k.terminals.hash()); }
};

class Enumerator {
public:
    Enumerator(const Grammar& g, const DataSample& x, std::size_t depth_limit)
        : g_(g), x_(x), index_(g), domain_(make_domain(g.domain)), depth_limit_(depth_limit)
    {}

    std::vector<ParseTree> run()
    {
        const auto start = index_.node_index(g_.start);
        if (!start) throw InvalidTree("start symbol '" + g_.start + "' is not a node");
        TerminalSet all;
        for (std::size_t k = 0; k < x_.size(); ++k) all.insert(k);
        std::vector<ParseTree> out;
        for (const auto& d : derive(*start, all, 0)) {
            out.push_back({materialize(*d.tree), d.log_prob});
        }
        return out;
    }

private:
    const std::vector<Derivation>& derive(std::size_t node, const TerminalSet& t, std::size_t depth)
    {
        MemoKey key{node, t};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        if (depth > depth_limit_) throw DepthExceeded("enumeration passed depth limit " + std::to_string(depth_limit_));
        if (!active_.insert(key).second) {
            throw DepthExceeded("'" + g_.nodes[node].id + "' derives itself over the same instances; derivations are unbounded");
        }
        std::vector<Derivation> out;
        switch (index_.kind(node)) {
        case NodeKind::Terminal: derive_terminal(node, t, out); break;
        case NodeKind::Or: derive_or(node, t, depth, out); break;
        case NodeKind::And: derive_and(node, t, depth, out); break;
        }
        active_.erase(key);
        return memo_.emplace(std::move(key), std::move(out)).first->second;
    }

    void derive_terminal(std::size_t node, const TerminalSet& t, std::vector<Derivation>& out)
    {
        if (t.count() != 1) return;
        const auto k = t.elements().front();
        const auto& inst = x_.instances[k];
        if (inst.terminal != g_.nodes[node].id) return;
        auto leaf = std::make_shared<DerivNode>();
        leaf->node = node;
        leaf->param = inst.param;
        leaf->instance = k;
        out.push_back({inst.param, 0.0, std::move(leaf)});
    }

    void derive_or(std::size_t node, const TerminalSet& t, std::size_t depth, std::vector<Derivation>& out)
    {
        for (auto r : index_.or_rules_of(node)) {
            const auto child = index_.require(g_.or_rules[r].child);
            const double lp = std::log(g_.or_rules[r].prob);
            // Copy: recursion may rehash the memo.
            const auto subs = derive(child, t, depth + 1);
            for (const auto& d : subs) {
                auto n = std::make_shared<DerivNode>();
                n->node = node;
                n->param = d.param;
                n->or_rule = r;
                n->children.push_back(d.tree);
                out.push_back({d.param, lp + d.log_prob, std::move(n)});
            }
        }
    }

    void derive_and(std::size_t node, const TerminalSet& t, std::size_t depth, std::vector<Derivation>& out)
    {
        auto ar = index_.and_rule_of(node);
        if (!ar) return;
        const auto& rule = g_.and_rules[*ar];
        const auto arity = rule.children.size();
        const auto elems = t.elements();
        if (arity == 0 || elems.size() < arity) return;
        const auto relation = domain_->relation(rule.relation, arity);
        const auto function = domain_->function(rule.function, arity);
        std::vector<std::size_t> child_nodes;
        for (const auto& c : rule.children) child_nodes.push_back(index_.require(c));

        // Each element goes to one of `arity` ordered blocks; every block non-empty.
        std::vector<std::size_t> assign(elems.size(), 0);
        while (true) {
            std::vector<TerminalSet> blocks(arity);
            for (std::size_t e = 0; e < elems.size(); ++e) blocks[assign[e]].insert(elems[e]);
            bool all_nonempty = true;
            for (const auto& b : blocks) all_nonempty = all_nonempty && !b.empty();
            if (all_nonempty) combine(node, child_nodes, blocks, relation, function, depth, out);

            std::size_t pos = 0;
            while (pos < assign.size() && ++assign[pos] == arity) assign[pos++] = 0;
            if (pos == assign.size()) break;
        }
    }

    void combine(std::size_t node, const std::vector<std::size_t>& child_nodes, const std::vector<TerminalSet>& blocks,
                 const Relation& relation, const Function& function, std::size_t depth, std::vector<Derivation>& out)
    {
        std::vector<std::vector<Derivation>> lists;
        for (std::size_t i = 0; i < child_nodes.size(); ++i) {
            lists.push_back(derive(child_nodes[i], blocks[i], depth + 1));
            if (lists.back().empty()) return;
        }
        std::vector<std::size_t> pick(lists.size(), 0);
        std::vector<Param> params(lists.size());
        while (true) {
            double lp = 0.0;
            for (std::size_t i = 0; i < lists.size(); ++i) {
                params[i] = lists[i][pick[i]].param;
                lp += lists[i][pick[i]].log_prob;
            }
            if (relation(params)) {
                auto n = std::make_shared<DerivNode>();
                n->node = node;
                n->param = function(params);
                for (std::size_t i = 0; i < lists.size(); ++i) n->children.push_back(lists[i][pick[i]].tree);
                out.push_back({n->param, lp, n});
            }
            std::size_t pos = 0;
            while (pos < pick.size() && ++pick[pos] == lists[pos].size()) pick[pos++] = 0;
            if (pos == pick.size()) break;
        }
    }

    TreeNode materialize(const DerivNode& d) const
    {
        TreeNode out;
        out.node = g_.nodes[d.node].id;
        out.param = d.param;
        out.or_rule = d.or_rule;
        if (d.instance) out.instance = x_.instances[*d.instance].id;
        for (const auto& c : d.children) out.children.push_back(materialize(*c));
        return out;
    }

    const Grammar& g_;
    const DataSample& x_;
    GrammarIndex index_;
    DomainPtr domain_;
    std::size_t depth_limit_;
    std::unordered_map<MemoKey, std::vector<Derivation>, MemoHash> memo_;
    std::unordered_set<MemoKey, MemoHash> active_;
};

} // namespace

std::vector<ParseTree> enumerate_parses(const Grammar& g, const DataSample& x, std::size_t depth_limit)
{
    check_sample(g, x);
    if (x.empty()) return {};
    return Enumerator(g, x, depth_limit).run();
}

EnumerationFold fold_parses(const std::vector<ParseTree>& parses)
{
    EnumerationFold f;
    f.count = parses.size();
    f.viterbi = -std::numeric_limits<double>::infinity();
    f.marginal = -std::numeric_limits<double>::infinity();
    if (parses.empty()) return f;
    for (const auto& p : parses) f.viterbi = std::max(f.viterbi, p.log_prob);
    // Sum relative to the maximum to stay in range.
    double sum = 0.0;
    for (const auto& p : parses) sum += std::exp(p.log_prob - f.viterbi);
    f.marginal = f.viterbi + std::log(sum);
    return f;
}

} // namespace aog
