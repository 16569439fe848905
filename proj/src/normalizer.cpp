#include <aog/error.hpp>
#include <aog/normalizer.hpp>

#include <set>
#include <unordered_map>
#include <unordered_set>

namespace aog {

const char* to_string(NodeOrigin::Role role)
{
    switch (role) {
    case NodeOrigin::Role::Original: return "original";
    case NodeOrigin::Role::Bin: return "bin";
    case NodeOrigin::Role::Alt: return "alt";
    case NodeOrigin::Role::Start: return "start";
    }
    return "?";
}

const NodeOrigin* NodeMap::find(const NodeId& id) const
{
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

namespace {

struct WorkRule {
    OrRule rule;
    std::vector<ChainLink> chain;
};

class Normalizer {
public:
    explicit Normalizer(const Grammar& g) : g_(g)
    {
        out_.domain = g.domain;
        out_.start = g.start;
        for (const auto& n : g.nodes) add_node(n.id, n.kind, {n.id, NodeOrigin::Role::Original, n.id, 0});
        out_.and_rules = g.and_rules;
        for (std::size_t i = 0; i < g.or_rules.size(); ++i) {
            const auto& r = g.or_rules[i];
            or_rules_.push_back({r, {{i, r.head, r.child}}});
        }
    }

    Normalized run()
    {
        start_step();
        bin_step();
        unit_step();
        alt_step();
        for (auto& w : or_rules_) {
            out_.or_rules.push_back(w.rule);
            map_.or_rule_chains.push_back(std::move(w.chain));
        }
        return {GcnfGrammar::certify(std::move(out_)), std::move(map_)};
    }

private:
    NodeId fresh(const NodeId& wanted)
    {
        NodeId id = wanted;
        for (int k = 2; kinds_.contains(id); ++k) id = wanted + "_" + std::to_string(k);
        return id;
    }

    void add_node(const NodeId& id, NodeKind kind, NodeOrigin origin)
    {
        out_.nodes.push_back({id, kind});
        kinds_[id] = kind;
        map_.nodes.push_back(std::move(origin));
    }

    NodeKind kind(const NodeId& id) const { return kinds_.at(id); }

    void start_step()
    {
        if (kind(out_.start) != NodeKind::And) return;
        const auto id = fresh(out_.start + "#start");
        add_node(id, NodeKind::Or, {id, NodeOrigin::Role::Start, out_.start, 0});
        or_rules_.push_back({{id, out_.start, 1.0}, {}});
        out_.start = id;
    }

    void bin_step()
    {
        std::vector<AndRule> rules;
        bool used = false;
        for (const auto& r : out_.and_rules) {
            const auto n = r.children.size();
            if (n <= 2) {
                rules.push_back(r);
                continue;
            }
            used = true;
            NodeId prev;
            for (std::size_t i = 1; i <= n - 2; ++i) {
                const auto id = fresh(r.head + "#bin" + std::to_string(i));
                add_node(id, NodeKind::And, {id, NodeOrigin::Role::Bin, r.head, i});
                if (i == 1) {
                    rules.push_back({id, {r.children[0], r.children[1]}, {"always", Json::object()}, {"pack", Json::object()}});
                } else {
                    rules.push_back({id, {prev, r.children[i]}, {"always", Json::object()}, {"append", Json::object()}});
                }
                prev = id;
            }
            const Json rel{{"inner", {{"key", r.relation.key}, {"config", r.relation.config}}}, {"arity", n}};
            const Json fn{{"inner", {{"key", r.function.key}, {"config", r.function.config}}}, {"arity", n}};
            rules.push_back({r.head, {prev, r.children[n - 1]}, {"apply_relation", rel}, {"apply_function", fn}});
        }
        out_.and_rules = std::move(rules);
        if (used) {
            out_.domain = DomainSpec{"tuple", Json{{"base", {{"name", g_.domain.name}, {"config", g_.domain.config}}}}};
        }
    }

    // Fully expanded rules of an Or-node, none targeting an Or-node.
    const std::vector<WorkRule>& resolve(const NodeId& head)
    {
        if (auto it = resolved_.find(head); it != resolved_.end()) return it->second;
        if (!visiting_.insert(head).second) {
            throw UnitCycle("cyclic or-rule chain through '" + head + "'");
        }
        std::vector<WorkRule> out;
        for (auto idx : by_head_[head]) {
            const auto w = or_rules_[idx];
            if (kind(w.rule.child) != NodeKind::Or) {
                out.push_back(w);
                continue;
            }
            for (const auto& sub : resolve(w.rule.child)) {
                WorkRule merged{{head, sub.rule.child, w.rule.prob * sub.rule.prob}, w.chain};
                merged.chain.insert(merged.chain.end(), sub.chain.begin(), sub.chain.end());
                out.push_back(std::move(merged));
            }
        }
        visiting_.erase(head);
        return resolved_.emplace(head, std::move(out)).first->second;
    }

    void unit_step()
    {
        for (std::size_t i = 0; i < or_rules_.size(); ++i) by_head_[or_rules_[i].rule.head].push_back(i);
        bool any = false;
        for (const auto& w : or_rules_) any = any || kind(w.rule.child) == NodeKind::Or;
        if (!any) return;
        // Rebuild each head's rule group at the position of its first rule.
        std::vector<WorkRule> rules;
        std::unordered_set<NodeId> emitted;
        for (const auto& w : or_rules_) {
            if (!emitted.insert(w.rule.head).second) continue;
            const auto& group = resolve(w.rule.head);
            rules.insert(rules.end(), group.begin(), group.end());
        }
        or_rules_ = std::move(rules);
    }

    void alt_step()
    {
        std::unordered_map<NodeId, NodeId> wrappers;
        for (auto& r : out_.and_rules) {
            for (auto& c : r.children) {
                if (kind(c) == NodeKind::Or) continue;
                auto it = wrappers.find(c);
                if (it == wrappers.end()) {
                    const auto id = fresh(c + "#alt");
                    add_node(id, NodeKind::Or, {id, NodeOrigin::Role::Alt, c, 0});
                    or_rules_.push_back({{id, c, 1.0}, {}});
                    it = wrappers.emplace(c, id).first;
                }
                c = it->second;
            }
        }
    }

    const Grammar& g_;
    Grammar out_;
    NodeMap map_;
    std::unordered_map<NodeId, NodeKind> kinds_;
    std::vector<WorkRule> or_rules_;
    std::unordered_map<NodeId, std::vector<std::size_t>> by_head_;
    std::unordered_map<NodeId, std::vector<WorkRule>> resolved_;
    std::unordered_set<NodeId> visiting_;
};

class Projector {
public:
    explicit Projector(const NodeMap& map) : map_(map)
    {
        for (const auto& n : map.nodes) origins_.emplace(n.id, &n);
    }

    std::vector<TreeNode> project(const TreeNode& n) const
    {
        auto it = origins_.find(n.node);
        if (it == origins_.end()) throw MapMismatch("node '" + n.node + "' is not in the node map");
        const NodeOrigin& origin = *it->second;
        switch (origin.role) {
        case NodeOrigin::Role::Start:
        case NodeOrigin::Role::Alt:
            if (n.children.size() != 1) throw MapMismatch("wrapper '" + n.node + "' must have one child");
            return project(n.children.front());
        case NodeOrigin::Role::Bin: return flatten(n.children);
        case NodeOrigin::Role::Original: break;
        }
        if (n.instance) return {n};
        if (!n.or_rule) {
            // And-node: splice binarized chains back into one child list.
            TreeNode out = n;
            out.children = flatten(n.children);
            return {out};
        }
        if (*n.or_rule >= map_.or_rule_chains.size()) {
            throw MapMismatch("or-rule #" + std::to_string(*n.or_rule) + " of '" + n.node + "' is not in the node map");
        }
        const auto& chain = map_.or_rule_chains[*n.or_rule];
        if (chain.empty() || n.children.size() != 1) throw MapMismatch("or-node '" + n.node + "' has no original or-rule");
        auto below = project(n.children.front());
        if (below.size() != 1) throw MapMismatch("or-node '" + n.node + "' projects onto several nodes");
        TreeNode cur = std::move(below.front());
        for (auto link = chain.rbegin(); link != chain.rend(); ++link) {
            TreeNode up;
            up.node = link->head;
            up.param = n.param;
            up.or_rule = link->rule;
            up.children.push_back(std::move(cur));
            cur = std::move(up);
        }
        return {cur};
    }

private:
    std::vector<TreeNode> flatten(const std::vector<TreeNode>& children) const
    {
        std::vector<TreeNode> out;
        for (const auto& c : children) {
            auto part = project(c);
            for (auto& p : part) out.push_back(std::move(p));
        }
        return out;
    }

    const NodeMap& map_;
    std::unordered_map<NodeId, const NodeOrigin*> origins_;
};

} // namespace

Normalized to_gcnf(const Grammar& g)
{
    for (const auto& r : g.and_rules) {
        if (r.children.size() < 2) {
            throw UnsupportedGrammar("and-rule of '" + r.head + "' has " + std::to_string(r.children.size())
                                     + " children; unary and-rules are not supported");
        }
    }
    if (auto report = validate_grammar(g); !report.empty()) {
        throw UnsupportedGrammar("invalid grammar: " + report.front().message);
    }
    return Normalizer(g).run();
}

ParseTree project_parse(const ParseTree& tree, const NodeMap& map)
{
    auto nodes = Projector(map).project(tree.root);
    if (nodes.size() != 1) throw MapMismatch("projected tree has no single root");
    return {std::move(nodes.front()), tree.log_prob};
}

ParseResult parse_grammar(const Grammar& g, const DataSample& x, ParseMode mode, const ParserBudget& budget)
{
    const auto normal = to_gcnf(g);
    auto result = parse(normal.grammar, x, mode, budget);
    if (result.tree) result.tree = project_parse(*result.tree, normal.map);
    return result;
}

} // namespace aog
