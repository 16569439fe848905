#include <aog/error.hpp>
#include <aog/grammar.hpp>

#include <cmath>
#include <random>

namespace aog {

namespace {

class Sampler {
public:
    Sampler(const Grammar& g, std::uint64_t seed, std::size_t max_depth)
        : g_(g), index_(g), domain_(make_domain(g.domain)), rng_(seed), max_depth_(max_depth)
    {
        bound_.resize(g.and_rules.size());
    }

    Sampled run()
    {
        const auto start = index_.node_index(g_.start);
        if (!start) throw InvalidTree("start symbol '" + g_.start + "' is not a node");
        Sampled out;
        const bool bottom_up = domain_->samples_bottom_up();
        out.tree.root = expand(*start, 0, bottom_up ? std::nullopt : std::optional<Param>(domain_->default_root()));
        if (bottom_up) assign_bottom_up(out.tree.root);
        else verify_top_down(out.tree.root);
        out.tree.log_prob = log_prob_;
        out.sample.instances = tree_leaves(out.tree.root);
        return out;
    }

private:
    // Uniform double in [0, 1) from the top 53 bits; identical on every platform.
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::size_t choose(const std::vector<std::size_t>& rules)
    {
        const double u = uniform();
        double cumulative = 0.0;
        for (auto r : rules) {
            cumulative += g_.or_rules[r].prob;
            if (u < cumulative) return r;
        }
        return rules.back();
    }

    const std::pair<Relation, Function>& bind(std::size_t and_rule)
    {
        if (!bound_[and_rule]) {
            const auto& r = g_.and_rules[and_rule];
            bound_[and_rule].emplace(domain_->relation(r.relation, r.children.size()),
                                     domain_->function(r.function, r.children.size()));
        }
        return *bound_[and_rule];
    }

    TreeNode expand(std::size_t node, std::size_t depth, std::optional<Param> param)
    {
        if (depth > max_depth_) {
            throw DepthExceeded("sampling passed max depth " + std::to_string(max_depth_));
        }
        TreeNode out;
        out.node = g_.nodes[node].id;
        if (param) out.param = *param;
        switch (index_.kind(node)) {
        case NodeKind::Terminal:
            out.instance = "x" + std::to_string(leaf_count_++);
            break;
        case NodeKind::Or: {
            const auto& rules = index_.or_rules_of(node);
            if (rules.empty()) throw InvalidTree("or-node '" + out.node + "' heads no or-rule");
            const auto r = choose(rules);
            log_prob_ += std::log(g_.or_rules[r].prob);
            out.or_rule = r;
            out.children.push_back(expand(index_.require(g_.or_rules[r].child), depth + 1, param));
            break;
        }
        case NodeKind::And: {
            auto ar = index_.and_rule_of(node);
            if (!ar) throw InvalidTree("and-node '" + out.node + "' heads no and-rule");
            const auto& rule = g_.and_rules[*ar];
            std::vector<std::optional<Param>> child_params(rule.children.size());
            if (param) {
                auto split = domain_->split(rule.relation, rule.function, *param, rule.children.size());
                if (!split) {
                    throw DomainError("domain " + domain_->name() + " cannot realize children of '" + out.node + "'");
                }
                for (std::size_t i = 0; i < split->size(); ++i) child_params[i] = (*split)[i];
            }
            for (std::size_t i = 0; i < rule.children.size(); ++i) {
                out.children.push_back(expand(index_.require(rule.children[i]), depth + 1, child_params[i]));
            }
            break;
        }
        }
        return out;
    }

    void assign_bottom_up(TreeNode& n)
    {
        if (n.instance) {
            auto p = domain_->leaf_param(leaf_position_++);
            if (!p) throw DomainError("domain " + domain_->name() + " has no leaf parameters");
            n.param = *p;
            return;
        }
        for (auto& c : n.children) assign_bottom_up(c);
        const auto idx = index_.require(n.node);
        if (index_.kind(idx) == NodeKind::Or) {
            n.param = n.children.front().param;
            return;
        }
        n.param = apply_and(idx, n);
    }

    void verify_top_down(const TreeNode& n)
    {
        for (const auto& c : n.children) verify_top_down(c);
        const auto idx = index_.require(n.node);
        if (index_.kind(idx) == NodeKind::And && !(apply_and(idx, n) == n.param)) {
            throw DomainError("parameter function of '" + n.node + "' disagrees with the realized parameter");
        }
    }

    Param apply_and(std::size_t idx, const TreeNode& n)
    {
        const auto& [rel, fn] = bind(*index_.and_rule_of(idx));
        std::vector<Param> params;
        for (const auto& c : n.children) params.push_back(c.param);
        if (!rel(params)) {
            throw DomainError("domain " + domain_->name() + " cannot satisfy the relation of '" + n.node + "'");
        }
        return fn(params);
    }

    const Grammar& g_;
    GrammarIndex index_;
    DomainPtr domain_;
    std::mt19937_64 rng_;
    std::size_t max_depth_;
    std::vector<std::optional<std::pair<Relation, Function>>> bound_;
    std::size_t leaf_count_ = 0;
    std::size_t leaf_position_ = 0;
    double log_prob_ = 0.0;
};

} // namespace

Sampled sample(const Grammar& g, std::uint64_t seed, std::size_t max_depth)
{
    return Sampler(g, seed, max_depth).run();
}

} // namespace aog
