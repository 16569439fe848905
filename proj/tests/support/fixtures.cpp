#include "fixtures.hpp"

#include <aog/error.hpp>

#include <algorithm>

namespace aog::fixtures {

DomainRef ref(const std::string& key, Json config) { return {key, std::move(config)}; }

AndRule and_rule(const NodeId& head, std::vector<NodeId> children, DomainRef relation, DomainRef function)
{
    return {head, std::move(children), std::move(relation), std::move(function)};
}

namespace {

DomainRef offsets(std::initializer_list<std::pair<int, int>> list)
{
    Json o = Json::array();
    for (auto [dx, dy] : list) o.push_back({dx, dy});
    return ref("offset", {{"offsets", o}});
}

DomainRef anchor(int ax = 0, int ay = 0) { return ref("anchor", {{"anchor", {ax, ay}}}); }

void add(Grammar& g, const NodeId& id, NodeKind kind) { g.nodes.push_back({id, kind}); }

} // namespace

Grammar line_drawing_grammar()
{
    Grammar g;
    g.domain = {"grid", Json::object()};
    for (auto t : {"h", "v", "d", "a"}) add(g, t, NodeKind::Terminal);
    for (auto n : {"S", "Ear", "Eye", "Mouth", "Beak"}) add(g, n, NodeKind::Or);
    for (auto n : {"CatFace", "OwlFace", "Ears", "Eyes", "Smile"}) add(g, n, NodeKind::And);
    g.start = "S";
    // Ears anchor the face: left ear at the origin, eyes two rows down,
    // mouth or beak four rows down.
    g.and_rules = {
        and_rule("CatFace", {"Ears", "Eyes", "Mouth"}, offsets({{1, 2}, {2, 4}}), anchor()),
        and_rule("OwlFace", {"Eyes", "Beak"}, offsets({{1, 2}}), anchor(-1, -2)),
        and_rule("Ears", {"Ear", "Ear"}, offsets({{4, 0}}), anchor()),
        and_rule("Eyes", {"Eye", "Eye"}, offsets({{2, 0}}), anchor()),
        and_rule("Smile", {"a", "d"}, offsets({{1, 0}}), anchor()),
    };
    g.or_rules = {
        {"S", "CatFace", 0.6}, {"S", "OwlFace", 0.4}, {"Ear", "d", 0.6},   {"Ear", "a", 0.4}, {"Eye", "h", 0.5},
        {"Eye", "v", 0.5},     {"Mouth", "h", 0.8},   {"Mouth", "Smile", 0.2}, {"Beak", "v", 1.0},
    };
    return g;
}

DataSample cat_face_sample(std::int64_t ox, std::int64_t oy)
{
    DataSample x;
    x.instances = {
        {"ear_l", "d", Param::point(ox, oy)},         {"ear_r", "a", Param::point(ox + 4, oy)},
        {"eye_l", "h", Param::point(ox + 1, oy + 2)}, {"eye_r", "v", Param::point(ox + 3, oy + 2)},
        {"mouth", "h", Param::point(ox + 2, oy + 4)},
    };
    return x;
}

DataSample string_sample(const std::vector<std::string>& tokens)
{
    DataSample x;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        x.instances.push_back({"w" + std::to_string(k), tokens[k],
                               Param::span(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k + 1))});
    }
    return x;
}

Grammar rectangle_grammar(int w, int h)
{
    Grammar g;
    g.domain = {"grid", Json::object()};
    add(g, "cell", NodeKind::Terminal);
    auto rect = [](int rw, int rh) { return "R" + std::to_string(rw) + "x" + std::to_string(rh); };
    for (int rw = 1; rw <= w; ++rw) {
        for (int rh = 1; rh <= h; ++rh) {
            const auto r = rect(rw, rh);
            add(g, r, NodeKind::Or);
            std::vector<NodeId> splits;
            for (int k = 1; k < rw; ++k) {
                const auto a = r + "_h" + std::to_string(k);
                add(g, a, NodeKind::And);
                g.and_rules.push_back(and_rule(a, {rect(k, rh), rect(rw - k, rh)}, offsets({{k, 0}}), anchor()));
                splits.push_back(a);
            }
            for (int k = 1; k < rh; ++k) {
                const auto a = r + "_v" + std::to_string(k);
                add(g, a, NodeKind::And);
                g.and_rules.push_back(and_rule(a, {rect(rw, k), rect(rw, rh - k)}, offsets({{0, k}}), anchor()));
                splits.push_back(a);
            }
            if (splits.empty()) {
                g.or_rules.push_back({r, "cell", 1.0});
            } else {
                for (const auto& s : splits) g.or_rules.push_back({r, s, 1.0 / static_cast<double>(splits.size())});
            }
        }
    }
    g.start = rect(w, h);
    return g;
}

DataSample rectangle_sample(int w, int h)
{
    DataSample x;
    for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < w; ++xx) {
            x.instances.push_back({"c" + std::to_string(xx) + "_" + std::to_string(y), "cell", Param::point(xx, y)});
        }
    }
    return x;
}

Grammar binary_chain_grammar(double p_split)
{
    Grammar g;
    g.domain = {"string_span", Json::object()};
    g.nodes = {{"a", NodeKind::Terminal}, {"S", NodeKind::Or}, {"P", NodeKind::And}};
    g.start = "S";
    g.and_rules = {and_rule("P", {"S", "S"}, ref("adjacent"), ref("concat"))};
    g.or_rules = {{"S", "P", p_split}, {"S", "a", 1.0 - p_split}};
    return g;
}

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

} // namespace

Grammar random_grammar(std::mt19937_64& rng, std::size_t max_nodes)
{
    Grammar g;
    const std::size_t domain = pick(rng, 4);
    const char* names[] = {"string_span", "grid", "interval", "null"};
    g.domain = {names[domain], Json::object()};

    const std::size_t n_term = 2 + pick(rng, 2);
    const std::size_t n_nonterm = 2 + pick(rng, max_nodes - n_term - 1);
    std::vector<NodeId> terms;
    for (std::size_t i = 0; i < n_term; ++i) {
        terms.push_back("t" + std::to_string(i));
        add(g, terms.back(), NodeKind::Terminal);
    }
    std::vector<NodeKind> kinds(n_nonterm);
    std::vector<NodeId> ids(n_nonterm);
    for (std::size_t i = 0; i < n_nonterm; ++i) {
        kinds[i] = std::bernoulli_distribution(0.5)(rng) ? NodeKind::Or : NodeKind::And;
        ids[i] = (kinds[i] == NodeKind::Or ? "O" : "A") + std::to_string(i);
        add(g, ids[i], kinds[i]);
    }
    g.start = ids[0];

    // Later nonterminals and terminals are favoured, which keeps derivations short.
    auto any_child = [&](std::size_t from) -> NodeId {
        if (from + 1 >= n_nonterm || std::bernoulli_distribution(0.5)(rng)) return terms[pick(rng, n_term)];
        return ids[from + 1 + pick(rng, n_nonterm - from - 1)];
    };
    std::uniform_real_distribution<double> weight(0.1, 1.0);

    for (std::size_t i = 0; i < n_nonterm; ++i) {
        if (kinds[i] == NodeKind::And) {
            const std::size_t arity = 2 + (std::bernoulli_distribution(0.3)(rng) ? 1 + pick(rng, 2) : 0);
            std::vector<NodeId> children;
            for (std::size_t c = 0; c < arity; ++c) children.push_back(any_child(i));
            DomainRef rel, fn;
            switch (domain) {
            case 0: rel = ref("adjacent"); fn = ref("concat"); break;
            case 1: {
                Json off = Json::array();
                for (std::size_t c = 1; c < arity; ++c) {
                    off.push_back({static_cast<int>(pick(rng, 5)) - 2, static_cast<int>(pick(rng, 3))});
                }
                rel = ref("offset", {{"offsets", off}});
                fn = ref("anchor", {{"anchor", {static_cast<int>(pick(rng, 3)) - 1, 0}}});
                break;
            }
            case 2: rel = ref("meets"); fn = ref("hull"); break;
            default: rel = ref("true"); fn = ref("null"); break;
            }
            g.and_rules.push_back(and_rule(ids[i], std::move(children), rel, fn));
        } else {
            const std::size_t n_rules = 1 + pick(rng, 3);
            std::vector<double> w;
            double total = 0.0;
            for (std::size_t r = 0; r < n_rules; ++r) total += w.emplace_back(weight(rng));
            for (std::size_t r = 0; r < n_rules; ++r) g.or_rules.push_back({ids[i], any_child(i), w[r] / total});
        }
    }
    return g;
}

std::optional<DataSample> random_sample(const Grammar& g, std::mt19937_64& rng, std::size_t max_instances, bool perturb)
{
    for (int attempt = 0; attempt < 64; ++attempt) {
        try {
            auto s = sample(g, rng(), 24);
            if (s.sample.size() > max_instances) continue;
            if (perturb) {
                std::vector<NodeId> terms;
                for (const auto& n : g.nodes) {
                    if (n.kind == NodeKind::Terminal) terms.push_back(n.id);
                }
                auto& inst = s.sample.instances[pick(rng, s.sample.size())];
                const auto cur = static_cast<std::size_t>(std::find(terms.begin(), terms.end(), inst.terminal) - terms.begin());
                inst.terminal = terms[(cur + 1 + pick(rng, terms.size() - 1)) % terms.size()];
            }
            return s.sample;
        } catch (const DepthExceeded&) {
        } catch (const DomainError&) {
        }
    }
    return std::nullopt;
}

} // namespace aog::fixtures
