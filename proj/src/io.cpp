#include <aog/error.hpp>
#include <aog/io.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace aog {

namespace {

/// Strict view of a JSON object: every key must be declared, required keys
/// must be present and types are checked on access.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string where, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional = {})
        : j_(j), where_(std::move(where))
    {
        if (!j.is_object()) fail("expected an object");
        std::set<std::string> known;
        for (const char* k : required) {
            known.insert(k);
            if (!j.contains(k)) fail(std::string("missing key '") + k + "'");
        }
        for (const char* k : optional) known.insert(k);
        for (const auto& [k, v] : j.items()) {
            if (!known.contains(k)) fail("unknown key '" + k + "'");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    const Json& raw(const char* key) const { return j_.at(key); }

    std::string string(const char* key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
        return v.get<std::string>();
    }

    double number(const char* key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
        return v.get<double>();
    }

    std::size_t index(const char* key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(std::string("'") + key + "' must be a non-negative integer");
        return v.get<std::size_t>();
    }

    const Json& array(const char* key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_array()) fail(std::string("'") + key + "' must be an array");
        return v;
    }

    const Json& object(const char* key) const
    {
        const auto& v = j_.at(key);
        if (!v.is_object()) fail(std::string("'") + key + "' must be an object");
        return v;
    }

    [[noreturn]] void fail(const std::string& why) const { throw FormatError(where_ + ": " + why); }

private:
    const Json& j_;
    std::string where_;
};

void check_version(const ObjectReader& r)
{
    const auto& v = r.raw("format_version");
    if (!v.is_number_integer() || v.get<long long>() != kFormatVersion) {
        r.fail("unsupported format_version " + v.dump() + " (expected " + std::to_string(kFormatVersion) + ")");
    }
}

Json ref_to_json(const std::string& key, const Json& config) { return Json{{"key", key}, {"config", config}}; }

DomainRef ref_from_json(const Json& j, const std::string& where)
{
    ObjectReader r(j, where, {"key", "config"});
    return {r.string("key"), r.raw("config")};
}

NodeKind kind_from_string(const std::string& s, const ObjectReader& r)
{
    if (s == "terminal") return NodeKind::Terminal;
    if (s == "and") return NodeKind::And;
    if (s == "or") return NodeKind::Or;
    r.fail("unknown node kind '" + s + "'");
}

NodeOrigin::Role role_from_string(const std::string& s, const ObjectReader& r)
{
    for (auto role : {NodeOrigin::Role::Original, NodeOrigin::Role::Bin, NodeOrigin::Role::Alt, NodeOrigin::Role::Start}) {
        if (s == to_string(role)) return role;
    }
    r.fail("unknown node role '" + s + "'");
}

std::string where_at(const std::string& base, std::size_t k) { return base + "[" + std::to_string(k) + "]"; }

} // namespace

Json grammar_to_json(const Grammar& g)
{
    Json nodes = Json::array();
    for (const auto& n : g.nodes) nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}});
    Json and_rules = Json::array();
    for (const auto& r : g.and_rules) {
        and_rules.push_back({{"head", r.head},
                             {"children", r.children},
                             {"relation", ref_to_json(r.relation.key, r.relation.config)},
                             {"function", ref_to_json(r.function.key, r.function.config)}});
    }
    Json or_rules = Json::array();
    for (const auto& r : g.or_rules) or_rules.push_back({{"head", r.head}, {"child", r.child}, {"prob", r.prob}});
    return {{"format_version", kFormatVersion},
            {"domain", {{"name", g.domain.name}, {"config", g.domain.config}}},
            {"nodes", std::move(nodes)},
            {"start", g.start},
            {"and_rules", std::move(and_rules)},
            {"or_rules", std::move(or_rules)}};
}

Grammar grammar_from_json(const Json& j, bool renormalize)
{
    ObjectReader top(j, "grammar", {"format_version", "domain", "nodes", "start", "and_rules", "or_rules"});
    check_version(top);
    Grammar g;
    {
        ObjectReader d(top.object("domain"), "grammar.domain", {"name", "config"});
        g.domain = {d.string("name"), d.raw("config")};
    }
    const auto& nodes = top.array("nodes");
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        ObjectReader r(nodes[k], where_at("grammar.nodes", k), {"id", "kind"});
        g.nodes.push_back({r.string("id"), kind_from_string(r.string("kind"), r)});
    }
    g.start = top.string("start");
    const auto& ands = top.array("and_rules");
    for (std::size_t k = 0; k < ands.size(); ++k) {
        const auto where = where_at("grammar.and_rules", k);
        ObjectReader r(ands[k], where, {"head", "children", "relation", "function"});
        AndRule rule;
        rule.head = r.string("head");
        for (const auto& c : r.array("children")) {
            if (!c.is_string()) r.fail("children must be node ids");
            rule.children.push_back(c.get<std::string>());
        }
        rule.relation = ref_from_json(r.raw("relation"), where + ".relation");
        rule.function = ref_from_json(r.raw("function"), where + ".function");
        g.and_rules.push_back(std::move(rule));
    }
    const auto& ors = top.array("or_rules");
    for (std::size_t k = 0; k < ors.size(); ++k) {
        ObjectReader r(ors[k], where_at("grammar.or_rules", k), {"head", "child", "prob"});
        g.or_rules.push_back({r.string("head"), r.string("child"), r.number("prob")});
    }
    return renormalize ? renormalized(std::move(g)) : g;
}

Json sample_to_json(const DataSample& x, const DomainBinding& domain)
{
    Json instances = Json::array();
    for (const auto& i : x.instances) {
        instances.push_back({{"id", i.id}, {"terminal", i.terminal}, {"param", domain.encode(i.param)}});
    }
    return {{"format_version", kFormatVersion}, {"instances", std::move(instances)}};
}

DataSample sample_from_json(const Json& j, const DomainBinding& domain)
{
    ObjectReader top(j, "sample", {"format_version", "instances"});
    check_version(top);
    DataSample x;
    std::set<std::string> ids;
    const auto& items = top.array("instances");
    for (std::size_t k = 0; k < items.size(); ++k) {
        ObjectReader r(items[k], where_at("sample.instances", k), {"id", "terminal", "param"});
        auto id = r.string("id");
        if (!ids.insert(id).second) r.fail("duplicate instance id '" + id + "'");
        x.instances.push_back({std::move(id), r.string("terminal"), domain.decode(r.raw("param"))});
    }
    return x;
}

Json node_map_to_json(const NodeMap& m)
{
    Json nodes = Json::array();
    for (const auto& n : m.nodes) {
        nodes.push_back({{"id", n.id}, {"role", to_string(n.role)}, {"origin", n.origin}, {"position", n.position}});
    }
    Json chains = Json::array();
    for (const auto& chain : m.or_rule_chains) {
        Json c = Json::array();
        for (const auto& l : chain) c.push_back({{"rule", l.rule}, {"head", l.head}, {"child", l.child}});
        chains.push_back(std::move(c));
    }
    return {{"format_version", kFormatVersion}, {"nodes", std::move(nodes)}, {"or_rule_chains", std::move(chains)}};
}

NodeMap node_map_from_json(const Json& j)
{
    ObjectReader top(j, "node_map", {"format_version", "nodes", "or_rule_chains"});
    check_version(top);
    NodeMap m;
    const auto& nodes = top.array("nodes");
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        ObjectReader r(nodes[k], where_at("node_map.nodes", k), {"id", "role", "origin", "position"});
        m.nodes.push_back({r.string("id"), role_from_string(r.string("role"), r), r.string("origin"), r.index("position")});
    }
    const auto& chains = top.array("or_rule_chains");
    for (std::size_t k = 0; k < chains.size(); ++k) {
        if (!chains[k].is_array()) top.fail("or_rule_chains entries must be arrays");
        std::vector<ChainLink> chain;
        for (std::size_t l = 0; l < chains[k].size(); ++l) {
            ObjectReader r(chains[k][l], where_at(where_at("node_map.or_rule_chains", k), l), {"rule", "head", "child"});
            chain.push_back({r.index("rule"), r.string("head"), r.string("child")});
        }
        m.or_rule_chains.push_back(std::move(chain));
    }
    return m;
}

Json tree_to_json(const TreeNode& t, const DomainBinding& domain)
{
    Json j{{"node", t.node}, {"param", domain.encode(t.param)}};
    if (t.or_rule) j["or_rule"] = *t.or_rule;
    if (t.instance) j["instance"] = *t.instance;
    Json children = Json::array();
    for (const auto& c : t.children) children.push_back(tree_to_json(c, domain));
    j["children"] = std::move(children);
    return j;
}

TreeNode tree_from_json(const Json& j, const DomainBinding& domain)
{
    ObjectReader r(j, "tree", {"node", "param", "children"}, {"or_rule", "instance"});
    TreeNode t;
    t.node = r.string("node");
    t.param = domain.decode(r.raw("param"));
    if (r.has("or_rule")) t.or_rule = r.index("or_rule");
    if (r.has("instance")) t.instance = r.string("instance");
    for (const auto& c : r.array("children")) t.children.push_back(tree_from_json(c, domain));
    return t;
}

Json stats_to_json(const CompositionStats& s)
{
    return {{"per_size_counts", s.per_size_counts},
            {"per_size_entries", s.per_size_entries},
            {"c_max", s.c_max},
            {"table_size", s.table_size},
            {"elapsed_seconds", s.elapsed_seconds},
            {"worst_case_reference", s.worst_case_reference},
            {"max_param_size", s.max_param_size}};
}

namespace {

std::string dot_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

void dot_node(const TreeNode& t, std::size_t& next, std::ostringstream& out)
{
    const auto me = next++;
    std::string label = dot_escape(t.node) + "\\n" + dot_escape(t.param.to_string());
    if (t.instance) label += "\\n[" + dot_escape(*t.instance) + "]";
    out << "  n" << me << " [label=\"" << label << "\"";
    if (t.children.empty()) out << ", shape=ellipse";
    out << "];\n";
    for (const auto& c : t.children) {
        const auto child = next;
        dot_node(c, next, out);
        out << "  n" << me << " -> n" << child << ";\n";
    }
}

} // namespace

std::string tree_to_dot(const TreeNode& t)
{
    std::ostringstream out;
    out << "digraph parse {\n  node [shape=box];\n";
    std::size_t next = 0;
    dot_node(t, next, out);
    out << "}\n";
    return out.str();
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed JSON: ") + e.what());
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << contents)) throw FormatError("cannot write '" + path + "'");
}

Grammar load_grammar(const std::string& path, bool renormalize)
{
    return grammar_from_json(parse_json(read_file(path)), renormalize);
}

void save_grammar(const std::string& path, const Grammar& g) { write_file(path, dump_json(grammar_to_json(g))); }

DataSample load_sample(const std::string& path, const DomainBinding& domain)
{
    return sample_from_json(parse_json(read_file(path)), domain);
}

void save_sample(const std::string& path, const DataSample& x, const DomainBinding& domain)
{
    write_file(path, dump_json(sample_to_json(x, domain)));
}

} // namespace aog
