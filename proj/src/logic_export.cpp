#include <aog/error.hpp>
#include <aog/logic_export.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace aog {

const char* to_string(LogicDialect d) { return d == LogicDialect::Fol ? "fol" : "slp"; }

LogicDialect parse_dialect(const std::string& name)
{
    if (name == "fol") return LogicDialect::Fol;
    if (name == "slp") return LogicDialect::Slp;
    throw ConfigError("unknown logic dialect '" + name + "' (expected fol or slp)");
}

std::string LogicDocument::text() const
{
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::map<NodeId, std::string> logic_names(const Grammar& g)
{
    std::vector<NodeId> ids;
    for (const auto& n : g.nodes) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    std::map<NodeId, std::string> out;
    std::set<std::string> used;
    for (const auto& id : ids) {
        std::string base;
        for (unsigned char c : id) base += std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '_';
        if (base.empty() || std::isdigit(static_cast<unsigned char>(base[0])) || base[0] == '_') base = "n_" + base;
        std::string name = base;
        for (int k = 2; used.contains(name); ++k) name = base + "_" + std::to_string(k);
        used.insert(name);
        out[id] = name;
    }
    return out;
}

std::string format_probability(double p)
{
    char buf[32];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, p);
        if (std::strtod(buf, nullptr) == p) break;
    }
    std::string s = buf;
    if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos
        && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

namespace {

void require_valid(const Grammar& g)
{
    if (auto report = validate_grammar(g); !report.empty()) {
        throw UnsupportedGrammar("invalid grammar: " + report.front().message);
    }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::string describe(const DomainRef& r)
{
    const bool bare = r.config.is_null() || (r.config.is_object() && r.config.empty());
    return bare ? r.key : r.key + " " + r.config.dump();
}

/// Nonterminals in NodeId order.
std::vector<NodeId> heads(const Grammar& g)
{
    std::vector<NodeId> out;
    for (const auto& n : g.nodes) {
        if (n.kind != NodeKind::Terminal) out.push_back(n.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

LogicDocument emit_fol(const Grammar& g)
{
    require_valid(g);
    const auto name = logic_names(g);
    LogicDocument doc{{}, LogicDialect::Fol};
    auto& out = doc.lines;
    out.push_back("% stochastic And-Or grammar as first-order formulas, domain " + g.domain.name);
    out.push_back("% possible-world constraints not written as formulas:");
    out.push_back("%   exactly one normal object satisfies the start relation " + name.at(g.start));
    out.push_back("%   no two nodes of the tree denote the same object");
    out.push_back("%   the world holds only the objects and literals of that tree");
    out.push_back("% θ(x) is the parameter of object x");
    for (const auto& h : heads(g)) {
        const auto& a = name.at(h);
        if (auto ai = g.and_rule_of(h)) {
            const auto& r = g.and_rules[*ai];
            const auto n = r.children.size();
            std::vector<std::string> ys, thetas, body;
            for (std::size_t i = 1; i <= n; ++i) {
                const auto y = "y" + std::to_string(i);
                ys.push_back(y);
                thetas.push_back("θ(" + y + ")");
                body.push_back(name.at(r.children[i - 1]) + "(" + y + ")");
                body.push_back("r_" + std::to_string(i) + "_" + a + "(x," + y + ")");
            }
            body.push_back("r_theta_" + a + "(θ(x)," + join(thetas, ",") + ")");
            out.push_back("% r_theta_" + a + ": relation " + describe(r.relation) + ", function " + describe(r.function));
            out.push_back("∀x ∃" + join(ys, ",") + ", " + a + "(x) → " + join(body, " ∧ "));
            continue;
        }
        const auto rules = g.or_rules_of(h);
        std::vector<std::string> alts;
        for (auto ri : rules) {
            const auto& r = g.or_rules[ri];
            const auto b = name.at(r.child) + "(x)";
            alts.push_back(b);
            out.push_back("∀x, " + a + "(x) → " + b + " : " + format_probability(r.prob));
        }
        for (std::size_t i = 0; i < alts.size(); ++i) {
            for (std::size_t j = i + 1; j < alts.size(); ++j) out.push_back("∀x, " + a + "(x) → " + alts[i] + " ↑ " + alts[j]);
        }
        out.push_back("∀x, " + a + "(x) → " + join(alts, " ∨ "));
    }
    return doc;
}

LogicDocument emit_slp(const Grammar& g)
{
    require_valid(g);
    const auto name = logic_names(g);
    const bool null_domain = g.domain.name == "null";
    LogicDocument doc{{}, LogicDialect::Slp};
    auto& out = doc.lines;
    out.push_back("% stochastic logic program, domain " + g.domain.name);
    std::vector<std::string> stubs;
    for (const auto& h : heads(g)) {
        const auto& a = name.at(h);
        if (auto ai = g.and_rule_of(h)) {
            const auto& r = g.and_rules[*ai];
            const auto n = r.children.size();
            std::vector<std::string> body, xs, ps, rel;
            for (std::size_t i = 1; i <= n; ++i) {
                const auto k = std::to_string(i);
                body.push_back(name.at(r.children[i - 1]) + "(X_" + k + ",P_" + k + ")");
                xs.push_back("X_" + k);
                ps.push_back("P_" + k);
                rel.push_back("r_" + k + "_" + a + "(X,X_" + k + ")");
                stubs.push_back("% r_" + k + "_" + a + "/2: X_" + k + " is sublist " + k + " of X");
            }
            body.push_back("append([" + join(xs, ",") + "],X)");
            body.insert(body.end(), rel.begin(), rel.end());
            body.push_back("r_theta_" + a + "(P," + join(ps, ",") + ")");
            stubs.push_back("% r_theta_" + a + "/" + std::to_string(n + 1) + ": relation " + describe(r.relation)
                            + ", function " + describe(r.function));
            out.push_back("1.0: " + a + "(X,P) :- " + join(body, ", ") + ".");
            continue;
        }
        for (auto ri : g.or_rules_of(h)) {
            const auto& r = g.or_rules[ri];
            const auto p = format_probability(r.prob);
            const auto& b = name.at(r.child);
            if (g.kind_of(r.child) == NodeKind::Terminal) {
                out.push_back(p + ": " + a + "([" + b + "],[" + (null_domain ? "null" : "P") + "]).");
            } else {
                out.push_back(p + ": " + a + "(X,P) :- " + b + "(X,P).");
            }
        }
    }
    if (!stubs.empty()) {
        out.push_back("% domain-defined predicates, to be supplied for the data type:");
        out.insert(out.end(), stubs.begin(), stubs.end());
    }
    out.push_back(":- " + name.at(g.start) + "(X,P).");
    return doc;
}

LogicDocument emit_logic(const Grammar& g, LogicDialect d)
{
    return d == LogicDialect::Fol ? emit_fol(g) : emit_slp(g);
}

} // namespace aog
