#include <aog/error.hpp>
#include <aog/frontends/scfg.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace aog {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

void collect_symbols(Scfg& g)
{
    g.terminals.clear();
    g.nonterminals.clear();
    std::set<std::string> heads;
    for (const auto& r : g.rules) {
        if (heads.insert(r.head).second) g.nonterminals.push_back(r.head);
    }
    std::set<std::string> seen;
    for (const auto& r : g.rules) {
        for (const auto& s : r.body) {
            if (!heads.contains(s) && seen.insert(s).second) g.terminals.push_back(s);
        }
    }
}

void require_valid(const Scfg& g)
{
    if (auto v = scfg_violations(g); !v.empty()) throw InvalidModel("invalid SCFG: " + v.front());
}

} // namespace

Scfg parse_scfg(std::string_view text)
{
    Scfg g;
    std::istringstream in{std::string(text)};
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fail = [&](const std::string& why) {
            throw FormatError("SCFG line " + std::to_string(lineno) + ": " + why + ": '" + t + "'");
        };
        const auto arrow = t.find("->");
        if (arrow == std::string::npos) fail("expected 'head -> body [prob]'");
        const auto open = t.rfind('[');
        const auto close = t.rfind(']');
        if (open == std::string::npos || close == std::string::npos || close < open || open < arrow) {
            fail("missing [prob]");
        }
        if (!trim(std::string_view(t).substr(close + 1)).empty()) fail("text after [prob]");
        ScfgRule r;
        r.head = trim(std::string_view(t).substr(0, arrow));
        if (r.head.empty() || r.head.find_first_of(" \t") != std::string::npos) fail("head must be one symbol");
        std::istringstream body(std::string(t.substr(arrow + 2, open - arrow - 2)));
        for (std::string sym; body >> sym;) r.body.push_back(sym);
        if (r.body.empty()) fail("empty bodies are not supported");
        const auto num = trim(std::string_view(t).substr(open + 1, close - open - 1));
        std::size_t used = 0;
        try {
            r.prob = std::stod(num, &used);
        } catch (const std::exception&) {
            fail("bad probability");
        }
        if (used != num.size()) fail("bad probability");
        g.rules.push_back(std::move(r));
    }
    if (g.rules.empty()) throw FormatError("SCFG has no rules");
    g.start = g.rules.front().head;
    collect_symbols(g);
    return g;
}

std::string format_scfg(const Scfg& g)
{
    std::ostringstream out;
    for (const auto& r : g.rules) {
        out << r.head << " ->";
        for (const auto& s : r.body) out << ' ' << s;
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", r.prob);
        out << " [" << buf << "]\n";
    }
    return out.str();
}

std::vector<std::string> scfg_violations(const Scfg& g)
{
    std::vector<std::string> out;
    std::map<std::string, double> sums;
    std::set<std::string> heads;
    for (const auto& r : g.rules) {
        heads.insert(r.head);
        sums[r.head] += r.prob;
        if (r.body.empty()) out.push_back("rule of '" + r.head + "' has an empty body");
        if (!(r.prob > 0.0 && r.prob <= 1.0)) {
            out.push_back("rule of '" + r.head + "' has probability " + std::to_string(r.prob) + " outside (0, 1]");
        }
    }
    if (!heads.contains(g.start)) out.push_back("start symbol '" + g.start + "' heads no rule");
    for (const auto& [head, sum] : sums) {
        if (std::abs(sum - 1.0) > kProbSumTolerance) {
            out.push_back("rules of '" + head + "' sum to " + std::to_string(sum));
        }
    }
    return out;
}

bool is_and_or_form(const Scfg& g)
{
    std::map<std::string, std::vector<const ScfgRule*>> by_head;
    for (const auto& r : g.rules) by_head[r.head].push_back(&r);
    for (const auto& [head, rules] : by_head) {
        const bool and_symbol = rules.size() == 1 && rules.front()->body.size() >= 2;
        bool or_symbol = true;
        for (const auto* r : rules) or_symbol = or_symbol && r->body.size() == 1;
        if (!and_symbol && !or_symbol) return false;
    }
    return true;
}

Scfg scfg_to_and_or_form(const Scfg& g)
{
    require_valid(g);
    if (is_and_or_form(g)) return g;
    std::set<std::string> taken(g.nonterminals.begin(), g.nonterminals.end());
    taken.insert(g.terminals.begin(), g.terminals.end());
    std::size_t counter = 0;
    auto fresh = [&] {
        std::string id;
        do {
            id = "B" + std::to_string(++counter);
        } while (taken.contains(id));
        taken.insert(id);
        return id;
    };
    Scfg out;
    out.start = g.start;
    std::vector<ScfgRule> introduced;
    for (const auto& r : g.rules) {
        if (r.body.size() < 2) {
            out.rules.push_back(r);
            continue;
        }
        const auto b = fresh();
        out.rules.push_back({r.head, {b}, r.prob});
        introduced.push_back({b, r.body, 1.0});
    }
    out.rules.insert(out.rules.end(), introduced.begin(), introduced.end());
    collect_symbols(out);
    return out;
}

Grammar scfg_to_aog(const Scfg& input)
{
    const Scfg g = scfg_to_and_or_form(input);
    std::map<std::string, std::vector<const ScfgRule*>> by_head;
    for (const auto& r : g.rules) by_head[r.head].push_back(&r);

    Grammar out;
    out.domain = {"string_span", Json::object()};
    out.start = g.start;
    for (const auto& t : g.terminals) out.nodes.push_back({t, NodeKind::Terminal});
    for (const auto& n : g.nonterminals) {
        const auto& rules = by_head[n];
        const bool and_symbol = rules.size() == 1 && rules.front()->body.size() >= 2;
        out.nodes.push_back({n, and_symbol ? NodeKind::And : NodeKind::Or});
        if (and_symbol) {
            out.and_rules.push_back({n, rules.front()->body, {"adjacent", Json::object()}, {"concat", Json::object()}});
        } else {
            for (const auto* r : rules) out.or_rules.push_back({n, r->body.front(), r->prob});
        }
    }
    return out;
}

DataSample token_sample(const std::vector<std::string>& tokens)
{
    DataSample x;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        x.instances.push_back({"w" + std::to_string(k), tokens[k],
                               Param::span(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k + 1))});
    }
    return x;
}

} // namespace aog
