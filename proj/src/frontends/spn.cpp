#include <aog/error.hpp>
#include <aog/frontends/spn.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace aog {

namespace {

std::string literal(std::size_t var, bool positive) { return (positive ? "x" : "~x") + std::to_string(var); }

std::size_t parse_var(const std::string& tok, std::size_t lineno)
{
    std::size_t used = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != tok.size() || v == 0) {
        throw FormatError("SPN line " + std::to_string(lineno) + ": bad variable '" + tok + "'");
    }
    return v;
}

} // namespace

Spn parse_spn(std::string_view text)
{
    struct Pending {
        std::vector<std::string> children;
        std::size_t lineno;
    };
    Spn s;
    std::map<std::string, std::size_t> ids;
    std::vector<Pending> pending;
    std::string root;
    bool have_vars = false;
    std::istringstream in{std::string(text)};
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty() || tok[0][0] == '#') continue;
        auto fail = [&](const std::string& why) {
            throw FormatError("SPN line " + std::to_string(lineno) + ": " + why);
        };
        if (tok[0] == "vars") {
            if (tok.size() != 2) fail("expected 'vars <d>'");
            s.num_vars = parse_var(tok[1], lineno);
            have_vars = true;
            continue;
        }
        if (tok[0] == "root") {
            if (tok.size() != 2) fail("expected 'root <id>'");
            root = tok[1];
            continue;
        }
        if (tok.size() < 3 || tok[1] != "=") fail("expected '<id> = ind|sum|prod ...'");
        if (ids.contains(tok[0])) fail("duplicate node id '" + tok[0] + "'");
        SpnNode n;
        n.id = tok[0];
        Pending p{{}, lineno};
        if (tok[2] == "ind") {
            if (tok.size() != 4) fail("expected 'ind x<i>' or 'ind !x<i>'");
            std::string lit = tok[3];
            n.positive = lit[0] != '!';
            if (!n.positive) lit.erase(0, 1);
            if (lit.size() < 2 || lit[0] != 'x') fail("bad literal '" + tok[3] + "'");
            n.kind = SpnNode::Kind::Indicator;
            n.var = parse_var(lit.substr(1), lineno);
        } else if (tok[2] == "sum") {
            n.kind = SpnNode::Kind::Sum;
            for (std::size_t k = 3; k < tok.size(); ++k) {
                const auto star = tok[k].find('*');
                if (star == std::string::npos) fail("sum terms are written weight*child");
                std::size_t used = 0;
                double w = 0.0;
                try {
                    w = std::stod(tok[k].substr(0, star), &used);
                } catch (const std::exception&) {
                    used = std::string::npos;
                }
                if (used != star) fail("bad weight in '" + tok[k] + "'");
                n.weights.push_back(w);
                p.children.push_back(tok[k].substr(star + 1));
            }
        } else if (tok[2] == "prod") {
            n.kind = SpnNode::Kind::Product;
            p.children.assign(tok.begin() + 3, tok.end());
        } else {
            fail("unknown node type '" + tok[2] + "'");
        }
        ids[n.id] = s.nodes.size();
        s.nodes.push_back(std::move(n));
        pending.push_back(std::move(p));
    }
    if (!have_vars) throw FormatError("SPN: missing 'vars <d>' line");
    if (root.empty()) throw FormatError("SPN: missing 'root <id>' line");
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        for (const auto& c : pending[i].children) {
            auto it = ids.find(c);
            if (it == ids.end()) {
                throw FormatError("SPN line " + std::to_string(pending[i].lineno) + ": unknown node '" + c + "'");
            }
            s.nodes[i].children.push_back(it->second);
        }
    }
    auto it = ids.find(root);
    if (it == ids.end()) throw FormatError("SPN: unknown root '" + root + "'");
    s.root = it->second;
    return s;
}

SpnReport spn_validate(const Spn& s)
{
    SpnReport rep;
    const auto n = s.nodes.size();
    rep.scopes.assign(n, {});
    if (s.root >= n) {
        rep.issues.push_back("root index out of range");
        return rep;
    }
    // 0 = unvisited, 1 = on stack, 2 = done.
    std::vector<int> state(n, 0);
    std::vector<bool> cyclic(n, false);
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        state[i] = 1;
        const auto& node = s.nodes[i];
        std::set<std::size_t> scope;
        for (auto c : node.children) {
            if (state[c] == 1) {
                if (!cyclic[i]) rep.issues.push_back("cycle through node '" + s.nodes[c].id + "'");
                cyclic[i] = true;
                continue;
            }
            if (state[c] == 0) visit(c);
            if (cyclic[c]) cyclic[i] = true;
        }
        switch (node.kind) {
        case SpnNode::Kind::Indicator:
            if (node.var == 0 || node.var > s.num_vars) {
                rep.issues.push_back("indicator '" + node.id + "' names variable " + std::to_string(node.var)
                                     + " outside 1.." + std::to_string(s.num_vars));
            }
            scope.insert(node.var);
            break;
        case SpnNode::Kind::Sum: {
            if (node.children.empty()) rep.issues.push_back("sum '" + node.id + "' has no children");
            double total = 0.0;
            for (double w : node.weights) {
                if (!(w >= 0.0)) rep.issues.push_back("sum '" + node.id + "' has a negative weight");
                total += w;
            }
            if (!node.children.empty() && !(total > 0.0)) {
                rep.issues.push_back("sum '" + node.id + "' has no positive weight");
            }
            for (std::size_t k = 0; k < node.children.size(); ++k) {
                const auto& cs = rep.scopes[node.children[k]];
                if (k == 0) {
                    scope.insert(cs.begin(), cs.end());
                } else if (!cyclic[i] && std::vector<std::size_t>(scope.begin(), scope.end()) != cs) {
                    rep.issues.push_back("sum '" + node.id + "' is incomplete: child scopes differ");
                    scope.insert(cs.begin(), cs.end());
                }
            }
            break;
        }
        case SpnNode::Kind::Product: {
            if (node.children.size() < 2) rep.issues.push_back("product '" + node.id + "' needs at least two children");
            bool decomposable = true;
            for (auto c : node.children) {
                for (auto v : rep.scopes[c]) decomposable = scope.insert(v).second && decomposable;
            }
            if (!decomposable) rep.issues.push_back("product '" + node.id + "' is not decomposable: child scopes overlap");
            break;
        }
        }
        if (!cyclic[i]) rep.scopes[i].assign(scope.begin(), scope.end());
        state[i] = 2;
    };
    visit(s.root);
    if (!cyclic[s.root] && rep.scopes[s.root].size() != s.num_vars) {
        rep.issues.push_back("root scope covers " + std::to_string(rep.scopes[s.root].size()) + " of "
                             + std::to_string(s.num_vars) + " variables");
    }
    return rep;
}

namespace {

std::vector<double> evaluate_all(const Spn& s, const std::function<double(const SpnNode&)>& leaf)
{
    std::vector<double> memo(s.nodes.size());
    std::vector<bool> done(s.nodes.size(), false);
    std::function<double(std::size_t)> value = [&](std::size_t i) -> double {
        if (done[i]) return memo[i];
        const auto& n = s.nodes[i];
        double v = 0.0;
        switch (n.kind) {
        case SpnNode::Kind::Indicator: v = leaf(n); break;
        case SpnNode::Kind::Sum:
            for (std::size_t k = 0; k < n.children.size(); ++k) v += n.weights[k] * value(n.children[k]);
            break;
        case SpnNode::Kind::Product:
            v = 1.0;
            for (auto c : n.children) v *= value(c);
            break;
        }
        done[i] = true;
        return memo[i] = v;
    };
    value(s.root);
    return memo;
}

double evaluate(const Spn& s, const std::function<double(const SpnNode&)>& leaf)
{
    return evaluate_all(s, leaf)[s.root];
}

} // namespace

double spn_evaluate(const Spn& s, const std::vector<bool>& assignment)
{
    if (assignment.size() != s.num_vars) {
        throw InvalidModel("assignment has " + std::to_string(assignment.size()) + " values for "
                           + std::to_string(s.num_vars) + " variables");
    }
    return evaluate(s, [&](const SpnNode& n) { return assignment.at(n.var - 1) == n.positive ? 1.0 : 0.0; });
}

double spn_partition(const Spn& s)
{
    return evaluate(s, [](const SpnNode&) { return 1.0; });
}

SpnConversion spn_to_aog(const Spn& s)
{
    const auto rep = spn_validate(s);
    if (!rep.ok()) throw InvalidModel("invalid SPN: " + rep.issues.front());

    Grammar g;
    g.domain = {"null", Json::object()};
    std::set<std::string> terminals;
    for (std::size_t v = 1; v <= s.num_vars; ++v) {
        for (bool pos : {true, false}) {
            g.nodes.push_back({literal(v, pos), NodeKind::Terminal});
            terminals.insert(literal(v, pos));
        }
    }
    // SPN ids become node ids unless they clash with a literal name.
    std::vector<std::string> names(s.nodes.size());
    std::set<std::string> taken = terminals;
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const auto& n = s.nodes[i];
        if (n.kind == SpnNode::Kind::Indicator) {
            names[i] = literal(n.var, n.positive);
            continue;
        }
        std::string id = n.id;
        while (taken.contains(id)) id += "'";
        taken.insert(id);
        names[i] = id;
    }
    // Only nodes reachable from the root are converted.
    // Weighting each child by its own partition makes the grammar's
    // distribution exactly S(x)/Z even for unnormalized inner sums.
    const auto z = evaluate_all(s, [](const SpnNode&) { return 1.0; });
    std::vector<bool> reach(s.nodes.size(), false);
    std::function<void(std::size_t)> mark = [&](std::size_t i) {
        if (reach[i]) return;
        reach[i] = true;
        for (auto c : s.nodes[i].children) mark(c);
    };
    mark(s.root);
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const auto& n = s.nodes[i];
        if (!reach[i] || n.kind == SpnNode::Kind::Indicator) continue;
        if (n.kind == SpnNode::Kind::Product) {
            g.nodes.push_back({names[i], NodeKind::And});
            AndRule r{names[i], {}, {"true", Json::object()}, {"null", Json::object()}};
            for (auto c : n.children) r.children.push_back(names[c]);
            g.and_rules.push_back(std::move(r));
        } else {
            g.nodes.push_back({names[i], NodeKind::Or});
            for (std::size_t k = 0; k < n.children.size(); ++k) {
                const double w = n.weights[k] * z[n.children[k]];
                if (w > 0.0) g.or_rules.push_back({names[i], names[n.children[k]], w / z[i]});
            }
        }
    }
    if (s.nodes[s.root].kind == SpnNode::Kind::Indicator) {
        std::string id = "S";
        while (taken.contains(id)) id += "'";
        g.nodes.push_back({id, NodeKind::Or});
        g.or_rules.push_back({id, names[s.root], 1.0});
        g.start = id;
    } else {
        g.start = names[s.root];
    }
    return {std::move(g), spn_partition(s)};
}

DataSample spn_assignment_sample(const Spn& s, const std::vector<bool>& assignment)
{
    if (assignment.size() != s.num_vars) throw InvalidModel("assignment size does not match the variable count");
    DataSample x;
    for (std::size_t v = 1; v <= s.num_vars; ++v) {
        x.instances.push_back({"v" + std::to_string(v), literal(v, assignment[v - 1]), Param::null()});
    }
    return x;
}

} // namespace aog
