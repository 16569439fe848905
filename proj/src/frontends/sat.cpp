#include <aog/error.hpp>
#include <aog/frontends/sat.hpp>

#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace aog {

Cnf3Sat parse_dimacs(std::string_view text)
{
    Cnf3Sat f;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = false;
    std::size_t declared = 0;
    std::vector<int> clause;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first == "c") continue;
        if (first == "%") break;
        if (first == "p") {
            std::string fmt;
            long long n = -1, k = -1;
            if (header || !(ls >> fmt >> n >> k) || fmt != "cnf" || n < 0 || k < 0) {
                throw FormatError("DIMACS line " + std::to_string(lineno) + ": expected a single 'p cnf <vars> <clauses>'");
            }
            header = true;
            f.num_vars = static_cast<std::size_t>(n);
            declared = static_cast<std::size_t>(k);
            continue;
        }
        if (!header) throw FormatError("DIMACS line " + std::to_string(lineno) + ": clause before the 'p cnf' header");
        std::istringstream all(line);
        for (std::string tok; all >> tok;) {
            char* end = nullptr;
            const long v = std::strtol(tok.c_str(), &end, 10);
            if (*end != '\0') throw FormatError("DIMACS line " + std::to_string(lineno) + ": bad literal '" + tok + "'");
            if (v == 0) {
                f.clauses.push_back(std::move(clause));
                clause.clear();
            } else {
                clause.push_back(static_cast<int>(v));
            }
        }
    }
    if (!clause.empty()) f.clauses.push_back(std::move(clause));
    if (!header) throw FormatError("DIMACS: missing 'p cnf' header");
    if (f.clauses.size() != declared) {
        throw FormatError("DIMACS: header declares " + std::to_string(declared) + " clauses, found "
                          + std::to_string(f.clauses.size()));
    }
    return f;
}

std::vector<std::string> sat_violations(const Cnf3Sat& f)
{
    std::vector<std::string> out;
    if (f.num_vars == 0) out.push_back("formula has no variables");
    if (f.clauses.empty()) out.push_back("formula has no clauses");
    for (std::size_t j = 0; j < f.clauses.size(); ++j) {
        const auto& c = f.clauses[j];
        if (c.empty() || c.size() > 3) {
            out.push_back("clause " + std::to_string(j + 1) + " has " + std::to_string(c.size()) + " literals");
        }
        for (int lit : c) {
            if (lit == 0 || static_cast<std::size_t>(std::abs(lit)) > f.num_vars) {
                out.push_back("clause " + std::to_string(j + 1) + " has literal " + std::to_string(lit)
                              + " outside 1.." + std::to_string(f.num_vars));
            }
        }
    }
    return out;
}

namespace {

// Intermediate grammar that may contain ε and unary or nullary And-rules.
class EpsilonGrammar {
public:
    enum class Kind { Terminal, Epsilon, Or, And };
    struct Symbol {
        std::string name;
        Kind kind;
        std::vector<std::pair<std::size_t, double>> rules;  // Or
        std::vector<std::size_t> children;                   // And, exactly two
    };

    std::size_t add(std::string name, Kind kind)
    {
        symbols_.push_back({std::move(name), kind, {}, {}});
        return symbols_.size() - 1;
    }
    Symbol& at(std::size_t i) { return symbols_[i]; }
    const Symbol& at(std::size_t i) const { return symbols_[i]; }
    std::size_t size() const { return symbols_.size(); }

    /// Left-deep binary chain over `parts`; zero parts is ε and one part is
    /// the part itself.
    std::size_t chain(const std::string& name, const std::vector<std::size_t>& parts, std::size_t epsilon)
    {
        if (parts.empty()) return epsilon;
        if (parts.size() == 1) return parts.front();
        std::size_t acc = parts.front();
        for (std::size_t k = 1; k < parts.size(); ++k) {
            const bool last = k + 1 == parts.size();
            const auto node = add(last ? name : name + "#c" + std::to_string(k + 1), Kind::And);
            symbols_[node].children = {acc, parts[k]};
            acc = node;
        }
        return acc;
    }

private:
    std::vector<Symbol> symbols_;
};

class EpsilonEliminator {
public:
    using Kind = EpsilonGrammar::Kind;

    EpsilonEliminator(const EpsilonGrammar& eg, Grammar& out) : eg_(eg), out_(out), memo_(eg.size()) {}

    /// Probability that the symbol derives the empty set.
    double empty_prob(std::size_t i)
    {
        if (auto it = empty_.find(i); it != empty_.end()) return it->second;
        const auto& s = eg_.at(i);
        double e = 0.0;
        switch (s.kind) {
        case Kind::Terminal: e = 0.0; break;
        case Kind::Epsilon: e = 1.0; break;
        case Kind::Or:
            for (auto [c, p] : s.rules) e += p * empty_prob(c);
            break;
        case Kind::And: e = empty_prob(s.children[0]) * empty_prob(s.children[1]); break;
        }
        return empty_[i] = e;
    }

    bool can_be_empty(std::size_t i) const
    {
        const auto& s = eg_.at(i);
        switch (s.kind) {
        case Kind::Terminal: return false;
        case Kind::Epsilon: return true;
        case Kind::Or:
            for (auto [c, p] : s.rules) {
                if (can_be_empty(c)) return true;
            }
            return false;
        case Kind::And: return can_be_empty(s.children[0]) && can_be_empty(s.children[1]);
        }
        return false;
    }

    bool can_be_nonempty(std::size_t i) const
    {
        const auto& s = eg_.at(i);
        switch (s.kind) {
        case Kind::Terminal: return true;
        case Kind::Epsilon: return false;
        case Kind::Or:
            for (auto [c, p] : s.rules) {
                if (can_be_nonempty(c)) return true;
            }
            return false;
        case Kind::And: return can_be_nonempty(s.children[0]) || can_be_nonempty(s.children[1]);
        }
        return false;
    }

    /// Node for the symbol conditioned on a non-empty yield.
    NodeId nonempty(std::size_t i)
    {
        if (memo_[i]) return *memo_[i];
        const auto& s = eg_.at(i);
        if (s.kind == Kind::Terminal) return *(memo_[i] = s.name);
        // Weighted alternatives, normalized below.
        std::vector<std::pair<NodeId, double>> options;
        out_.nodes.push_back({s.name, NodeKind::Or});
        memo_[i] = s.name;
        if (s.kind == Kind::Or) {
            for (auto [c, p] : s.rules) {
                if (can_be_nonempty(c)) options.emplace_back(nonempty(c), p * (1.0 - empty_prob(c)));
            }
        } else {
            const auto l = s.children[0], r = s.children[1];
            const double el = empty_prob(l), er = empty_prob(r);
            if (can_be_nonempty(l) && can_be_nonempty(r)) {
                const auto both = s.name + "#both";
                out_.nodes.push_back({both, NodeKind::And});
                out_.and_rules.push_back({both, {nonempty(l), nonempty(r)}, {"true", Json::object()}, {"null", Json::object()}});
                options.emplace_back(both, (1.0 - el) * (1.0 - er));
            }
            if (can_be_nonempty(l) && can_be_empty(r)) options.emplace_back(nonempty(l), (1.0 - el) * er);
            if (can_be_nonempty(r) && can_be_empty(l)) options.emplace_back(nonempty(r), el * (1.0 - er));
        }
        double total = 0.0;
        for (const auto& o : options) total += o.second;
        for (const auto& [child, w] : options) out_.or_rules.push_back({s.name, child, w / total});
        return s.name;
    }

private:
    const EpsilonGrammar& eg_;
    Grammar& out_;
    std::vector<std::optional<NodeId>> memo_;
    std::map<std::size_t, double> empty_;
};

} // namespace

SatConversion sat_to_aog(const Cnf3Sat& f)
{
    if (auto v = sat_violations(f); !v.empty()) throw InvalidModel("invalid 3SAT formula: " + v.front());
    using Kind = EpsilonGrammar::Kind;
    EpsilonGrammar eg;
    const std::size_t k = f.clauses.size();
    std::vector<std::size_t> clause_terms, clause_ors;
    for (std::size_t j = 1; j <= k; ++j) clause_terms.push_back(eg.add("C" + std::to_string(j), Kind::Terminal));
    const auto epsilon = eg.add("eps", Kind::Epsilon);
    for (std::size_t j = 1; j <= k; ++j) {
        const auto b = eg.add("B" + std::to_string(j), Kind::Or);
        eg.at(b).rules = {{clause_terms[j - 1], 0.5}, {epsilon, 0.5}};
        clause_ors.push_back(b);
    }
    std::vector<std::size_t> vars;
    for (std::size_t i = 1; i <= f.num_vars; ++i) {
        std::vector<std::size_t> pos, neg;
        for (std::size_t j = 0; j < k; ++j) {
            std::set<int> lits(f.clauses[j].begin(), f.clauses[j].end());
            if (lits.contains(static_cast<int>(i))) pos.push_back(clause_ors[j]);
            if (lits.contains(-static_cast<int>(i))) neg.push_back(clause_ors[j]);
        }
        const auto x = eg.chain("X" + std::to_string(i), pos, epsilon);
        const auto nx = eg.chain("NX" + std::to_string(i), neg, epsilon);
        const auto a = eg.add("A" + std::to_string(i), Kind::Or);
        eg.at(a).rules = {{x, 0.5}, {nx, 0.5}};
        vars.push_back(a);
    }
    const auto s = eg.chain("S", vars, epsilon);

    SatConversion out;
    Grammar& g = out.grammar;
    g.domain = {"null", Json::object()};
    for (auto t : clause_terms) g.nodes.push_back({eg.at(t).name, NodeKind::Terminal});
    g.start = "Start";
    g.nodes.push_back({g.start, NodeKind::Or});
    EpsilonEliminator elim(eg, g);
    const double e_s = elim.empty_prob(s);
    const auto top = elim.nonempty(s);
    g.or_rules.insert(g.or_rules.begin(), {g.start, top, 1.0 - e_s});
    if (elim.can_be_empty(s)) {
        g.nodes.push_back({"eps", NodeKind::Terminal});
        g.or_rules.insert(g.or_rules.begin() + 1, {g.start, "eps", e_s});
    }
    for (std::size_t j = 1; j <= k; ++j) {
        out.sample.instances.push_back({"c" + std::to_string(j), "C" + std::to_string(j), Param::null()});
    }
    return out;
}

} // namespace aog
