#include <aog/error.hpp>
#include <aog/parser.hpp>

#include <cassert>
#include <chrono>
#include <cmath>
#include <unordered_set>
#include <utility>

namespace aog {

double log_add(double a, double b)
{
    if (a == kNegInfinity) return b;
    if (b == kNegInfinity) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

const char* to_string(ParseMode mode) { return mode == ParseMode::Viterbi ? "viterbi" : "marginal"; }

std::vector<std::string> gcnf_violations(const Grammar& g)
{
    std::vector<std::string> out;
    if (g.kind_of(g.start) != NodeKind::Or) out.push_back("start symbol '" + g.start + "' is not an or-node");
    for (const auto& r : g.and_rules) {
        if (r.children.size() != 2) {
            out.push_back("and-rule of '" + r.head + "' has " + std::to_string(r.children.size()) + " children");
        }
        for (const auto& c : r.children) {
            if (g.kind_of(c) != NodeKind::Or) out.push_back("and-rule of '" + r.head + "' has non-or child '" + c + "'");
        }
    }
    for (const auto& r : g.or_rules) {
        if (g.kind_of(r.child) == NodeKind::Or) out.push_back("or-rule " + r.head + " -> " + r.child + " targets an or-node");
    }
    return out;
}

GcnfGrammar GcnfGrammar::certify(Grammar g)
{
    if (auto report = validate_grammar(g); !report.empty()) {
        throw UnsupportedGrammar("invalid grammar: " + report.front().message);
    }
    if (auto v = gcnf_violations(g); !v.empty()) {
        std::string msg = "grammar is not in generalized Chomsky normal form:";
        for (const auto& s : v) msg += " " + s + ";";
        throw NotGcnf(msg);
    }
    return GcnfGrammar(std::make_shared<const Grammar>(std::move(g)));
}

std::strong_ordering operator<=>(const ChartKey& a, const ChartKey& b)
{
    if (auto c = a.size <=> b.size; c != 0) return c;
    if (auto c = a.or_node <=> b.or_node; c != 0) return c;
    if (auto c = a.param <=> b.param; c != 0) return c;
    return a.terminals <=> b.terminals;
}

std::size_t ChartKeyHash::operator()(const ChartKey& k) const
{
    std::size_t h = std::hash<std::uint32_t>{}(k.or_node);
    h = hash_combine(h, k.param.hash());
    return hash_combine(h, k.terminals.hash());
}

struct CompositionTable::Stratum {
    struct IndexHash {
        const std::vector<ChartEntry>* entries;
        std::size_t operator()(std::uint32_t i) const { return ChartKeyHash{}((*entries)[i].key); }
    };
    struct IndexEq {
        const std::vector<ChartEntry>* entries;
        bool operator()(std::uint32_t a, std::uint32_t b) const { return (*entries)[a].key == (*entries)[b].key; }
    };

    explicit Stratum(std::size_t nodes)
        : index(16, IndexHash{&entries}, IndexEq{&entries}), by_or(nodes)
    {}

    std::vector<ChartEntry> entries;
    std::unordered_set<std::uint32_t, IndexHash, IndexEq> index;
    std::vector<std::vector<std::uint32_t>> by_or;
};

CompositionTable::CompositionTable(std::shared_ptr<const Grammar> g, DataSample x, ParseMode mode)
    : g_(std::move(g)), x_(std::move(x)), mode_(mode)
{
    strata_.resize(x_.size() + 1);
}

CompositionTable::CompositionTable(CompositionTable&&) noexcept = default;
CompositionTable& CompositionTable::operator=(CompositionTable&&) noexcept = default;
CompositionTable::~CompositionTable() = default;

std::size_t CompositionTable::max_size() const { return x_.size(); }

CompositionTable::Stratum& CompositionTable::stratum(std::size_t size)
{
    if (size == 0 || size >= strata_.size()) throw MissingEntry("composition size " + std::to_string(size) + " out of range");
    if (!strata_[size]) strata_[size] = std::make_unique<Stratum>(g_->nodes.size());
    return *strata_[size];
}

const CompositionTable::Stratum* CompositionTable::stratum_if(std::size_t size) const
{
    if (size == 0 || size >= strata_.size()) return nullptr;
    return strata_[size].get();
}

const std::vector<ChartEntry>& CompositionTable::entries(std::size_t size) const
{
    static const std::vector<ChartEntry> kEmpty;
    const auto* s = stratum_if(size);
    return s ? s->entries : kEmpty;
}

const std::vector<std::uint32_t>& CompositionTable::by_or_node(std::size_t size, std::size_t or_node) const
{
    static const std::vector<std::uint32_t> kEmpty;
    const auto* s = stratum_if(size);
    return s ? s->by_or[or_node] : kEmpty;
}

const ChartEntry* CompositionTable::find(const ChartKey& key) const
{
    const auto* s = stratum_if(key.size);
    if (!s) return nullptr;
    // Linear probe through the per-node index keeps the lookup read-only.
    for (auto i : s->by_or[key.or_node]) {
        if (s->entries[i].key == key) return &s->entries[i];
    }
    return nullptr;
}

std::size_t CompositionTable::total_entries() const
{
    std::size_t n = 0;
    for (const auto& s : strata_) {
        if (s) n += s->entries.size();
    }
    return n;
}

std::strong_ordering CompositionTable::compare(std::size_t size, const Backpointer& a, const Backpointer& b) const
{
    if (auto c = a.and_rule <=> b.and_rule; c != 0) return c;
    if (a.and_rule) {
        const auto& la = entries(a.left_size)[a.left].key;
        const auto& lb = entries(b.left_size)[b.left].key;
        if (auto c = la <=> lb; c != 0) return c;
        const auto& ra = entries(size - a.left_size)[a.right].key;
        const auto& rb = entries(size - b.left_size)[b.right].key;
        if (auto c = ra <=> rb; c != 0) return c;
    }
    if (auto c = a.or_rule <=> b.or_rule; c != 0) return c;
    return a.instance <=> b.instance;
}

bool CompositionTable::fold(ChartKey key, double score, const Backpointer& back)
{
    const auto size = key.size;
    const auto node = key.or_node;
    auto& s = stratum(size);
    s.entries.push_back({std::move(key), score, back});
    const auto idx = static_cast<std::uint32_t>(s.entries.size() - 1);
    auto [it, inserted] = s.index.insert(idx);
    if (inserted) {
        s.by_or[node].push_back(idx);
        return true;
    }
    s.entries.pop_back();
    auto& existing = s.entries[*it];
    if (mode_ == ParseMode::Marginal) {
        existing.score = log_add(existing.score, score);
    } else if (score > existing.score || (score == existing.score && compare(size, back, existing.back) < 0)) {
        existing.score = score;
        existing.back = back;
    }
    return false;
}

namespace {

struct BoundAndRule {
    std::uint32_t index;
    std::uint32_t head;
    std::uint32_t left;
    std::uint32_t right;
    Relation relation;
    Function function;
};

class Clock {
public:
    explicit Clock(double cap) : cap_(cap), start_(std::chrono::steady_clock::now()) {}

    double elapsed() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    void check()
    {
        if (cap_ <= 0 || ++ticks_ % 4096 != 0) return;
        if (elapsed() > cap_) throw BudgetExceeded("parse exceeded wall-clock budget of " + std::to_string(cap_) + " s");
    }

private:
    double cap_;
    std::chrono::steady_clock::time_point start_;
    std::size_t ticks_ = 0;
};

double binomial_half(std::size_t n)
{
    const auto k = n / 2;
    double out = 1.0;
    for (std::size_t i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    return out;
}

struct PairHash {
    std::size_t operator()(const std::pair<Param, TerminalSet>& p) const
    {
        return hash_combine(p.first.hash(), p.second.hash());
    }
};

CompositionStats collect_stats(const CompositionTable& table, double elapsed)
{
    CompositionStats st;
    const auto n = table.max_size();
    for (std::size_t i = 1; i <= n; ++i) {
        const auto& entries = table.entries(i);
        std::unordered_set<std::pair<Param, TerminalSet>, PairHash> distinct;
        for (const auto& e : entries) {
            distinct.emplace(e.key.param, e.key.terminals);
            st.max_param_size = std::max(st.max_param_size, e.key.param.size());
        }
        st.per_size_entries.push_back(entries.size());
        st.per_size_counts.push_back(distinct.size());
        st.c_max = std::max(st.c_max, distinct.size());
        st.table_size += entries.size();
    }
    st.elapsed_seconds = elapsed;
    st.worst_case_reference = binomial_half(n);
    return st;
}

} // namespace

CompositionTable build_table(const GcnfGrammar& gcnf, const DataSample& x, ParseMode mode, const ParserBudget& budget,
                             CompositionStats* stats)
{
    const Grammar& g = gcnf.grammar();
    if (x.empty()) throw InvalidSample("cannot parse an empty data sample");
    check_sample(g, x);

    Clock clock(budget.max_seconds);
    const GrammarIndex index(g);
    const auto domain = make_domain(g.domain);

    std::vector<std::vector<std::uint32_t>> or_by_child(g.nodes.size());
    std::vector<double> or_logp(g.or_rules.size());
    for (std::uint32_t r = 0; r < g.or_rules.size(); ++r) {
        or_by_child[index.require(g.or_rules[r].child)].push_back(r);
        or_logp[r] = std::log(g.or_rules[r].prob);
    }
    std::vector<std::uint32_t> or_head(g.or_rules.size());
    for (std::uint32_t r = 0; r < g.or_rules.size(); ++r) or_head[r] = static_cast<std::uint32_t>(index.require(g.or_rules[r].head));

    std::vector<BoundAndRule> and_rules;
    for (std::uint32_t a = 0; a < g.and_rules.size(); ++a) {
        const auto& r = g.and_rules[a];
        and_rules.push_back({a, static_cast<std::uint32_t>(index.require(r.head)),
                             static_cast<std::uint32_t>(index.require(r.children[0])),
                             static_cast<std::uint32_t>(index.require(r.children[1])), domain->relation(r.relation, 2),
                             domain->function(r.function, 2)});
    }

    CompositionTable table(gcnf.shared(), x, mode);
    std::size_t total = 0;
    auto insert = [&](ChartKey key, double score, const Backpointer& back) {
        if (table.fold(std::move(key), score, back) && ++total > budget.max_entries) {
            throw BudgetExceeded("composition table exceeded " + std::to_string(budget.max_entries) + " entries");
        }
    };

    // Size-1 compositions: every Or-rule over each instance's terminal.
    for (std::uint32_t k = 0; k < x.size(); ++k) {
        const auto terminal = index.require(x.instances[k].terminal);
        for (auto r : or_by_child[terminal]) {
            Backpointer back;
            back.or_rule = r;
            back.instance = k;
            insert(ChartKey{1, or_head[r], x.instances[k].param, TerminalSet::singleton(k)}, or_logp[r], back);
        }
    }

    std::vector<Param> args(2);
    const auto n = x.size();
    for (std::size_t i = 2; i <= n; ++i) {
        for (std::size_t j = 1; j < i; ++j) {
            for (const auto& rule : and_rules) {
                const auto& lefts = table.by_or_node(j, rule.left);
                const auto& rights = table.by_or_node(i - j, rule.right);
                if (lefts.empty() || rights.empty() || or_by_child[rule.head].empty()) continue;
                for (auto li : lefts) {
                    for (auto ri : rights) {
                        clock.check();
                        // Re-read strata each time: inserting into stratum i never touches j or i - j.
                        const ChartEntry& e1 = table.entries(j)[li];
                        const ChartEntry& e2 = table.entries(i - j)[ri];
                        if (!e1.key.terminals.disjoint(e2.key.terminals)) continue;
                        args[0] = e1.key.param;
                        args[1] = e2.key.param;
                        if (!rule.relation(args)) continue;
                        Param phi = rule.function(args);
                        TerminalSet t = e1.key.terminals.united(e2.key.terminals);
                        assert(t.count() == i);
                        const double child_score = e1.score + e2.score;
                        for (auto r : or_by_child[rule.head]) {
                            Backpointer back;
                            back.and_rule = rule.index;
                            back.or_rule = r;
                            back.left = li;
                            back.right = ri;
                            back.left_size = static_cast<std::uint32_t>(j);
                            insert(ChartKey{static_cast<std::uint32_t>(i), or_head[r], phi, t}, or_logp[r] + child_score,
                                   back);
                        }
                    }
                }
            }
        }
    }
    if (stats) *stats = collect_stats(table, clock.elapsed());
    return table;
}

namespace {

TreeNode rebuild(const CompositionTable& table, std::size_t size, std::uint32_t index)
{
    const auto& entries = table.entries(size);
    if (index >= entries.size()) throw MissingEntry("dangling backpointer into size " + std::to_string(size));
    const auto& e = entries[index];
    const Grammar& g = table.grammar();
    TreeNode out;
    out.node = g.nodes[e.key.or_node].id;
    out.param = e.key.param;
    out.or_rule = e.back.or_rule;
    const auto& rule = g.or_rules[e.back.or_rule];
    TreeNode child;
    child.node = rule.child;
    child.param = e.key.param;
    if (!e.back.and_rule) {
        if (e.back.instance >= table.sample().size()) throw MissingEntry("seed refers to a missing instance");
        child.instance = table.sample().instances[e.back.instance].id;
    } else {
        if (e.back.left_size == 0 || e.back.left_size >= size) throw MissingEntry("malformed backpointer");
        child.children.push_back(rebuild(table, e.back.left_size, e.back.left));
        child.children.push_back(rebuild(table, size - e.back.left_size, e.back.right));
    }
    out.children.push_back(std::move(child));
    return out;
}

} // namespace

ParseTree backtrack(const CompositionTable& table, const ChartKey& root)
{
    if (table.mode() != ParseMode::Viterbi) throw Error("backtracking needs a viterbi table");
    const auto* entry = table.find(root);
    if (!entry) throw MissingEntry("root key not present in the composition table");
    const auto index = static_cast<std::uint32_t>(entry - table.entries(root.size).data());
    ParseTree tree;
    tree.root = rebuild(table, root.size, index);
    tree.log_prob = entry->score;
    return tree;
}

ParseResult parse(const GcnfGrammar& g, const DataSample& x, ParseMode mode, const ParserBudget& budget)
{
    ParseResult result;
    result.mode = mode;
    auto table = build_table(g, x, mode, budget, &result.stats);
    const auto start = static_cast<std::uint32_t>(*GrammarIndex(g.grammar()).node_index(g.grammar().start));

    const ChartEntry* best = nullptr;
    for (auto i : table.by_or_node(x.size(), start)) {
        const auto& e = table.entries(x.size())[i];
        if (mode == ParseMode::Marginal) {
            result.log_prob = log_add(result.log_prob, e.score);
        } else if (!best || e.score > best->score || (e.score == best->score && e.key < best->key)) {
            best = &e;
        }
    }
    if (mode == ParseMode::Viterbi && best) {
        result.log_prob = best->score;
        result.root = best->key;
        result.tree = backtrack(table, best->key);
    }
    return result;
}

} // namespace aog
