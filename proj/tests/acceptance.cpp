// Acceptance run: one [PASS]/[FAIL] line per criterion, non-zero exit when
// any criterion fails. Seeds and tolerances are fixed below.

#include <aog/enumerate.hpp>
#include <aog/error.hpp>
#include <aog/frontends/sat.hpp>
#include <aog/frontends/scfg.hpp>
#include <aog/frontends/spn.hpp>
#include <aog/io.hpp>
#include <aog/logic_export.hpp>
#include <aog/normalizer.hpp>

#include "fixtures.hpp"
#include "logic_counts.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace aog;

namespace {

constexpr double kLogRelTol = 1e-9;        // criteria 1, 2, 3, 5: log-space agreement
constexpr double kProjectionTol = 1e-12;   // criterion 5: projected tree vs viterbi score
constexpr double kFrequencyTol = 0.01;     // criterion 7
constexpr double kMaxScalingSlope = 5.0;   // criterion 9
constexpr double kCoreBudgetSeconds = 60;  // criterion 1

std::string data(const std::string& name) { return std::string(AOG_TEST_DATA_DIR) + "/" + name; }

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Relative difference in log space; both -inf counts as exact agreement.
double log_rel_err(double a, double b)
{
    if (a == b) return 0.0;
    if (std::isinf(a) || std::isinf(b)) return INFINITY;
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

/// Linear-space relative difference, for probabilities that may be zero.
double lin_rel_err(double a, double b)
{
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& run)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = run();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
}

// 1 ------------------------------------------------------------------------

Outcome core_oracle()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    int grammars = 0, samples = 0, with_parse = 0;
    double worst = 0.0;
    while (grammars < 200) {
        const auto g = fixtures::random_grammar(rng, 12);
        if (g.domain.name == "interval") continue;
        bool used = false;
        for (int k = 0; k < 3; ++k) {
            const auto x = fixtures::random_sample(g, rng, 6, k == 2);
            if (!x) continue;
            used = true;
            ++samples;
            const auto f = fold_parses(enumerate_parses(g, *x));
            const auto v = parse_grammar(g, *x, ParseMode::Viterbi);
            const auto m = parse_grammar(g, *x, ParseMode::Marginal);
            worst = std::max({worst, log_rel_err(v.log_prob, f.viterbi), log_rel_err(m.log_prob, f.marginal)});
            if (f.count > 0) ++with_parse;
        }
        grammars += used;
    }
    const double t = seconds_since(t0);
    return {worst <= kLogRelTol && t < kCoreBudgetSeconds,
            fmt("%d grammars, %d samples (%d parseable), max log rel err %.2e, %.1f s of %.0f s", grammars, samples,
                with_parse, worst, t, kCoreBudgetSeconds)};
}

// 2 ------------------------------------------------------------------------

Outcome cyk_equivalence()
{
    std::mt19937_64 rng(202);
    const auto strings = oracles::all_strings({"a", "b"}, 6);
    double worst = 0.0, worst_growth = 0.0;
    int parses = 0, nonzero = 0;
    for (int k = 0; k < 50; ++k) {
        const auto pcfg = oracles::random_cnf_pcfg(rng, 1 + k % 8);
        const auto scfg = parse_scfg(pcfg.to_text());
        const auto aog = scfg_to_aog(scfg);
        worst_growth = std::max(worst_growth, static_cast<double>(aog.rule_count()) / static_cast<double>(scfg.rules.size()));
        const auto normal = to_gcnf(aog);
        for (const auto& s : strings) {
            const auto want = oracles::cyk(pcfg, s);
            const auto x = token_sample(s);
            const auto v = parse(normal.grammar, x, ParseMode::Viterbi);
            const auto m = parse(normal.grammar, x, ParseMode::Marginal);
            worst = std::max({worst, lin_rel_err(std::exp(v.log_prob), want.viterbi),
                              lin_rel_err(std::exp(m.log_prob), want.inside)});
            parses += 2;
            nonzero += want.inside > 0.0;
        }
    }
    return {worst <= kLogRelTol && worst_growth <= 3.0,
            fmt("50 PCFGs x %zu strings, %d parses (%d strings with mass), max rel err %.2e, rule growth %.2fx <= 3x",
                strings.size(), parses, nonzero, worst, worst_growth)};
}

// 3 ------------------------------------------------------------------------

Outcome spn_equivalence()
{
    std::mt19937_64 rng(303);
    double worst = 0.0, worst_total = 0.0;
    std::size_t assignments = 0;
    for (int k = 0; k < 30; ++k) {
        const std::size_t d = 1 + k % 10;
        const auto text = oracles::random_spn_text(rng, d);
        const auto spn = parse_spn(text);
        const auto conv = spn_to_aog(spn);
        const auto normal = to_gcnf(conv.grammar);
        double total = 0.0;
        for (std::size_t a = 0; a < (std::size_t{1} << d); ++a) {
            std::vector<bool> bits(d);
            std::vector<int> ints(d);
            for (std::size_t v = 0; v < d; ++v) ints[v] = bits[v] = (a >> v) & 1U;
            const double want = oracles::evaluate_spn_text(text, ints) / conv.partition;
            const auto r = parse(normal.grammar, spn_assignment_sample(spn, bits), ParseMode::Marginal);
            const double got = std::exp(r.log_prob);
            worst = std::max(worst, lin_rel_err(got, want));
            total += got;
            ++assignments;
        }
        worst_total = std::max(worst_total, std::abs(total - 1.0));
    }
    return {worst <= kLogRelTol && worst_total <= kLogRelTol,
            fmt("30 SPNs (d <= 10), %zu assignments, max rel err %.2e, max |sum - 1| %.2e", assignments, worst,
                worst_total)};
}

// 4 ------------------------------------------------------------------------

Outcome sat_reduction()
{
    // Chart size grows like 2^k on these grammars, so most instances keep
    // k <= 16 and the last two sit at the n = 12, k = 20 corner.
    std::mt19937_64 rng(404);
    int agree = 0, sat = 0, unsat = 0, trees_ok = 0;
    std::size_t max_n = 0, max_k = 0;
    const int total = 200;
    for (int t = 0; t < total; ++t) {
        std::size_t n = 1 + rng() % 12, k = 1 + rng() % 16;
        if (t >= total - 2) n = 12, k = 20;
        const auto inst = oracles::random_3sat(rng, n, k);
        max_n = std::max(max_n, n);
        max_k = std::max(max_k, k);
        const auto f = parse_dimacs(inst.to_dimacs());
        const auto conv = sat_to_aog(f);
        const bool truth = oracles::brute_force_satisfiable(inst);
        const auto r = parse_grammar(conv.grammar, conv.sample, ParseMode::Viterbi);
        const bool found = r.log_prob != kNegInfinity;
        if (found == truth) ++agree;
        if (truth) {
            ++sat;
            if (r.tree && explains_sample(conv.grammar, r.tree->root, conv.sample)) ++trees_ok;
        } else {
            ++unsat;
        }
    }
    return {agree == total && trees_ok == sat && sat > 0 && unsat > 0,
            fmt("%d/%d agree with truth tables (n <= %zu, k <= %zu); %d satisfiable with %d valid trees, %d unsatisfiable",
                agree, total, max_n, max_k, sat, trees_ok, unsat)};
}

// 5 ------------------------------------------------------------------------

/// S chooses among And-rules of arity 2..5 over letters; W5 nests W2.
Grammar wide_string_grammar()
{
    Grammar g;
    g.domain = {"string_span", Json::object()};
    g.nodes = {{"S", NodeKind::Or}, {"X", NodeKind::Or}, {"a", NodeKind::Terminal}, {"b", NodeKind::Terminal}};
    g.start = "S";
    g.or_rules = {{"X", "a", 0.6}, {"X", "b", 0.4}};
    const double p[] = {0.2, 0.2, 0.3, 0.3};
    for (int k = 2; k <= 5; ++k) {
        const auto w = "W" + std::to_string(k);
        g.nodes.push_back({w, NodeKind::And});
        std::vector<NodeId> children(static_cast<std::size_t>(k), "X");
        if (k == 5) children[1] = "W2";
        if (k == 4) children[3] = "b";
        g.and_rules.push_back(fixtures::and_rule(w, children, fixtures::ref("adjacent"), fixtures::ref("concat")));
        g.or_rules.push_back({"S", w, p[k - 2]});
    }
    return g;
}

/// Grid And-rule of arity 5 (a plus shape) next to a 3-ary one.
Grammar wide_grid_grammar()
{
    Grammar g;
    g.domain = {"grid", Json::object()};
    g.nodes = {{"S", NodeKind::Or}, {"Plus", NodeKind::And}, {"Bar", NodeKind::And}, {"P", NodeKind::Or},
               {"o", NodeKind::Terminal}, {"x", NodeKind::Terminal}};
    g.start = "S";
    g.and_rules = {
        fixtures::and_rule("Plus", {"P", "P", "P", "P", "P"},
                           fixtures::ref("offset", {{"offsets", {{-1, 0}, {1, 0}, {0, -1}, {0, 1}}}}),
                           fixtures::ref("anchor", {{"anchor", {0, 0}}})),
        fixtures::and_rule("Bar", {"P", "P", "o"}, fixtures::ref("offset", {{"offsets", {{1, 0}, {2, 0}}}}),
                           fixtures::ref("anchor", {{"anchor", {1, 0}}})),
    };
    g.or_rules = {{"S", "Plus", 0.5}, {"S", "Bar", 0.5}, {"P", "o", 0.7}, {"P", "x", 0.3}};
    return g;
}

Outcome gcnf_preservation()
{
    std::vector<Grammar> grammars{wide_string_grammar(), wide_grid_grammar(), fixtures::line_drawing_grammar(),
                                  fixtures::rectangle_grammar(2, 2)};
    std::mt19937_64 rng(505);
    for (int k = 0; k < 12; ++k) grammars.push_back(fixtures::random_grammar(rng, 12));
    std::size_t max_arity = 0;
    int samples = 0;
    double worst = 0.0, worst_projection = 0.0;
    for (const auto& g : grammars) {
        for (const auto& r : g.and_rules) max_arity = std::max(max_arity, r.children.size());
        const auto normal = to_gcnf(g);
        for (int k = 0; k < 8; ++k) {
            const auto x = fixtures::random_sample(g, rng, 6, k == 7);
            if (!x) continue;
            ++samples;
            const auto before = fold_parses(enumerate_parses(g, *x));
            const auto after = fold_parses(enumerate_parses(normal.grammar.grammar(), *x));
            const auto v = parse(normal.grammar, *x, ParseMode::Viterbi);
            const auto m = parse(normal.grammar, *x, ParseMode::Marginal);
            worst = std::max({worst, log_rel_err(after.viterbi, before.viterbi),
                              log_rel_err(after.marginal, before.marginal), log_rel_err(v.log_prob, before.viterbi),
                              log_rel_err(m.log_prob, before.marginal)});
            if (v.tree) {
                const auto projected = project_parse(*v.tree, normal.map);
                if (!explains_sample(g, projected.root, *x)) return {false, "projected tree does not explain its sample"};
                worst_projection = std::max(worst_projection, std::abs(tree_probability(g, projected) - v.log_prob));
            }
        }
    }
    return {worst <= kLogRelTol && worst_projection <= kProjectionTol && max_arity >= 5,
            fmt("%zu grammars (arity <= %zu), %d samples, max log rel err %.2e, max projection gap %.2e",
                grammars.size(), max_arity, samples, worst, worst_projection)};
}

// 6 ------------------------------------------------------------------------

Outcome composition_counts()
{
    std::ostringstream detail;
    bool ok = true;
    // All spans of a string realize S -> S S | a.
    for (std::size_t m : {4u, 8u, 12u}) {
        const auto r = parse_grammar(fixtures::binary_chain_grammar(), fixtures::string_sample(std::vector<std::string>(m, "a")),
                                     ParseMode::Marginal);
        for (std::size_t i = 1; i <= m; ++i) ok = ok && r.stats.per_size_counts[i - 1] == m - i + 1;
    }
    // A grammar that realizes only some spans stays below the bound.
    const auto ab = scfg_to_aog(parse_scfg("S -> A B [1.0]\nA -> a [0.5]\nA -> A A [0.5]\nB -> b [1.0]\n"));
    const std::vector<std::string> tokens{"a", "a", "a", "b"};
    const auto r = parse_grammar(ab, fixtures::string_sample(tokens), ParseMode::Marginal);
    for (std::size_t i = 1; i <= tokens.size(); ++i) ok = ok && r.stats.per_size_counts[i - 1] <= tokens.size() - i + 1;
    detail << "strings m in {4,8,12}: |C_i| = m-i+1; partial grammar below; grid n x n:";
    for (int n = 1; n <= 8; ++n) {
        const auto g = fixtures::rectangle_grammar(n, n);
        const auto x = fixtures::rectangle_sample(n, n);
        const auto s = parse_grammar(g, x, ParseMode::Marginal);
        std::size_t worst = 0;
        for (auto c : s.stats.per_size_counts) worst = std::max(worst, c);
        const auto bound = static_cast<std::size_t>(n) * n * n;
        ok = ok && worst <= bound && s.log_prob != kNegInfinity;
        detail << " " << n << ":" << worst << "<=" << bound;
    }
    return {ok, detail.str()};
}

// 7 ------------------------------------------------------------------------

double or_product(const Grammar& g, const TreeNode& t)
{
    double lp = 0.0;
    if (g.kind_of(t.node) == NodeKind::Or) {
        for (auto ri : g.or_rules_of(t.node)) {
            if (g.or_rules[ri].child == t.children.at(0).node) {
                lp += std::log(g.or_rules[ri].prob);
                break;
            }
        }
    }
    for (const auto& c : t.children) lp += or_product(g, c);
    return lp;
}

Outcome sampling_consistency()
{
    const auto g = load_grammar(data("data/coin.json"));
    const std::size_t n = 100000;
    std::map<std::string, std::size_t> hits;
    std::mt19937_64 seeds(707);
    std::size_t mismatched = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto s = sample(g, seeds());
        ++hits[s.sample.instances.at(0).terminal];
        if (tree_probability(g, s.tree) != or_product(g, s.tree.root) || s.tree.log_prob != tree_probability(g, s.tree)) {
            ++mismatched;
        }
    }
    // Deeper trees from the tutorial grammar exercise the product over many Or-nodes.
    const auto tut = fixtures::line_drawing_grammar();
    for (int k = 0; k < 2000; ++k) {
        const auto s = sample(tut, seeds());
        if (std::abs(tree_probability(tut, s.tree) - or_product(tut, s.tree.root)) > 0.0) ++mismatched;
    }
    const double want[] = {0.5, 0.3, 0.2};
    double worst = 0.0;
    const char* labels[] = {"a", "b", "c"};
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(static_cast<double>(hits[labels[i]]) / n - want[i]));
    return {worst <= kFrequencyTol && mismatched == 0,
            fmt("1e5 samples: a %.4f b %.4f c %.4f, max |dev| %.4f <= %.2f; %zu tree-probability mismatches",
                static_cast<double>(hits["a"]) / n, static_cast<double>(hits["b"]) / n,
                static_cast<double>(hits["c"]) / n, worst, kFrequencyTol, mismatched)};
}

// 8 ------------------------------------------------------------------------

Outcome logic_emission()
{
    std::vector<Grammar> grammars{load_grammar(data("data/tutorial.json")), load_grammar(data("data/coin.json")),
                                  load_grammar(data("data/chain.json")), load_grammar(data("data/arity4.json")),
                                  scfg_to_aog(parse_scfg(read_file(data("data/small.scfg")))), wide_string_grammar(),
                                  wide_grid_grammar(), fixtures::rectangle_grammar(3, 3)};
    int checked = 0;
    for (const auto& g : grammars) {
        const auto fol = count_fol(emit_fol(g));
        const auto slp = count_slp(emit_slp(g));
        std::size_t exclusions = 0, or_nodes = 0;
        for (const auto& node : g.nodes) {
            if (node.kind != NodeKind::Or) continue;
            const auto k = g.or_rules_of(node.id).size();
            exclusions += k * (k - 1) / 2;
            ++or_nodes;
        }
        if (fol.and_formulas != g.and_rules.size() || fol.or_formulas != g.or_rules.size()
            || fol.exclusions != exclusions || fol.coverage != or_nodes || slp.and_clauses != g.and_rules.size()
            || slp.or_clauses != g.or_rules.size() || slp.goals != 1) {
            return {false, "structural count mismatch on fixture " + std::to_string(checked)};
        }
        ++checked;
    }
    const auto fol_golden = read_file(data("golden/tutorial.fol"));
    const auto slp_golden = read_file(data("golden/small_scfg.slp"));
    for (int run = 0; run < 3; ++run) {
        if (emit_fol(load_grammar(data("data/tutorial.json"))).text() != fol_golden) return {false, "FOL golden differs"};
        if (emit_slp(scfg_to_aog(parse_scfg(read_file(data("data/small.scfg"))))).text() != slp_golden) {
            return {false, "SLP golden differs"};
        }
    }
    return {true, fmt("counts hold on %d fixtures; 2 golden files byte-identical over 3 runs", checked)};
}

// 9 ------------------------------------------------------------------------

Outcome scaling()
{
    const auto g = to_gcnf(fixtures::binary_chain_grammar());
    std::vector<double> xs, ys;
    std::ostringstream detail;
    for (std::size_t m : {4u, 8u, 16u, 32u}) {
        const auto x = fixtures::string_sample(std::vector<std::string>(m, "a"));
        // Best of repeated runs, at least 0.2 s of work per size.
        double best = INFINITY, spent = 0.0;
        for (int rep = 0; rep < 5 || spent < 0.2; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto r = parse(g.grammar, x, ParseMode::Marginal);
            const double t = seconds_since(t0);
            if (r.log_prob == kNegInfinity) return {false, "chain sample has no parse"};
            best = std::min(best, t);
            spent += t;
        }
        xs.push_back(std::log(static_cast<double>(m)));
        ys.push_back(std::log(best));
        detail << "|X|=" << m << ":" << fmt("%.2e", best) << "s ";
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    detail << fmt("fitted exponent %.2f <= %.1f", slope, kMaxScalingSlope);
    return {slope <= kMaxScalingSlope, detail.str()};
}

} // namespace

int main()
{
    report(1, "oracle equivalence", core_oracle);
    report(2, "CYK equivalence", cyk_equivalence);
    report(3, "SPN equivalence", spn_equivalence);
    report(4, "3SAT reduction", sat_reduction);
    report(5, "GCNF preservation", gcnf_preservation);
    report(6, "composition counts", composition_counts);
    report(7, "sampling consistency", sampling_consistency);
    report(8, "logic emission", logic_emission);
    report(9, "scaling sanity", scaling);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
