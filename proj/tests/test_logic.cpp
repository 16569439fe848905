#include <doctest.h>

#include <aog/error.hpp>
#include <aog/frontends/scfg.hpp>
#include <aog/io.hpp>
#include <aog/logic_export.hpp>

#include "fixtures.hpp"
#include "logic_counts.hpp"

#include <cmath>

using namespace aog;

namespace {

std::string data(const std::string& name) { return std::string(AOG_TEST_DATA_DIR) + "/" + name; }

Grammar single_rule()
{
    Grammar g;
    g.domain = {"null", Json::object()};
    g.nodes = {{"S", NodeKind::Or}, {"a", NodeKind::Terminal}};
    g.start = "S";
    g.or_rules = {{"S", "a", 1.0}};
    return g;
}

std::vector<Grammar> all_fixtures()
{
    std::vector<Grammar> out{single_rule(), fixtures::line_drawing_grammar(), fixtures::rectangle_grammar(3, 2),
                             fixtures::binary_chain_grammar(),
                             scfg_to_aog(parse_scfg(read_file(data("data/small.scfg"))))};
    std::mt19937_64 rng(21);
    for (int k = 0; k < 20; ++k) out.push_back(fixtures::random_grammar(rng));
    return out;
}

} // namespace

TEST_CASE("logic: single Or-rule has no exclusion formulas")
{
    const auto fol = emit_fol(single_rule());
    const auto c = count_fol(fol);
    CHECK(c.or_formulas == 1);
    CHECK(c.exclusions == 0);
    CHECK(c.coverage == 1);
    CHECK(c.and_formulas == 0);
}

TEST_CASE("logic: smallest SLP")
{
    const auto slp = emit_slp(single_rule());
    std::vector<std::string> clauses;
    for (const auto& l : slp.lines) {
        if (l.rfind("%", 0) != 0) clauses.push_back(l);
    }
    CHECK(clauses == std::vector<std::string>{"1.0: s([a],[null]).", ":- s(X,P)."});
}

TEST_CASE("logic: three alternatives give three exclusions and one coverage")
{
    Grammar g = single_rule();
    g.nodes.push_back({"b", NodeKind::Terminal});
    g.nodes.push_back({"c", NodeKind::Terminal});
    g.or_rules = {{"S", "a", 0.5}, {"S", "b", 0.3}, {"S", "c", 0.2}};
    const auto fol = emit_fol(g);
    const auto c = count_fol(fol);
    CHECK(c.or_formulas == 3);
    CHECK(c.exclusions == 3);
    CHECK(c.coverage == 1);
    CHECK(std::find(fol.lines.begin(), fol.lines.end(), "∀x, s(x) → a(x) ↑ c(x)") != fol.lines.end());
    CHECK(std::find(fol.lines.begin(), fol.lines.end(), "∀x, s(x) → a(x) ∨ b(x) ∨ c(x)") != fol.lines.end());
}

TEST_CASE("logic: binary And clause lists append, part relations and the parameter relation in order")
{
    const auto g = scfg_to_aog(parse_scfg("S -> A B [1.0]\nA -> a [1.0]\nB -> b [1.0]\n"));
    const auto slp = emit_slp(g);
    // "S" is an And-symbol here, and "a"/"A" collide after lowercasing.
    const std::string expected =
        "1.0: s(X,P) :- a(X_1,P_1), b(X_2,P_2), append([X_1,X_2],X), r_1_s(X,X_1), r_2_s(X,X_2), r_theta_s(P,P_1,P_2).";
    CHECK(std::find(slp.lines.begin(), slp.lines.end(), expected) != slp.lines.end());
    CHECK(slp.lines.back() == ":- s(X,P).");
}

TEST_CASE("logic: structural counts on every fixture")
{
    for (const auto& g : all_fixtures()) {
        const auto fol = count_fol(emit_fol(g));
        CHECK(fol.and_formulas == g.and_rules.size());
        CHECK(fol.or_formulas == g.or_rules.size());
        std::size_t exclusions = 0, or_nodes = 0;
        for (const auto& n : g.nodes) {
            if (n.kind != NodeKind::Or) continue;
            const auto k = g.or_rules_of(n.id).size();
            exclusions += k * (k - 1) / 2;
            ++or_nodes;
        }
        CHECK(fol.exclusions == exclusions);
        CHECK(fol.coverage == or_nodes);
        const auto slp = count_slp(emit_slp(g));
        CHECK(slp.and_clauses == g.and_rules.size());
        CHECK(slp.or_clauses == g.or_rules.size());
        CHECK(slp.goals == 1);
    }
}

TEST_CASE("logic: golden files")
{
    const auto fol = emit_fol(load_grammar(data("data/tutorial.json"))).text();
    CHECK(fol == read_file(data("golden/tutorial.fol")));
    const auto slp = emit_slp(scfg_to_aog(parse_scfg(read_file(data("data/small.scfg"))))).text();
    CHECK(slp == read_file(data("golden/small_scfg.slp")));
    for (int run = 0; run < 3; ++run) {
        CHECK(emit_fol(load_grammar(data("data/tutorial.json"))).text() == fol);
    }
}

TEST_CASE("logic: names are sanitized and made unique")
{
    Grammar g;
    g.domain = {"null", Json::object()};
    g.nodes = {{"S", NodeKind::Or}, {"A#bin1", NodeKind::Or}, {"a", NodeKind::Terminal}, {"2x", NodeKind::Terminal},
               {"~x1", NodeKind::Terminal}};
    g.start = "S";
    g.or_rules = {{"S", "A#bin1", 0.5}, {"S", "2x", 0.25}, {"S", "~x1", 0.25}, {"A#bin1", "a", 1.0}};
    const auto names = logic_names(g);
    CHECK(names.at("A#bin1") == "a_bin1");
    CHECK(names.at("2x") == "n_2x");
    CHECK(names.at("~x1") == "n__x1");
    CHECK(names.at("a") == "a");
    Grammar clash = single_rule();
    clash.nodes.push_back({"s", NodeKind::Terminal});
    clash.or_rules = {{"S", "a", 0.5}, {"S", "s", 0.5}};
    const auto c = logic_names(clash);
    CHECK(c.at("S") == "s");
    CHECK(c.at("s") == "s_2");
}

TEST_CASE("logic: probabilities print compactly and exactly")
{
    CHECK(format_probability(1.0) == "1.0");
    CHECK(format_probability(0.6) == "0.6");
    CHECK(format_probability(0.1 + 0.2) == "0.30000000000000004");
    CHECK(format_probability(1e-20) == "1e-20");
}

TEST_CASE("logic: invalid grammars and dialect names are rejected")
{
    Grammar g = single_rule();
    g.or_rules[0].prob = 0.5;
    CHECK_THROWS_AS(emit_fol(g), UnsupportedGrammar);
    CHECK_THROWS_AS(emit_slp(g), UnsupportedGrammar);
    CHECK(parse_dialect("slp") == LogicDialect::Slp);
    CHECK_THROWS_AS(parse_dialect("prolog"), ConfigError);
}

TEST_CASE("logic: tree probability equals the possible-world product")
{
    std::mt19937_64 rng(3);
    for (const auto& g : all_fixtures()) {
        for (int k = 0; k < 5; ++k) {
            Sampled s;
            try {
                s = sample(g, rng(), 24);
            } catch (const Error&) {
                continue;
            }
            CHECK(grouped_log_probability(g, s.tree.root) == doctest::Approx(tree_probability(g, s.tree)).epsilon(1e-12));
        }
    }
}
