#pragma once
#include <aog/grammar.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace aog {

struct ScfgRule {
    std::string head;
    std::vector<std::string> body;
    double prob;

    friend bool operator==(const ScfgRule&, const ScfgRule&) = default;
};

/// Stochastic context-free grammar. Nonterminals are exactly the rule
/// heads; every other body symbol is a terminal.
struct Scfg {
    std::vector<std::string> terminals;
    std::vector<std::string> nonterminals;
    std::string start;
    std::vector<ScfgRule> rules;

    friend bool operator==(const Scfg&, const Scfg&) = default;
};

/// Reads `head -> sym sym ... [prob]`, one rule per line. Blank lines and
/// lines starting with '#' are skipped; the first rule's head is the start
/// symbol. Throws FormatError with the line number on malformed input,
/// including empty bodies.
Scfg parse_scfg(std::string_view text);
std::string format_scfg(const Scfg& g);

/// Problems with probabilities, unknown start symbols or empty bodies.
std::vector<std::string> scfg_violations(const Scfg& g);

/// And-symbols head one rule with at least two body symbols; Or-symbols
/// head only single-symbol rules.
bool is_and_or_form(const Scfg& g);

/// Each multi-symbol rule A -> α [p] becomes A -> B [p] and B -> α [1.0]
/// with a fresh symbol B. Grammars already in the form are returned as is.
/// Throws InvalidModel on invalid input.
Scfg scfg_to_and_or_form(const Scfg& g);

/// AOG over string spans: one node per symbol, an And-rule with
/// adjacent/concat per And-symbol and the original probabilities on the
/// Or-rules. Converts to And-Or normal form first when needed.
Grammar scfg_to_aog(const Scfg& g);

/// Instances (token_k, (k, k+1)) with ids "w<k>".
DataSample token_sample(const std::vector<std::string>& tokens);

} // namespace aog
