// Command-line front end. Standard output carries JSON (or the requested
// artifact); diagnostics go to standard error, filtered by AOG_LOG.
//
// Exit codes: 0 success, 1 no parse, 2 invalid grammar/model/sample,
// 3 malformed input file, 4 budget or depth exceeded.

#include <aog/domain.hpp>
#include <aog/error.hpp>
#include <aog/frontends/sat.hpp>
#include <aog/frontends/scfg.hpp>
#include <aog/frontends/spn.hpp>
#include <aog/io.hpp>
#include <aog/logic_export.hpp>
#include <aog/normalizer.hpp>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <random>

namespace {

using namespace aog;

enum Exit { kOk = 0, kNoParse = 1, kInvalid = 2, kMalformed = 3, kBudget = 4 };

void setup_logging()
{
    auto logger = spdlog::stderr_color_st("aog");
    logger->set_pattern("aog: %l: %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("AOG_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to "off"; keep the default then.
        if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    }
}

void print(const Json& j) { std::cout << dump_json(j); }

/// Loads and validates; a non-empty report is logged and returned as false.
bool valid(const Grammar& g)
{
    const auto report = validate_grammar(g);
    for (const auto& issue : report) spdlog::error("{}", issue.message);
    return report.empty();
}

Json size_audit(std::size_t in_rules, std::size_t in_symbols, const Grammar& out)
{
    const double growth = in_symbols ? static_cast<double>(out.symbol_size()) / static_cast<double>(in_symbols) : 0.0;
    return {{"input_rules", in_rules},
            {"input_symbol_size", in_symbols},
            {"output_rules", out.rule_count()},
            {"output_symbol_size", out.symbol_size()},
            {"symbol_growth", growth}};
}

int cmd_validate(const std::string& path)
{
    const auto g = load_grammar(path);
    if (!valid(g)) return kInvalid;
    spdlog::info("{}: valid, {} nodes, {} rules", path, g.nodes.size(), g.rule_count());
    return kOk;
}

struct ParseOptions {
    std::string grammar, sample, mode = "viterbi", dot;
    bool stats = false;
    std::size_t budget_entries = ParserBudget{}.max_entries;
    double budget_seconds = 0.0;
};

int cmd_parse(const ParseOptions& o)
{
    const auto g = load_grammar(o.grammar);
    if (!valid(g)) return kInvalid;
    const auto domain = make_domain(g.domain);
    const auto x = load_sample(o.sample, *domain);
    const auto mode = o.mode == "marginal" ? ParseMode::Marginal : ParseMode::Viterbi;
    const auto r = parse_grammar(g, x, mode, {o.budget_entries, o.budget_seconds});
    Json out{{"mode", to_string(mode)}};
    out["log_prob"] = r.log_prob == kNegInfinity ? Json(nullptr) : Json(r.log_prob);
    if (r.tree) out["tree"] = tree_to_json(r.tree->root, *domain);
    if (o.stats) out["stats"] = stats_to_json(r.stats);
    print(out);
    if (!o.dot.empty() && r.tree) write_file(o.dot, tree_to_dot(r.tree->root));
    spdlog::info("parsed {} instances in {:.3f} s, {} chart entries", x.size(), r.stats.elapsed_seconds,
                 r.stats.table_size);
    return r.log_prob == kNegInfinity ? kNoParse : kOk;
}

int cmd_sample(const std::string& path, std::uint64_t seed, std::size_t count, std::size_t max_depth)
{
    const auto g = load_grammar(path);
    if (!valid(g)) return kInvalid;
    const auto domain = make_domain(g.domain);
    std::mt19937_64 seeds(seed);
    for (std::size_t k = 0; k < count; ++k) {
        const auto s = sample(g, seeds(), max_depth);
        const Json record{{"log_prob", s.tree.log_prob},
                          {"tree", tree_to_json(s.tree.root, *domain)},
                          {"sample", sample_to_json(s.sample, *domain)}};
        std::cout << record.dump() << '\n';
    }
    return kOk;
}

struct ConvertOptions {
    std::string from, input, grammar_out, sample_out;
};

int cmd_convert(const ConvertOptions& o)
{
    const auto text = read_file(o.input);
    Json audit;
    Grammar g;
    if (o.from == "scfg") {
        const auto scfg = parse_scfg(text);
        g = scfg_to_aog(scfg);
        std::size_t symbols = 0;
        for (const auto& r : scfg.rules) symbols += 1 + r.body.size();
        audit = size_audit(scfg.rules.size(), symbols, g);
    } else if (o.from == "spn") {
        const auto spn = parse_spn(text);
        auto conv = spn_to_aog(spn);
        g = std::move(conv.grammar);
        std::size_t edges = 0;
        for (const auto& n : spn.nodes) edges += n.children.size();
        audit = size_audit(spn.nodes.size(), spn.nodes.size() + edges, g);
        audit["partition"] = conv.partition;
    } else {
        const auto f = parse_dimacs(text);
        auto conv = sat_to_aog(f);
        g = std::move(conv.grammar);
        std::size_t literals = 0;
        for (const auto& c : f.clauses) literals += c.size();
        audit = size_audit(f.clauses.size(), literals, g);
        if (!o.sample_out.empty()) save_sample(o.sample_out, conv.sample, *make_domain(g.domain));
    }
    save_grammar(o.grammar_out, g);
    audit["from"] = o.from;
    print(audit);
    return kOk;
}

int cmd_normalize(const std::string& in, const std::string& out, const std::string& map_out)
{
    const auto g = load_grammar(in);
    if (!valid(g)) return kInvalid;
    const auto n = to_gcnf(g);
    save_grammar(out, n.grammar.grammar());
    if (!map_out.empty()) write_file(map_out, dump_json(node_map_to_json(n.map)));
    print(size_audit(g.rule_count(), g.symbol_size(), n.grammar.grammar()));
    return kOk;
}

int cmd_emit(const std::string& in, const std::string& dialect, const std::string& out)
{
    const auto g = load_grammar(in);
    if (!valid(g)) return kInvalid;
    const auto doc = emit_logic(g, parse_dialect(dialect));
    if (out.empty() || out == "-") {
        std::cout << doc.text();
    } else {
        write_file(out, doc.text());
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    setup_logging();
    CLI::App app{"Stochastic And-Or grammar toolkit"};
    app.require_subcommand(1);

    std::string grammar_path;
    auto* validate = app.add_subcommand("validate", "check a grammar file");
    validate->add_option("grammar", grammar_path, "grammar JSON")->required();

    ParseOptions po;
    auto* parse = app.add_subcommand("parse", "parse a sample with a grammar");
    parse->add_option("grammar", po.grammar, "grammar JSON")->required();
    parse->add_option("sample", po.sample, "sample JSON")->required();
    parse->add_option("--mode", po.mode, "viterbi or marginal")->check(CLI::IsMember({"viterbi", "marginal"}));
    parse->add_flag("--stats", po.stats, "include composition statistics");
    parse->add_option("--dot", po.dot, "write the parse tree as Graphviz");
    parse->add_option("--budget-entries", po.budget_entries, "chart entry cap");
    parse->add_option("--budget-seconds", po.budget_seconds, "wall-clock cap, 0 disables");

    std::uint64_t seed = 0;
    std::size_t count = 1, max_depth = kDefaultMaxDepth;
    auto* samp = app.add_subcommand("sample", "draw samples from a grammar");
    samp->add_option("grammar", grammar_path, "grammar JSON")->required();
    samp->add_option("--seed", seed, "random seed");
    samp->add_option("--count", count, "number of samples");
    samp->add_option("--max-depth", max_depth, "derivation depth limit");

    ConvertOptions co;
    auto* convert = app.add_subcommand("convert", "translate an SCFG, SPN or 3SAT formula to a grammar");
    convert->add_option("--from", co.from, "input model type")->required()->check(CLI::IsMember({"scfg", "spn", "sat"}));
    convert->add_option("input", co.input, "input model file")->required();
    convert->add_option("grammar_out", co.grammar_out, "output grammar JSON")->required();
    convert->add_option("sample_out", co.sample_out, "output sample JSON (sat only)");

    std::string out_path, map_path;
    auto* normalize = app.add_subcommand("normalize", "convert to generalized Chomsky normal form");
    normalize->add_option("grammar", grammar_path, "grammar JSON")->required();
    normalize->add_option("out", out_path, "normalized grammar JSON")->required();
    normalize->add_option("map", map_path, "node map JSON");

    std::string dialect = "fol";
    auto* emit = app.add_subcommand("emit", "render a grammar as logic");
    emit->add_option("grammar", grammar_path, "grammar JSON")->required();
    emit->add_option("--dialect", dialect, "fol or slp")->check(CLI::IsMember({"fol", "slp"}));
    emit->add_option("out", out_path, "output file, '-' or omitted for standard output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) return cmd_validate(grammar_path);
        if (*parse) return cmd_parse(po);
        if (*samp) return cmd_sample(grammar_path, seed, count, max_depth);
        if (*convert) return cmd_convert(co);
        if (*normalize) return cmd_normalize(grammar_path, out_path, map_path);
        if (*emit) return cmd_emit(grammar_path, dialect, out_path);
    } catch (const FormatError& e) {
        spdlog::error("{}", e.what());
        return kMalformed;
    } catch (const BudgetExceeded& e) {
        spdlog::error("{}", e.what());
        return kBudget;
    } catch (const DepthExceeded& e) {
        spdlog::error("{}", e.what());
        return kBudget;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return kInvalid;
    }
    return kInvalid;
}
