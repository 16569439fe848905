#pragma once
#include <aog/grammar.hpp>
#include <aog/terminal_set.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace aog {

inline constexpr double kNegInfinity = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)); kNegInfinity is the identity.
double log_add(double a, double b);

/// Violations of the generalized Chomsky normal form: binary And-rules over
/// Or-node children, no Or-rule whose child is an Or-node, Or-node start.
std::vector<std::string> gcnf_violations(const Grammar& g);

/// A grammar certified to be valid and in generalized Chomsky normal form.
class GcnfGrammar {
public:
    /// Throws NotGcnf listing the violations, or UnsupportedGrammar when the
    /// grammar fails validate_grammar.
    static GcnfGrammar certify(Grammar g);

    const Grammar& grammar() const { return *g_; }
    std::shared_ptr<const Grammar> shared() const { return g_; }

private:
    explicit GcnfGrammar(std::shared_ptr<const Grammar> g) : g_(std::move(g)) {}
    std::shared_ptr<const Grammar> g_;
};

enum class ParseMode { Viterbi, Marginal };

const char* to_string(ParseMode mode);

/// Guard against inputs violating composition sparsity: the worst case is
/// exponential, so exceeding either limit raises BudgetExceeded.
struct ParserBudget {
    std::size_t max_entries = 10'000'000;
    /// Wall-clock cap in seconds; zero or negative disables it.
    double max_seconds = 0.0;
};

/// Key (i, O, θ, T) of the composition table. `or_node` indexes
/// Grammar::nodes; `terminals` indexes DataSample::instances.
struct ChartKey {
    std::uint32_t size = 0;
    std::uint32_t or_node = 0;
    Param param;
    TerminalSet terminals;

    friend bool operator==(const ChartKey&, const ChartKey&) = default;
    friend std::strong_ordering operator<=>(const ChartKey& a, const ChartKey& b);
};

struct ChartKeyHash {
    std::size_t operator()(const ChartKey& k) const;
};

/// How an entry's best derivation was formed. Size-1 entries are seeds:
/// `and_rule` is empty and `instance` names the terminal instance.
struct Backpointer {
    std::optional<std::uint32_t> and_rule;
    std::uint32_t or_rule = 0;
    std::uint32_t left = 0;   // entry index in the stratum of size left_size
    std::uint32_t right = 0;  // entry index in the stratum of size size - left_size
    std::uint32_t left_size = 0;
    std::uint32_t instance = 0;
};

struct ChartEntry {
    ChartKey key;
    double score = kNegInfinity;
    Backpointer back;
};

struct CompositionStats {
    /// |C_i| for i = 1..|X|: distinct valid compositions (θ, T) of each size.
    std::vector<std::size_t> per_size_counts;
    /// Chart entries (O, θ, T) of each size.
    std::vector<std::size_t> per_size_entries;
    std::size_t c_max = 0;
    std::size_t table_size = 0;
    double elapsed_seconds = 0.0;
    /// binom(|X|, floor(|X|/2)), the count when every composition is valid.
    double worst_case_reference = 0.0;
    /// Largest parameter size seen in the chart (effective m_θ).
    std::size_t max_param_size = 0;
};

/// The map M of the bottom-up parser, one stratum per composition size.
class CompositionTable {
public:
    CompositionTable(std::shared_ptr<const Grammar> g, DataSample x, ParseMode mode);
    CompositionTable(CompositionTable&&) noexcept;
    CompositionTable& operator=(CompositionTable&&) noexcept;
    ~CompositionTable();

    ParseMode mode() const { return mode_; }
    const Grammar& grammar() const { return *g_; }
    const DataSample& sample() const { return x_; }
    std::size_t max_size() const;

    const std::vector<ChartEntry>& entries(std::size_t size) const;
    const ChartEntry* find(const ChartKey& key) const;
    std::size_t total_entries() const;

    /// Folds `score` into M[key] by max (keeping the smallest backpointer on
    /// ties) or by log-sum. Returns true when the key is new.
    bool fold(ChartKey key, double score, const Backpointer& back);

    /// Entry indices of a stratum whose key has the given Or-node.
    const std::vector<std::uint32_t>& by_or_node(std::size_t size, std::size_t or_node) const;

    /// Key ordering of backpointers for Viterbi tie-breaks.
    std::strong_ordering compare(std::size_t size, const Backpointer& a, const Backpointer& b) const;

private:
    struct Stratum;
    Stratum& stratum(std::size_t size);
    const Stratum* stratum_if(std::size_t size) const;

    std::shared_ptr<const Grammar> g_;
    DataSample x_;
    ParseMode mode_;
    std::vector<std::unique_ptr<Stratum>> strata_;
};

struct ParseResult {
    ParseMode mode = ParseMode::Viterbi;
    /// Log-probability of the best parse (viterbi) or of the sample
    /// (marginal); kNegInfinity when no complete parse exists.
    double log_prob = kNegInfinity;
    /// Viterbi tree over the GCNF grammar.
    std::optional<ParseTree> tree;
    std::optional<ChartKey> root;
    CompositionStats stats;
};

/// Builds the composition table bottom-up over composition sizes.
CompositionTable build_table(const GcnfGrammar& g, const DataSample& x, ParseMode mode,
                             const ParserBudget& budget = {}, CompositionStats* stats = nullptr);

/// Reconstructs the tree of a Viterbi table entry from its backpointers.
ParseTree backtrack(const CompositionTable& table, const ChartKey& root);

ParseResult parse(const GcnfGrammar& g, const DataSample& x, ParseMode mode, const ParserBudget& budget = {});

inline const CompositionStats& composition_stats(const ParseResult& result) { return result.stats; }

} // namespace aog
