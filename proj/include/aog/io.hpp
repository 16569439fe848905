#pragma once
#include <aog/domain.hpp>
#include <aog/grammar.hpp>
#include <aog/normalizer.hpp>
#include <aog/parser.hpp>

#include <string>

namespace aog {

inline constexpr int kFormatVersion = 1;

// JSON documents. Loaders reject unknown keys, missing keys, wrong types and
// a format_version other than 1 with FormatError. Objects serialize with
// sorted keys; doubles use the shortest round-tripping representation.

Json grammar_to_json(const Grammar& g);
/// Structural load only; validation is the caller's choice. `renormalize`
/// rescales every Or-node's probabilities to sum to one.
Grammar grammar_from_json(const Json& j, bool renormalize = false);

/// Parameters go through the domain codec; tuples as {"tuple": [...]}.
Json sample_to_json(const DataSample& x, const DomainBinding& domain);
/// Throws FormatError on duplicate instance ids or undecodable params.
DataSample sample_from_json(const Json& j, const DomainBinding& domain);

Json node_map_to_json(const NodeMap& m);
NodeMap node_map_from_json(const Json& j);

Json tree_to_json(const TreeNode& t, const DomainBinding& domain);
TreeNode tree_from_json(const Json& j, const DomainBinding& domain);

/// {"c_max", "elapsed_seconds", "max_param_size", "per_size_counts",
/// "per_size_entries", "table_size", "worst_case_reference"}.
Json stats_to_json(const CompositionStats& s);

/// Graphviz digraph of a tree: one box per node labelled with its id and
/// parameter, leaves additionally with their instance id.
std::string tree_to_dot(const TreeNode& t);

/// Canonical text: two-space indentation, sorted keys, trailing newline.
std::string dump_json(const Json& j);
/// Throws FormatError with the parser's message on malformed text.
Json parse_json(const std::string& text);

/// Whole-file helpers; throw FormatError when the file cannot be read or
/// written.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

Grammar load_grammar(const std::string& path, bool renormalize = false);
void save_grammar(const std::string& path, const Grammar& g);
DataSample load_sample(const std::string& path, const DomainBinding& domain);
void save_sample(const std::string& path, const DataSample& x, const DomainBinding& domain);

} // namespace aog
