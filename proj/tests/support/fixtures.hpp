#pragma once
// Grammar and sample fixtures shared by the unit and acceptance tests.
#include <aog/grammar.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace aog::fixtures {

AndRule and_rule(const NodeId& head, std::vector<NodeId> children, DomainRef relation, DomainRef function);
DomainRef ref(const std::string& key, Json config = Json::object());

/// Line-drawing faces over the grid domain: a cat face (two ears, two eyes,
/// a mouth) or an owl face (two eyes, a beak). Probabilities are authored.
Grammar line_drawing_grammar();
/// Cat face whose left ear sits at `origin`; ears d,a; eyes h,v; mouth h.
DataSample cat_face_sample(std::int64_t ox = 0, std::int64_t oy = 0);

/// Instances (token_k, (k, k+1)) with ids "w<k>".
DataSample string_sample(const std::vector<std::string>& tokens);

/// Rectangles of a w×h grid split horizontally or vertically into two
/// rectangles; one terminal per unit cell.
Grammar rectangle_grammar(int w, int h);
DataSample rectangle_sample(int w, int h);

/// S -> S S | a over string spans, highly ambiguous.
Grammar binary_chain_grammar(double p_split = 0.4);

/// Random valid grammar with at most `max_nodes` nodes over one of the
/// string_span, grid, interval or null domains. Or-rules only point to Or-nodes
/// of higher index so that Or-chains are acyclic.
Grammar random_grammar(std::mt19937_64& rng, std::size_t max_nodes = 12);

/// A sample of at most `max_instances` instances drawn from `g`, or nothing
/// when sampling fails repeatedly. With `perturb`, one terminal label is
/// replaced, which usually destroys every parse.
std::optional<DataSample> random_sample(const Grammar& g, std::mt19937_64& rng, std::size_t max_instances,
                                        bool perturb = false);

} // namespace aog::fixtures
