#pragma once
#include <aog/grammar.hpp>

#include <cstddef>
#include <vector>

namespace aog {

/// Every derivation of the start symbol whose leaves are exactly the
/// instances of `x`, with exact log-probabilities.
///
/// Brute force by top-down grounding; works on any valid grammar, not just
/// GCNF ones, and shares no code with the chart parser. Meant for small
/// inputs (a handful of instances, a few dozen nodes). Throws DepthExceeded
/// when a derivation passes `depth_limit` or an Or-cycle makes the set of
/// derivations infinite.
std::vector<ParseTree> enumerate_parses(const Grammar& g, const DataSample& x,
                                        std::size_t depth_limit = kDefaultMaxDepth);

struct EnumerationFold {
    std::size_t count = 0;
    double viterbi;   // max log-probability
    double marginal;  // log of the summed probability
};

EnumerationFold fold_parses(const std::vector<ParseTree>& parses);

} // namespace aog
