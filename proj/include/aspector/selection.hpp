#pragma once

// Greedy coverage/orthogonality selection over deduplicated, grouped aspects.

#include <vector>

#include "aspector/dedup.hpp"
#include "aspector/grouping.hpp"

namespace aspector::selection {

struct SelectionInput {
  std::vector<grouping::AspectGroup> groups;
  // similarity over group representatives; must cover every representative
  dedup::SimilarityMatrix sim;
  int n = 8;
};

// First pick: argmax score (lexicographic tie-break on representative).
// Then repeatedly pick argmax score / max-similarity-to-selected; candidates
// with zero similarity to the selected set rank first, ordered by score then
// representative. The whole pool is ranked; the first n are returned.
std::vector<grouping::AspectGroup> select(const SelectionInput& input);

}  // namespace aspector::selection
