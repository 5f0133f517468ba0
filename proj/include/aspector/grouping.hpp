#pragma once

// Vertical-category grouping: non-redundant aspects whose labels resolve to
// the same KB class merge under the class name.

#include <string>
#include <vector>

#include "aspector/dedup.hpp"
#include "aspector/kb.hpp"

namespace aspector::grouping {

struct AspectGroup {
  std::string display_label;  // class name for vertical groups, else the label
  bool is_vertical = false;
  double group_score = 0.0;   // max member label_score
  std::vector<dedup::AspectCluster> members;
  // canonical (post-redirect) entity per member; empty for non-vertical groups
  std::vector<std::string> member_entities;
  // label whose retrieval stands in for the group downstream
  std::string representative;
};

// Cluster labels are stripped of the query entity tokens, then resolved via
// lookup_class (redirect-aware, disambiguation-filtered). Labels sharing a
// class (two or more) form a vertical group; everything else stays a
// singleton group. Output ordered by group_score descending then label.
std::vector<AspectGroup> group_by_class(const std::vector<dedup::AspectCluster>& clusters,
                                        const kb::KnowledgeBase& kb,
                                        const std::string& entity_of_query);

}  // namespace aspector::grouping
