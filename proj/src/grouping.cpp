#include "aspector/grouping.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "aspector/text.hpp"

namespace aspector::grouping {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return c < 0x80 ? std::tolower(c) : c; });
  return s;
}

// "vietnam hanoi" with entity "vietnam" -> "hanoi"; first occurrence only.
std::string strip_entity(const std::string& label, const std::string& entity) {
  auto l_tokens = text::tokenize(label);
  auto e_tokens = text::tokenize(entity);
  if (e_tokens.empty() || e_tokens.size() > l_tokens.size()) return label;
  for (std::size_t start = 0; start + e_tokens.size() <= l_tokens.size(); ++start) {
    bool match = true;
    for (std::size_t k = 0; k < e_tokens.size(); ++k) {
      if (l_tokens[start + k] != e_tokens[k]) {
        match = false;
        break;
      }
    }
    if (match) {
      std::vector<std::string> rest;
      for (std::size_t i = 0; i < l_tokens.size(); ++i) {
        if (i < start || i >= start + e_tokens.size()) rest.push_back(l_tokens[i]);
      }
      return text::join(rest);
    }
  }
  return label;
}

}  // namespace

std::vector<AspectGroup> group_by_class(const std::vector<dedup::AspectCluster>& clusters,
                                        const kb::KnowledgeBase& kb,
                                        const std::string& entity_of_query) {
  struct Resolved {
    const dedup::AspectCluster* cluster;
    std::string class_key;   // empty when unresolvable
    std::string class_name;
    std::string canonical;   // canonical entity behind the label
  };

  std::vector<Resolved> resolved;
  std::map<std::string, int> class_counts;
  for (const auto& c : clusters) {
    Resolved r{&c, "", "", ""};
    std::string term = strip_entity(c.label, entity_of_query);
    if (!term.empty()) {
      if (auto klass = kb::lookup_class(kb, term)) {
        r.class_key = lower(*klass);
        r.class_name = *klass;
        r.canonical = kb.resolve(term);
        class_counts[r.class_key] += 1;
      }
    }
    resolved.push_back(std::move(r));
  }

  std::vector<AspectGroup> groups;
  std::map<std::string, std::size_t> vertical_index;
  for (const auto& r : resolved) {
    bool vertical = !r.class_key.empty() && class_counts[r.class_key] >= 2;
    if (!vertical) {
      AspectGroup g;
      g.display_label = r.cluster->label;
      g.group_score = r.cluster->label_score;
      g.members.push_back(*r.cluster);
      g.representative = r.cluster->label;
      groups.push_back(std::move(g));
      continue;
    }
    auto it = vertical_index.find(r.class_key);
    if (it == vertical_index.end()) {
      AspectGroup g;
      g.display_label = r.class_name;
      g.is_vertical = true;
      vertical_index.emplace(r.class_key, groups.size());
      groups.push_back(std::move(g));
      it = vertical_index.find(r.class_key);
    }
    AspectGroup& g = groups[it->second];
    g.members.push_back(*r.cluster);
    g.member_entities.push_back(r.canonical);
    if (r.cluster->label_score > g.group_score || g.members.size() == 1) {
      g.group_score = r.cluster->label_score;
    }
  }

  for (auto& g : groups) {
    if (!g.is_vertical) continue;
    // representative: best-scoring member label, lexicographic tie-break
    g.representative = g.members.front().label;
    double best = g.members.front().label_score;
    for (const auto& m : g.members) {
      if (m.label_score > best || (m.label_score == best && m.label < g.representative)) {
        g.representative = m.label;
        best = m.label_score;
      }
    }
  }

  std::stable_sort(groups.begin(), groups.end(), [](const AspectGroup& a, const AspectGroup& b) {
    if (a.group_score != b.group_score) return a.group_score > b.group_score;
    return a.display_label < b.display_label;
  });
  return groups;
}

}  // namespace aspector::grouping
