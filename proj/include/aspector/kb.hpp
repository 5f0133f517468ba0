#pragma once

// Knowledge-base snapshot: entity -> class membership, redirect synonyms and
// disambiguation flags. Immutable after load.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace aspector::kb {

struct KnowledgeBase {
  // entity (normalized) -> class display name; single class per entity
  std::map<std::string, std::string> entity_class;
  // alias -> canonical entity, collapsed to the redirect terminus
  std::map<std::string, std::string> redirects;
  // terms with disambiguation pages; never class-resolved
  std::set<std::string> ambiguous;
  // lowercase class -> entities (inverse of entity_class)
  std::map<std::string, std::set<std::string>> class_members;
  // lowercase class -> display spelling (first seen)
  std::map<std::string, std::string> class_display;

  // Redirect resolution; identity for non-aliases.
  const std::string& resolve(const std::string& term) const;
};

// File formats (all UTF-8, '#' comments):
//   entities:  entity <TAB> class
//   redirects: alias <TAB> canonical
//   disambig:  one term per line
// Duplicate entities with conflicting classes and redirect cycles are fatal.
KnowledgeBase load_kb(const std::string& entities_path,
                      const std::string& redirects_path,
                      const std::string& disambig_path);

// Resolves through redirects; ambiguous terms (post-redirect) yield nothing.
std::optional<std::string> lookup_class(const KnowledgeBase& kb,
                                        const std::string& term);

// Re-emits the three KB files (semantically equal to what load_kb consumed).
void save_kb(const KnowledgeBase& kb, const std::string& entities_path,
             const std::string& redirects_path, const std::string& disambig_path);

}  // namespace aspector::kb
