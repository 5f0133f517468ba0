#pragma once

// Deterministic synthetic worlds: query log, KB files, corpus and gold
// clusterings with planted aspect structure, for desk-scale experiments.

#include <cstdint>
#include <string>
#include <vector>

namespace aspector::synthgen {

struct PatternSpec {
  std::string pattern;                 // canonical form, may contain "<E>"
  double weight = 1.0;                 // sampling weight in sessions
  std::vector<std::string> variants;   // near-duplicate forms sharing vocabulary
  bool entity_docs = true;             // false: only class-level documents
};

struct EntitySpec {
  std::string name;
  double popularity = -1.0;  // < 0: Zipf 1/(rank+1); 0: present in KB, absent from log
};

struct ClassSpec {
  std::string name;
  std::string property;  // appended to the entity for the base query when set
  std::vector<EntitySpec> entities;
  std::vector<PatternSpec> patterns;
};

struct WorldSpec {
  std::uint64_t seed = 1;
  int session_count = 200;
  int docs_per_aspect = 3;
  int min_aspects_per_session = 1;
  int max_aspects_per_session = 3;
  int pattern_vocab_size = 16;
  std::vector<ClassSpec> classes;
};

WorldSpec load_world(const std::string& path);       // JSON document
std::string world_to_json(const WorldSpec& world);   // resolved popularity

struct GeneratedFiles {
  std::string log;
  std::string kb_entities;
  std::string kb_redirects;
  std::string kb_disambig;
  std::string corpus;
  std::string gold;
  std::string doc_labels;  // doc_id TAB class TAB entity-or-'-' TAB pattern
  std::string queries;     // suite-ready query file
  std::string world;       // resolved spec echo
};

// Writes all artifacts under out_dir (created if missing). Byte-identical
// output for identical WorldSpecs.
GeneratedFiles generate(const WorldSpec& world, const std::string& out_dir);

}  // namespace aspector::synthgen
