#include "aspector/synthgen.hpp"

#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "aspector/candidates.hpp"
#include "aspector/text.hpp"
#include "aspector/tsv.hpp"

namespace aspector::synthgen {

namespace {

using Json = nlohmann::json;

// mt19937_64 has a standardized output sequence; distributions are hand
// rolled so generated bytes do not depend on the standard library build.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  std::uint64_t next() { return gen(); }
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  std::size_t pick_weighted(const std::vector<double>& weights, double total) {
    double r = next_unit() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      cum += weights[i];
      if (r < cum) return i;
    }
    return weights.size() - 1;
  }
};

std::string normalize_pattern(const std::string& pattern) {
  std::vector<std::string> out;
  for (const auto& tok : text::tokenize(pattern)) {
    if (tok == candidates::kEntityPlaceholder) {
      out.push_back(tok);
    } else {
      std::string norm = text::normalize_query(tok);
      if (!norm.empty()) out.push_back(norm);
    }
  }
  return text::join(out);
}

std::string pattern_without_placeholder(const std::string& pattern) {
  std::vector<std::string> out;
  for (const auto& tok : text::tokenize(pattern)) {
    if (tok != candidates::kEntityPlaceholder) out.push_back(tok);
  }
  return text::join(out);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
}

}  // namespace

WorldSpec load_world(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open world spec: " + path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError("world spec is not valid JSON: " + path);

  WorldSpec world;
  world.seed = j.value("seed", world.seed);
  world.session_count = j.value("session_count", world.session_count);
  world.docs_per_aspect = j.value("docs_per_aspect", world.docs_per_aspect);
  world.min_aspects_per_session = j.value("min_aspects_per_session", world.min_aspects_per_session);
  world.max_aspects_per_session = j.value("max_aspects_per_session", world.max_aspects_per_session);
  world.pattern_vocab_size = j.value("pattern_vocab_size", world.pattern_vocab_size);
  if (!j.contains("classes")) throw DataError("world spec has no classes");
  for (const auto& jc : j.at("classes")) {
    ClassSpec cls;
    cls.name = jc.at("name").get<std::string>();
    cls.property = jc.value("property", std::string());
    for (const auto& je : jc.at("entities")) {
      EntitySpec e;
      if (je.is_string()) {
        e.name = je.get<std::string>();
      } else {
        e.name = je.at("name").get<std::string>();
        e.popularity = je.value("popularity", -1.0);
      }
      cls.entities.push_back(std::move(e));
    }
    for (const auto& jp : jc.at("patterns")) {
      PatternSpec p;
      if (jp.is_string()) {
        p.pattern = jp.get<std::string>();
      } else {
        p.pattern = jp.at("pattern").get<std::string>();
        p.weight = jp.value("weight", 1.0);
        p.variants = jp.value("variants", std::vector<std::string>{});
        p.entity_docs = jp.value("entity_docs", true);
      }
      cls.patterns.push_back(std::move(p));
    }
    world.classes.push_back(std::move(cls));
  }
  if (world.classes.empty()) throw DataError("world spec has no classes");
  return world;
}

std::string world_to_json(const WorldSpec& world) {
  nlohmann::ordered_json j;
  j["seed"] = world.seed;
  j["session_count"] = world.session_count;
  j["docs_per_aspect"] = world.docs_per_aspect;
  j["min_aspects_per_session"] = world.min_aspects_per_session;
  j["max_aspects_per_session"] = world.max_aspects_per_session;
  j["pattern_vocab_size"] = world.pattern_vocab_size;
  j["classes"] = nlohmann::ordered_json::array();
  for (const auto& cls : world.classes) {
    nlohmann::ordered_json jc;
    jc["name"] = cls.name;
    jc["property"] = cls.property;
    jc["entities"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < cls.entities.size(); ++i) {
      const auto& e = cls.entities[i];
      double pop = e.popularity < 0.0 ? 1.0 / static_cast<double>(i + 1) : e.popularity;
      jc["entities"].push_back({{"name", e.name}, {"popularity", pop}});
    }
    jc["patterns"] = nlohmann::ordered_json::array();
    for (const auto& p : cls.patterns) {
      jc["patterns"].push_back({{"pattern", p.pattern},
                                {"weight", p.weight},
                                {"variants", p.variants},
                                {"entity_docs", p.entity_docs}});
    }
    j["classes"].push_back(std::move(jc));
  }
  return j.dump(2) + "\n";
}

GeneratedFiles generate(const WorldSpec& world, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  struct Aspect {
    std::size_t class_idx;
    std::size_t pattern_idx;  // base pattern index within the class
    std::string pattern;      // normalized canonical form (base or variant)
    double weight;
    bool is_variant;
  };

  struct World {
    std::vector<std::string> class_names;      // normalized
    std::vector<std::string> properties;       // normalized, may be empty
    std::vector<std::vector<std::string>> entities;
    std::vector<std::vector<double>> popularity;
    std::vector<std::vector<Aspect>> aspects;  // sampling pool per class
  } w;

  for (std::size_t ci = 0; ci < world.classes.size(); ++ci) {
    const auto& cls = world.classes[ci];
    w.class_names.push_back(text::normalize_query(cls.name));
    w.properties.push_back(text::normalize_query(cls.property));
    w.entities.emplace_back();
    w.popularity.emplace_back();
    for (std::size_t ei = 0; ei < cls.entities.size(); ++ei) {
      const auto& e = cls.entities[ei];
      std::string name = text::normalize_query(e.name);
      if (name.empty()) throw DataError("entity normalizes to empty: " + e.name);
      w.entities[ci].push_back(name);
      w.popularity[ci].push_back(e.popularity < 0.0 ? 1.0 / static_cast<double>(ei + 1)
                                                    : e.popularity);
    }
    w.aspects.emplace_back();
    for (std::size_t pi = 0; pi < cls.patterns.size(); ++pi) {
      const auto& p = cls.patterns[pi];
      w.aspects[ci].push_back({ci, pi, normalize_pattern(p.pattern), p.weight, false});
      for (const auto& variant : p.variants) {
        w.aspects[ci].push_back({ci, pi, normalize_pattern(variant), p.weight * 0.9, true});
      }
    }
  }

  auto base_query = [&](std::size_t ci, const std::string& entity) {
    return w.properties[ci].empty() ? entity : entity + " " + w.properties[ci];
  };
  auto instantiated = [&](const Aspect& a, const std::string& entity) {
    std::string s = candidates::instantiate(a.pattern, entity);
    // patterns without the placeholder still get the entity prefix so they
    // are super-strings of the base query
    if (s == a.pattern && s.find(entity) == std::string::npos) {
      s = entity + " " + s;
    }
    return s;
  };

  // ---- query log ----
  std::string log;
  std::int64_t session_no = 0;
  auto emit_session = [&](const std::string& user, const std::string& base,
                          const std::vector<std::string>& followups) {
    std::int64_t t = 1'000'000 + session_no * 10'000;
    ++session_no;
    log += user + "\t" + std::to_string(t) + "\t" + base + "\n";
    for (std::size_t k = 0; k < followups.size(); ++k) {
      log += user + "\t" + std::to_string(t + 60 * static_cast<std::int64_t>(k + 1)) + "\t" +
             followups[k] + "\n";
    }
  };

  // coverage block: every logged entity sees every pattern at least once
  std::int64_t cov_no = 0;
  for (std::size_t ci = 0; ci < world.classes.size(); ++ci) {
    for (std::size_t ei = 0; ei < w.entities[ci].size(); ++ei) {
      if (w.popularity[ci][ei] <= 0.0) continue;
      const auto& entity = w.entities[ci][ei];
      for (const auto& aspect : w.aspects[ci]) {
        emit_session("c" + std::to_string(cov_no++), base_query(ci, entity),
                     {instantiated(aspect, entity)});
      }
    }
  }

  // random block: popularity-weighted entity, weighted aspect picks
  Rng rng(world.seed);
  std::vector<std::pair<std::size_t, std::size_t>> pick_entities;
  std::vector<double> pick_weights;
  double pick_total = 0.0;
  for (std::size_t ci = 0; ci < world.classes.size(); ++ci) {
    for (std::size_t ei = 0; ei < w.entities[ci].size(); ++ei) {
      if (w.popularity[ci][ei] <= 0.0) continue;
      pick_entities.emplace_back(ci, ei);
      pick_weights.push_back(w.popularity[ci][ei]);
      pick_total += w.popularity[ci][ei];
    }
  }
  std::vector<std::vector<double>> aspect_weights(world.classes.size());
  std::vector<double> aspect_totals(world.classes.size(), 0.0);
  for (std::size_t ci = 0; ci < world.classes.size(); ++ci) {
    for (const auto& a : w.aspects[ci]) {
      aspect_weights[ci].push_back(a.weight);
      aspect_totals[ci] += a.weight;
    }
  }
  const int span = std::max(0, world.max_aspects_per_session - world.min_aspects_per_session);
  for (int s = 0; s < world.session_count && !pick_entities.empty(); ++s) {
    auto [ci, ei] = pick_entities[rng.pick_weighted(pick_weights, pick_total)];
    const auto& entity = w.entities[ci][ei];
    int count = world.min_aspects_per_session +
                (span > 0 ? static_cast<int>(rng.next() % static_cast<std::uint64_t>(span + 1)) : 0);
    std::vector<std::string> follow;
    for (int k = 0; k < count; ++k) {
      const auto& a = w.aspects[ci][rng.pick_weighted(aspect_weights[ci], aspect_totals[ci])];
      follow.push_back(instantiated(a, entity));
    }
    emit_session("u" + std::to_string(s), base_query(ci, entity), follow);
  }

  // ---- KB ----
  std::string kb_entities;
  for (std::size_t ci = 0; ci < world.classes.size(); ++ci) {
    for (const auto& entity : w.entities[ci]) {
      kb_entities += entity + "\t" + w.class_names[ci] + "\n";
    }
  }

  // ---- corpus + labels ----
  std::string corpus;
  std::string labels;
  std::int64_t doc_no = 0;
  auto vocab_token = [&](std::size_t ci, std::size_t pi, int k) {
    return "v" + std::to_string(ci) + "p" + std::to_string(pi) + "w" + std::to_string(k);
  };
  auto emit_doc = [&](const std::string& head, const std::string& snippet,
                      const std::string& klass, const std::string& entity,
                      const std::string& pattern) {
    nlohmann::ordered_json j;
    char id[16];
    std::snprintf(id, sizeof(id), "d%06lld", static_cast<long long>(doc_no++));
    j["doc_id"] = id;
    j["head"] = head;
    j["snippet"] = snippet;
    corpus += j.dump() + "\n";
    labels += std::string(id) + "\t" + klass + "\t" + entity + "\t" + pattern + "\n";
  };

  for (std::size_t ci = 0; ci < world.classes.size(); ++ci) {
    const auto& cls = world.classes[ci];
    for (const auto& aspect : w.aspects[ci]) {
      std::string shared;
      for (int k = 0; k < world.pattern_vocab_size; ++k) {
        shared += vocab_token(ci, aspect.pattern_idx, k) + " ";
      }
      shared += "cls" + std::to_string(ci);
      const std::string ptoks = pattern_without_placeholder(aspect.pattern);
      if (cls.patterns[aspect.pattern_idx].entity_docs) {
        for (const auto& entity : w.entities[ci]) {
          for (int d = 0; d < world.docs_per_aspect; ++d) {
            emit_doc(instantiated(aspect, entity),
                     ptoks + " " + shared + " d" + std::to_string(d),
                     w.class_names[ci], entity, aspect.pattern);
          }
        }
      } else {
        for (int d = 0; d < world.docs_per_aspect; ++d) {
          emit_doc(ptoks + " guide",
                   ptoks + " " + shared + " d" + std::to_string(d),
                   w.class_names[ci], "-", aspect.pattern);
        }
      }
    }
  }

  // ---- gold + queries ----
  std::string gold;
  std::string queries;
  for (std::size_t ci = 0; ci < world.classes.size(); ++ci) {
    const auto& cls = world.classes[ci];
    for (const auto& entity : w.entities[ci]) {
      queries += base_query(ci, entity) + "\t" + entity + "\t" + w.properties[ci] + "\n";
      nlohmann::ordered_json j;
      j["query"] = base_query(ci, entity);
      j["clusters"] = nlohmann::ordered_json::array();
      for (std::size_t pi = 0; pi < cls.patterns.size(); ++pi) {
        nlohmann::ordered_json cluster = nlohmann::ordered_json::array();
        for (const auto& a : w.aspects[ci]) {
          if (a.pattern_idx == pi) cluster.push_back(instantiated(a, entity));
        }
        j["clusters"].push_back(std::move(cluster));
      }
      gold += j.dump() + "\n";
    }
  }

  GeneratedFiles files;
  auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
  files.log = path("log.tsv");
  files.kb_entities = path("kb_entities.tsv");
  files.kb_redirects = path("kb_redirects.tsv");
  files.kb_disambig = path("kb_disambig.tsv");
  files.corpus = path("corpus.jsonl");
  files.gold = path("gold.jsonl");
  files.doc_labels = path("doc_labels.tsv");
  files.queries = path("queries.tsv");
  files.world = path("world.json");

  write_file(files.log, log);
  write_file(files.kb_entities, kb_entities);
  write_file(files.kb_redirects, "# no redirects\n");
  write_file(files.kb_disambig, "# no disambiguation terms\n");
  write_file(files.corpus, corpus);
  write_file(files.gold, gold);
  write_file(files.doc_labels, labels);
  write_file(files.queries, queries);
  write_file(files.world, world_to_json(world));
  return files;
}

}  // namespace aspector::synthgen
