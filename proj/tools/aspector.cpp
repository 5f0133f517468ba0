// aspector: aspect mining over a query log, a class KB and a local corpus.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 empty result
// (a query with no candidates and no class patterns).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aspector/candidates.hpp"
#include "aspector/eval.hpp"
#include "aspector/kb.hpp"
#include "aspector/logmodel.hpp"
#include "aspector/pipeline.hpp"
#include "aspector/propagation.hpp"
#include "aspector/retrieval.hpp"
#include "aspector/simd.hpp"
#include "aspector/synthgen.hpp"
#include "aspector/text.hpp"
#include "aspector/tsv.hpp"

namespace {

using aspector::DataError;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitEmpty = 3;

struct ConfigCli {
  std::string config_path;
  // flag storage; only flags the user actually passed are applied
  std::vector<std::pair<std::string, std::string>> entries{
      {"K", ""},        {"sigma", ""},   {"m", ""},
      {"n", ""},        {"N", ""},       {"coverage_k", ""},
      {"candidate_cap", ""}, {"session_gap_seconds", ""}, {"variant", ""},
      {"topic_T", ""},  {"threads", ""}, {"concat_similarity", ""}};
  std::vector<CLI::Option*> options;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "config file (key=value); default $ASPECTOR_CONFIG");
    for (auto& [key, value] : entries) {
      options.push_back(cmd->add_option("--" + key, value, "override config " + key));
    }
  }

  aspector::pipeline::Config resolve() const {
    aspector::pipeline::Config config;
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv("ASPECTOR_CONFIG")) path = env;
    }
    if (!path.empty()) config = aspector::pipeline::Config::from_file(path);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (options[i]->count() > 0) config.set(entries[i].first, entries[i].second);
    }
    config.validate();
    return config;
  }
};

std::string read_required(const std::string& what, const std::string& path) {
  if (path.empty()) throw DataError(what + " path is required");
  return path;
}

// Accepts either --entity [--property], or --query plus --entity with the
// property derived from the remainder. Queries arrive pre-segmented; there is
// no automatic segmentation.
aspector::candidates::SegmentedQuery make_query(const std::string& full_raw,
                                                const std::string& entity_raw,
                                                const std::string& property_raw) {
  namespace text = aspector::text;
  std::string entity = text::normalize_query(entity_raw);
  std::string property = text::normalize_query(property_raw);
  std::string full = text::normalize_query(full_raw);
  if (entity.empty()) throw DataError("--entity is required");
  if (!full.empty()) {
    std::string derived;
    if (full == entity) {
      derived = "";
    } else if (full.rfind(entity + " ", 0) == 0) {
      derived = full.substr(entity.size() + 1);
    } else {
      throw DataError("--query must start with the entity tokens: " + full);
    }
    if (!property.empty() && property != derived) {
      throw DataError("--property disagrees with --query");
    }
    property = derived;
  }
  return aspector::candidates::SegmentedQuery::make(entity, property);
}

aspector::logmodel::LogStats load_stats(const std::string& log_path,
                                        const aspector::pipeline::Config& config,
                                        std::ostream& err) {
  auto loaded = aspector::logmodel::load_log(log_path);
  if (loaded.dropped_lines > 0) {
    err << "warning: dropped " << loaded.dropped_lines << " malformed log lines\n";
  }
  auto sessions = aspector::logmodel::sessionize(loaded.events, config.session_gap_seconds);
  return aspector::logmodel::count_stats(sessions);
}

struct AspectList {
  std::string query;
  std::vector<std::string> aspects;
};

std::vector<AspectList> load_aspect_lists(const std::string& path) {
  std::vector<AspectList> lists;
  for (const auto& line : aspector::tsv::read_lines(path)) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("query") || !j.contains("aspects")) {
      throw DataError("bad aspect-list line: " + line);
    }
    lists.push_back({j.at("query").get<std::string>(),
                     j.at("aspects").get<std::vector<std::string>>()});
  }
  return lists;
}

std::vector<double> parse_sigma_range(const std::string& spec) {
  // "start:stop:step" inclusive, or a comma-separated list
  std::vector<double> sigmas;
  if (spec.find(':') != std::string::npos) {
    double start, stop, step;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0) {
      throw DataError("bad --sigmas range: " + spec);
    }
    for (double s = start; s <= stop + 1e-12; s += step) sigmas.push_back(s);
  } else {
    std::size_t pos = 0;
    while (pos < spec.size()) {
      std::size_t comma = spec.find(',', pos);
      if (comma == std::string::npos) comma = spec.size();
      try {
        sigmas.push_back(std::stod(spec.substr(pos, comma - pos)));
      } catch (const std::exception&) {
        throw DataError("bad --sigmas list: " + spec);
      }
      pos = comma + 1;
    }
  }
  if (sigmas.empty()) throw DataError("empty --sigmas");
  return sigmas;
}

void write_or_print(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot write " + out_path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aspector: mine orthogonal, high-coverage search aspects"};
  app.require_subcommand(1);

  // ---- sessionize ----
  auto* cmd_sessionize = app.add_subcommand("sessionize", "segment a query log into sessions");
  std::string se_log, se_out;
  ConfigCli se_cfg;
  cmd_sessionize->add_option("--log", se_log, "query log TSV")->required();
  cmd_sessionize->add_option("--out", se_out, "output TSV (default stdout)");
  se_cfg.attach(cmd_sessionize);

  // ---- candidates ----
  auto* cmd_candidates = app.add_subcommand("candidates", "instance-level candidate aspects");
  std::string ca_log, ca_query, ca_entity, ca_property, ca_out;
  ConfigCli ca_cfg;
  cmd_candidates->add_option("--log", ca_log, "query log TSV")->required();
  cmd_candidates->add_option("--query", ca_query, "full query (entity [property])");
  cmd_candidates->add_option("--entity", ca_entity, "query entity")->required();
  cmd_candidates->add_option("--property", ca_property, "query property (optional)");
  cmd_candidates->add_option("--out", ca_out, "output JSON (default stdout)");
  ca_cfg.attach(cmd_candidates);

  // ---- propagate ----
  auto* cmd_propagate = app.add_subcommand("propagate", "class-based aspect propagation");
  std::string pr_log, pr_entities, pr_redirects, pr_disambig, pr_query, pr_entity, pr_property;
  std::string pr_out, pr_save_dists, pr_load_dists;
  ConfigCli pr_cfg;
  cmd_propagate->add_option("--log", pr_log, "query log TSV")->required();
  cmd_propagate->add_option("--kb-entities", pr_entities, "KB entities TSV")->required();
  cmd_propagate->add_option("--kb-redirects", pr_redirects, "KB redirects TSV")->required();
  cmd_propagate->add_option("--kb-disambig", pr_disambig, "KB disambiguation list")->required();
  cmd_propagate->add_option("--query", pr_query, "full query (entity [property])");
  cmd_propagate->add_option("--entity", pr_entity, "query entity")->required();
  cmd_propagate->add_option("--property", pr_property, "query property (optional)");
  cmd_propagate->add_option("--out", pr_out, "output JSON (default stdout)");
  cmd_propagate->add_option("--save-class-dists", pr_save_dists,
                            "persist class distributions (TSV) for reuse");
  cmd_propagate->add_option("--load-class-dists", pr_load_dists,
                            "reuse persisted class distributions instead of recomputing");
  pr_cfg.attach(cmd_propagate);

  // ---- aspects ----
  auto* cmd_aspects = app.add_subcommand("aspects", "full pipeline for one query");
  std::string as_log, as_entities, as_redirects, as_disambig, as_corpus, as_cache;
  std::string as_query, as_entity, as_property, as_out;
  ConfigCli as_cfg;
  cmd_aspects->add_option("--log", as_log, "query log TSV")->required();
  cmd_aspects->add_option("--kb-entities", as_entities, "KB entities TSV")->required();
  cmd_aspects->add_option("--kb-redirects", as_redirects, "KB redirects TSV")->required();
  cmd_aspects->add_option("--kb-disambig", as_disambig, "KB disambiguation list")->required();
  cmd_aspects->add_option("--corpus", as_corpus, "corpus JSONL")->required();
  cmd_aspects->add_option("--retrieval-cache", as_cache, "pinned retrieval JSONL");
  cmd_aspects->add_option("--query", as_query, "full query (entity [property])");
  cmd_aspects->add_option("--entity", as_entity, "query entity")->required();
  cmd_aspects->add_option("--property", as_property, "query property (optional)");
  cmd_aspects->add_option("--out", as_out, "output JSON (default stdout)");
  as_cfg.attach(cmd_aspects);

  // ---- suite ----
  auto* cmd_suite = app.add_subcommand("suite", "run a whole query suite with metrics");
  std::string su_queries, su_log, su_entities, su_redirects, su_disambig, su_corpus, su_cache,
      su_out;
  ConfigCli su_cfg;
  cmd_suite->add_option("--queries", su_queries, "query TSV: full, entity, property")->required();
  cmd_suite->add_option("--log", su_log, "query log TSV")->required();
  cmd_suite->add_option("--kb-entities", su_entities, "KB entities TSV")->required();
  cmd_suite->add_option("--kb-redirects", su_redirects, "KB redirects TSV")->required();
  cmd_suite->add_option("--kb-disambig", su_disambig, "KB disambiguation list")->required();
  cmd_suite->add_option("--corpus", su_corpus, "corpus JSONL")->required();
  cmd_suite->add_option("--retrieval-cache", su_cache, "pinned retrieval JSONL");
  cmd_suite->add_option("--out", su_out, "output directory")->required();
  su_cfg.attach(cmd_suite);

  // ---- synth ----
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic world");
  std::string sy_world, sy_out;
  std::uint64_t sy_seed = 0;
  bool sy_seed_set = false;
  cmd_synth->add_option("--world", sy_world, "world spec JSON")->required();
  cmd_synth->add_option("--out", sy_out, "output directory")->required();
  auto* sy_seed_opt = cmd_synth->add_option("--seed", sy_seed, "override the world seed");
  (void)sy_seed_set;

  // ---- eval-nsim ----
  auto* cmd_nsim = app.add_subcommand("eval-nsim", "normalized inter-aspect similarity");
  std::string ns_corpus, ns_cache, ns_lists, ns_out;
  ConfigCli ns_cfg;
  cmd_nsim->add_option("--corpus", ns_corpus, "corpus JSONL")->required();
  cmd_nsim->add_option("--retrieval-cache", ns_cache, "pinned retrieval JSONL");
  cmd_nsim->add_option("--aspect-lists", ns_lists,
                       "JSONL {\"query\",\"aspects\"} per line")->required();
  cmd_nsim->add_option("--out", ns_out, "output CSV (default stdout)");
  ns_cfg.attach(cmd_nsim);

  // ---- eval-coverage ----
  auto* cmd_coverage = app.add_subcommand("eval-coverage", "coverage overlap of aspects");
  std::string co_corpus, co_cache, co_lists, co_out;
  ConfigCli co_cfg;
  cmd_coverage->add_option("--corpus", co_corpus, "corpus JSONL")->required();
  cmd_coverage->add_option("--retrieval-cache", co_cache, "pinned retrieval JSONL");
  cmd_coverage->add_option("--aspect-lists", co_lists,
                           "JSONL {\"query\",\"aspects\"} per line")->required();
  cmd_coverage->add_option("--out", co_out, "output CSV (default stdout)");
  co_cfg.attach(cmd_coverage);

  // ---- eval-cluster-f ----
  auto* cmd_f = app.add_subcommand("eval-cluster-f", "pair-decision clustering F-measure");
  std::string f_pred, f_gold, f_out;
  cmd_f->add_option("--predicted", f_pred, "predicted clusters JSONL")->required();
  cmd_f->add_option("--gold", f_gold, "gold clusters JSONL")->required();
  cmd_f->add_option("--out", f_out, "output CSV (default stdout)");

  // ---- sweep-sigma ----
  auto* cmd_sweep = app.add_subcommand("sweep-sigma", "F-measure across sigma thresholds");
  std::string sw_corpus, sw_cache, sw_gold, sw_sigmas = "0.05:0.55:0.05", sw_out;
  ConfigCli sw_cfg;
  cmd_sweep->add_option("--corpus", sw_corpus, "corpus JSONL")->required();
  cmd_sweep->add_option("--retrieval-cache", sw_cache, "pinned retrieval JSONL");
  cmd_sweep->add_option("--gold", sw_gold, "gold clusters JSONL")->required();
  cmd_sweep->add_option("--sigmas", sw_sigmas, "start:stop:step or comma list");
  cmd_sweep->add_option("--out", sw_out, "output CSV (default stdout)");
  sw_cfg.attach(cmd_sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*cmd_sessionize) {
      auto config = se_cfg.resolve();
      auto loaded = aspector::logmodel::load_log(read_required("--log", se_log));
      if (loaded.dropped_lines > 0) {
        std::cerr << "warning: dropped " << loaded.dropped_lines << " malformed log lines\n";
      }
      auto sessions = aspector::logmodel::sessionize(loaded.events, config.session_gap_seconds);
      std::cerr << sessions.size() << " sessions over " << loaded.events.size()
                << " events\n";
      write_or_print(se_out, aspector::logmodel::render_sessions_tsv(sessions));
      return kExitOk;
    }

    if (*cmd_candidates) {
      auto config = ca_cfg.resolve();
      auto stats = load_stats(ca_log, config, std::cerr);
      auto q = make_query(ca_query, ca_entity, ca_property);
      Json j = Json::array();
      for (const auto& c :
           aspector::candidates::instance_aspects(stats, q, config.candidate_cap)) {
        j.push_back({{"surface", c.surface},
                     {"canonical", c.canonical},
                     {"p_r", c.p_r},
                     {"p_ss", c.p_ss},
                     {"p_inst", c.p_inst},
                     {"origin", aspector::candidates::origin_name(c.origin)}});
      }
      write_or_print(ca_out, j.dump(2) + "\n");
      return kExitOk;
    }

    if (*cmd_propagate) {
      auto config = pr_cfg.resolve();
      auto stats = load_stats(pr_log, config, std::cerr);
      auto kb = aspector::kb::load_kb(pr_entities, pr_redirects, pr_disambig);
      auto q = make_query(pr_query, pr_entity, pr_property);

      auto klass = aspector::kb::lookup_class(kb, q.entity);
      if (!klass) throw DataError("entity has no resolvable class: " + q.entity);

      std::vector<aspector::candidates::SegmentedQuery> graph_queries{q};
      std::string lc;
      for (char c : *klass) lc += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      const std::string canonical = kb.resolve(q.entity);
      for (const auto& member : kb.class_members.at(lc)) {
        if (member == canonical || member == q.entity) continue;
        graph_queries.push_back(
            aspector::candidates::SegmentedQuery::make(member, q.property));
      }
      auto graph = aspector::propagation::build_graph(kb, graph_queries, config.K);

      std::map<std::string, aspector::propagation::PatternDist> instance_dists;
      for (const auto& node : graph.instances) {
        aspector::propagation::PatternDist dist;
        for (const auto& c : aspector::candidates::instance_aspects(stats, node.query,
                                                                    config.candidate_cap)) {
          dist[c.canonical] += c.p_inst;
        }
        instance_dists[node.query.full] = std::move(dist);
      }

      std::string q_key;
      for (const auto& node : graph.instances) {
        if (node.query.full == q.full) q_key = node.class_key;
      }
      if (q_key.empty()) throw DataError("query excluded from the propagation graph");

      aspector::propagation::PatternDist class_dist;
      if (!pr_load_dists.empty()) {
        auto loaded = aspector::propagation::load_class_dists(pr_load_dists);
        auto it = loaded.find(q_key);
        if (it == loaded.end()) {
          throw DataError("persisted class distributions miss node: " + q_key);
        }
        class_dist = it->second;
        if (config.variant == aspector::propagation::Variant::indicator) {
          aspector::propagation::normalize(class_dist);
        }
      } else {
        auto class_dists =
            aspector::propagation::class_aspects(graph, instance_dists, config.variant);
        if (!pr_save_dists.empty()) {
          aspector::propagation::save_class_dists(class_dists, pr_save_dists);
        }
        for (auto& dist : class_dists) {
          if (dist.class_key == q_key) {
            class_dist = dist.weights;
            break;
          }
        }
        if (config.variant == aspector::propagation::Variant::indicator) {
          aspector::propagation::normalize(class_dist);
        }
      }
      auto smoothed =
          aspector::propagation::smooth(instance_dists.at(q.full), class_dist, config.K);

      Json j;
      j["query"] = q.full;
      j["class_node"] = q_key;
      j["K"] = config.K;
      j["variant"] = aspector::propagation::variant_name(config.variant);
      j["p_class"] = class_dist;
      j["p"] = smoothed;
      write_or_print(pr_out, j.dump(2) + "\n");
      return kExitOk;
    }

    if (*cmd_aspects) {
      auto config = as_cfg.resolve();
      auto stats = load_stats(as_log, config, std::cerr);
      auto kb = aspector::kb::load_kb(as_entities, as_redirects, as_disambig);
      auto corpus = aspector::retrieval::load_corpus(as_corpus);
      aspector::retrieval::SearchEngine engine(corpus);
      if (!as_cache.empty()) engine.load_cache(as_cache);
      auto q = make_query(as_query, as_entity, as_property);
      auto report = aspector::pipeline::run_query(q, stats, kb, engine, config);
      write_or_print(as_out, aspector::pipeline::report_to_json(report));
      return report.empty ? kExitEmpty : kExitOk;
    }

    if (*cmd_suite) {
      auto config = su_cfg.resolve();
      auto queries = aspector::pipeline::load_queries(su_queries);
      auto stats = load_stats(su_log, config, std::cerr);
      auto kb = aspector::kb::load_kb(su_entities, su_redirects, su_disambig);
      auto corpus = aspector::retrieval::load_corpus(su_corpus);
      aspector::retrieval::SearchEngine engine(corpus);
      if (!su_cache.empty()) engine.load_cache(su_cache);
      auto result = aspector::pipeline::run_suite(queries, stats, kb, engine, config, su_out);
      std::cerr << "suite: " << result.queries_run << " queries, " << result.failures
                << " failures, reports in " << su_out << " (isa: "
                << aspector::simd::isa_name(aspector::simd::active_isa()) << ")\n";
      return kExitOk;
    }

    if (*cmd_synth) {
      auto world = aspector::synthgen::load_world(sy_world);
      if (sy_seed_opt->count() > 0) world.seed = sy_seed;
      auto files = aspector::synthgen::generate(world, sy_out);
      std::cerr << "world written under " << sy_out << "\n";
      return kExitOk;
    }

    if (*cmd_nsim) {
      auto config = ns_cfg.resolve();
      auto corpus = aspector::retrieval::load_corpus(ns_corpus);
      aspector::retrieval::SearchEngine engine(corpus);
      if (!ns_cache.empty()) engine.load_cache(ns_cache);
      auto model = aspector::eval::build_topic_model(corpus, config.topic_T);
      std::string csv = "query,n_aspects,nsim,note\n";
      for (const auto& list : load_aspect_lists(ns_lists)) {
        std::string value, note;
        try {
          value = aspector::eval::fixed6(
              aspector::eval::nsim(engine, model, list.aspects, config.m));
        } catch (const aspector::eval::MetricError& e) {
          note = e.what();
        }
        csv += list.query + "," + std::to_string(list.aspects.size()) + "," + value + "," +
               note + "\n";
      }
      write_or_print(ns_out, csv);
      return kExitOk;
    }

    if (*cmd_coverage) {
      auto config = co_cfg.resolve();
      auto corpus = aspector::retrieval::load_corpus(co_corpus);
      aspector::retrieval::SearchEngine engine(corpus);
      if (!co_cache.empty()) engine.load_cache(co_cache);
      std::string csv = "query,k,N,aspect_docs,overlap,new_docs,vacuous\n";
      for (const auto& list : load_aspect_lists(co_lists)) {
        auto cov = aspector::eval::coverage_overlap(engine, list.query, list.aspects,
                                                    config.coverage_k, config.N);
        csv += list.query + "," + std::to_string(config.coverage_k) + "," +
               std::to_string(config.N) + "," + std::to_string(cov.aspect_docs.size()) + "," +
               aspector::eval::fixed6(cov.overlap) + "," +
               std::to_string(cov.new_docs.size()) + "," + (cov.vacuous ? "1" : "0") + "\n";
      }
      write_or_print(co_out, csv);
      return kExitOk;
    }

    if (*cmd_f) {
      auto predicted = aspector::eval::load_gold(f_pred);
      auto gold = aspector::eval::load_gold(f_gold);
      std::map<std::string, const aspector::eval::GoldClustering*> gold_by_query;
      for (const auto& g : gold) gold_by_query[g.query] = &g;
      std::string csv = "query,f\n";
      double total = 0.0;
      int counted = 0;
      for (const auto& p : predicted) {
        auto it = gold_by_query.find(p.query);
        if (it == gold_by_query.end()) {
          throw DataError("gold file misses query: " + p.query);
        }
        double f = aspector::eval::pair_f_measure(p.clusters, *it->second);
        total += f;
        ++counted;
        csv += p.query + "," + aspector::eval::fixed6(f) + "\n";
      }
      if (counted > 0) {
        csv += "(mean)," + aspector::eval::fixed6(total / counted) + "\n";
      }
      write_or_print(f_out, csv);
      return kExitOk;
    }

    if (*cmd_sweep) {
      auto config = sw_cfg.resolve();
      auto corpus = aspector::retrieval::load_corpus(sw_corpus);
      aspector::retrieval::SearchEngine engine(corpus);
      if (!sw_cache.empty()) engine.load_cache(sw_cache);
      auto sigmas = parse_sigma_range(sw_sigmas);

      std::vector<aspector::eval::SweepCase> cases;
      for (auto& gold : aspector::eval::load_gold(sw_gold)) {
        aspector::eval::SweepCase c;
        c.sim = aspector::dedup::similarity_matrix(engine, gold.aspects, config.m,
                                                   config.threads, config.concat_similarity);
        for (const auto& a : gold.aspects) c.scores[a] = 1.0;
        c.gold = std::move(gold);
        cases.push_back(std::move(c));
      }
      std::string csv = "sigma,mean_f\n";
      for (const auto& row : aspector::eval::sigma_sweep(cases, sigmas)) {
        csv += aspector::eval::fixed6(row.sigma) + "," + aspector::eval::fixed6(row.mean_f) +
               "\n";
      }
      write_or_print(sw_out, csv);
      return kExitOk;
    }
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
