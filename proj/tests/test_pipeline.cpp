#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "aspector/pipeline.hpp"
#include "aspector/synthgen.hpp"
#include "aspector/tsv.hpp"

using namespace aspector;
using candidates::SegmentedQuery;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct WorldOnDisk {
  fs::path dir;
  logmodel::LogStats stats;
  kb::KnowledgeBase kb;
  retrieval::Corpus corpus;
  std::vector<SegmentedQuery> queries;
  synthgen::GeneratedFiles files;

  explicit WorldOnDisk(const synthgen::WorldSpec& world, const std::string& name) {
    dir = fs::temp_directory_path() / name;
    files = synthgen::generate(world, dir.string());
    auto log = logmodel::load_log(files.log);
    stats = logmodel::count_stats(logmodel::sessionize(log.events, 1800));
    kb = kb::load_kb(files.kb_entities, files.kb_redirects, files.kb_disambig);
    corpus = retrieval::load_corpus(files.corpus);
    queries = pipeline::load_queries(files.queries);
  }
  ~WorldOnDisk() { fs::remove_all(dir); }
};

synthgen::WorldSpec pipeline_world() {
  synthgen::WorldSpec world;
  world.seed = 7;
  world.session_count = 80;
  world.docs_per_aspect = 2;
  synthgen::ClassSpec cls;
  cls.name = "country";
  cls.entities = {{"alandia", 1.0}, {"borovia", 0.6}, {"cedonia", 0.0}};
  cls.patterns = {
      {"<E> visa", 3.0, {"<E> visas"}, true},
      {"<E> beaches", 2.0, {}, true},
      {"<E> street food", 1.5, {}, true},
      {"<E> hiking trails", 1.0, {}, false},
  };
  world.classes.push_back(cls);
  return world;
}

}  // namespace

TEST_CASE("config defaults, file load, override precedence, validation") {
  pipeline::Config config;
  CHECK(config.K == 0.1);
  CHECK(config.sigma == 0.35);
  CHECK(config.m == 8);
  CHECK(config.n == 8);
  CHECK(config.candidate_cap == 30);
  CHECK(config.session_gap_seconds == 1800);
  CHECK(config.variant == propagation::Variant::indicator);
  CHECK(config.topic_T == 32);

  auto path = (fs::temp_directory_path() / "aspector_config_test.cfg").string();
  {
    std::ofstream out(path);
    out << "# comment\n";
    out << "K = 0.5\n";
    out << "sigma=0.2\n";
    out << "variant=average\n";
  }
  auto loaded = pipeline::Config::from_file(path);
  CHECK(loaded.K == 0.5);
  CHECK(loaded.sigma == 0.2);
  CHECK(loaded.variant == propagation::Variant::average);
  CHECK(loaded.m == 8);  // untouched keys keep defaults

  loaded.set("K", "0.9");  // flag-style override wins over the file value
  CHECK(loaded.K == 0.9);

  CHECK_THROWS_AS(loaded.set("bogus_key", "1"), DataError);
  CHECK_THROWS_AS(loaded.set("K", "abc"), DataError);
  pipeline::Config bad;
  bad.sigma = 1.5;
  CHECK_THROWS_AS(bad.validate(), DataError);
  fs::remove(path);
}

TEST_CASE("load_queries validates the entity[+property] shape") {
  auto path = (fs::temp_directory_path() / "aspector_queries_test.tsv").string();
  {
    std::ofstream out(path);
    out << "alandia\talandia\t\n";
    out << "alandia travel\talandia\ttravel\n";
  }
  auto queries = pipeline::load_queries(path);
  REQUIRE(queries.size() == 2);
  CHECK(queries[0].property.empty());
  CHECK(queries[1].full == "alandia travel");

  {
    std::ofstream out(path);
    out << "mismatch here\talandia\ttravel\n";
  }
  CHECK_THROWS_AS(pipeline::load_queries(path), DataError);
  fs::remove(path);
}

TEST_CASE("run_query produces ranked aspects with full provenance") {
  WorldOnDisk world(pipeline_world(), "aspector_pipeline_run");
  retrieval::SearchEngine engine(world.corpus);
  pipeline::Config config;
  config.N = 20;

  auto q = SegmentedQuery::make("alandia", "");
  auto report = pipeline::run_query(q, world.stats, world.kb, engine, config);
  CHECK_FALSE(report.empty);
  CHECK(!report.selected.empty());
  CHECK(report.selected.size() <= static_cast<std::size_t>(config.n));

  // every selected group traces back to provenance entries
  std::set<std::string> surfaces;
  for (const auto& p : report.provenance) surfaces.insert(p.surface);
  for (const auto& g : report.selected) {
    for (const auto& c : g.members) {
      for (const auto& m : c.members) CHECK(surfaces.count(m) == 1);
    }
  }

  // conservation: every cluster member appears in exactly one group
  std::multiset<std::string> in_clusters, in_groups;
  for (const auto& c : report.clusters) {
    for (const auto& m : c.members) in_clusters.insert(m);
  }
  auto groups = grouping::group_by_class(report.clusters, world.kb, q.entity);
  for (const auto& g : groups) {
    for (const auto& c : g.members) {
      for (const auto& m : c.members) in_groups.insert(m);
    }
  }
  CHECK(in_clusters == in_groups);

  // the dedup stage saw every candidate surface
  CHECK(in_clusters.size() == surfaces.size());
}

TEST_CASE("zero-log entity in a populated class gets class-pattern aspects") {
  WorldOnDisk world(pipeline_world(), "aspector_pipeline_rare");
  retrieval::SearchEngine engine(world.corpus);
  pipeline::Config config;

  auto report = pipeline::run_query(SegmentedQuery::make("cedonia", ""), world.stats,
                                    world.kb, engine, config);
  CHECK_FALSE(report.empty);
  REQUIRE(!report.provenance.empty());
  for (const auto& p : report.provenance) {
    CHECK(p.origin == candidates::Origin::propagated);
    CHECK(p.p_inst == 0.0);
    CHECK(p.p_class > 0.0);
  }
}

TEST_CASE("K=0 run equals a propagation-free run byte-for-byte") {
  WorldOnDisk world(pipeline_world(), "aspector_pipeline_k0");
  retrieval::SearchEngine engine(world.corpus);

  pipeline::Config k0;
  k0.K = 0.0;
  auto with_class = pipeline::run_query(SegmentedQuery::make("alandia", ""), world.stats,
                                        world.kb, engine, k0);

  kb::KnowledgeBase empty_kb;  // no class resolvable: propagation never engages
  auto without_class = pipeline::run_query(SegmentedQuery::make("alandia", ""), world.stats,
                                           empty_kb, engine, k0);

  auto a = pipeline::report_to_json(with_class);
  auto b = pipeline::report_to_json(without_class);
  // diagnostics differ (missing KB entry is reported); the aspect content may not
  auto strip_diag = [](std::string s) {
    auto pos = s.find("\"diagnostics\"");
    return s.substr(0, pos);
  };
  CHECK(strip_diag(a) == strip_diag(b));
}

TEST_CASE("queries with no candidates and no class yield an empty report") {
  WorldOnDisk world(pipeline_world(), "aspector_pipeline_empty");
  retrieval::SearchEngine engine(world.corpus);
  pipeline::Config config;
  auto report = pipeline::run_query(SegmentedQuery::make("zzz unknown", ""), world.stats,
                                    world.kb, engine, config);
  CHECK(report.empty);
  CHECK(report.selected.empty());
  CHECK(!report.diagnostics.warnings.empty());
}

TEST_CASE("an empty query file yields an empty output directory and success") {
  WorldOnDisk world(pipeline_world(), "aspector_pipeline_empty_suite");
  retrieval::SearchEngine engine(world.corpus);
  pipeline::Config config;
  auto out = fs::temp_directory_path() / "aspector_suite_empty";
  fs::remove_all(out);
  auto result = pipeline::run_suite({}, world.stats, world.kb, engine, config, out.string());
  CHECK(result.queries_run == 0);
  CHECK(result.failures == 0);
  CHECK(fs::exists(out));
  CHECK(fs::is_empty(out));
  fs::remove_all(out);
}

TEST_CASE("suite runs, writes reports and CSVs, deterministic at any thread count") {
  WorldOnDisk world(pipeline_world(), "aspector_pipeline_suite");

  pipeline::Config config;
  config.N = 20;

  auto out1 = fs::temp_directory_path() / "aspector_suite_t1";
  auto out2 = fs::temp_directory_path() / "aspector_suite_t4";
  fs::remove_all(out1);
  fs::remove_all(out2);

  retrieval::SearchEngine engine1(world.corpus);
  config.threads = 1;
  auto r1 = pipeline::run_suite(world.queries, world.stats, world.kb, engine1, config,
                                out1.string());
  retrieval::SearchEngine engine2(world.corpus);
  config.threads = 4;
  auto r2 = pipeline::run_suite(world.queries, world.stats, world.kb, engine2, config,
                                out2.string());

  CHECK(r1.queries_run == static_cast<int>(world.queries.size()));
  CHECK(r1.failures == 0);
  CHECK(r2.failures == 0);

  for (const char* name : {"nsim.csv", "coverage.csv", "suite.csv"}) {
    CHECK(slurp((out1 / name).string()) == slurp((out2 / name).string()));
  }
  REQUIRE(r1.report_paths.size() == r2.report_paths.size());
  for (std::size_t i = 0; i < r1.report_paths.size(); ++i) {
    CHECK(slurp(r1.report_paths[i]) == slurp(r2.report_paths[i]));
  }

  // rerunning with the same config reproduces the same bytes
  auto out3 = fs::temp_directory_path() / "aspector_suite_rerun";
  fs::remove_all(out3);
  retrieval::SearchEngine engine3(world.corpus);
  pipeline::run_suite(world.queries, world.stats, world.kb, engine3, config, out3.string());
  CHECK(slurp((out1 / "nsim.csv").string()) == slurp((out3 / "nsim.csv").string()));

  fs::remove_all(out1);
  fs::remove_all(out2);
  fs::remove_all(out3);
}
