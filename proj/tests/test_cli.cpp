#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aspector/synthgen.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  auto out_path = fs::temp_directory_path() / ("aspector_cli_out_" + std::to_string(counter++));
  std::string cmd = std::string(ASPECTOR_CLI_PATH) + " " + args + " > " + out_path.string() +
                    " 2>/dev/null";
  int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  result.stdout_text = ss.str();
  fs::remove(out_path);
  return result;
}

struct CliWorld {
  fs::path dir;
  aspector::synthgen::GeneratedFiles files;

  CliWorld() {
    dir = fs::temp_directory_path() / "aspector_cli_world";
    fs::remove_all(dir);
    aspector::synthgen::WorldSpec world;
    world.seed = 21;
    world.session_count = 50;
    world.docs_per_aspect = 2;
    aspector::synthgen::ClassSpec cls;
    cls.name = "country";
    cls.entities = {{"alandia", 1.0}, {"borovia", 0.5}, {"cedonia", 0.0}};
    cls.patterns = {{"<E> visa", 3.0, {"<E> visas"}, true},
                    {"<E> beaches", 2.0, {}, true},
                    {"<E> hiking trails", 1.0, {}, false}};
    world.classes.push_back(cls);
    files = aspector::synthgen::generate(world, dir.string());
  }
  ~CliWorld() { fs::remove_all(dir); }

  std::string common_kb() const {
    return " --kb-entities " + files.kb_entities + " --kb-redirects " + files.kb_redirects +
           " --kb-disambig " + files.kb_disambig;
  }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run_cli("no-such-subcommand").exit_code == 1);
  CHECK(run_cli("aspects --bogus-flag 1").exit_code == 1);
  CHECK(run_cli("").exit_code == 1);
}

TEST_CASE("missing input files exit 2") {
  auto result = run_cli("sessionize --log /nonexistent/file.tsv");
  CHECK(result.exit_code == 2);
}

TEST_CASE("sessionize emits TSV sessions") {
  CliWorld world;
  auto result = run_cli("sessionize --log " + world.files.log);
  CHECK(result.exit_code == 0);
  CHECK(result.stdout_text.find('\t') != std::string::npos);
}

TEST_CASE("candidates emits a JSON array with scores") {
  CliWorld world;
  auto result = run_cli("candidates --log " + world.files.log + " --entity alandia");
  CHECK(result.exit_code == 0);
  auto j = nlohmann::json::parse(result.stdout_text, nullptr, false);
  REQUIRE_FALSE(j.is_discarded());
  REQUIRE(j.is_array());
  REQUIRE(!j.empty());
  double total = 0.0;
  for (const auto& c : j) total += c.at("p_inst").get<double>();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("aspects pipeline: report on stdout, exit 3 when empty") {
  CliWorld world;
  std::string inputs = " --log " + world.files.log + world.common_kb() + " --corpus " +
                       world.files.corpus;
  auto ok = run_cli("aspects" + inputs + " --entity alandia");
  CHECK(ok.exit_code == 0);
  auto j = nlohmann::json::parse(ok.stdout_text, nullptr, false);
  REQUIRE_FALSE(j.is_discarded());
  CHECK(j.at("status") == "ok");
  CHECK(!j.at("selected").empty());

  auto empty = run_cli("aspects" + inputs + " --entity \"zz unknown\"");
  CHECK(empty.exit_code == 3);

  // --query carries the full string; the property is derived
  auto with_query = run_cli("aspects" + inputs + " --query alandia --entity alandia");
  CHECK(with_query.exit_code == 0);
  auto mismatched = run_cli("aspects" + inputs + " --query \"borovia visa\" --entity alandia");
  CHECK(mismatched.exit_code == 2);
}

TEST_CASE("propagate reports class and smoothed distributions") {
  CliWorld world;
  auto result = run_cli("propagate --log " + world.files.log + world.common_kb() +
                        " --entity cedonia");
  CHECK(result.exit_code == 0);
  auto j = nlohmann::json::parse(result.stdout_text, nullptr, false);
  REQUIRE_FALSE(j.is_discarded());
  CHECK(j.at("class_node") == "country");
  CHECK(!j.at("p").empty());
}

TEST_CASE("flag overrides beat the config file, which beats defaults") {
  CliWorld world;
  auto config_path = (world.dir / "test.cfg").string();
  std::ofstream(config_path) << "candidate_cap=2\n";

  auto from_file =
      run_cli("candidates --log " + world.files.log + " --entity alandia --config " + config_path);
  REQUIRE(from_file.exit_code == 0);
  auto j1 = nlohmann::json::parse(from_file.stdout_text);
  CHECK(j1.size() == 2);

  auto flag_wins = run_cli("candidates --log " + world.files.log +
                           " --entity alandia --config " + config_path +
                           " --candidate_cap 3");
  REQUIRE(flag_wins.exit_code == 0);
  auto j2 = nlohmann::json::parse(flag_wins.stdout_text);
  CHECK(j2.size() == 3);

  auto defaults = run_cli("candidates --log " + world.files.log + " --entity alandia");
  REQUIRE(defaults.exit_code == 0);
  auto j3 = nlohmann::json::parse(defaults.stdout_text);
  CHECK(j3.size() > 3);
}

TEST_CASE("ASPECTOR_CONFIG provides the default config path") {
  CliWorld world;
  auto config_path = (world.dir / "env.cfg").string();
  std::ofstream(config_path) << "candidate_cap=2\n";
  setenv("ASPECTOR_CONFIG", config_path.c_str(), 1);
  auto result = run_cli("candidates --log " + world.files.log + " --entity alandia");
  unsetenv("ASPECTOR_CONFIG");
  REQUIRE(result.exit_code == 0);
  auto j = nlohmann::json::parse(result.stdout_text);
  CHECK(j.size() == 2);
}

TEST_CASE("suite and sweep-sigma produce the pinned CSV shapes") {
  CliWorld world;
  auto out_dir = (world.dir / "suite_out").string();
  auto suite = run_cli("suite --queries " + world.files.queries + " --log " + world.files.log +
                       world.common_kb() + " --corpus " + world.files.corpus + " --out " +
                       out_dir + " --N 20");
  CHECK(suite.exit_code == 0);
  CHECK(fs::exists(fs::path(out_dir) / "nsim.csv"));
  CHECK(fs::exists(fs::path(out_dir) / "coverage.csv"));
  CHECK(fs::exists(fs::path(out_dir) / "suite.csv"));

  auto sweep = run_cli("sweep-sigma --corpus " + world.files.corpus + " --gold " +
                       world.files.gold + " --sigmas 0.2:0.4:0.1");
  CHECK(sweep.exit_code == 0);
  std::istringstream lines(sweep.stdout_text);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "sigma,mean_f");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("propagate persists class distributions and reuses them identically") {
  CliWorld world;
  auto dists_path = (world.dir / "class_dists.tsv").string();
  auto fresh = run_cli("propagate --log " + world.files.log + world.common_kb() +
                       " --entity cedonia --save-class-dists " + dists_path);
  REQUIRE(fresh.exit_code == 0);
  REQUIRE(fs::exists(dists_path));

  auto reused = run_cli("propagate --log " + world.files.log + world.common_kb() +
                        " --entity cedonia --load-class-dists " + dists_path);
  REQUIRE(reused.exit_code == 0);
  auto j1 = nlohmann::json::parse(fresh.stdout_text);
  auto j2 = nlohmann::json::parse(reused.stdout_text);
  CHECK(j1.at("p") == j2.at("p"));
  CHECK(j1.at("p_class") == j2.at("p_class"));
}

TEST_CASE("eval subcommands emit their CSV shapes") {
  CliWorld world;
  auto lists_path = (world.dir / "aspect_lists.jsonl").string();
  std::ofstream(lists_path)
      << R"({"query":"alandia","aspects":["alandia visa","alandia beaches"]})" << "\n";

  auto nsim = run_cli("eval-nsim --corpus " + world.files.corpus + " --aspect-lists " +
                      lists_path);
  REQUIRE(nsim.exit_code == 0);
  CHECK(nsim.stdout_text.rfind("query,n_aspects,nsim,note\n", 0) == 0);
  CHECK(nsim.stdout_text.find("alandia,2,") != std::string::npos);

  auto coverage = run_cli("eval-coverage --corpus " + world.files.corpus +
                          " --aspect-lists " + lists_path + " --N 20");
  REQUIRE(coverage.exit_code == 0);
  CHECK(coverage.stdout_text.rfind("query,k,N,aspect_docs,overlap,new_docs,vacuous\n", 0) == 0);

  auto cluster_f = run_cli("eval-cluster-f --predicted " + world.files.gold + " --gold " +
                           world.files.gold);
  REQUIRE(cluster_f.exit_code == 0);
  CHECK(cluster_f.stdout_text.rfind("query,f\n", 0) == 0);
  CHECK(cluster_f.stdout_text.find("(mean),1.000000") != std::string::npos);
}

TEST_CASE("synth is deterministic through the CLI") {
  CliWorld world;
  auto out_a = (world.dir / "synth_a").string();
  auto out_b = (world.dir / "synth_b").string();
  CHECK(run_cli("synth --world " + world.files.world + " --out " + out_a).exit_code == 0);
  CHECK(run_cli("synth --world " + world.files.world + " --out " + out_b).exit_code == 0);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(slurp(fs::path(out_a) / "log.tsv") == slurp(fs::path(out_b) / "log.tsv"));
  CHECK(slurp(fs::path(out_a) / "corpus.jsonl") == slurp(fs::path(out_b) / "corpus.jsonl"));
}
