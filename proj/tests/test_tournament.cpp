#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ipd/errors.hpp"
#include "ipd/llm_agent.hpp"
#include "ipd/persistence.hpp"
#include "ipd/tournament.hpp"
#include "support.hpp"

using namespace ipd;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TournamentConfig small_config(const std::string& dir = "") {
  TournamentConfig c;
  c.tournament_id = "unit";
  c.roster = {{"TFT", 2}, {"Grim", 2}, {"Rand", 2}, {"Alt", 2}};
  c.termination_probability = 0.25;
  c.phases = 4;
  c.master_seed = 314;
  c.output_dir = dir;
  return c;
}

StrategyRegistry registry_with_mock(const std::string& rule) {
  auto reg = StrategyRegistry::with_classics();
  RetryPolicy policy;
  policy.sleep = [](std::chrono::milliseconds) {};
  reg.add(llm_strategy("Mock", "Mock", std::make_shared<MockProvider>(json{{"rule", rule}}), policy));
  return reg;
}

}  // namespace

TEST_CASE("config validation") {
  auto reg = StrategyRegistry::with_classics();
  auto c = small_config();
  CHECK_NOTHROW(c.validate(reg));
  CHECK(c.roster.count("TitForTat") == 1);
  CHECK(c.target_size == 8);

  auto bad = small_config();
  bad.termination_probability = 1.5;
  CHECK_THROWS_AS(bad.validate(reg), ConfigError);
  bad = small_config();
  bad.roster["Unknown"] = 1;
  CHECK_THROWS_AS(bad.validate(reg), ConfigError);
  bad = small_config();
  bad.target_size = 9;
  CHECK_THROWS_AS(bad.validate(reg), ConfigError);
  bad = small_config();
  bad.roster["TitForTat"] = 1;  // also listed as TFT
  CHECK_THROWS_AS(bad.validate(reg), ConfigError);
}

TEST_CASE("config JSON round-trip") {
  auto c = small_config("out");
  c.llm_agents.push_back({"Gemini", "Gem", ProviderConfig{}});
  c.llm_agents[0].provider.provider = ProviderKind::gemini_compatible;
  c.llm_agents[0].provider.model_name = "gemini-test";
  c.llm_agents[0].provider.temperature = 0.7;
  json j = c;
  auto back = j.get<TournamentConfig>();
  CHECK(json(back) == j);
}

TEST_CASE("single strategy population is constant") {
  auto reg = StrategyRegistry::with_classics();
  TournamentConfig c;
  c.roster = {{"TitForTat", 2}};
  c.phases = 5;
  auto log = run_tournament(c, reg);
  REQUIRE(log.populations.size() == 5);
  for (const auto& p : log.populations) CHECK(p.count("TitForTat") == 2);
}

TEST_CASE("tournament size stays fixed and mutation keeps Random alive") {
  auto reg = StrategyRegistry::with_classics();
  auto c = small_config();
  c.roster = {{"TFT", 4}, {"Grim", 4}, {"Alt", 4}};
  c.mutation = true;
  c.phases = 5;
  auto log = run_tournament(c, reg);
  REQUIRE(log.populations.size() == 5);
  CHECK(log.populations[0].count("Random") == 0);
  for (std::size_t i = 0; i < log.populations.size(); ++i) {
    CHECK(log.populations[i].total() == 12);
    if (i > 0) CHECK(log.populations[i].count("Random") >= 1);
  }
}

TEST_CASE("tournament is reproducible from its seed") {
  auto reg = StrategyRegistry::with_classics();
  auto a = run_tournament(small_config(), reg);
  auto b = run_tournament(small_config(), reg);
  CHECK(a.populations == b.populations);
  CHECK(a.phases == b.phases);
  auto c = small_config();
  c.master_seed = 315;
  CHECK_FALSE(run_tournament(c, reg).phases == a.phases);
}

TEST_CASE("LLM rationales match the moves actually played") {
  auto reg = registry_with_mock("tit_for_tat");
  auto c = small_config();
  c.roster = {{"Mock", 2}, {"Grim", 1}, {"Alt", 1}};
  c.phases = 2;
  auto log = run_tournament(c, reg);
  long long llm_moves = 0;
  std::map<std::int64_t, const RationaleRecord*> by_id;
  for (const auto& r : log.rationales) CHECK(by_id.emplace(r.rationale_id, &r).second);
  for (const auto& phase : log.phases) {
    for (const auto& m : phase.matches) {
      for (const auto& r : m.rounds) {
        for (bool seat_a : {true, false}) {
          const auto& strat = seat_a ? m.strategy_a : m.strategy_b;
          const auto& id = seat_a ? r.rationale_id_a : r.rationale_id_b;
          if (strat != "Mock") {
            CHECK_FALSE(id.has_value());
            continue;
          }
          ++llm_moves;
          REQUIRE(id.has_value());
          REQUIRE(by_id.count(*id) == 1);
          CHECK(by_id[*id]->chosen_move == (seat_a ? r.move_a : r.move_b));
          CHECK(by_id[*id]->phase == phase.phase);
          CHECK(by_id[*id]->match_id == m.match_id);
        }
      }
    }
  }
  CHECK(llm_moves == static_cast<long long>(log.rationales.size()));
  CHECK(log.rationales.front().rationale_id == 1);
  CHECK(log.rationales.back().rationale_id == static_cast<std::int64_t>(log.rationales.size()));
}

TEST_CASE("persistence round-trip") {
  auto dir = test::scratch("roundtrip");
  auto reg = registry_with_mock("always_cooperate");
  auto c = small_config(dir.string());
  c.roster["Mock"] = 2;
  auto log = run_tournament(c, reg);
  for (const char* f : {LogFiles::manifest, LogFiles::rounds, LogFiles::matches, LogFiles::aborted,
                        LogFiles::populations, LogFiles::fitness, LogFiles::rationales,
                        LogFiles::checkpoint}) {
    CHECK(fs::exists(dir / f));
  }
  auto back = load_tournament(dir.string());
  CHECK(back.phases == log.phases);
  CHECK(back.populations == log.populations);
  CHECK(back.rationales == log.rationales);
  CHECK(back.prompt_hash == log.prompt_hash);
  REQUIRE(back.fitness.size() == log.fitness.size());
  CHECK(back.fitness[0].mean_fitness == doctest::Approx(log.fitness[0].mean_fitness));

  // Re-writing what was loaded gives the same bytes.
  auto again = test::scratch("roundtrip_again");
  write_tournament(back, again.string());
  for (const char* f : {LogFiles::rounds, LogFiles::matches, LogFiles::populations,
                        LogFiles::fitness, LogFiles::rationales}) {
    CHECK(slurp(dir / f) == slurp(again / f));
  }
}

TEST_CASE("populations CSV uses table abbreviations") {
  auto dir = test::scratch("popcsv");
  auto reg = StrategyRegistry::with_classics();
  run_tournament(small_config(dir.string()), reg);
  std::ifstream in(dir / LogFiles::populations);
  std::string header;
  std::getline(in, header);
  CHECK(header == "phase,Alt,Grim,Rand,TFT");
}

TEST_CASE("resume gives byte-identical files") {
  auto reg = StrategyRegistry::with_classics();
  auto full = test::scratch("resume_full");
  run_tournament(small_config(full.string()), reg);

  auto part = test::scratch("resume_part");
  RunOptions stop;
  stop.stop_after_phase = 2;
  auto first = run_tournament(small_config(part.string()), reg, stop);
  CHECK(first.phases.size() == 2);
  auto cp = read_checkpoint(part.string());
  REQUIRE(cp.has_value());
  CHECK(cp->completed_phases == 2);

  RunOptions resume;
  resume.resume = true;
  auto c = small_config(part.string());
  c.workers = 3;  // execution detail, allowed to differ
  run_tournament(c, reg, resume);
  for (const char* f : {LogFiles::manifest, LogFiles::rounds, LogFiles::matches, LogFiles::aborted,
                        LogFiles::populations, LogFiles::fitness, LogFiles::rationales,
                        LogFiles::checkpoint}) {
    CHECK_MESSAGE(slurp(full / f) == slurp(part / f), f);
  }
}

TEST_CASE("resume rejects a changed config") {
  auto reg = StrategyRegistry::with_classics();
  auto dir = test::scratch("resume_changed");
  RunOptions stop;
  stop.stop_after_phase = 1;
  run_tournament(small_config(dir.string()), reg, stop);
  auto c = small_config(dir.string());
  c.master_seed = 1;
  RunOptions resume;
  resume.resume = true;
  CHECK_THROWS_AS(run_tournament(c, reg, resume), ConfigError);
}

TEST_CASE("loader rejects unknown schema and bad headers") {
  auto reg = StrategyRegistry::with_classics();
  auto dir = test::scratch("schema");
  run_tournament(small_config(dir.string()), reg);

  auto manifest = json::parse(slurp(dir / LogFiles::manifest));
  manifest["schema"] = "ipd-tournament/999";
  std::ofstream(dir / LogFiles::manifest) << manifest.dump(2);
  CHECK_THROWS_AS(load_tournament(dir.string()), SchemaMismatch);

  auto dir2 = test::scratch("schema2");
  run_tournament(small_config(dir2.string()), reg);
  auto rounds = slurp(dir2 / LogFiles::rounds);
  rounds.replace(0, rounds.find('\n'), "tournament,phase,oops");
  std::ofstream(dir2 / LogFiles::rounds) << rounds;
  CHECK_THROWS_AS(load_tournament(dir2.string()), SchemaMismatch);

  CHECK_THROWS_AS(load_tournament((dir / "missing").string()), IoError);
}

TEST_CASE("round rows import through a column map") {
  auto dir = test::scratch("import");
  std::ofstream(dir / "foreign.csv") << "Phase,Match,Round,P1,P2,M1,M2\n"
                                        "1,0,1,TFT,Grim,C,C\n"
                                        "1,0,2,TFT,Grim,C,D\n"
                                        "1,1,1,TFT,Alt,C,C\n";
  RoundColumns cols;
  cols.names = {{"phase", "Phase"},         {"match_id", "Match"},    {"round_idx", "Round"},
                {"strategy_a", "P1"},       {"strategy_b", "P2"},     {"move_a", "M1"},
                {"move_b", "M2"}};
  auto phases = import_round_rows((dir / "foreign.csv").string(), cols);
  REQUIRE(phases.size() == 1);
  REQUIRE(phases[0].matches.size() == 2);
  CHECK(phases[0].matches[0].rounds[1].payoff_a == 0);
  CHECK(phases[0].matches[0].rounds[1].payoff_b == 5);

  RoundColumns missing;
  missing.names = {{"phase", "Nope"}};
  CHECK_THROWS(import_round_rows((dir / "foreign.csv").string(), missing));
}
