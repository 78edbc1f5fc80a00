#include <doctest.h>

#include <set>

#include "ipd/engine.hpp"
#include "ipd/errors.hpp"
#include "ipd/llm_agent.hpp"
#include "ipd/population.hpp"
#include "ipd/registry.hpp"

using namespace ipd;
using nlohmann::json;

TEST_CASE("round robin counts") {
  CHECK(round_robin_match_count(0) == 0);
  CHECK(round_robin_match_count(1) == 0);
  CHECK(round_robin_match_count(2) == 1);
  CHECK(round_robin_match_count(20) == 190);
  CHECK(round_robin_match_count(24) == 276);
}

TEST_CASE("expand orders instances by strategy then copy") {
  Population p{{{"TitForTat", 2}, {"Alternator", 1}, {"Random", 0}}};
  auto slots = expand(p);
  REQUIRE(slots.size() == 3);
  CHECK(slots[0].id() == "Alternator#1");
  CHECK(slots[1].id() == "TitForTat#1");
  CHECK(slots[2].id() == "TitForTat#2");
  CHECK(p.total() == 3);
  CHECK(p.present() == std::vector<std::string>{"Alternator", "TitForTat"});
}

TEST_CASE("registry resolves names and abbreviations") {
  auto r = StrategyRegistry::with_classics();
  CHECK(r.ids().size() == 10);
  CHECK(r.resolve("TFT") == "TitForTat");
  CHECK(r.resolve("GrimTrigger") == "GrimTrigger");
  CHECK(r.info("Bayesian").abbreviation == "Bayes");
  CHECK_THROWS_AS(r.resolve("Nobody"), ConfigError);
}

TEST_CASE("a phase plays every unordered pair exactly once") {
  auto reg = StrategyRegistry::with_classics();
  Population p{{{"TitForTat", 3}, {"GrimTrigger", 2}, {"Random", 2}}};
  PhaseOptions opt;
  opt.master_seed = 5;
  auto log = run_phase(p, opt, reg);
  REQUIRE(log.matches.size() == 21);
  std::set<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < log.matches.size(); ++i) {
    const auto& m = log.matches[i];
    CHECK(m.match_id == static_cast<int>(i));
    CHECK(m.agent_a_id != m.agent_b_id);
    CHECK(pairs.insert({m.agent_a_id, m.agent_b_id}).second);
    CHECK(m.length() >= 1);
    CHECK(m.length() <= 30);
  }
  CHECK(log.aborted.empty());
}

TEST_CASE("TFT against TFT always cooperates") {
  auto reg = StrategyRegistry::with_classics();
  for (double p : {0.10, 0.25, 0.75}) {
    PhaseOptions opt;
    opt.match.termination_probability = p;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      opt.master_seed = seed;
      auto log = run_phase(Population{{{"TitForTat", 4}}}, opt, reg);
      for (const auto& m : log.matches) {
        for (const auto& r : m.rounds) {
          REQUIRE(r.move_a == Move::C);
          REQUIRE(r.move_b == Move::C);
        }
      }
    }
  }
}

TEST_CASE("worker count does not change results") {
  auto reg = StrategyRegistry::with_classics();
  Population p{{{"Random", 3}, {"GenerousTFT", 3}, {"Bayesian", 2}, {"Prober", 2}}};
  PhaseOptions opt;
  opt.master_seed = 99;
  opt.phase = 3;
  auto serial = run_phase(p, opt, reg);
  opt.workers = 4;
  CHECK(run_phase(p, opt, reg) == serial);
}

TEST_CASE("agent totals sum payoffs and moves") {
  auto reg = StrategyRegistry::with_classics();
  PhaseOptions opt;
  auto log = run_phase(Population{{{"AllDefectStandIn", 0}, {"TitForTat", 2}}}, opt, reg);
  auto totals = log.agent_totals();
  REQUIRE(totals.size() == 2);
  const auto len = log.matches[0].length();
  CHECK(totals[0].moves == len);
  CHECK(totals[0].score == 3 * len);
  CHECK(totals[0].cooperations == len);
}

TEST_CASE("a failing LLM agent aborts only its own matches") {
  auto reg = StrategyRegistry::with_classics();
  RetryPolicy policy;
  policy.max_retries = 1;
  policy.sleep = [](std::chrono::milliseconds) {};
  auto broken = MockProvider::scripted({json{{"error", "transport"}}}, true);
  reg.add(llm_strategy("Broken", "Brk", broken, policy));
  Population p{{{"Broken", 1}, {"TitForTat", 2}}};
  auto log = run_phase(p, PhaseOptions{}, reg);
  CHECK(log.matches.size() == 1);
  REQUIRE(log.aborted.size() == 2);
  CHECK(log.aborted[0].strategy_a == "Broken");
  CHECK(log.aborted[0].reason.find("Broken#1") != std::string::npos);
  for (const auto& t : log.agent_totals()) CHECK(t.strategy == "TitForTat");
}
