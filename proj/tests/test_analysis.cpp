#include <doctest.h>

#include <cmath>

#include "ipd/analysis.hpp"
#include "ipd/errors.hpp"
#include "ipd/report.hpp"
#include "ipd/rng.hpp"
#include "support.hpp"

using namespace ipd;

namespace {

MatchRecord match(const std::string& sa, const std::string& sb, const std::string& ma,
                  const std::string& mb, int id = 0) {
  MatchRecord m;
  m.match_id = id;
  m.strategy_a = sa;
  m.strategy_b = sb;
  m.agent_a_id = sa + "#1";
  m.agent_b_id = sb + (sa == sb ? "#2" : "#1");
  PayoffMatrix pm;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    RoundOutcome r;
    r.move_a = ma[i] == 'C' ? Move::C : Move::D;
    r.move_b = mb[i] == 'C' ? Move::C : Move::D;
    std::tie(r.payoff_a, r.payoff_b) = pm.cell(r.move_a, r.move_b);
    m.rounds.push_back(r);
  }
  return m;
}

std::vector<PhaseLog> phases(std::vector<MatchRecord> ms) {
  PhaseLog p;
  p.phase = 1;
  p.matches = std::move(ms);
  return {p};
}

Population pop(std::map<std::string, int> c) { return Population{std::move(c)}; }

}  // namespace

TEST_CASE("prior state from the agent's own seat") {
  CHECK(prior_state(Move::C, Move::C) == PriorState::CC);
  CHECK(prior_state(Move::D, Move::C) == PriorState::DC);
  CHECK(prior_state(Move::C, Move::D) == PriorState::CD);
  CHECK(to_string(PriorState::CD) == "CD");
}

TEST_CASE("fingerprint counts decisions from round two on, both seats") {
  // X in seat a: states CC->C, CD->D ; X in seat b of the second match: states
  // (own D, opp C)=DC -> C
  auto ps = phases({match("X", "Y", "CCD", "CDC"), match("Y", "X", "CC", "DC", 1)});
  auto fp = fingerprint(ps, "X");
  CHECK(fp.count(PriorState::CC) == 1);
  CHECK(fp.count(PriorState::CD) == 1);
  CHECK(fp.count(PriorState::DC) == 1);
  CHECK(fp.count(PriorState::DD) == 0);
  CHECK(fp.probability(PriorState::CC) == doctest::Approx(1.0));
  CHECK(fp.probability(PriorState::CD) == doctest::Approx(0.0));
  CHECK(fp.probability(PriorState::DC) == doctest::Approx(1.0));
  CHECK_FALSE(fp.probability(PriorState::DD).has_value());
  CHECK_THROWS_AS(fingerprint(ps, "Z"), StrategyAbsent);
}

TEST_CASE("an always-defecting strategy fingerprints to zero") {
  auto ps = phases({match("G", "T", "DDDD", "CDDD"), match("G", "A", "DDD", "CDC", 1)});
  auto fp = fingerprint(ps, "G");
  for (auto s : kPriorStates) {
    if (auto p = fp.probability(s)) CHECK(*p == 0.0);
  }
}

TEST_CASE("cooperation and score per move") {
  auto ps = phases({match("X", "Y", "CCD", "CDC")});
  CHECK(cooperation_rate(ps, "X") == doctest::Approx(2.0 / 3));
  CHECK(score_per_move(ps, "X") == doctest::Approx((3 + 0 + 5) / 3.0));
  CHECK(score_per_move(ps, "Y") == doctest::Approx((3 + 5 + 0) / 3.0));
}

TEST_CASE("head to head") {
  auto ps = phases({match("X", "Y", "CC", "CD"), match("Y", "X", "DDD", "CCC", 1),
                    match("X", "X", "CD", "CC", 2)});
  auto h = head_to_head(ps, "X", "Y");
  CHECK(h.matches == 2);
  CHECK(h.avg_score_per_match == doctest::Approx((3 + 0 + 0 + 0 + 0) / 2.0));
  CHECK(h.cooperation_rate == doctest::Approx(1.0));
  auto self = head_to_head(ps, "X", "X");
  CHECK(self.matches == 1);
  CHECK(self.avg_score_per_match == doctest::Approx((3 + 5 + 3 + 0) / 2.0));
  CHECK(self.cooperation_rate == doctest::Approx(3.0 / 4));
  CHECK_THROWS_AS(head_to_head(ps, "Y", "Y"), PairingAbsent);
}

TEST_CASE("population distance") {
  CHECK(population_distance(pop({{"A", 2}, {"B", 2}}), pop({{"A", 3}, {"B", 1}})) == doctest::Approx(std::sqrt(2.0)));
  CHECK(population_distance(pop({{"A", 2}}), pop({{"A", 2}})) == 0.0);
  CHECK_THROWS_AS(population_distance(pop({{"A", 2}}), pop({{"B", 2}})), MismatchedUniverse);
  auto s = instability({pop({{"A", 2}, {"B", 2}}), pop({{"A", 3}, {"B", 1}}), pop({{"A", 3}, {"B", 1}})});
  REQUIRE(s.transitions.size() == 2);
  CHECK(s.mean == doctest::Approx(std::sqrt(2.0) / 2));
}

TEST_CASE("distance axioms over random populations") {
  Rng rng(123);
  auto random_pop = [&] {
    std::map<std::string, int> c;
    for (const char* id : {"A", "B", "C", "D", "E"}) c[id] = static_cast<int>(rng.below(10));
    return pop(c);
  };
  for (int i = 0; i < 2000; ++i) {
    auto x = random_pop(), y = random_pop(), z = random_pop();
    const double xy = population_distance(x, y);
    CHECK(xy >= 0.0);
    CHECK(xy == population_distance(y, x));
    CHECK(population_distance(x, x) == 0.0);
    if (!(x == y)) CHECK(xy > 0.0);
    CHECK(population_distance(x, z) <= xy + population_distance(y, z) + 1e-12);
  }
}

TEST_CASE("report tables") {
  auto ps = phases({match("X", "Y", "CCD", "CDC")});
  auto fp = report::fingerprint_csv(ps, {"X"});
  CHECK(fp.find("strategy") == 0);
  CHECK(fp.find("N/A") != std::string::npos);
  CHECK(report::strategies_played(ps) == std::vector<std::string>{"X", "Y"});
  CHECK(report::scores_csv(ps, {"X", "Y"}).find("rank") != std::string::npos);
  auto inst = report::instability_csv({pop({{"A", 2}, {"B", 2}}), pop({{"A", 3}, {"B", 1}})});
  CHECK(inst.find("1.414") != std::string::npos);
  CHECK(report::fingerprint_svg(ps, {"X", "Y"}).find("<svg") == 0);
}
