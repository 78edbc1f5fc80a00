#include <doctest.h>

#include <numeric>

#include "ipd/classic.hpp"
#include "ipd/errors.hpp"
#include "ipd/rng.hpp"
#include "support.hpp"

using namespace ipd;
using ipd::test::moves;
using ipd::test::respond;
using ipd::test::str;

namespace {

std::vector<Move> random_moves(Rng& rng, std::size_t n, double p_c = 0.5) {
  std::vector<Move> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(rng.bernoulli(p_c) ? Move::C : Move::D);
  return out;
}

}  // namespace

TEST_CASE("names and abbreviations") {
  CHECK(name(Classic::TitForTat) == "TitForTat");
  CHECK(abbreviation(Classic::WinStayLoseShift) == "WSLS");
  CHECK(classic_from_name("Grim") == Classic::GrimTrigger);
  CHECK(classic_from_name("Gradual") == Classic::Gradual);
  CHECK_FALSE(classic_from_name("Nope").has_value());
}

TEST_CASE("opening moves") {
  CHECK(str(respond(Classic::TitForTat, moves("C"))) == "C");
  CHECK(str(respond(Classic::SuspiciousTFT, moves("C"))) == "D");
  CHECK(str(respond(Classic::WinStayLoseShift, moves("C"))) == "C");
  CHECK(str(respond(Classic::Prober, moves("C"))) == "C");
  CHECK(str(respond(Classic::GrimTrigger, moves("C"))) == "C");
}

TEST_CASE("tit for tat copies the previous move") {
  CHECK(str(respond(Classic::TitForTat, moves("CDDCD"))) == "CCDDC");
  CHECK(str(respond(Classic::SuspiciousTFT, moves("CDDCD"))) == "DCDDC");
}

TEST_CASE("grim trigger never forgives") {
  CHECK(str(respond(Classic::GrimTrigger, moves("CCDCCC"))) == "CCCDDD");
}

TEST_CASE("win-stay lose-shift table") {
  // own C, opp D (payoff 0) -> switch to D
  CHECK(str(respond(Classic::WinStayLoseShift, moves("DC"))) == "CD");
  // own D, opp C (payoff 5) -> stay D; own D, opp D (1) -> switch to C
  CHECK(str(respond(Classic::WinStayLoseShift, moves("DCDC"))) == "CDDC");
}

TEST_CASE("prober exploits non-retaliators and falls back to TFT otherwise") {
  CHECK(str(respond(Classic::Prober, moves("CCCCD"))) == "CDCCC");
  CHECK(str(respond(Classic::Prober, moves("CCCDC"))) == "CDCCD");
  CHECK(str(respond(Classic::Prober, moves("CDCCC"))) == "CDCDD");
  CHECK(str(respond(Classic::Prober, moves("CCDCC"))) == "CDCDD");
}

TEST_CASE("gradual worked example") {
  CHECK(str(respond(Classic::Gradual, moves("CDCDCCCCC"))) == "CCDCCDDCC");
}

TEST_CASE("alternator") {
  CHECK(str(respond(Classic::Alternator, moves("DDDDD"))) == "CDCDC");
  CHECK(str(respond(Classic::Alternator, moves("CCC")))[2] == 'C');
}

TEST_CASE("generous TFT forgives about one defection in ten") {
  long long forgiven = 0, n = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto m = respond(Classic::GenerousTFT, std::vector<Move>(101, Move::D), seed);
    CHECK(m[0] == Move::C);
    for (std::size_t i = 1; i < m.size(); ++i) {
      forgiven += m[i] == Move::C;
      ++n;
    }
  }
  CHECK(static_cast<double>(forgiven) / n == doctest::Approx(0.10).epsilon(0.1));
  CHECK(str(respond(Classic::GenerousTFT, moves("CCCC"), 3)) == "CCCC");
}

TEST_CASE("bayesian update examples") {
  const std::array<Move, 4> predicted{Move::C, Move::C, Move::C, Move::D};
  auto after_d = bayesian_update({}, predicted, Move::D);
  CHECK(after_d.p[0] == doctest::Approx(1.0 / 12));
  CHECK(after_d.p[1] == doctest::Approx(1.0 / 12));
  CHECK(after_d.p[2] == doctest::Approx(1.0 / 12));
  CHECK(after_d.p[3] == doctest::Approx(3.0 / 4));

  auto after_c = bayesian_update({}, predicted, Move::C);
  CHECK(after_c.p[0] == doctest::Approx(0.321).epsilon(0.002));
  CHECK(after_c.p[3] == doctest::Approx(0.036).epsilon(0.02));

  BayesianBelief alld{{0, 0, 0, 1}};
  CHECK(bayesian_update(alld, predicted, Move::C).p[3] == doctest::Approx(1.0));
  CHECK(bayesian_update(alld, predicted, Move::D).p[3] == doctest::Approx(1.0));
}

TEST_CASE("bayesian update with zero likelihood everywhere is degenerate") {
  BayesianBelief b{{0, 0, 0, 1}};
  CHECK_THROWS_AS(bayesian_update(b, {Move::C, Move::C, Move::C, Move::D}, Move::C, 0.0), DegenerateBelief);
}

TEST_CASE("bayesian best response") {
  BayesianBelief allc{{0.1, 0.1, 0.7, 0.1}};
  CHECK(bayesian_best_response(allc, 0.10) == Move::D);
  CHECK(bayesian_best_response(allc, 0.75) == Move::D);
  BayesianBelief tft{{0.7, 0.1, 0.1, 0.1}};
  CHECK(bayesian_best_response(tft, 0.10) == Move::C);
  CHECK(bayesian_best_response(tft, 0.75) == Move::D);
  BayesianBelief alld{{0.1, 0.1, 0.1, 0.7}};
  CHECK(bayesian_best_response(alld, 0.10) == Move::D);
  // Uniform: tie goes to TFT.
  CHECK(BayesianBelief{}.most_likely() == OpponentModel::TitForTat);
  CHECK(bayesian_best_response(BayesianBelief{}, 0.25) == Move::C);
}

TEST_CASE("bayesian agent defects against a constant defector") {
  auto m = respond(Classic::Bayesian, std::vector<Move>(6, Move::D));
  CHECK(m[0] == Move::C);
  CHECK(m.back() == Move::D);
}

TEST_CASE("random cooperates half the time over many draws") {
  auto agent = make_classic(Classic::Random, 99, {});
  long long c = 0;
  const int n = 100000;
  MatchView v;
  for (int i = 0; i < n; ++i) c += agent->decide(v) == Move::C;
  CHECK(static_cast<double>(c) / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("belief stays a distribution over random observation sequences") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    BayesianBelief b;
    for (int r = 0; r < 40; ++r) {
      std::array<Move, 4> pred;
      for (auto& m : pred) m = rng.bernoulli(0.5) ? Move::C : Move::D;
      b = bayesian_update(b, pred, rng.bernoulli(0.5) ? Move::C : Move::D);
      REQUIRE(b.valid());
    }
  }
}

TEST_CASE("grim never cooperates after a defection, over random histories") {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    auto opp = random_moves(rng, 30, 0.8);
    auto mine = respond(Classic::GrimTrigger, opp);
    bool seen = false;
    for (std::size_t i = 0; i < opp.size(); ++i) {
      if (seen) REQUIRE(mine[i] == Move::D);
      seen = seen || opp[i] == Move::D;
    }
  }
}
