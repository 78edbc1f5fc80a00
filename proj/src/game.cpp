#include "ipd/game.hpp"

#include <cctype>
#include <cmath>

#include "ipd/errors.hpp"
#include "ipd/rng.hpp"

namespace ipd {

Move parse_move(std::string_view text) {
  if (text.size() == 1) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    if (c == 'C') return Move::C;
    if (c == 'D') return Move::D;
  }
  throw Error("invalid move '" + std::string(text) + "'");
}

void PayoffMatrix::validate() const {
  if (!(temptation > reward && reward > punishment && punishment > sucker)) {
    throw ConfigError("payoff matrix must satisfy T > R > P > S");
  }
  if (!(2 * reward > temptation + sucker)) {
    throw ConfigError("payoff matrix must satisfy 2R > T + S");
  }
}

std::pair<int, int> PayoffMatrix::cell(Move a, Move b) const noexcept {
  if (a == Move::C) {
    return b == Move::C ? std::pair{reward, reward} : std::pair{sucker, temptation};
  }
  return b == Move::C ? std::pair{temptation, sucker} : std::pair{punishment, punishment};
}

std::pair<int, int> payoff(Move a, Move b, const PayoffMatrix& matrix) noexcept {
  return matrix.cell(a, b);
}

void MatchConfig::validate() const {
  if (!(termination_probability > 0.0 && termination_probability < 1.0)) {
    throw ConfigError("termination probability must lie in (0, 1)");
  }
  if (hard_cap < 1) throw ConfigError("hard cap must be at least 1 round");
  if (history_window < 1) throw ConfigError("history window must be at least 1 round");
}

std::string_view to_string(Termination t) noexcept {
  return t == Termination::hard_cap ? "hard_cap" : "probability_draw";
}

Termination parse_termination(std::string_view text) {
  if (text == "hard_cap") return Termination::hard_cap;
  if (text == "probability_draw") return Termination::probability_draw;
  throw Error("unknown termination '" + std::string(text) + "'");
}

namespace {

MatchView make_view(const std::vector<Move>& mine, const std::vector<Move>& theirs,
                    const MatchConfig& cfg) {
  MatchView view;
  view.termination_probability = cfg.termination_probability;
  view.rounds_played = static_cast<int>(mine.size());
  const std::size_t window = static_cast<std::size_t>(cfg.history_window);
  const std::size_t start = mine.size() > window ? mine.size() - window : 0;
  view.my_moves.assign(mine.begin() + static_cast<std::ptrdiff_t>(start), mine.end());
  view.their_moves.assign(theirs.begin() + static_cast<std::ptrdiff_t>(start), theirs.end());
  return view;
}

}  // namespace

MatchRecord play_match(Agent& agent_a, Agent& agent_b, const MatchConfig& cfg,
                       const PayoffMatrix& matrix, const TerminationDraw& draw) {
  cfg.validate();
  MatchRecord record;
  std::vector<Move> moves_a;
  std::vector<Move> moves_b;
  moves_a.reserve(static_cast<std::size_t>(cfg.hard_cap));
  moves_b.reserve(static_cast<std::size_t>(cfg.hard_cap));

  for (int round = 1;; ++round) {
    // Both decisions are made before either is revealed.
    const Move a = agent_a.decide(make_view(moves_a, moves_b, cfg));
    const Move b = agent_b.decide(make_view(moves_b, moves_a, cfg));

    RoundOutcome outcome;
    outcome.move_a = a;
    outcome.move_b = b;
    std::tie(outcome.payoff_a, outcome.payoff_b) = matrix.cell(a, b);
    outcome.rationale_a = agent_a.take_rationale();
    outcome.rationale_b = agent_b.take_rationale();
    record.rounds.push_back(std::move(outcome));

    moves_a.push_back(a);
    moves_b.push_back(b);
    agent_a.observe(a, b);
    agent_b.observe(b, a);

    if (round >= cfg.hard_cap) {
      record.terminated_by = Termination::hard_cap;
      break;
    }
    if (draw() < cfg.termination_probability) {
      record.terminated_by = Termination::probability_draw;
      break;
    }
  }
  return record;
}

MatchRecord play_match(Agent& agent_a, Agent& agent_b, const MatchConfig& cfg,
                       const PayoffMatrix& matrix) {
  Rng rng(cfg.rng_seed);
  return play_match(agent_a, agent_b, cfg, matrix, [&rng] { return rng.uniform(); });
}

double expected_match_length(double p, int hard_cap) {
  return (1.0 - std::pow(1.0 - p, hard_cap)) / p;
}

double hard_cap_probability(double p, int hard_cap) {
  return std::pow(1.0 - p, hard_cap - 1);
}

}  // namespace ipd
