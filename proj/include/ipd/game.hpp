#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ipd {

enum class Move : char { C = 'C', D = 'D' };

constexpr char to_char(Move m) noexcept { return static_cast<char>(m); }
constexpr Move opposite(Move m) noexcept { return m == Move::C ? Move::D : Move::C; }
// Accepts "C"/"D" (either case); throws ipd::Error otherwise.
Move parse_move(std::string_view text);

struct PayoffMatrix {
  int reward = 3;
  int sucker = 0;
  int temptation = 5;
  int punishment = 1;

  // T > R > P > S and 2R > T + S.
  void validate() const;

  // (points to the first player, points to the second player).
  std::pair<int, int> cell(Move a, Move b) const noexcept;

  bool operator==(const PayoffMatrix&) const = default;
};

std::pair<int, int> payoff(Move a, Move b, const PayoffMatrix& matrix) noexcept;

struct MatchConfig {
  double termination_probability = 0.10;
  int hard_cap = 30;
  int history_window = 20;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct RoundOutcome {
  Move move_a = Move::C;
  Move move_b = Move::C;
  int payoff_a = 0;
  int payoff_b = 0;
  // Populated for LLM-backed agents only.
  std::optional<std::string> rationale_a;
  std::optional<std::string> rationale_b;
  std::optional<std::int64_t> rationale_id_a;
  std::optional<std::int64_t> rationale_id_b;

  bool operator==(const RoundOutcome&) const = default;
};

enum class Termination { probability_draw, hard_cap };

std::string_view to_string(Termination t) noexcept;
Termination parse_termination(std::string_view text);

struct MatchRecord {
  int phase = 0;
  int match_id = 0;
  std::string agent_a_id;
  std::string agent_b_id;
  std::string strategy_a;
  std::string strategy_b;
  std::vector<RoundOutcome> rounds;
  Termination terminated_by = Termination::probability_draw;

  int length() const noexcept { return static_cast<int>(rounds.size()); }
  bool operator==(const MatchRecord&) const = default;
};

// What an agent sees when deciding: the paired history from its own seat,
// truncated to the most recent `history_window` rounds.
struct MatchView {
  std::vector<Move> my_moves;
  std::vector<Move> their_moves;
  double termination_probability = 0.10;
  // Rounds completed so far in the match; >= my_moves.size() once truncated.
  int rounds_played = 0;

  bool empty() const noexcept { return my_moves.empty(); }
};

// A participant in one match. Instances are created per match and never
// shared, so implementations may keep mutable per-match state.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual Move decide(const MatchView& view) = 0;

  // Called once per round after both moves are committed, with the full
  // (untruncated) outcome from this agent's seat.
  virtual void observe(Move own, Move opponent) {
    (void)own;
    (void)opponent;
  }

  // Reasoning attached to the most recent decision, if the agent produces any.
  virtual std::optional<std::string> take_rationale() { return std::nullopt; }
};

// Returns u in [0, 1); the match ends after a round iff u < p.
using TerminationDraw = std::function<double()>;

// Plays one match. Agent exceptions (AgentFailure and friends) propagate; the
// caller decides whether to abort or rethrow.
MatchRecord play_match(Agent& agent_a, Agent& agent_b, const MatchConfig& cfg,
                       const PayoffMatrix& matrix, const TerminationDraw& draw);

// Same, with termination draws taken from a stream seeded by cfg.rng_seed.
MatchRecord play_match(Agent& agent_a, Agent& agent_b, const MatchConfig& cfg,
                       const PayoffMatrix& matrix = {});

// Expected rounds under per-round termination p with a hard cap:
// sum_{k<cap} (1-p)^k = (1 - (1-p)^cap) / p.
double expected_match_length(double p, int hard_cap);

// Probability a match runs to the cap: (1-p)^(cap-1).
double hard_cap_probability(double p, int hard_cap);

}  // namespace ipd
