#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ipd/classic.hpp"
#include "ipd/game.hpp"

namespace ipd::test {

// Plays a fixed sequence, then repeats the last move.
class Scripted final : public Agent {
 public:
  explicit Scripted(std::vector<Move> moves) : moves_(std::move(moves)) {}
  Move decide(const MatchView&) override {
    const auto i = std::min(played_, moves_.size() - 1);
    return moves_[i];
  }
  void observe(Move, Move) override { ++played_; }

 private:
  std::vector<Move> moves_;
  std::size_t played_ = 0;
};

inline std::vector<Move> moves(const std::string& s) {
  std::vector<Move> out;
  for (char c : s) out.push_back(c == 'C' ? Move::C : Move::D);
  return out;
}

inline std::string str(const std::vector<Move>& ms) {
  std::string s;
  for (auto m : ms) s += to_char(m);
  return s;
}

// Drives `agent` against a fixed opponent sequence for exactly opp.size()
// rounds and returns the agent's moves.
inline std::vector<Move> respond(Agent& agent, const std::vector<Move>& opp, double p = 0.10,
                                 int window = 20) {
  MatchView view;
  view.termination_probability = p;
  std::vector<Move> mine, theirs;
  for (std::size_t r = 0; r < opp.size(); ++r) {
    const std::size_t from = mine.size() > static_cast<std::size_t>(window) ? mine.size() - window : 0;
    view.my_moves.assign(mine.begin() + from, mine.end());
    view.their_moves.assign(theirs.begin() + from, theirs.end());
    view.rounds_played = static_cast<int>(mine.size());
    const Move m = agent.decide(view);
    agent.observe(m, opp[r]);
    mine.push_back(m);
    theirs.push_back(opp[r]);
  }
  return mine;
}

inline std::vector<Move> respond(Classic s, const std::vector<Move>& opp, std::uint64_t seed = 1,
                                 double p = 0.10) {
  auto a = make_classic(s, seed, PayoffMatrix{});
  return respond(*a, opp, p);
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ipd_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ipd::test
