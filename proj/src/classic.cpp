#include "ipd/classic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ipd/errors.hpp"

namespace ipd {

namespace {

struct ClassicName {
  Classic id;
  std::string_view name;
  std::string_view abbreviation;
};

constexpr std::array<ClassicName, 10> kNames = {{
    {Classic::TitForTat, "TitForTat", "TFT"},
    {Classic::GrimTrigger, "GrimTrigger", "Grim"},
    {Classic::WinStayLoseShift, "WinStayLoseShift", "WSLS"},
    {Classic::GenerousTFT, "GenerousTFT", "GTFT"},
    {Classic::SuspiciousTFT, "SuspiciousTFT", "STFT"},
    {Classic::Prober, "Prober", "Prob"},
    {Classic::Random, "Random", "Rand"},
    {Classic::Gradual, "Gradual", "Grad"},
    {Classic::Alternator, "Alternator", "Alt"},
    {Classic::Bayesian, "Bayesian", "Bayes"},
}};

const ClassicName& lookup(Classic s) {
  return *std::find_if(kNames.begin(), kNames.end(),
                       [s](const ClassicName& n) { return n.id == s; });
}

class TitForTat final : public Agent {
 public:
  explicit TitForTat(Move opening) : opening_(opening) {}
  Move decide(const MatchView& view) override {
    return view.empty() ? opening_ : view.their_moves.back();
  }

 private:
  Move opening_;
};

class GrimTrigger final : public Agent {
 public:
  Move decide(const MatchView&) override { return triggered_ ? Move::D : Move::C; }
  void observe(Move, Move opponent) override { triggered_ = triggered_ || opponent == Move::D; }

 private:
  bool triggered_ = false;
};

class WinStayLoseShift final : public Agent {
 public:
  explicit WinStayLoseShift(const PayoffMatrix& m) : matrix_(m) {}
  Move decide(const MatchView& view) override {
    if (view.empty()) return Move::C;
    const Move own = view.my_moves.back();
    const int got = matrix_.cell(own, view.their_moves.back()).first;
    const bool won = got == matrix_.temptation || got == matrix_.reward;
    return won ? own : opposite(own);
  }

 private:
  PayoffMatrix matrix_;
};

class GenerousTFT final : public Agent {
 public:
  GenerousTFT(std::uint64_t seed, double forgiveness) : rng_(seed), forgiveness_(forgiveness) {}
  Move decide(const MatchView& view) override {
    if (view.empty() || view.their_moves.back() == Move::C) return Move::C;
    return rng_.bernoulli(forgiveness_) ? Move::C : Move::D;
  }

 private:
  Rng rng_;
  double forgiveness_;
};

class Prober final : public Agent {
 public:
  Move decide(const MatchView& view) override {
    switch (played_) {
      case 0: return Move::C;
      case 1: return Move::D;
      case 2: return Move::C;
      default: break;
    }
    if (!opponent_passed_probe_) return Move::D;
    return view.their_moves.back();
  }
  void observe(Move, Move opponent) override {
    ++played_;
    if ((played_ == 2 || played_ == 3) && opponent == Move::D) opponent_passed_probe_ = false;
  }

 private:
  int played_ = 0;
  bool opponent_passed_probe_ = true;
};

class RandomAgent final : public Agent {
 public:
  RandomAgent(std::uint64_t seed, double p_cooperate) : rng_(seed), p_(p_cooperate) {}
  Move decide(const MatchView&) override { return rng_.bernoulli(p_) ? Move::C : Move::D; }

 private:
  Rng rng_;
  double p_;
};

// Punishes the k-th retaliation with k defections (k = opponent's cumulative
// defections when the punishment starts), then offers two cooperations.
// Defections seen while punishing or calming are held and trigger a new
// punishment as soon as the calm ends.
class Gradual final : public Agent {
 public:
  Move decide(const MatchView&) override {
    if (punish_left_ == 0 && calm_left_ == 0 && pending_) {
      punish_left_ = opponent_defections_;
      calm_left_ = 2;
      pending_ = false;
    }
    if (punish_left_ > 0) {
      --punish_left_;
      return Move::D;
    }
    if (calm_left_ > 0) {
      --calm_left_;
      return Move::C;
    }
    return Move::C;
  }
  void observe(Move, Move opponent) override {
    if (opponent == Move::D) {
      ++opponent_defections_;
      pending_ = true;
    }
  }

 private:
  int opponent_defections_ = 0;
  int punish_left_ = 0;
  int calm_left_ = 0;
  bool pending_ = false;
};

class Alternator final : public Agent {
 public:
  Move decide(const MatchView&) override { return (played_ % 2 == 0) ? Move::C : Move::D; }
  void observe(Move, Move) override { ++played_; }

 private:
  int played_ = 0;
};

class Bayesian final : public Agent {
 public:
  Bayesian(const PayoffMatrix& m, double epsilon) : matrix_(m), epsilon_(epsilon) {}

  Move decide(const MatchView& view) override {
    return bayesian_best_response(belief_, view.termination_probability, matrix_);
  }

  void observe(Move own, Move opponent) override {
    // What each model would have played this round, given our earlier moves.
    const Move tft = own_history_.empty() ? Move::C : own_history_.back();
    const Move grim = we_defected_ ? Move::D : Move::C;
    belief_ = bayesian_update(belief_, {tft, grim, Move::C, Move::D}, opponent, epsilon_);
    own_history_.push_back(own);
    we_defected_ = we_defected_ || own == Move::D;
  }

 private:
  PayoffMatrix matrix_;
  double epsilon_;
  BayesianBelief belief_;
  std::vector<Move> own_history_;
  bool we_defected_ = false;
};

}  // namespace

std::string_view name(Classic s) noexcept { return lookup(s).name; }
std::string_view abbreviation(Classic s) noexcept { return lookup(s).abbreviation; }

std::optional<Classic> classic_from_name(std::string_view id) noexcept {
  for (const auto& n : kNames) {
    if (n.name == id || n.abbreviation == id) return n.id;
  }
  return std::nullopt;
}

std::unique_ptr<Agent> make_classic(Classic strategy, std::uint64_t seed, const PayoffMatrix& matrix,
                                    const ClassicParams& params) {
  switch (strategy) {
    case Classic::TitForTat: return std::make_unique<TitForTat>(Move::C);
    case Classic::GrimTrigger: return std::make_unique<GrimTrigger>();
    case Classic::WinStayLoseShift: return std::make_unique<WinStayLoseShift>(matrix);
    case Classic::GenerousTFT:
      return std::make_unique<GenerousTFT>(seed, params.generous_forgiveness);
    case Classic::SuspiciousTFT: return std::make_unique<TitForTat>(Move::D);
    case Classic::Prober: return std::make_unique<Prober>();
    case Classic::Random: return std::make_unique<RandomAgent>(seed, params.random_cooperation);
    case Classic::Gradual: return std::make_unique<Gradual>();
    case Classic::Alternator: return std::make_unique<Alternator>();
    case Classic::Bayesian: return std::make_unique<Bayesian>(matrix, params.bayesian_epsilon);
  }
  throw Error("unknown classic strategy");
}

bool BayesianBelief::valid(double tol) const noexcept {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

OpponentModel BayesianBelief::most_likely() const noexcept {
  // Models with identical prediction records are tied exactly in theory but
  // drift apart by rounding under repeated renormalization; treat values
  // within a relative 1e-9 as equal so the fixed order decides.
  constexpr double kTie = 1e-9;
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[best] * (1.0 + kTie)) best = i;
  }
  return static_cast<OpponentModel>(best);
}

BayesianBelief bayesian_update(const BayesianBelief& belief, const std::array<Move, 4>& predicted,
                               Move observed, double epsilon) {
  BayesianBelief posterior;
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double likelihood = predicted[i] == observed ? 1.0 - epsilon : epsilon;
    posterior.p[i] = belief.p[i] * likelihood;
    total += posterior.p[i];
  }
  if (!(total > 0.0)) throw DegenerateBelief("every opponent model has zero posterior mass");
  for (double& x : posterior.p) x /= total;
  return posterior;
}

Move bayesian_best_response(const BayesianBelief& belief, double termination_probability,
                            const PayoffMatrix& matrix) {
  switch (belief.most_likely()) {
    case OpponentModel::AlwaysCooperate:
    case OpponentModel::AlwaysDefect:
      return Move::D;
    case OpponentModel::TitForTat:
    case OpponentModel::GrimTrigger: {
      const double p = termination_probability;
      const double future = (matrix.reward - matrix.punishment) * (1.0 - p) / p;
      return future >= matrix.temptation - matrix.reward ? Move::C : Move::D;
    }
  }
  return Move::D;
}

}  // namespace ipd
