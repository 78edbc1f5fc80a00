#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

#include "ipd/game.hpp"
#include "ipd/rng.hpp"

namespace ipd {

enum class Classic {
  TitForTat,
  GrimTrigger,
  WinStayLoseShift,
  GenerousTFT,
  SuspiciousTFT,
  Prober,
  Random,
  Gradual,
  Alternator,
  Bayesian,
};

inline constexpr std::array<Classic, 10> kAllClassics = {
    Classic::TitForTat,  Classic::GrimTrigger, Classic::WinStayLoseShift, Classic::GenerousTFT,
    Classic::SuspiciousTFT, Classic::Prober,   Classic::Random,           Classic::Gradual,
    Classic::Alternator, Classic::Bayesian};

std::string_view name(Classic s) noexcept;
std::string_view abbreviation(Classic s) noexcept;
std::optional<Classic> classic_from_name(std::string_view id) noexcept;

struct ClassicParams {
  double generous_forgiveness = 0.10;
  double random_cooperation = 0.50;
  double bayesian_epsilon = 0.10;
};

std::unique_ptr<Agent> make_classic(Classic strategy, std::uint64_t seed, const PayoffMatrix& matrix,
                                    const ClassicParams& params = {});

// ---- Bayesian opponent model ---------------------------------------------

// Candidate opponent models, in tie-break priority order.
enum class OpponentModel { TitForTat = 0, GrimTrigger = 1, AlwaysCooperate = 2, AlwaysDefect = 3 };

struct BayesianBelief {
  // Indexed by OpponentModel.
  std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};

  double operator[](OpponentModel m) const noexcept { return p[static_cast<std::size_t>(m)]; }
  bool valid(double tol = 1e-9) const noexcept;
  // Highest posterior; ties go to the earlier model in OpponentModel order.
  OpponentModel most_likely() const noexcept;
};

// Posterior after seeing `observed`, where predicted[m] is what model m says
// the opponent would have played. Likelihood is 1 - epsilon for a matching
// prediction and epsilon otherwise.
BayesianBelief bayesian_update(const BayesianBelief& belief, const std::array<Move, 4>& predicted,
                               Move observed, double epsilon = 0.10);

// Best response to the most likely model. Against TitForTat or GrimTrigger,
// cooperation pays iff (R - P)(1 - p)/p >= T - R, comparing a one-shot
// temptation against the expected stream of lost reward over a geometric
// horizon.
Move bayesian_best_response(const BayesianBelief& belief, double termination_probability,
                            const PayoffMatrix& matrix = {});

}  // namespace ipd
