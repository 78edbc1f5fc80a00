#pragma once

#include <string>
#include <vector>

#include "ipd/analysis.hpp"
#include "ipd/coding.hpp"
#include "ipd/tournament.hpp"

namespace ipd::report {

// Strategies that played at least one move, sorted by id.
std::vector<std::string> strategies_played(const std::vector<PhaseLog>& phases);

// Table CSVs. Probabilities use three decimals; absent states print "N/A".
std::string fingerprint_csv(const std::vector<PhaseLog>& phases, const std::vector<std::string>& strategies);
std::string cooperation_csv(const std::vector<PhaseLog>& phases, const std::vector<std::string>& strategies);
std::string scores_csv(const std::vector<PhaseLog>& phases, const std::vector<std::string>& strategies);
std::string instability_csv(const std::vector<Population>& populations);
std::string head_to_head_csv(const std::vector<PhaseLog>& phases, const std::vector<std::string>& strategies);
std::string kappa_csv(const std::vector<KappaReport>& reports);
std::string cross_tab_csv(const std::vector<CrossTabCell>& cells);

// Grouped bar chart of P(C | state) per strategy.
std::string fingerprint_svg(const std::vector<PhaseLog>& phases, const std::vector<std::string>& strategies);
// Population count per strategy across phases.
std::string population_svg(const TournamentLog& log);

// Writes every table and figure into <dir>/report/.
void write_report(const TournamentLog& log, const std::string& dir);

}  // namespace ipd::report
