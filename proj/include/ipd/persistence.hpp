#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ipd/tournament.hpp"

namespace ipd {

inline constexpr std::string_view kLogSchema = "ipd-tournament/1";

// Files written under a tournament directory.
struct LogFiles {
  static constexpr const char* manifest = "manifest.json";
  static constexpr const char* rounds = "rounds.csv";
  static constexpr const char* matches = "matches.csv";
  static constexpr const char* aborted = "aborted.csv";
  static constexpr const char* populations = "populations.csv";
  static constexpr const char* fitness = "fitness.csv";
  static constexpr const char* rationales = "rationales.csv";
  static constexpr const char* checkpoint = "checkpoint.json";
};

struct Checkpoint {
  int completed_phases = 0;
  std::optional<Population> next_population;
  std::int64_t next_rationale_id = 1;
};

// Writes every file except the checkpoint. Round columns:
// tournament_id, phase, match_id, round_idx, strategy_a, strategy_b, move_a,
// move_b, payoff_a, payoff_b, rationale_id_a, rationale_id_b.
void write_tournament(const TournamentLog& log, const std::string& dir);
void write_round_rows(const TournamentLog& log, std::ostream& out);
void write_checkpoint(const Checkpoint& checkpoint, const std::string& dir);
std::optional<Checkpoint> read_checkpoint(const std::string& dir);

// Exact inverse of write_tournament. Throws SchemaMismatch on an unknown
// schema version or unexpected headers, IoError if files are missing.
TournamentLog load_tournament(const std::string& dir);

// Adapter for round logs in other layouts: maps our field names to the
// file's column names. Payoffs are recomputed from `matrix` when the payoff
// columns are not mapped; agent ids default to strategy + "#?".
struct RoundColumns {
  std::map<std::string, std::string> names;  // field -> column
  static RoundColumns defaults();
  static RoundColumns from_json(const nlohmann::json& j);
  std::optional<std::string> column(const std::string& field) const;
};

std::vector<PhaseLog> import_round_rows(const std::string& path, const RoundColumns& columns,
                                        const PayoffMatrix& matrix = {});

}  // namespace ipd
