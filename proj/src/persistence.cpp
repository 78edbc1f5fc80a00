#include "ipd/persistence.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ipd/csv.hpp"
#include "ipd/errors.hpp"
#include "ipd/prompt.hpp"

namespace ipd {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kRoundHeader = {
    "tournament_id", "phase",  "match_id", "round_idx", "strategy_a",     "strategy_b",
    "move_a",        "move_b", "payoff_a", "payoff_b",  "rationale_id_a", "rationale_id_b"};
const std::vector<std::string> kMatchHeader = {"phase",      "match_id",   "agent_a", "agent_b",
                                               "strategy_a", "strategy_b", "rounds",  "terminated_by"};
const std::vector<std::string> kAbortedHeader = {"phase",      "match_id",   "agent_a", "agent_b",
                                                 "strategy_a", "strategy_b", "reason"};
const std::vector<std::string> kFitnessHeader = {"phase",       "strategy", "agents",
                                                 "total_score", "total_moves", "fitness",
                                                 "mean_fitness"};
const std::vector<std::string> kRationaleHeader = {
    "rationale_id", "tournament_id", "condition", "phase", "match_id", "round_idx",
    "agent_id",     "strategy",      "provider",  "model", "move",     "text"};

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string opt_id(const std::optional<std::int64_t>& id) {
  return id ? std::to_string(*id) : std::string();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

// Writes to a sibling temp file and renames, so readers never see a torn file.
template <class Fn>
void write_atomically(const fs::path& path, Fn&& fill) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out = open_out(tmp);
    fill(out);
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

void expect_header(const csv::Table& t, const std::vector<std::string>& header, const std::string& file) {
  if (t.header() != header) throw SchemaMismatch(file + ": unexpected columns");
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaMismatch("bad integer for " + what + ": '" + s + "'");
  }
}

long long to_ll(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaMismatch("bad integer for " + what + ": '" + s + "'");
  }
}

std::optional<std::int64_t> to_opt_id(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return to_ll(s, "rationale id");
}

}  // namespace

void write_round_rows(const TournamentLog& log, std::ostream& out) {
  csv::write_row(out, kRoundHeader);
  for (const auto& phase : log.phases) {
    for (const auto& m : phase.matches) {
      for (std::size_t k = 0; k < m.rounds.size(); ++k) {
        const auto& r = m.rounds[k];
        csv::write_row(out, {log.config.tournament_id, std::to_string(phase.phase),
                             std::to_string(m.match_id), std::to_string(k + 1), m.strategy_a,
                             m.strategy_b, std::string(1, to_char(r.move_a)),
                             std::string(1, to_char(r.move_b)), std::to_string(r.payoff_a),
                             std::to_string(r.payoff_b), opt_id(r.rationale_id_a),
                             opt_id(r.rationale_id_b)});
      }
    }
  }
}

void write_tournament(const TournamentLog& log, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);

  json manifest;
  manifest["schema"] = kLogSchema;
  manifest["tournament_id"] = log.config.tournament_id;
  // Where the log lives and how many workers wrote it do not affect its content.
  json config = log.config;
  config.erase("output_dir");
  config.erase("workers");
  manifest["config"] = std::move(config);
  manifest["prompt_template_version"] = kPromptTemplateVersion;
  manifest["prompt_hash"] = log.prompt_hash;
  manifest["abbreviations"] = log.abbreviations;
  json models = json::array();
  for (const auto& llm : log.config.llm_agents) {
    models.push_back({{"strategy", llm.id},
                      {"provider", to_string(llm.provider.provider)},
                      {"model", llm.provider.model_name},
                      {"temperature", llm.provider.temperature ? json(*llm.provider.temperature)
                                                               : json("provider default")}});
  }
  manifest["models"] = models;
  write_atomically(root / LogFiles::manifest, [&](std::ostream& out) { out << manifest.dump(2) << '\n'; });

  write_atomically(root / LogFiles::rounds, [&](std::ostream& out) { write_round_rows(log, out); });

  write_atomically(root / LogFiles::matches, [&](std::ostream& out) {
    csv::write_row(out, kMatchHeader);
    for (const auto& phase : log.phases) {
      for (const auto& m : phase.matches) {
        csv::write_row(out, {std::to_string(phase.phase), std::to_string(m.match_id), m.agent_a_id,
                             m.agent_b_id, m.strategy_a, m.strategy_b, std::to_string(m.length()),
                             std::string(to_string(m.terminated_by))});
      }
    }
  });

  write_atomically(root / LogFiles::aborted, [&](std::ostream& out) {
    csv::write_row(out, kAbortedHeader);
    for (const auto& phase : log.phases) {
      for (const auto& a : phase.aborted) {
        csv::write_row(out, {std::to_string(phase.phase), std::to_string(a.match_id), a.agent_a_id,
                             a.agent_b_id, a.strategy_a, a.strategy_b, a.reason});
      }
    }
  });

  write_atomically(root / LogFiles::populations, [&](std::ostream& out) {
    std::vector<std::string> header{"phase"};
    std::vector<std::string> ids;
    if (!log.populations.empty()) {
      for (const auto& [id, n] : log.populations.front().counts) ids.push_back(id);
    }
    // Columns sorted by abbreviation, as in the published tables.
    std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
      auto abbr = [&](const std::string& id) {
        auto it = log.abbreviations.find(id);
        return it == log.abbreviations.end() ? id : it->second;
      };
      return abbr(a) < abbr(b);
    });
    for (const auto& id : ids) {
      auto it = log.abbreviations.find(id);
      header.push_back(it == log.abbreviations.end() ? id : it->second);
    }
    csv::write_row(out, header);
    for (std::size_t t = 0; t < log.populations.size(); ++t) {
      std::vector<std::string> row{std::to_string(log.phases[t].phase)};
      for (const auto& id : ids) row.push_back(std::to_string(log.populations[t].count(id)));
      csv::write_row(out, row);
    }
  });

  write_atomically(root / LogFiles::fitness, [&](std::ostream& out) {
    csv::write_row(out, kFitnessHeader);
    for (std::size_t t = 0; t < log.fitness.size(); ++t) {
      for (const auto& [id, s] : log.fitness[t].strategies) {
        csv::write_row(out, {std::to_string(log.phases[t].phase), id, std::to_string(s.agents),
                             std::to_string(s.total_score), std::to_string(s.total_moves),
                             fixed(s.fitness), fixed(log.fitness[t].mean_fitness)});
      }
    }
  });

  write_atomically(root / LogFiles::rationales, [&](std::ostream& out) {
    csv::write_row(out, kRationaleHeader);
    for (const auto& r : log.rationales) {
      csv::write_row(out, {std::to_string(r.rationale_id), r.tournament_id, r.condition,
                           std::to_string(r.phase), std::to_string(r.match_id),
                           std::to_string(r.round_idx), r.agent_id, r.strategy, r.provider, r.model,
                           std::string(1, to_char(r.chosen_move)), r.text});
    }
  });
}

void write_checkpoint(const Checkpoint& checkpoint, const std::string& dir) {
  json j{{"schema", kLogSchema},
         {"completed_phases", checkpoint.completed_phases},
         {"next_rationale_id", checkpoint.next_rationale_id}};
  j["next_population"] =
      checkpoint.next_population ? json(checkpoint.next_population->counts) : json(nullptr);
  write_atomically(fs::path(dir) / LogFiles::checkpoint,
                   [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

std::optional<Checkpoint> read_checkpoint(const std::string& dir) {
  const fs::path path = fs::path(dir) / LogFiles::checkpoint;
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaMismatch(path.string() + ": " + e.what());
  }
  if (j.value("schema", "") != kLogSchema) throw SchemaMismatch(path.string() + ": unknown schema");
  Checkpoint cp;
  cp.completed_phases = j.at("completed_phases").get<int>();
  cp.next_rationale_id = j.at("next_rationale_id").get<std::int64_t>();
  if (!j.at("next_population").is_null()) {
    cp.next_population = Population{j.at("next_population").get<std::map<std::string, int>>()};
  }
  return cp;
}

TournamentLog load_tournament(const std::string& dir) {
  const fs::path root(dir);
  const fs::path manifest_path = root / LogFiles::manifest;
  std::ifstream min(manifest_path);
  if (!min) throw IoError("no manifest in '" + dir + "'");
  json manifest;
  try {
    manifest = json::parse(min);
  } catch (const json::exception& e) {
    throw SchemaMismatch(manifest_path.string() + ": " + e.what());
  }
  const std::string schema = manifest.value("schema", "");
  if (schema != kLogSchema) {
    throw SchemaMismatch("unsupported log schema '" + schema + "' (expected " +
                         std::string(kLogSchema) + ")");
  }

  TournamentLog log;
  log.config = manifest.at("config").get<TournamentConfig>();
  log.config.output_dir = dir;
  log.prompt_hash = manifest.value("prompt_hash", "");
  log.abbreviations = manifest.value("abbreviations", std::map<std::string, std::string>{});

  // Matches.
  const auto matches = csv::Table::read((root / LogFiles::matches).string());
  expect_header(matches, kMatchHeader, LogFiles::matches);
  std::map<std::pair<int, int>, MatchRecord> by_key;
  std::map<int, PhaseLog> phases;
  std::vector<std::pair<int, int>> order;
  for (std::size_t i = 0; i < matches.rows(); ++i) {
    MatchRecord m;
    m.phase = to_int(matches.at(i, "phase"), "phase");
    m.match_id = to_int(matches.at(i, "match_id"), "match_id");
    m.agent_a_id = matches.at(i, "agent_a");
    m.agent_b_id = matches.at(i, "agent_b");
    m.strategy_a = matches.at(i, "strategy_a");
    m.strategy_b = matches.at(i, "strategy_b");
    m.terminated_by = parse_termination(matches.at(i, "terminated_by"));
    m.rounds.reserve(static_cast<std::size_t>(to_int(matches.at(i, "rounds"), "rounds")));
    phases[m.phase].phase = m.phase;
    order.emplace_back(m.phase, m.match_id);
    by_key.emplace(std::pair{m.phase, m.match_id}, std::move(m));
  }

  // Rationale texts, joined back into rounds by id.
  const auto rats = csv::Table::read((root / LogFiles::rationales).string());
  expect_header(rats, kRationaleHeader, LogFiles::rationales);
  std::map<std::int64_t, std::string> text_by_id;
  for (std::size_t i = 0; i < rats.rows(); ++i) {
    RationaleRecord r;
    r.rationale_id = to_ll(rats.at(i, "rationale_id"), "rationale_id");
    r.tournament_id = rats.at(i, "tournament_id");
    r.condition = rats.at(i, "condition");
    r.phase = to_int(rats.at(i, "phase"), "phase");
    r.match_id = to_int(rats.at(i, "match_id"), "match_id");
    r.round_idx = to_int(rats.at(i, "round_idx"), "round_idx");
    r.agent_id = rats.at(i, "agent_id");
    r.strategy = rats.at(i, "strategy");
    r.provider = rats.at(i, "provider");
    r.model = rats.at(i, "model");
    r.chosen_move = parse_move(rats.at(i, "move"));
    r.text = rats.at(i, "text");
    text_by_id[r.rationale_id] = r.text;
    log.rationales.push_back(std::move(r));
  }

  // Rounds.
  const auto rounds = csv::Table::read((root / LogFiles::rounds).string());
  expect_header(rounds, kRoundHeader, LogFiles::rounds);
  for (std::size_t i = 0; i < rounds.rows(); ++i) {
    const int phase = to_int(rounds.at(i, "phase"), "phase");
    const int match_id = to_int(rounds.at(i, "match_id"), "match_id");
    auto it = by_key.find({phase, match_id});
    if (it == by_key.end()) {
      throw SchemaMismatch("round row references unknown match " + std::to_string(phase) + "/" +
                           std::to_string(match_id));
    }
    MatchRecord& m = it->second;
    if (to_int(rounds.at(i, "round_idx"), "round_idx") != m.length() + 1) {
      throw SchemaMismatch("rounds for match " + std::to_string(match_id) + " are out of order");
    }
    RoundOutcome r;
    r.move_a = parse_move(rounds.at(i, "move_a"));
    r.move_b = parse_move(rounds.at(i, "move_b"));
    r.payoff_a = to_int(rounds.at(i, "payoff_a"), "payoff_a");
    r.payoff_b = to_int(rounds.at(i, "payoff_b"), "payoff_b");
    r.rationale_id_a = to_opt_id(rounds.at(i, "rationale_id_a"));
    r.rationale_id_b = to_opt_id(rounds.at(i, "rationale_id_b"));
    auto text_for = [&](const std::optional<std::int64_t>& id) -> std::optional<std::string> {
      if (!id) return std::nullopt;
      auto t = text_by_id.find(*id);
      if (t == text_by_id.end()) throw SchemaMismatch("round references unknown rationale");
      return t->second;
    };
    r.rationale_a = text_for(r.rationale_id_a);
    r.rationale_b = text_for(r.rationale_id_b);
    m.rounds.push_back(std::move(r));
  }
  for (const auto& key : order) {
    phases[key.first].matches.push_back(std::move(by_key.at(key)));
  }

  const auto aborted = csv::Table::read((root / LogFiles::aborted).string());
  expect_header(aborted, kAbortedHeader, LogFiles::aborted);
  for (std::size_t i = 0; i < aborted.rows(); ++i) {
    AbortedMatch a;
    const int phase = to_int(aborted.at(i, "phase"), "phase");
    a.match_id = to_int(aborted.at(i, "match_id"), "match_id");
    a.agent_a_id = aborted.at(i, "agent_a");
    a.agent_b_id = aborted.at(i, "agent_b");
    a.strategy_a = aborted.at(i, "strategy_a");
    a.strategy_b = aborted.at(i, "strategy_b");
    a.reason = aborted.at(i, "reason");
    phases[phase].phase = phase;
    phases[phase].aborted.push_back(std::move(a));
  }

  // Populations, mapped back from abbreviations.
  const auto pops = csv::Table::read((root / LogFiles::populations).string());
  if (pops.header().empty() || pops.header()[0] != "phase") {
    throw SchemaMismatch(std::string(LogFiles::populations) + ": first column must be phase");
  }
  std::map<std::string, std::string> id_by_abbr;
  for (const auto& [id, abbr] : log.abbreviations) id_by_abbr[abbr] = id;
  for (std::size_t i = 0; i < pops.rows(); ++i) {
    const int phase = to_int(pops.at(i, "phase"), "phase");
    Population p;
    for (std::size_t c = 1; c < pops.header().size(); ++c) {
      const std::string& col = pops.header()[c];
      auto it = id_by_abbr.find(col);
      p.counts[it == id_by_abbr.end() ? col : it->second] = to_int(pops.row(i)[c], col);
    }
    phases[phase].phase = phase;
    phases[phase].population = p;
    log.populations.push_back(std::move(p));
  }

  // Fitness, recomputed exactly from the integer totals.
  const auto fitness = csv::Table::read((root / LogFiles::fitness).string());
  expect_header(fitness, kFitnessHeader, LogFiles::fitness);
  std::map<int, FitnessReport> fit_by_phase;
  for (std::size_t i = 0; i < fitness.rows(); ++i) {
    auto& s = fit_by_phase[to_int(fitness.at(i, "phase"), "phase")]
                  .strategies[fitness.at(i, "strategy")];
    s.agents = to_int(fitness.at(i, "agents"), "agents");
    s.total_score = to_ll(fitness.at(i, "total_score"), "total_score");
    s.total_moves = to_ll(fitness.at(i, "total_moves"), "total_moves");
    s.fitness = static_cast<double>(s.total_score) / static_cast<double>(s.total_moves);
  }
  for (auto& [phase, report] : fit_by_phase) {
    double sum = 0.0;
    for (const auto& [id, s] : report.strategies) sum += s.fitness;
    report.mean_fitness = sum / static_cast<double>(report.strategies.size());
    log.fitness.push_back(std::move(report));
  }

  for (auto& [phase, p] : phases) log.phases.push_back(std::move(p));
  return log;
}

RoundColumns RoundColumns::defaults() {
  RoundColumns c;
  for (const auto& f : kRoundHeader) c.names[f] = f;
  return c;
}

RoundColumns RoundColumns::from_json(const json& j) {
  RoundColumns c;
  for (const auto& [field, column] : j.items()) c.names[field] = column.get<std::string>();
  return c;
}

std::optional<std::string> RoundColumns::column(const std::string& field) const {
  auto it = names.find(field);
  if (it == names.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

std::vector<PhaseLog> import_round_rows(const std::string& path, const RoundColumns& columns,
                                        const PayoffMatrix& matrix) {
  const auto table = csv::Table::read(path);
  auto need = [&](const std::string& field) {
    auto col = columns.column(field);
    if (!col || !table.has(*col)) {
      throw SchemaMismatch(path + ": no column mapped for '" + field + "'");
    }
    return *col;
  };
  auto maybe = [&](const std::string& field) -> std::optional<std::string> {
    auto col = columns.column(field);
    if (col && table.has(*col)) return col;
    return std::nullopt;
  };
  const std::string c_phase = need("phase"), c_match = need("match_id"),
                    c_round = need("round_idx"), c_sa = need("strategy_a"),
                    c_sb = need("strategy_b"), c_ma = need("move_a"), c_mb = need("move_b");
  const auto c_pa = maybe("payoff_a"), c_pb = maybe("payoff_b");
  const auto c_aa = maybe("agent_a"), c_ab = maybe("agent_b");

  struct Row {
    int round;
    RoundOutcome outcome;
  };
  std::map<std::pair<int, int>, MatchRecord> matches;
  std::map<std::pair<int, int>, std::vector<Row>> rows;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const int phase = to_int(table.at(i, c_phase), "phase");
    const int match_id = to_int(table.at(i, c_match), "match_id");
    auto& m = matches[{phase, match_id}];
    m.phase = phase;
    m.match_id = match_id;
    m.strategy_a = table.at(i, c_sa);
    m.strategy_b = table.at(i, c_sb);
    m.agent_a_id = c_aa ? table.at(i, *c_aa) : m.strategy_a + "#?";
    m.agent_b_id = c_ab ? table.at(i, *c_ab) : m.strategy_b + "#?";
    RoundOutcome r;
    r.move_a = parse_move(table.at(i, c_ma));
    r.move_b = parse_move(table.at(i, c_mb));
    std::tie(r.payoff_a, r.payoff_b) = matrix.cell(r.move_a, r.move_b);
    if (c_pa) r.payoff_a = to_int(table.at(i, *c_pa), "payoff_a");
    if (c_pb) r.payoff_b = to_int(table.at(i, *c_pb), "payoff_b");
    rows[{phase, match_id}].push_back({to_int(table.at(i, c_round), "round_idx"), r});
  }
  std::map<int, PhaseLog> phases;
  for (auto& [key, m] : matches) {
    auto& rs = rows[key];
    std::stable_sort(rs.begin(), rs.end(), [](const Row& a, const Row& b) { return a.round < b.round; });
    for (auto& r : rs) m.rounds.push_back(std::move(r.outcome));
    auto& p = phases[key.first];
    p.phase = key.first;
    p.matches.push_back(std::move(m));
  }
  std::vector<PhaseLog> out;
  for (auto& [phase, p] : phases) out.push_back(std::move(p));
  return out;
}

}  // namespace ipd
