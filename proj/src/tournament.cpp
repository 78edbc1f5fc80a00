#include "ipd/tournament.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "ipd/classic.hpp"
#include "ipd/errors.hpp"
#include "ipd/llm_agent.hpp"
#include "ipd/persistence.hpp"
#include "ipd/prompt.hpp"

namespace ipd {

using nlohmann::json;

MatchConfig TournamentConfig::match_config() const {
  MatchConfig m;
  m.termination_probability = termination_probability;
  m.hard_cap = hard_cap;
  m.history_window = history_window;
  m.rng_seed = master_seed;
  return m;
}

std::vector<std::string> TournamentConfig::universe() const {
  std::set<std::string> ids;
  for (const auto& [id, n] : roster) ids.insert(id);
  if (mutation) ids.insert(std::string(name(Classic::Random)));
  return {ids.begin(), ids.end()};
}

Population TournamentConfig::initial_population() const {
  Population p;
  for (const auto& id : universe()) {
    auto it = roster.find(id);
    p.counts[id] = it == roster.end() ? 0 : it->second;
  }
  return p;
}

void TournamentConfig::validate(const StrategyRegistry& registry) {
  if (tournament_id.empty()) throw ConfigError("tournament_id must not be empty");
  if (phases < 1) throw ConfigError("phases must be >= 1");
  if (roster.empty()) throw ConfigError("roster must not be empty");
  std::map<std::string, int> resolved;
  int sum = 0;
  for (const auto& [name, n] : roster) {
    if (n < 0) throw ConfigError("roster count for '" + name + "' is negative");
    const std::string id = registry.resolve(name);
    if (resolved.count(id)) throw ConfigError("strategy '" + id + "' listed twice in roster");
    resolved[id] = n;
    sum += n;
  }
  roster = std::move(resolved);
  if (target_size == 0) target_size = sum;
  if (target_size != sum) {
    throw ConfigError("target_size " + std::to_string(target_size) + " differs from roster total " +
                      std::to_string(sum));
  }
  if (sum < 2) throw ConfigError("a tournament needs at least two agents");
  if (mutation && !registry.contains(std::string(name(Classic::Random)))) {
    throw ConfigError("mutation requires the Random strategy");
  }
  matrix.validate();
  match_config().validate();
  for (const auto& llm : llm_agents) llm.provider.validate();
}

void to_json(json& j, const TournamentConfig& c) {
  json llm = json::array();
  for (const auto& a : c.llm_agents) {
    llm.push_back({{"id", a.id}, {"abbreviation", a.abbreviation}, {"provider", a.provider}});
  }
  j = json{{"tournament_id", c.tournament_id},
           {"condition", c.condition},
           {"roster", c.roster},
           {"termination_probability", c.termination_probability},
           {"phases", c.phases},
           {"target_size", c.target_size},
           {"master_seed", c.master_seed},
           {"mutation", c.mutation},
           {"hard_cap", c.hard_cap},
           {"history_window", c.history_window},
           {"payoffs",
            {{"R", c.matrix.reward}, {"S", c.matrix.sucker}, {"T", c.matrix.temptation},
             {"P", c.matrix.punishment}}},
           {"llm_agents", llm},
           {"output_dir", c.output_dir},
           {"workers", c.workers}};
}

void from_json(const json& j, TournamentConfig& c) {
  c = TournamentConfig{};
  c.tournament_id = j.value("tournament_id", c.tournament_id);
  c.condition = j.value("condition", c.condition);
  c.roster = j.at("roster").get<std::map<std::string, int>>();
  c.termination_probability = j.value("termination_probability", c.termination_probability);
  c.phases = j.value("phases", c.phases);
  c.target_size = j.value("target_size", c.target_size);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.mutation = j.value("mutation", c.mutation);
  c.hard_cap = j.value("hard_cap", c.hard_cap);
  c.history_window = j.value("history_window", c.history_window);
  if (j.contains("payoffs")) {
    const auto& p = j.at("payoffs");
    c.matrix.reward = p.value("R", c.matrix.reward);
    c.matrix.sucker = p.value("S", c.matrix.sucker);
    c.matrix.temptation = p.value("T", c.matrix.temptation);
    c.matrix.punishment = p.value("P", c.matrix.punishment);
  }
  for (const auto& a : j.value("llm_agents", json::array())) {
    LlmAgentConfig llm;
    llm.id = a.at("id").get<std::string>();
    llm.abbreviation = a.value("abbreviation", llm.id);
    if (llm.abbreviation.empty()) llm.abbreviation = llm.id;
    llm.provider = a.at("provider").get<ProviderConfig>();
    c.llm_agents.push_back(std::move(llm));
  }
  c.output_dir = j.value("output_dir", c.output_dir);
  c.workers = j.value("workers", c.workers);
}

TournamentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  try {
    TournamentConfig c = json::parse(in).get<TournamentConfig>();
    // Relative fixture paths are relative to the config file.
    const auto base = std::filesystem::path(path).parent_path();
    for (auto& llm : c.llm_agents) {
      auto& fixture = llm.provider.mock_fixture;
      if (!fixture.empty() && std::filesystem::path(fixture).is_relative()) {
        fixture = (base / fixture).lexically_normal().string();
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

StrategyRegistry build_registry(const TournamentConfig& config) {
  StrategyRegistry registry = StrategyRegistry::with_classics();
  for (const auto& llm : config.llm_agents) {
    registry.add(llm_strategy(llm.id, llm.abbreviation, make_provider(llm.provider),
                              RetryPolicy::from(llm.provider)));
  }
  return registry;
}

std::vector<RationaleRecord> collect_rationales(PhaseLog& phase, const TournamentConfig& config,
                                                std::int64_t next_id) {
  std::map<std::string, const LlmAgentConfig*> llm_by_id;
  for (const auto& llm : config.llm_agents) llm_by_id[llm.id] = &llm;

  std::vector<RationaleRecord> out;
  auto take = [&](MatchRecord& m, int round, RoundOutcome& r, bool seat_a) {
    auto& text = seat_a ? r.rationale_a : r.rationale_b;
    if (!text) return;
    RationaleRecord rec;
    rec.rationale_id = next_id++;
    rec.tournament_id = config.tournament_id;
    rec.condition = config.label();
    rec.phase = phase.phase;
    rec.match_id = m.match_id;
    rec.round_idx = round;
    rec.agent_id = seat_a ? m.agent_a_id : m.agent_b_id;
    rec.strategy = seat_a ? m.strategy_a : m.strategy_b;
    if (auto it = llm_by_id.find(rec.strategy); it != llm_by_id.end()) {
      rec.provider = std::string(to_string(it->second->provider.provider));
      rec.model = it->second->provider.model_name;
    }
    rec.text = *text;
    rec.chosen_move = seat_a ? r.move_a : r.move_b;
    (seat_a ? r.rationale_id_a : r.rationale_id_b) = rec.rationale_id;
    out.push_back(std::move(rec));
  };
  for (auto& m : phase.matches) {
    for (std::size_t k = 0; k < m.rounds.size(); ++k) {
      take(m, static_cast<int>(k + 1), m.rounds[k], true);
      take(m, static_cast<int>(k + 1), m.rounds[k], false);
    }
  }
  return out;
}

namespace {

json comparable(const TournamentConfig& c) {
  json j = c;
  j.erase("output_dir");
  j.erase("workers");
  return j;
}

}  // namespace

TournamentLog run_tournament(TournamentConfig config, const StrategyRegistry& registry,
                             const RunOptions& options) {
  config.validate(registry);
  const std::string& dir = config.output_dir;

  TournamentLog log;
  log.config = config;
  log.prompt_hash = prompt_template_hash();
  for (const auto& id : config.universe()) log.abbreviations[id] = registry.info(id).abbreviation;

  Population population = config.initial_population();
  int first_phase = 1;
  std::int64_t next_rationale_id = 1;

  if (options.resume && !dir.empty()) {
    if (auto cp = read_checkpoint(dir)) {
      TournamentLog saved = load_tournament(dir);
      if (comparable(saved.config) != comparable(config)) {
        throw ConfigError("config differs from the one recorded in '" + dir + "'");
      }
      saved.config = config;
      log = std::move(saved);
      first_phase = cp->completed_phases + 1;
      next_rationale_id = cp->next_rationale_id;
      if (cp->next_population) population = *cp->next_population;
    }
  }
  if (!dir.empty()) std::filesystem::create_directories(dir);

  for (int t = first_phase; t <= config.phases; ++t) {
    if (options.stop_after_phase && t > *options.stop_after_phase) break;

    PhaseOptions phase_options;
    phase_options.tournament_id = config.tournament_id;
    phase_options.phase = t;
    phase_options.match = config.match_config();
    phase_options.matrix = config.matrix;
    phase_options.master_seed = config.master_seed;
    phase_options.workers = config.workers;

    PhaseLog phase = run_phase(population, phase_options, registry);
    auto records = collect_rationales(phase, config, next_rationale_id);
    next_rationale_id += static_cast<std::int64_t>(records.size());
    FitnessReport fit = compute_fitness(phase);

    log.populations.push_back(population);
    log.rationales.insert(log.rationales.end(), std::make_move_iterator(records.begin()),
                          std::make_move_iterator(records.end()));

    Checkpoint checkpoint;
    checkpoint.completed_phases = t;
    checkpoint.next_rationale_id = next_rationale_id;
    if (t < config.phases) {
      population = reproduce(population, fit, config.target_size);
      if (config.mutation) population = inject_mutation(population, fit);
      checkpoint.next_population = population;
    }

    log.phases.push_back(std::move(phase));
    log.fitness.push_back(fit);
    if (!dir.empty()) {
      write_tournament(log, dir);
      write_checkpoint(checkpoint, dir);
    }
    if (options.on_phase) options.on_phase(log.phases.back(), log.fitness.back());
  }
  return log;
}

}  // namespace ipd
