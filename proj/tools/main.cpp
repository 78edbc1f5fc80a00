// ipd: run evolutionary IPD tournaments and analyse their logs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ipd/analysis.hpp"
#include "ipd/coding.hpp"
#include "ipd/errors.hpp"
#include "ipd/persistence.hpp"
#include "ipd/report.hpp"
#include "ipd/tournament.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Registry with inert LLM entries, for validating a config without opening
// provider connections.
ipd::StrategyRegistry offline_registry(const ipd::TournamentConfig& config) {
  auto registry = ipd::StrategyRegistry::with_classics();
  for (const auto& llm : config.llm_agents) {
    registry.add({llm.id, llm.abbreviation, true, [](const ipd::AgentContext&) -> std::unique_ptr<ipd::Agent> {
                    throw ipd::ConfigError("offline registry cannot create LLM agents");
                  }});
  }
  return registry;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ipd::IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ipd::ConfigError(path + ": " + e.what());
  }
}

void emit(const std::string& text, const std::string& out_path) {
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw ipd::IoError("cannot write '" + out_path + "'");
    out << text;
  }
}

struct LogSource {
  std::vector<ipd::PhaseLog> phases;
  std::vector<ipd::Population> populations;
};

// A tournament directory, or a bare rounds CSV read through a column map.
LogSource load_source(const std::string& path, const std::string& columns_path) {
  LogSource src;
  if (fs::is_directory(path)) {
    auto log = ipd::load_tournament(path);
    src.phases = std::move(log.phases);
    src.populations = std::move(log.populations);
  } else {
    auto columns = columns_path.empty() ? ipd::RoundColumns::defaults()
                                        : ipd::RoundColumns::from_json(read_json(columns_path));
    src.phases = ipd::import_round_rows(path, columns);
  }
  return src;
}

// Provider config file; a relative mock_fixture is taken relative to it.
ipd::ProviderConfig read_provider_config(const std::string& path) {
  auto cfg = read_json(path).get<ipd::ProviderConfig>();
  if (!cfg.mock_fixture.empty() && fs::path(cfg.mock_fixture).is_relative()) {
    cfg.mock_fixture = (fs::path(path).parent_path() / cfg.mock_fixture).string();
  }
  cfg.validate();
  return cfg;
}

ipd::SampleColumns sample_columns(const std::string& path) {
  return path.empty() ? ipd::SampleColumns::defaults() : ipd::SampleColumns::from_json(read_json(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary iterated prisoner's dilemma tournaments"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Execute or resume a tournament from a config file");
  std::string config_path, out_dir;
  bool dry_run = false, resume = false;
  int stop_after = 0;
  unsigned workers = 0;
  run->add_option("config", config_path, "Tournament config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_flag("--dry-run", dry_run, "Validate the config and print the matches per phase");
  run->add_flag("--resume", resume, "Continue from the checkpoint in the output directory");
  run->add_option("--stop-after", stop_after, "Stop after this many phases (checkpointed)");
  run->add_option("--workers", workers, "Concurrent matches per phase");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Compute metrics from a tournament log");
  analyze->require_subcommand(1);
  std::string log_path, columns_path, out_path;
  std::vector<std::string> strategies;
  std::string h2h_a, h2h_b;
  auto add_log_args = [&](CLI::App* cmd) {
    cmd->add_option("log", log_path, "Tournament directory or rounds CSV")->required();
    cmd->add_option("--columns", columns_path, "Column map (JSON) for a foreign rounds CSV");
    cmd->add_option("--out", out_path, "Also write the table here");
  };
  auto* a_fp = analyze->add_subcommand("fingerprints", "Conditional cooperation P(C | previous outcome)");
  auto* a_coop = analyze->add_subcommand("cooperation", "Move-level cooperation rate");
  auto* a_scores = analyze->add_subcommand("scores", "Score per move and rank");
  auto* a_inst = analyze->add_subcommand("instability", "Euclidean distance between phase populations");
  auto* a_h2h = analyze->add_subcommand("head2head", "Pairwise match summaries");
  for (auto* cmd : {a_fp, a_coop, a_scores, a_inst, a_h2h}) add_log_args(cmd);
  for (auto* cmd : {a_fp, a_coop, a_scores}) {
    cmd->add_option("--strategy", strategies, "Restrict to these strategies");
  }
  a_h2h->add_option("--a", h2h_a, "First strategy");
  a_h2h->add_option("--b", h2h_b, "Second strategy");

  // code
  auto* code = app.add_subcommand("code", "Rationale sampling, machine coding and reliability");
  code->require_subcommand(1);
  double fraction = 0.10;
  std::uint64_t seed = 0;
  std::string sample_path, coder_a_path, coder_b_path, dimension = "horizon";
  auto* c_sample = code->add_subcommand("sample", "Draw a random sample of rationales");
  c_sample->add_option("log", log_path, "Tournament directory")->required();
  c_sample->add_option("--fraction", fraction, "Sample fraction in (0, 1]");
  c_sample->add_option("--seed", seed, "Sampling seed");
  c_sample->add_option("--out", out_path, "Sample CSV to write")->required();
  auto* c_label = code->add_subcommand("label", "Label a sample with two coder models");
  c_label->add_option("sample", sample_path, "Sample CSV")->required();
  c_label->add_option("--coder-a", coder_a_path, "Provider config (JSON) for coder A")->required();
  c_label->add_option("--coder-b", coder_b_path, "Provider config (JSON) for coder B")->required();
  c_label->add_option("--out", out_path, "Labelled CSV (default: overwrite the sample)");
  auto* c_kappa = code->add_subcommand("kappa", "Agreement and Cohen's kappa per dimension");
  auto* c_cross = code->add_subcommand("crosstab", "Cooperation rate by coder-agreed label");
  for (auto* cmd : {c_kappa, c_cross}) {
    cmd->add_option("sample", sample_path, "Labelled sample CSV")->required();
    cmd->add_option("--columns", columns_path, "Column map (JSON) for a foreign sample file");
    cmd->add_option("--out", out_path, "Also write the table here");
  }
  c_cross->add_option("--dimension", dimension, "horizon or opponent");

  // report
  auto* report = app.add_subcommand("report", "Write all table CSVs and SVG figures");
  report->add_option("log", log_path, "Tournament directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      auto config = ipd::load_config(config_path);
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (workers > 0) config.workers = workers;
      if (dry_run) {
        auto check = config;
        check.validate(offline_registry(config));
        const auto n = static_cast<std::size_t>(check.target_size);
        std::cerr << "agents: " << n << ", phases: " << check.phases
                  << ", matches per phase: " << ipd::round_robin_match_count(n) << "\n";
        std::cout << ipd::round_robin_match_count(n) << "\n";
        return 0;
      }
      const auto registry = ipd::build_registry(config);
      ipd::RunOptions options;
      options.resume = resume;
      if (stop_after > 0) options.stop_after_phase = stop_after;
      options.on_phase = [](const ipd::PhaseLog& phase, const ipd::FitnessReport& fit) {
        std::cerr << "phase " << phase.phase << ": " << phase.matches.size() << " matches, "
                  << phase.aborted.size() << " aborted, mean fitness " << fit.mean_fitness << "\n";
      };
      const auto log = ipd::run_tournament(config, registry, options);
      if (!config.output_dir.empty()) std::cerr << "wrote " << config.output_dir << "\n";
      for (std::size_t i = 0; i < log.populations.size(); ++i) {
        std::cout << "phase " << i + 1;
        for (const auto& [id, n] : log.populations[i].counts) std::cout << " " << id << "=" << n;
        std::cout << "\n";
      }
      return 0;
    }

    if (analyze->parsed()) {
      const auto src = load_source(log_path, columns_path);
      auto ids = strategies.empty() ? ipd::report::strategies_played(src.phases) : strategies;
      if (a_fp->parsed()) emit(ipd::report::fingerprint_csv(src.phases, ids), out_path);
      if (a_coop->parsed()) emit(ipd::report::cooperation_csv(src.phases, ids), out_path);
      if (a_scores->parsed()) emit(ipd::report::scores_csv(src.phases, ids), out_path);
      if (a_inst->parsed()) emit(ipd::report::instability_csv(src.populations), out_path);
      if (a_h2h->parsed()) {
        if (!h2h_a.empty() && !h2h_b.empty()) {
          const auto h = ipd::head_to_head(src.phases, h2h_a, h2h_b);
          std::ostringstream s;
          s << "strategy_a,strategy_b,matches,avg_score_a_per_match,cooperation_rate_a\n"
            << h2h_a << "," << h2h_b << "," << h.matches << ",";
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.2f,%.4f\n", h.avg_score_per_match, h.cooperation_rate);
          s << buf;
          emit(s.str(), out_path);
        } else {
          emit(ipd::report::head_to_head_csv(src.phases, ids), out_path);
        }
      }
      return 0;
    }

    if (code->parsed()) {
      if (c_sample->parsed()) {
        const auto log = ipd::load_tournament(log_path);
        const auto sample = ipd::sample_rationales(log.rationales, fraction, seed);
        std::vector<ipd::LabeledRationale> rows;
        for (const auto& r : sample) rows.push_back({r, std::nullopt, std::nullopt});
        ipd::write_labeling_sample(out_path, rows);
        std::cout << sample.size() << " of " << log.rationales.size() << " rationales\n";
      }
      if (c_label->parsed()) {
        auto rows = ipd::read_labeling_sample(sample_path);
        auto cfg_a = read_provider_config(coder_a_path);
        auto cfg_b = read_provider_config(coder_b_path);
        auto coder_a = ipd::make_provider(cfg_a);
        auto coder_b = ipd::make_provider(cfg_b);
        const std::string name_a = cfg_a.model_name.empty() ? "coder_a" : cfg_a.model_name;
        const std::string name_b = cfg_b.model_name.empty() ? "coder_b" : cfg_b.model_name;
        for (auto& row : rows) {
          row.coder_a = ipd::code_rationale(*coder_a, ipd::RetryPolicy::from(cfg_a), row.record, name_a);
          row.coder_b = ipd::code_rationale(*coder_b, ipd::RetryPolicy::from(cfg_b), row.record, name_b);
        }
        ipd::write_labeling_sample(out_path.empty() ? sample_path : out_path, rows, name_a, name_b);
        std::cout << rows.size() << " rationales labelled\n";
      }
      if (c_kappa->parsed()) {
        const auto rows = ipd::read_labeling_sample(sample_path, sample_columns(columns_path));
        const auto [a, b] = ipd::split_labels(rows);
        emit(ipd::report::kappa_csv({ipd::cohens_kappa(a, b, ipd::Dimension::horizon),
                                     ipd::cohens_kappa(a, b, ipd::Dimension::opponent)}),
             out_path);
      }
      if (c_cross->parsed()) {
        const auto rows = ipd::read_labeling_sample(sample_path, sample_columns(columns_path));
        const auto [a, b] = ipd::split_labels(rows);
        std::vector<ipd::RationaleRecord> records;
        for (const auto& r : rows) records.push_back(r.record);
        emit(ipd::report::cross_tab_csv(ipd::cross_tab(a, b, records, ipd::parse_dimension(dimension))),
             out_path);
      }
      return 0;
    }

    if (report->parsed()) {
      const auto log = ipd::load_tournament(log_path);
      ipd::report::write_report(log, log_path);
      std::cout << "wrote " << (fs::path(log_path) / "report").string() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
