#include "ipd/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ipd/csv.hpp"
#include "ipd/errors.hpp"

namespace ipd::report {

namespace {

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (const auto& r : rows) csv::write_row(out, r);
  return out.str();
}

// Okabe-Ito palette, cycled.
const char* colour(std::size_t i) {
  static const char* kPalette[] = {"#E69F00", "#56B4E9", "#009E73", "#F0E442",
                                   "#0072B2", "#D55E00", "#CC79A7", "#000000"};
  return kPalette[i % 8];
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

std::vector<std::string> strategies_played(const std::vector<PhaseLog>& phases) {
  std::set<std::string> ids;
  for (const auto& p : phases) {
    for (const auto& m : p.matches) {
      if (m.rounds.empty()) continue;
      ids.insert(m.strategy_a);
      ids.insert(m.strategy_b);
    }
  }
  return {ids.begin(), ids.end()};
}

std::string fingerprint_csv(const std::vector<PhaseLog>& phases, const std::vector<std::string>& strategies) {
  std::vector<std::vector<std::string>> rows{
      {"strategy", "p_c_cc", "p_c_dc", "p_c_cd", "p_c_dd", "n_cc", "n_dc", "n_cd", "n_dd"}};
  for (const auto& s : strategies) {
    const Fingerprint fp = fingerprint(phases, s);
    std::vector<std::string> row{s};
    for (PriorState st : kPriorStates) {
      const auto p = fp.probability(st);
      row.push_back(p ? fmt(*p) : "N/A");
    }
    for (PriorState st : kPriorStates) row.push_back(std::to_string(fp.count(st)));
    rows.push_back(std::move(row));
  }
  return csv_text(rows);
}

std::string cooperation_csv(const std::vector<PhaseLog>& phases, const std::vector<std::string>& strategies) {
  std::vector<std::vector<std::string>> rows{{"strategy", "cooperation_rate"}};
  for (const auto& s : strategies) rows.push_back({s, fmt(cooperation_rate(phases, s))});
  return csv_text(rows);
}

std::string scores_csv(const std::vector<PhaseLog>& phases, const std::vector<std::string>& strategies) {
  std::vector<std::pair<std::string, double>> scores;
  for (const auto& s : strategies) scores.emplace_back(s, score_per_move(phases, s));
  std::vector<std::pair<std::string, double>> ranked = scores;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::vector<std::string>> rows{{"strategy", "score_per_move", "rank"}};
  for (const auto& [s, v] : scores) {
    const auto pos = std::find_if(ranked.begin(), ranked.end(), [&](const auto& r) { return r.first == s; });
    rows.push_back({s, fmt(v), std::to_string(pos - ranked.begin() + 1)});
  }
  return csv_text(rows);
}

std::string instability_csv(const std::vector<Population>& populations) {
  const InstabilityScore score = instability(populations);
  std::vector<std::vector<std::string>> rows{{"transition", "distance"}};
  for (std::size_t t = 0; t < score.transitions.size(); ++t) {
    rows.push_back({std::to_string(t + 1) + "->" + std::to_string(t + 2), fmt(score.transitions[t])});
  }
  rows.push_back({"mean", fmt(score.mean)});
  return csv_text(rows);
}

std::string head_to_head_csv(const std::vector<PhaseLog>& phases, const std::vector<std::string>& strategies) {
  std::vector<std::vector<std::string>> rows{
      {"strategy_a", "strategy_b", "matches", "avg_score_a_per_match", "cooperation_rate_a"}};
  for (const auto& a : strategies) {
    for (const auto& b : strategies) {
      try {
        const HeadToHead h = head_to_head(phases, a, b);
        rows.push_back({a, b, std::to_string(h.matches), fmt(h.avg_score_per_match, 2),
                        fmt(h.cooperation_rate, 4)});
      } catch (const PairingAbsent&) {
      }
    }
  }
  return csv_text(rows);
}

std::string kappa_csv(const std::vector<KappaReport>& reports) {
  std::vector<std::vector<std::string>> rows{
      {"dimension", "n", "raw_agreement", "expected_agreement", "kappa"}};
  for (const auto& r : reports) {
    rows.push_back({std::string(to_string(r.dimension)), std::to_string(r.total),
                    fmt(r.raw_agreement, 4), fmt(r.expected_agreement, 4), fmt(r.kappa, 4)});
  }
  return csv_text(rows);
}

std::string cross_tab_csv(const std::vector<CrossTabCell>& cells) {
  std::vector<std::vector<std::string>> rows{
      {"condition", "strategy", "dimension", "label", "cooperation_rate", "n"}};
  for (const auto& c : cells) {
    rows.push_back({c.condition, c.strategy, std::string(to_string(c.dimension)), c.label,
                    c.n ? fmt(c.cooperation_rate(), 4) : "N/A", std::to_string(c.n)});
  }
  return csv_text(rows);
}

std::string fingerprint_svg(const std::vector<PhaseLog>& phases, const std::vector<std::string>& strategies) {
  const int bar = 14, gap = 24, top = 40, height = 220, left = 50;
  const int group = 4 * bar + gap;
  const int width = left + static_cast<int>(strategies.size()) * group + 20;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << top + height + 90 << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">P(C | previous outcome)</text>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + height << "\" x2=\"" << width - 10
      << "\" y2=\"" << top + height << "\" stroke=\"#333\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const int y = top + height - tick * height / 4;
    svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
        << fmt(tick / 4.0, 2) << "</text>\n";
  }
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    const Fingerprint fp = fingerprint(phases, strategies[i]);
    const int x0 = left + static_cast<int>(i) * group + gap / 2;
    for (std::size_t s = 0; s < 4; ++s) {
      const auto p = fp.probability(kPriorStates[s]);
      if (!p) continue;
      const int h = static_cast<int>(*p * height + 0.5);
      svg << "<rect x=\"" << x0 + static_cast<int>(s) * bar << "\" y=\"" << top + height - h
          << "\" width=\"" << bar - 2 << "\" height=\"" << h << "\" fill=\"" << colour(s)
          << "\"><title>" << xml_escape(strategies[i]) << " " << to_string(kPriorStates[s]) << ": "
          << fmt(*p) << "</title></rect>\n";
    }
    svg << "<text x=\"" << x0 + 2 * bar << "\" y=\"" << top + height + 16
        << "\" text-anchor=\"middle\">" << xml_escape(strategies[i]) << "</text>\n";
  }
  for (std::size_t s = 0; s < 4; ++s) {
    const int x = left + static_cast<int>(s) * 70;
    svg << "<rect x=\"" << x << "\" y=\"" << top + height + 40 << "\" width=\"10\" height=\"10\" fill=\""
        << colour(s) << "\"/><text x=\"" << x + 14 << "\" y=\"" << top + height + 49 << "\">"
        << to_string(kPriorStates[s]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string population_svg(const TournamentLog& log) {
  const int left = 50, top = 40, width = 480, height = 240;
  int max_count = 1;
  for (const auto& p : log.populations) {
    for (const auto& [id, n] : p.counts) max_count = std::max(max_count, n);
  }
  const std::size_t phases = log.populations.size();
  auto x_of = [&](std::size_t t) {
    return left + (phases > 1 ? static_cast<int>(t) * width / static_cast<int>(phases - 1) : 0);
  };
  auto y_of = [&](int n) { return top + height - n * height / max_count; };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + width + 160
      << "\" height=\"" << top + height + 50 << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">Population by phase</text>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + height << "\" x2=\"" << left + width
      << "\" y2=\"" << top + height << "\" stroke=\"#333\"/>\n";
  for (std::size_t t = 0; t < phases; ++t) {
    svg << "<text x=\"" << x_of(t) << "\" y=\"" << top + height + 16 << "\" text-anchor=\"middle\">"
        << (t + 1) << "</text>\n";
  }
  std::size_t k = 0;
  if (!log.populations.empty()) {
    for (const auto& [id, n0] : log.populations.front().counts) {
      std::ostringstream pts;
      for (std::size_t t = 0; t < phases; ++t) {
        pts << (t ? " " : "") << x_of(t) << "," << y_of(log.populations[t].count(id));
      }
      auto abbr = log.abbreviations.count(id) ? log.abbreviations.at(id) : id;
      svg << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << colour(k) << "\" points=\""
          << pts.str() << "\"/>\n"
          << "<text x=\"" << left + width + 10 << "\" y=\"" << top + 12 * static_cast<int>(k) + 4
          << "\" fill=\"" << colour(k) << "\">" << xml_escape(abbr) << "</text>\n";
      ++k;
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_report(const TournamentLog& log, const std::string& dir) {
  const std::filesystem::path out = std::filesystem::path(dir) / "report";
  std::filesystem::create_directories(out);
  const auto ids = strategies_played(log.phases);
  write_file(out / "fingerprints.csv", fingerprint_csv(log.phases, ids));
  write_file(out / "cooperation.csv", cooperation_csv(log.phases, ids));
  write_file(out / "scores.csv", scores_csv(log.phases, ids));
  write_file(out / "head2head.csv", head_to_head_csv(log.phases, ids));
  if (log.populations.size() >= 2) write_file(out / "instability.csv", instability_csv(log.populations));
  write_file(out / "fingerprints.svg", fingerprint_svg(log.phases, ids));
  write_file(out / "populations.svg", population_svg(log));
}

}  // namespace ipd::report
