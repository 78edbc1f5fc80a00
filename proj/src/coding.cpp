#include "ipd/coding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ipd/csv.hpp"
#include "ipd/errors.hpp"
#include "ipd/rng.hpp"

namespace ipd {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

const std::vector<std::string>& categories_for(Dimension d) {
  static const std::vector<std::string> horizon{"Explicit", "Implicit", "None"};
  static const std::vector<std::string> opponent{"Yes", "No"};
  return d == Dimension::horizon ? horizon : opponent;
}

}  // namespace

std::string_view to_string(Horizon h) noexcept {
  switch (h) {
    case Horizon::Explicit: return "Explicit";
    case Horizon::Implicit: return "Implicit";
    case Horizon::None: return "None";
  }
  return "None";
}

std::string_view to_string(OpponentModelling o) noexcept {
  return o == OpponentModelling::Yes ? "Yes" : "No";
}

std::string_view to_string(Dimension d) noexcept {
  return d == Dimension::horizon ? "horizon" : "opponent";
}

Horizon parse_horizon(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "explicit") return Horizon::Explicit;
  if (t == "implicit") return Horizon::Implicit;
  if (t == "none") return Horizon::None;
  throw MalformedResponse("unknown horizon code '" + std::string(text) + "'");
}

OpponentModelling parse_opponent(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "yes") return OpponentModelling::Yes;
  if (t == "no") return OpponentModelling::No;
  throw MalformedResponse("unknown opponent-modelling code '" + std::string(text) + "'");
}

Dimension parse_dimension(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "horizon") return Dimension::horizon;
  if (t == "opponent") return Dimension::opponent;
  throw Error("unknown dimension '" + std::string(text) + "'");
}

std::string CodingLabel::category(Dimension d) const {
  return std::string(d == Dimension::horizon ? to_string(horizon) : to_string(opponent));
}

std::vector<RationaleRecord> sample_rationales(const std::vector<RationaleRecord>& records,
                                               double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("sample fraction must lie in (0, 1]");
  if (records.empty()) throw EmptyCorpus("no rationales to sample");
  const std::size_t n = records.size();
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));

  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());

  std::vector<RationaleRecord> out;
  out.reserve(k);
  for (std::size_t i : idx) out.push_back(records[i]);
  return out;
}

std::string build_coder_prompt(const RationaleRecord& record) {
  std::ostringstream out;
  out << "You are coding the reasoning a player wrote before a move in an iterated Prisoner's "
         "Dilemma.\n"
      << "\n"
      << "Rationale:\n\"\"\"\n"
      << record.text << "\n\"\"\"\n"
      << "\n"
      << "Question 1 (horizon): does the rationale refer to the remaining rounds or the "
         "termination probability? Answer Explicit, Implicit or None.\n"
      << "Question 2 (opponent): does the rationale state a hypothesis about the opponent's "
         "strategy or type? Answer Yes or No.\n"
      << "\n"
      << "Reply with exactly one line in the form:\n"
      << "horizon=<Explicit|Implicit|None>; opponent=<Yes|No>\n";
  return out.str();
}

namespace {

std::optional<std::string> value_after(const std::string& low, const std::string& raw,
                                       std::string_view key) {
  std::size_t pos = 0;
  std::optional<std::string> found;
  while ((pos = low.find(key, pos)) != std::string::npos) {
    std::size_t p = pos + key.size();
    while (p < low.size() && low[p] == ' ') ++p;
    if (p < low.size() && (low[p] == '=' || low[p] == ':')) {
      ++p;
      while (p < low.size() && (low[p] == ' ' || low[p] == '*' || low[p] == '"')) ++p;
      std::size_t e = p;
      while (e < low.size() && std::isalpha(static_cast<unsigned char>(low[e]))) ++e;
      if (e > p) found = raw.substr(p, e - p);
    }
    pos += key.size();
  }
  return found;
}

}  // namespace

CodingLabel parse_coder_response(std::string_view raw, std::int64_t rationale_id,
                                 const std::string& coder) {
  const std::string text(raw);
  const std::string low = lower(text);
  const auto h = value_after(low, text, "horizon");
  const auto o = value_after(low, text, "opponent");
  if (!h || !o) throw MalformedResponse("coder reply lacks horizon=... and opponent=... fields");
  CodingLabel label;
  label.rationale_id = rationale_id;
  label.coder = coder;
  label.horizon = parse_horizon(*h);
  label.opponent = parse_opponent(*o);
  return label;
}

CodingLabel code_rationale(ChatProvider& coder, const RetryPolicy& policy,
                           const RationaleRecord& record, const std::string& coder_id) {
  return call_with_retry(coder, build_coder_prompt(record), policy, [&](const std::string& reply) {
    return parse_coder_response(reply, record.rationale_id, coder_id);
  });
}

KappaReport kappa_from_confusion(Dimension dimension, std::vector<std::string> categories,
                                 std::vector<std::vector<long long>> confusion) {
  KappaReport r;
  r.dimension = dimension;
  r.categories = std::move(categories);
  r.confusion = std::move(confusion);
  const std::size_t k = r.categories.size();
  std::vector<long long> row(k, 0), col(k, 0);
  long long diag = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const long long c = r.confusion.at(i).at(j);
      r.total += c;
      row[i] += c;
      col[j] += c;
      if (i == j) diag += c;
    }
  }
  if (r.total == 0) throw NoOverlap("no rationale was labelled by both coders");
  const double n = static_cast<double>(r.total);
  r.raw_agreement = static_cast<double>(diag) / n;
  double pe = 0.0;
  for (std::size_t i = 0; i < k; ++i) pe += (static_cast<double>(row[i]) / n) * (static_cast<double>(col[i]) / n);
  r.expected_agreement = pe;
  if (pe >= 1.0) {
    r.kappa = 1.0;  // both coders used a single identical category throughout
  } else {
    r.kappa = (r.raw_agreement - pe) / (1.0 - pe);
  }
  return r;
}

KappaReport cohens_kappa(const std::vector<CodingLabel>& coder_a,
                         const std::vector<CodingLabel>& coder_b, Dimension dimension) {
  const auto& cats = categories_for(dimension);
  auto index_of = [&](const std::string& c) {
    return static_cast<std::size_t>(std::find(cats.begin(), cats.end(), c) - cats.begin());
  };
  std::map<std::int64_t, const CodingLabel*> by_id;
  for (const auto& l : coder_b) by_id[l.rationale_id] = &l;
  std::vector<std::vector<long long>> confusion(cats.size(), std::vector<long long>(cats.size(), 0));
  for (const auto& a : coder_a) {
    auto it = by_id.find(a.rationale_id);
    if (it == by_id.end()) continue;
    ++confusion[index_of(a.category(dimension))][index_of(it->second->category(dimension))];
  }
  return kappa_from_confusion(dimension, cats, std::move(confusion));
}

std::vector<CrossTabCell> cross_tab(const std::vector<CodingLabel>& coder_a,
                                    const std::vector<CodingLabel>& coder_b,
                                    const std::vector<RationaleRecord>& records, Dimension dimension) {
  std::map<std::int64_t, const CodingLabel*> a_by_id, b_by_id;
  for (const auto& l : coder_a) a_by_id[l.rationale_id] = &l;
  for (const auto& l : coder_b) b_by_id[l.rationale_id] = &l;

  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, CrossTabCell> cells;
  std::set<std::pair<std::string, std::string>> groups;
  for (const auto& r : records) groups.emplace(r.condition, r.strategy);
  for (const auto& [cond, strat] : groups) {
    for (const char* label : {"Yes", "No"}) {
      cells[{cond, strat, label}] = CrossTabCell{cond, strat, dimension, label, 0, 0};
    }
  }
  for (const auto& r : records) {
    auto a = a_by_id.find(r.rationale_id);
    auto b = b_by_id.find(r.rationale_id);
    if (a == a_by_id.end() || b == b_by_id.end()) continue;
    if (a->second->category(dimension) != b->second->category(dimension)) continue;
    const bool yes = dimension == Dimension::horizon ? a->second->horizon != Horizon::None
                                                     : a->second->opponent == OpponentModelling::Yes;
    auto& cell = cells[{r.condition, r.strategy, yes ? "Yes" : "No"}];
    cell.n += 1;
    cell.cooperations += r.chosen_move == Move::C ? 1 : 0;
  }
  std::vector<CrossTabCell> out;
  for (auto& [key, cell] : cells) out.push_back(std::move(cell));
  return out;
}

// ---- labelling sample files ---------------------------------------------

namespace {

const std::vector<std::string> kSampleHeader = {
    "rationale_id", "tournament_id", "condition", "phase", "match_id",  "round_idx",  "agent_id",
    "strategy",     "provider",      "model",     "move",  "text",      "coder_a",    "horizon_a",
    "opponent_a",   "coder_b",       "horizon_b", "opponent_b"};

}  // namespace

SampleColumns SampleColumns::defaults() {
  SampleColumns c;
  for (const auto& f : kSampleHeader) c.names[f] = f;
  return c;
}

SampleColumns SampleColumns::from_json(const nlohmann::json& j) {
  SampleColumns c = defaults();
  for (const auto& [field, column] : j.items()) c.names[field] = column.get<std::string>();
  return c;
}

std::optional<std::string> SampleColumns::column(const std::string& field) const {
  auto it = names.find(field);
  if (it == names.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

void write_labeling_sample(const std::string& path, const std::vector<LabeledRationale>& rows,
                           const std::string& coder_a, const std::string& coder_b) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  csv::write_row(out, kSampleHeader);
  for (const auto& row : rows) {
    const auto& r = row.record;
    auto h = [](const std::optional<CodingLabel>& l) {
      return l ? std::string(to_string(l->horizon)) : std::string();
    };
    auto o = [](const std::optional<CodingLabel>& l) {
      return l ? std::string(to_string(l->opponent)) : std::string();
    };
    csv::write_row(out, {std::to_string(r.rationale_id), r.tournament_id, r.condition,
                         std::to_string(r.phase), std::to_string(r.match_id),
                         std::to_string(r.round_idx), r.agent_id, r.strategy, r.provider, r.model,
                         std::string(1, to_char(r.chosen_move)), r.text,
                         row.coder_a ? row.coder_a->coder : coder_a, h(row.coder_a), o(row.coder_a),
                         row.coder_b ? row.coder_b->coder : coder_b, h(row.coder_b), o(row.coder_b)});
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<LabeledRationale> read_labeling_sample(const std::string& path, const SampleColumns& columns) {
  const auto table = csv::Table::read(path);
  auto col = [&](const std::string& field) -> std::optional<std::string> {
    auto c = columns.column(field);
    if (c && table.has(*c)) return c;
    return std::nullopt;
  };
  const auto id_col = col("rationale_id");
  if (!id_col) throw SchemaMismatch(path + ": no rationale_id column");
  auto get = [&](std::size_t i, const std::string& field) -> std::string {
    auto c = col(field);
    return c ? table.at(i, *c) : std::string();
  };
  auto get_int = [&](std::size_t i, const std::string& field) -> long long {
    const std::string s = get(i, field);
    if (s.empty()) return 0;
    try {
      return std::stoll(s);
    } catch (const std::exception&) {
      throw SchemaMismatch(path + ": bad integer in " + field + ": '" + s + "'");
    }
  };
  auto label = [&](std::size_t i, const std::string& suffix, std::int64_t id,
                   const std::string& fallback) -> std::optional<CodingLabel> {
    const std::string h = get(i, "horizon_" + suffix);
    const std::string o = get(i, "opponent_" + suffix);
    if (trim(h).empty() || trim(o).empty()) return std::nullopt;
    CodingLabel l;
    l.rationale_id = id;
    l.coder = get(i, "coder_" + suffix);
    if (l.coder.empty()) l.coder = fallback;
    try {
      l.horizon = parse_horizon(h);
      l.opponent = parse_opponent(o);
    } catch (const MalformedResponse& e) {
      throw SchemaMismatch(path + ": row " + std::to_string(i + 1) + ": " + e.what());
    }
    return l;
  };

  std::vector<LabeledRationale> rows;
  rows.reserve(table.rows());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    LabeledRationale row;
    auto& r = row.record;
    r.rationale_id = get_int(i, "rationale_id");
    r.tournament_id = get(i, "tournament_id");
    r.condition = get(i, "condition");
    r.phase = static_cast<int>(get_int(i, "phase"));
    r.match_id = static_cast<int>(get_int(i, "match_id"));
    r.round_idx = static_cast<int>(get_int(i, "round_idx"));
    r.agent_id = get(i, "agent_id");
    r.strategy = get(i, "strategy");
    r.provider = get(i, "provider");
    r.model = get(i, "model");
    const std::string mv = get(i, "move");
    r.chosen_move = mv.empty() ? Move::C : parse_move(trim(mv));
    r.text = get(i, "text");
    row.coder_a = label(i, "a", r.rationale_id, "coder_a");
    row.coder_b = label(i, "b", r.rationale_id, "coder_b");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::pair<std::vector<CodingLabel>, std::vector<CodingLabel>> split_labels(
    const std::vector<LabeledRationale>& rows) {
  std::pair<std::vector<CodingLabel>, std::vector<CodingLabel>> out;
  for (const auto& row : rows) {
    if (row.coder_a) out.first.push_back(*row.coder_a);
    if (row.coder_b) out.second.push_back(*row.coder_b);
  }
  return out;
}

}  // namespace ipd
