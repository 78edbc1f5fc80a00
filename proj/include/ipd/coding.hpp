#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipd/provider.hpp"
#include "ipd/tournament.hpp"

namespace ipd {

enum class Horizon { Explicit, Implicit, None };
enum class OpponentModelling { Yes, No };
enum class Dimension { horizon, opponent };

std::string_view to_string(Horizon h) noexcept;
std::string_view to_string(OpponentModelling o) noexcept;
std::string_view to_string(Dimension d) noexcept;
Horizon parse_horizon(std::string_view text);
OpponentModelling parse_opponent(std::string_view text);
Dimension parse_dimension(std::string_view text);

struct CodingLabel {
  std::int64_t rationale_id = 0;
  std::string coder;
  Horizon horizon = Horizon::None;
  OpponentModelling opponent = OpponentModelling::No;

  // Category name on the given dimension.
  std::string category(Dimension d) const;
  bool operator==(const CodingLabel&) const = default;
};

// Uniform sample without replacement of floor(fraction * N) records,
// returned in their original order. Deterministic given the seed.
std::vector<RationaleRecord> sample_rationales(const std::vector<RationaleRecord>& records,
                                               double fraction, std::uint64_t seed);

inline constexpr std::string_view kCoderPromptVersion = "ipd-coder-prompt/1";

std::string build_coder_prompt(const RationaleRecord& record);

// Expects "horizon=<Explicit|Implicit|None>; opponent=<Yes|No>" somewhere in
// the reply (case-insensitive, ':' also accepted). Throws MalformedResponse.
CodingLabel parse_coder_response(std::string_view raw, std::int64_t rationale_id,
                                 const std::string& coder);

CodingLabel code_rationale(ChatProvider& coder, const RetryPolicy& policy,
                           const RationaleRecord& record, const std::string& coder_id);

struct KappaReport {
  Dimension dimension = Dimension::horizon;
  std::vector<std::string> categories;
  std::vector<std::vector<long long>> confusion;  // [coder a][coder b]
  long long total = 0;
  double raw_agreement = 0.0;       // p_o
  double expected_agreement = 0.0;  // p_e
  double kappa = 0.0;               // (p_o - p_e) / (1 - p_e); 1 when p_o = p_e = 1
};

// Cohen's kappa over rationales labelled by both coders. Throws NoOverlap if
// the two label sets share no rationale id.
KappaReport cohens_kappa(const std::vector<CodingLabel>& coder_a,
                         const std::vector<CodingLabel>& coder_b, Dimension dimension);

// Kappa from a confusion matrix directly.
KappaReport kappa_from_confusion(Dimension dimension, std::vector<std::string> categories,
                                 std::vector<std::vector<long long>> confusion);

struct CrossTabCell {
  std::string condition;
  std::string strategy;
  Dimension dimension = Dimension::horizon;
  std::string label;  // "Yes" / "No"; horizon Yes = Explicit or Implicit
  long long n = 0;
  long long cooperations = 0;

  double cooperation_rate() const { return n ? static_cast<double>(cooperations) / n : 0.0; }
};

// Cooperation rate by (condition, strategy, label) over rationales whose two
// coders agree on the dimension's raw label. Every combination appears, empty
// ones with n = 0.
std::vector<CrossTabCell> cross_tab(const std::vector<CodingLabel>& coder_a,
                                    const std::vector<CodingLabel>& coder_b,
                                    const std::vector<RationaleRecord>& records, Dimension dimension);

// One row of a labelling sample file.
struct LabeledRationale {
  RationaleRecord record;
  std::optional<CodingLabel> coder_a;
  std::optional<CodingLabel> coder_b;
};

// Column names for reading sample files laid out differently from ours.
struct SampleColumns {
  std::map<std::string, std::string> names;  // field -> column
  static SampleColumns defaults();
  static SampleColumns from_json(const nlohmann::json& j);
  std::optional<std::string> column(const std::string& field) const;
};

void write_labeling_sample(const std::string& path, const std::vector<LabeledRationale>& rows,
                           const std::string& coder_a = "coder_a",
                           const std::string& coder_b = "coder_b");
std::vector<LabeledRationale> read_labeling_sample(const std::string& path,
                                                   const SampleColumns& columns = SampleColumns::defaults());

// Splits a sample into per-coder label lists (rows lacking a label are skipped).
std::pair<std::vector<CodingLabel>, std::vector<CodingLabel>> split_labels(
    const std::vector<LabeledRationale>& rows);

}  // namespace ipd
