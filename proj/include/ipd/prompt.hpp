#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ipd/game.hpp"

namespace ipd {

inline constexpr std::string_view kPromptTemplateVersion = "ipd-move-prompt/1";

// The move prompt: rules and payoffs, the termination probability as a
// percentage, the paired history (or a no-history marker), the goal, and the
// output instruction, in that order. Identical inputs give identical bytes
// whatever provider will carry it.
std::string build_prompt(const MatchView& view, const PayoffMatrix& matrix);

// SHA-256 (hex) of the template rendered with placeholder values; changes
// whenever the wording changes. Recorded in each tournament manifest.
std::string prompt_template_hash();

std::string sha256_hex(std::string_view data);

// "10%", "12.5%", "33.33%".
std::string format_percent(double probability);

struct ParsedResponse {
  std::string rationale;
  Move move = Move::C;
};

// The move is the last alphanumeric token of the reply, which must be a lone
// C or D (either case); surrounding punctuation and markup are ignored.
// Everything before it, trimmed, is the rationale. Throws MalformedResponse.
ParsedResponse parse_response(std::string_view raw);

// Inverse of parse_response for well-formed replies.
std::string render_response(const std::string& rationale, Move move);

// Opponent's most recent move as listed in a move prompt, if any.
std::optional<Move> last_opponent_move_in_prompt(std::string_view prompt);

}  // namespace ipd
