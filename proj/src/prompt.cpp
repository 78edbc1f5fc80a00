#include "ipd/prompt.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

#include <openssl/evp.h>

#include "ipd/errors.hpp"

namespace ipd {

namespace {

constexpr std::string_view kNoHistory = "No prior moves: this is the first round of the match.";
constexpr std::string_view kOpponentPlayed = "opponent played ";

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string format_percent(double probability) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", probability * 100.0);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s + "%";
}

std::string build_prompt(const MatchView& view, const PayoffMatrix& m) {
  std::ostringstream out;
  out << "You are playing an iterated Prisoner's Dilemma against one opponent.\n"
      << "\n"
      << "Rules: each round, you and your opponent simultaneously choose to Cooperate (C) or "
         "Defect (D). Points per round (you, opponent):\n"
      << "- both cooperate (C, C): " << m.reward << ", " << m.reward << "\n"
      << "- you cooperate, opponent defects (C, D): " << m.sucker << ", " << m.temptation << "\n"
      << "- you defect, opponent cooperates (D, C): " << m.temptation << ", " << m.sucker << "\n"
      << "- both defect (D, D): " << m.punishment << ", " << m.punishment << "\n"
      << "\n"
      << "After every round the match ends with probability "
      << format_percent(view.termination_probability) << ".\n"
      << "\n";
  if (view.empty()) {
    out << kNoHistory << "\n";
  } else {
    const int first = view.rounds_played - static_cast<int>(view.my_moves.size()) + 1;
    out << "Match history (most recent last):\n";
    for (std::size_t i = 0; i < view.my_moves.size(); ++i) {
      out << "Round " << first + static_cast<int>(i) << ": you played " << to_char(view.my_moves[i])
          << ", " << kOpponentPlayed << to_char(view.their_moves[i]) << "\n";
    }
  }
  out << "\n"
      << "Your goal is to maximize your total score over the whole match.\n"
      << "\n"
      << "Explain your reasoning briefly, then finish with a final line containing exactly one "
         "letter: C to cooperate or D to defect.\n";
  return out.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string prompt_template_hash() {
  MatchView empty;
  MatchView one;
  one.my_moves = {Move::C};
  one.their_moves = {Move::D};
  one.rounds_played = 1;
  return sha256_hex(std::string(kPromptTemplateVersion) + "\n" + build_prompt(empty, {}) +
                    build_prompt(one, {}));
}

ParsedResponse parse_response(std::string_view raw) {
  std::size_t end = raw.size();
  while (end > 0 && !is_word_char(raw[end - 1])) --end;
  std::size_t begin = end;
  while (begin > 0 && is_word_char(raw[begin - 1])) --begin;
  if (end == begin) throw MalformedResponse("reply contains no move");
  const std::string_view token = raw.substr(begin, end - begin);
  if (token.size() != 1 || (std::toupper(static_cast<unsigned char>(token[0])) != 'C' &&
                            std::toupper(static_cast<unsigned char>(token[0])) != 'D')) {
    throw MalformedResponse("reply does not end with a lone C or D (last token '" +
                            std::string(token) + "')");
  }
  ParsedResponse parsed;
  parsed.move = parse_move(token);
  // Drop markup glued to the move, e.g. "**" in "Move: **D**".
  std::size_t cut = begin;
  while (cut > 0 && !is_word_char(raw[cut - 1]) &&
         !std::isspace(static_cast<unsigned char>(raw[cut - 1])) && raw[cut - 1] != '.' &&
         raw[cut - 1] != '!' && raw[cut - 1] != '?' && raw[cut - 1] != ':') {
    --cut;
  }
  parsed.rationale = trim(raw.substr(0, cut));
  return parsed;
}

std::string render_response(const std::string& rationale, Move move) {
  if (rationale.empty()) return std::string(1, to_char(move));
  return rationale + "\n" + to_char(move);
}

std::optional<Move> last_opponent_move_in_prompt(std::string_view prompt) {
  const auto pos = prompt.rfind(kOpponentPlayed);
  if (pos == std::string_view::npos || pos + kOpponentPlayed.size() >= prompt.size()) {
    return std::nullopt;
  }
  return parse_move(prompt.substr(pos + kOpponentPlayed.size(), 1));
}

}  // namespace ipd
