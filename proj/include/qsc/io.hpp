#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qsc/matching_lottery.hpp"
#include "qsc/one_sided.hpp"
#include "qsc/two_sided.hpp"
#include "qsc/voting.hpp"

/// JSON instance documents. Every rational is a string ("2/3", "0", "1") so
/// values stay exact; options and agents are referred to by name.
namespace qsc::io {

enum class Kind { Voting, OneSided, TwoSided, LotteryQuery };

std::string kind_name(Kind kind);

/// One preference and quantile with one or two lotteries over named
/// alternatives; input to rep, compare and sd-compare.
struct LotteryQuery {
  Preference preference;
  Quantile h;
  Lottery x;
  std::optional<Lottery> y;
};

using Instance = std::variant<VotingInstance, OneSidedInstance, TwoSidedInstance, LotteryQuery>;
using AnyLottery = std::variant<Lottery, MatchingLottery>;

struct Document {
  Kind kind = Kind::Voting;
  /// Voting and one-sided agents, or the N side. Empty for lottery queries.
  std::vector<std::string> agent_names;
  /// Alternatives, items, or the M side.
  std::vector<std::string> option_names;
  Instance instance;
  /// Optional lottery to check: a vector for voting, a matrix otherwise.
  std::optional<AnyLottery> lottery;
};

/// Malformed document; path is a JSON path such as "$.agents[1].h".
class InputError : public std::runtime_error {
 public:
  InputError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

Document parse_document(const nlohmann::json& j);
/// Also reports JSON syntax errors as InputError at "$".
Document parse_document_text(std::string_view text);

nlohmann::ordered_json serialize_document(const Document& doc);

std::uint64_t fnv1a64(std::string_view bytes);
/// "fnv1a64:" and 16 hex digits of the compact canonical serialization, so
/// whitespace and key order in the source file do not matter.
std::string digest(const Document& doc);

/// Same document with every agent's quantile replaced.
Document with_h_override(const Document& doc, const Quantile& h);

nlohmann::ordered_json lottery_json(const Lottery& x);
nlohmann::ordered_json lottery_json(const MatchingLottery& x);

}  // namespace qsc::io
