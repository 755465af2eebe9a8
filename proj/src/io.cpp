#include "qsc/io.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace qsc::io {

using nlohmann::json;
using nlohmann::ordered_json;

std::string kind_name(Kind kind) {
  switch (kind) {
    case Kind::Voting: return "voting";
    case Kind::OneSided: return "one_sided";
    case Kind::TwoSided: return "two_sided";
    case Kind::LotteryQuery: return "lottery_query";
  }
  return "?";
}

namespace {

std::string index_path(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

const json& field(const json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(path + "." + key, "missing field");
  return *it;
}

const json& array_field(const json& obj, const std::string& path, const char* key) {
  const json& value = field(obj, path, key);
  if (!value.is_array()) throw InputError(path + "." + key, "expected an array");
  return value;
}

std::string string_at(const json& value, const std::string& path) {
  if (!value.is_string()) throw InputError(path, "expected a string");
  return value.get<std::string>();
}

Rational rational_at(const json& value, const std::string& path) {
  const std::string text = string_at(value, path);
  try {
    return Rational::parse(text);
  } catch (const std::invalid_argument&) {
    throw InputError(path, "malformed rational '" + text + "'");
  }
}

Quantile quantile_at(const json& value, const std::string& path) {
  const Rational h = rational_at(value, path);
  if (h.sign() < 0 || h > Rational(1)) throw InputError(path, "quantile " + h.str() + " outside [0, 1]");
  return Quantile(h);
}

std::vector<std::string> names_at(const json& value, const std::string& path) {
  if (!value.is_array()) throw InputError(path, "expected an array");
  if (value.empty()) throw InputError(path, "must not be empty");
  std::vector<std::string> names;
  for (std::size_t k = 0; k < value.size(); ++k) {
    std::string name = string_at(value[k], index_path(path, k));
    if (name.empty()) throw InputError(index_path(path, k), "empty name");
    if (std::find(names.begin(), names.end(), name) != names.end()) {
      throw InputError(index_path(path, k), "duplicate name '" + name + "'");
    }
    names.push_back(std::move(name));
  }
  return names;
}

Preference preference_at(const json& value, const std::string& path, const std::vector<std::string>& options) {
  if (!value.is_array()) throw InputError(path, "expected an array");
  if (value.size() != options.size()) {
    throw InputError(path, "ranks " + std::to_string(value.size()) + " names, expected " + std::to_string(options.size()));
  }
  std::vector<Option> order;
  for (std::size_t k = 0; k < value.size(); ++k) {
    const std::string name = string_at(value[k], index_path(path, k));
    const auto it = std::find(options.begin(), options.end(), name);
    if (it == options.end()) throw InputError(index_path(path, k), "unknown name '" + name + "'");
    const auto o = static_cast<Option>(it - options.begin());
    if (std::find(order.begin(), order.end(), o) != order.end()) {
      throw InputError(index_path(path, k), "'" + name + "' appears twice; not a permutation");
    }
    order.push_back(o);
  }
  return Preference(std::move(order));
}

struct AgentList {
  std::vector<std::string> names;
  Profile prefs;
  std::vector<Quantile> h;
};

AgentList agents_at(const json& value, const std::string& path, const std::vector<std::string>& options) {
  if (!value.is_array()) throw InputError(path, "expected an array");
  if (value.empty()) throw InputError(path, "must not be empty");
  AgentList out;
  for (std::size_t k = 0; k < value.size(); ++k) {
    const std::string at = index_path(path, k);
    if (!value[k].is_object()) throw InputError(at, "expected an object");
    std::string name = string_at(field(value[k], at, "name"), at + ".name");
    if (std::find(out.names.begin(), out.names.end(), name) != out.names.end()) {
      throw InputError(at + ".name", "duplicate name '" + name + "'");
    }
    out.names.push_back(std::move(name));
    out.prefs.push_back(preference_at(field(value[k], at, "preference"), at + ".preference", options));
    out.h.push_back(quantile_at(field(value[k], at, "h"), at + ".h"));
  }
  return out;
}

std::vector<Rational> rational_vector_at(const json& value, const std::string& path, std::size_t expected) {
  if (!value.is_array()) throw InputError(path, "expected an array");
  if (value.size() != expected) {
    throw InputError(path, "has " + std::to_string(value.size()) + " entries, expected " + std::to_string(expected));
  }
  std::vector<Rational> out;
  for (std::size_t k = 0; k < value.size(); ++k) out.push_back(rational_at(value[k], index_path(path, k)));
  return out;
}

Lottery lottery_at(const json& value, const std::string& path, std::size_t m) {
  try {
    return Lottery(rational_vector_at(value, path, m));
  } catch (const std::invalid_argument& e) {
    throw InputError(path, e.what());
  }
}

MatchingLottery matching_lottery_at(const json& value, const std::string& path, std::size_t n) {
  if (!value.is_array()) throw InputError(path, "expected an array of rows");
  if (value.size() != n) throw InputError(path, "has " + std::to_string(value.size()) + " rows, expected " + std::to_string(n));
  RationalMatrix x(static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = rational_vector_at(value[i], index_path(path, i), n);
    for (std::size_t j = 0; j < n; ++j) x.at(static_cast<int>(i), static_cast<int>(j)) = row[j];
  }
  if (const auto violation = doubly_stochastic_violation(x)) throw InputError(path, *violation);
  return MatchingLottery(std::move(x));
}

ordered_json strings(const std::vector<std::string>& names) { return ordered_json(names); }

ordered_json preference_json(const Preference& p, const std::vector<std::string>& names) {
  ordered_json out = ordered_json::array();
  for (Option o : p.order()) out.push_back(names[static_cast<std::size_t>(o)]);
  return out;
}

ordered_json agents_json(const std::vector<std::string>& names, const Profile& prefs, const std::vector<Quantile>& h,
                         const std::vector<std::string>& options) {
  ordered_json out = ordered_json::array();
  for (std::size_t k = 0; k < names.size(); ++k) {
    out.push_back({{"name", names[k]}, {"preference", preference_json(prefs[k], options)}, {"h", h[k].value().str()}});
  }
  return out;
}

}  // namespace

Document parse_document(const json& j) {
  if (!j.is_object()) throw InputError("$", "expected an object");
  const std::string kind = string_at(field(j, "$", "kind"), "$.kind");

  if (kind == "voting" || kind == "one_sided") {
    const char* options_key = kind == "voting" ? "alternatives" : "items";
    auto options = names_at(field(j, "$", options_key), std::string("$.") + options_key);
    auto agents = agents_at(field(j, "$", "agents"), "$.agents", options);
    Document doc{kind == "voting" ? Kind::Voting : Kind::OneSided, std::move(agents.names), std::move(options),
                 LotteryQuery{Preference::identity(1), Quantile(), Lottery::uniform(1), std::nullopt}, std::nullopt};
    if (doc.kind == Kind::Voting) {
      doc.instance = VotingInstance(std::move(agents.prefs), std::move(agents.h));
      if (j.contains("lottery")) doc.lottery = lottery_at(j["lottery"], "$.lottery", doc.option_names.size());
    } else {
      if (doc.agent_names.size() != doc.option_names.size()) {
        throw InputError("$.agents", "one-sided instances need as many agents as items");
      }
      doc.instance = OneSidedInstance(std::move(agents.prefs), std::move(agents.h));
      if (j.contains("lottery")) doc.lottery = matching_lottery_at(j["lottery"], "$.lottery", doc.option_names.size());
    }
    return doc;
  }

  if (kind == "two_sided") {
    const json& n_json = array_field(j, "$", "n_side");
    const json& m_json = array_field(j, "$", "m_side");
    // Names first, since each side's preferences refer to the other side.
    auto side_names = [](const json& side, const std::string& path) {
      if (side.empty()) throw InputError(path, "must not be empty");
      std::vector<std::string> names;
      for (std::size_t k = 0; k < side.size(); ++k) {
        if (!side[k].is_object()) throw InputError(index_path(path, k), "expected an object");
        names.push_back(string_at(field(side[k], index_path(path, k), "name"), index_path(path, k) + ".name"));
      }
      return names;
    };
    const auto n_names = side_names(n_json, "$.n_side");
    const auto m_names = side_names(m_json, "$.m_side");
    if (n_names.size() != m_names.size()) throw InputError("$.m_side", "both sides must have the same number of agents");
    auto n_side = agents_at(n_json, "$.n_side", m_names);
    auto m_side = agents_at(m_json, "$.m_side", n_names);
    Document doc{Kind::TwoSided, std::move(n_side.names), std::move(m_side.names),
                 TwoSidedInstance(std::move(n_side.prefs), std::move(n_side.h), std::move(m_side.prefs), std::move(m_side.h)),
                 std::nullopt};
    if (j.contains("lottery")) doc.lottery = matching_lottery_at(j["lottery"], "$.lottery", doc.agent_names.size());
    return doc;
  }

  if (kind == "lottery_query") {
    auto options = names_at(field(j, "$", "alternatives"), "$.alternatives");
    LotteryQuery q{preference_at(field(j, "$", "preference"), "$.preference", options),
                   quantile_at(field(j, "$", "h"), "$.h"), lottery_at(field(j, "$", "x"), "$.x", options.size()), std::nullopt};
    if (j.contains("y")) q.y = lottery_at(j["y"], "$.y", options.size());
    return Document{Kind::LotteryQuery, {}, std::move(options), std::move(q), std::nullopt};
  }

  throw InputError("$.kind", "unknown kind '" + kind + "'");
}

Document parse_document_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_document(j);
}

ordered_json lottery_json(const Lottery& x) {
  ordered_json out = ordered_json::array();
  for (const auto& p : x.probs()) out.push_back(p.str());
  return out;
}

ordered_json lottery_json(const MatchingLottery& x) {
  ordered_json out = ordered_json::array();
  for (int i = 0; i < x.size(); ++i) {
    ordered_json row = ordered_json::array();
    for (const auto& v : x.row(i)) row.push_back(v.str());
    out.push_back(std::move(row));
  }
  return out;
}

ordered_json serialize_document(const Document& doc) {
  ordered_json out;
  out["kind"] = kind_name(doc.kind);
  switch (doc.kind) {
    case Kind::Voting: {
      const auto& inst = std::get<VotingInstance>(doc.instance);
      out["alternatives"] = strings(doc.option_names);
      out["agents"] = agents_json(doc.agent_names, inst.profile(), inst.quantiles(), doc.option_names);
      break;
    }
    case Kind::OneSided: {
      const auto& inst = std::get<OneSidedInstance>(doc.instance);
      out["items"] = strings(doc.option_names);
      out["agents"] = agents_json(doc.agent_names, inst.profile(), inst.quantiles(), doc.option_names);
      break;
    }
    case Kind::TwoSided: {
      const auto& inst = std::get<TwoSidedInstance>(doc.instance);
      out["n_side"] = agents_json(doc.agent_names, inst.preferences(Side::Rows), inst.quantiles(Side::Rows), doc.option_names);
      out["m_side"] =
          agents_json(doc.option_names, inst.preferences(Side::Columns), inst.quantiles(Side::Columns), doc.agent_names);
      break;
    }
    case Kind::LotteryQuery: {
      const auto& q = std::get<LotteryQuery>(doc.instance);
      out["alternatives"] = strings(doc.option_names);
      out["preference"] = preference_json(q.preference, doc.option_names);
      out["h"] = q.h.value().str();
      out["x"] = lottery_json(q.x);
      if (q.y) out["y"] = lottery_json(*q.y);
      break;
    }
  }
  if (doc.lottery) out["lottery"] = std::visit([](const auto& x) { return lottery_json(x); }, *doc.lottery);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string digest(const Document& doc) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize_document(doc).dump())));
  return std::string("fnv1a64:") + hex;
}

Document with_h_override(const Document& doc, const Quantile& h) {
  Document out = doc;
  const int n = static_cast<int>(doc.agent_names.size());
  switch (doc.kind) {
    case Kind::Voting: {
      const auto& inst = std::get<VotingInstance>(doc.instance);
      out.instance = VotingInstance(inst.profile(), std::vector<Quantile>(static_cast<std::size_t>(n), h));
      break;
    }
    case Kind::OneSided: {
      const auto& inst = std::get<OneSidedInstance>(doc.instance);
      out.instance = OneSidedInstance(inst.profile(), std::vector<Quantile>(static_cast<std::size_t>(n), h));
      break;
    }
    case Kind::TwoSided: {
      const auto& inst = std::get<TwoSidedInstance>(doc.instance);
      const std::vector<Quantile> all(static_cast<std::size_t>(n), h);
      out.instance = TwoSidedInstance(inst.preferences(Side::Rows), all, inst.preferences(Side::Columns), all);
      break;
    }
    case Kind::LotteryQuery:
      std::get<LotteryQuery>(out.instance).h = h;
      break;
  }
  return out;
}

}  // namespace qsc::io
