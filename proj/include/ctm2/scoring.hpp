#pragma once

// MIL scoring. A domain earns MIL m when every criterion introduced at
// levels 1..m is satisfied under the scoring policy; MIL0 is unconditional.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ctm2/error.hpp"
#include "ctm2/json_io.hpp"
#include "ctm2/model.hpp"
#include "ctm2/timestamp.hpp"

namespace ctm2 {

enum class ImplementationState { NotAssessed, None, Partial, Full };

inline constexpr std::array<ImplementationState, 4> kAllStates = {
    ImplementationState::NotAssessed, ImplementationState::None,
    ImplementationState::Partial, ImplementationState::Full};

// Upgrade order: None == NotAssessed < Partial < Full.
inline int rank(ImplementationState s) {
  switch (s) {
    case ImplementationState::Full: return 2;
    case ImplementationState::Partial: return 1;
    default: return 0;
  }
}

inline const char* to_string(ImplementationState s) {
  switch (s) {
    case ImplementationState::Full: return "full";
    case ImplementationState::Partial: return "partial";
    case ImplementationState::None: return "none";
    case ImplementationState::NotAssessed: return "not_assessed";
  }
  return "not_assessed";
}

inline std::optional<ImplementationState> state_from_string(
    std::string_view s) {
  for (auto st : kAllStates) {
    if (s == to_string(st)) return st;
  }
  return std::nullopt;
}

enum class Classification { Physical, Simulation, Virtual, Hybrid };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::Physical: return "Physical";
    case Classification::Simulation: return "Simulation";
    case Classification::Virtual: return "Virtual";
    case Classification::Hybrid: return "Hybrid";
  }
  return "Hybrid";
}

inline std::optional<Classification> classification_from_string(
    std::string_view s) {
  for (auto c : {Classification::Physical, Classification::Simulation,
                 Classification::Virtual, Classification::Hybrid}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

enum class ScoringPolicy { Strict, Lenient };

inline const char* to_string(ScoringPolicy p) {
  return p == ScoringPolicy::Strict ? "strict" : "lenient";
}

inline std::optional<ScoringPolicy> policy_from_string(std::string_view s) {
  if (s == "strict") return ScoringPolicy::Strict;
  if (s == "lenient") return ScoringPolicy::Lenient;
  return std::nullopt;
}

inline bool is_satisfied(ImplementationState s, ScoringPolicy policy) {
  if (s == ImplementationState::Full) return true;
  return policy == ScoringPolicy::Lenient &&
         s == ImplementationState::Partial;
}

struct TestbedMeta {
  std::string name;
  std::string institute;
  std::string sector;
  Classification classification = Classification::Hybrid;
  std::string notes;

  friend bool operator==(const TestbedMeta&, const TestbedMeta&) = default;
};

// Keyed by criterion id; criteria absent from the map count as NotAssessed.
using Responses = std::map<std::string, ImplementationState>;

struct Assessment {
  std::string id;
  std::string model_id;
  std::string model_version;
  TestbedMeta meta;
  Responses responses;
  Timestamp created;
  Timestamp modified;
  std::optional<std::string> fixture_note;

  friend bool operator==(const Assessment&, const Assessment&) = default;

  ImplementationState state_of(const std::string& criterion_id) const {
    auto it = responses.find(criterion_id);
    return it == responses.end() ? ImplementationState::NotAssessed
                                 : it->second;
  }
};

struct LevelBreakdown {
  std::size_t introduced = 0;
  std::size_t satisfied = 0;
  std::size_t full = 0;
  std::size_t partial = 0;
  std::size_t none = 0;
  std::size_t not_assessed = 0;

  friend bool operator==(const LevelBreakdown&, const LevelBreakdown&) =
      default;
};

struct DomainScore {
  std::string domain_id;
  int achieved_mil = 0;
  std::map<int, LevelBreakdown> per_level;
  std::optional<int> blocking_level;

  friend bool operator==(const DomainScore&, const DomainScore&) = default;
};

struct Scorecard {
  std::string assessment_id;
  std::string model_id;
  std::string model_version;
  ScoringPolicy policy = ScoringPolicy::Strict;
  Timestamp generated_at;
  std::vector<DomainScore> domains;
  std::vector<std::string> warnings;

  friend bool operator==(const Scorecard&, const Scorecard&) = default;

  const DomainScore& domain(std::string_view domain_id) const {
    for (const auto& d : domains) {
      if (d.domain_id == domain_id) return d;
    }
    throw Error(ErrorCode::NotFound,
                "scorecard has no domain '" + std::string(domain_id) + "'");
  }
};

// ---------------------------------------------------------------------------

// Rejects response keys that do not name a criterion of `model`.
inline void check_response_keys(const MaturityModel& model,
                                const Responses& responses) {
  if (responses.empty()) return;
  std::set<std::string_view> ids;
  for (const auto& d : model.domains) {
    for (const auto& c : d.criteria) ids.insert(c.id);
  }
  for (const auto& [key, state] : responses) {
    if (!ids.count(key)) {
      throw Error(ErrorCode::NotFound,
                  "response key '" + key +
                      "' does not reference a criterion of model " +
                      model.id + " " + model.version);
    }
  }
}

inline void check_binding(const MaturityModel& model,
                          const Assessment& assessment) {
  if (assessment.model_id != model.id ||
      assessment.model_version != model.version) {
    throw Error(ErrorCode::Binding,
                "assessment " + assessment.id + " is bound to " +
                    assessment.model_id + " " + assessment.model_version +
                    ", not " + model.id + " " + model.version);
  }
}

namespace detail {

inline ImplementationState lookup(const Responses& responses,
                                  const std::string& id) {
  auto it = responses.find(id);
  return it == responses.end() ? ImplementationState::NotAssessed : it->second;
}

inline DomainScore score_domain_unchecked(const MaturityModel& model,
                                          const Domain& domain,
                                          const Responses& responses,
                                          ScoringPolicy policy) {
  DomainScore score;
  score.domain_id = domain.id;
  for (int level = 1; level <= model.max_level; ++level) {
    score.per_level[level] = {};
  }
  for (const auto& c : domain.criteria) {
    auto it = score.per_level.find(c.level);
    if (it == score.per_level.end()) continue;
    LevelBreakdown& b = it->second;
    const auto state = lookup(responses, c.id);
    ++b.introduced;
    if (is_satisfied(state, policy)) ++b.satisfied;
    switch (state) {
      case ImplementationState::Full: ++b.full; break;
      case ImplementationState::Partial: ++b.partial; break;
      case ImplementationState::None: ++b.none; break;
      case ImplementationState::NotAssessed: ++b.not_assessed; break;
    }
  }
  score.achieved_mil = model.max_level;
  for (const auto& [level, b] : score.per_level) {
    if (b.satisfied < b.introduced) {
      score.achieved_mil = level - 1;
      score.blocking_level = level;
      break;
    }
  }
  return score;
}

}  // namespace detail

inline DomainScore score_domain(const MaturityModel& model,
                                std::string_view domain_id,
                                const Responses& responses,
                                ScoringPolicy policy = ScoringPolicy::Strict) {
  const Domain& domain = model.domain(domain_id);
  check_response_keys(model, responses);
  return detail::score_domain_unchecked(model, domain, responses, policy);
}

inline std::size_t count_not_assessed(const MaturityModel& model,
                                      const Responses& responses) {
  std::size_t n = 0;
  for (const auto& d : model.domains) {
    for (const auto& c : d.criteria) {
      if (detail::lookup(responses, c.id) == ImplementationState::NotAssessed)
        ++n;
    }
  }
  return n;
}

inline Scorecard score_responses(const MaturityModel& model,
                                 const std::string& assessment_id,
                                 const Responses& responses,
                                 ScoringPolicy policy, Timestamp generated_at) {
  check_response_keys(model, responses);
  Scorecard card;
  card.assessment_id = assessment_id;
  card.model_id = model.id;
  card.model_version = model.version;
  card.policy = policy;
  card.generated_at = generated_at;
  for (const auto& d : model.domains) {
    card.domains.push_back(
        detail::score_domain_unchecked(model, d, responses, policy));
  }
  if (auto n = count_not_assessed(model, responses); n > 0) {
    card.warnings.push_back(std::to_string(n) + " criteria not assessed");
  }
  return card;
}

inline Scorecard score_assessment(const MaturityModel& model,
                                  const Assessment& assessment,
                                  ScoringPolicy policy = ScoringPolicy::Strict,
                                  Timestamp generated_at = Timestamp::now()) {
  check_binding(model, assessment);
  return score_responses(model, assessment.id, assessment.responses, policy,
                         generated_at);
}

// Number of criteria at levels <= target_mil that are not yet satisfied.
inline std::size_t upgrade_distance(const MaturityModel& model,
                                    std::string_view domain_id,
                                    const Responses& responses,
                                    ScoringPolicy policy, int target_mil) {
  const Domain& domain = model.domain(domain_id);
  if (target_mil < 0 || target_mil > model.max_level) {
    throw Error(ErrorCode::InvalidArgument,
                "target MIL " + std::to_string(target_mil) + " outside 0.." +
                    std::to_string(model.max_level));
  }
  check_response_keys(model, responses);
  std::size_t n = 0;
  for (const auto& c : domain.criteria) {
    if (c.level <= target_mil &&
        !is_satisfied(detail::lookup(responses, c.id), policy)) {
      ++n;
    }
  }
  return n;
}

// ---------------------------------------------------------------------------
// Assessment codec

inline Json to_json(const TestbedMeta& m) {
  return Json{{"name", m.name},
              {"institute", m.institute},
              {"sector", m.sector},
              {"classification", to_string(m.classification)},
              {"notes", m.notes}};
}

inline Json to_json(const Responses& responses) {
  Json out = Json::object();
  for (const auto& [id, state] : responses) out[id] = to_string(state);
  return out;
}

inline Json to_json(const Assessment& a) {
  Json j{{"id", a.id},
         {"model_id", a.model_id},
         {"model_version", a.model_version},
         {"meta", to_json(a.meta)},
         {"responses", to_json(a.responses)},
         {"created", to_iso8601(a.created)},
         {"modified", to_iso8601(a.modified)}};
  if (a.fixture_note) j["fixture_note"] = *a.fixture_note;
  return j;
}

inline Responses responses_from_json(const Json& j, const std::string& path) {
  Responses out;
  json_io::as_object(j, path);
  for (const auto& item : j.items()) {
    const std::string where = json_io::join(path, item.key());
    auto state = state_from_string(json_io::as_string(item.value(), where));
    if (!state) {
      throw Error(ErrorCode::Parse,
                  where + ": unknown state '" + item.value().get<std::string>() +
                      "' (expected full|partial|none|not_assessed)");
    }
    out[item.key()] = *state;
  }
  return out;
}

inline Assessment assessment_from_json(const Json& j) {
  using json_io::ObjectReader;
  ObjectReader root(j, "",
                    {"id", "model_id", "model_version", "meta", "responses",
                     "created", "modified", "fixture_note"});
  Assessment a;
  a.id = root.string("id");
  a.model_id = root.string("model_id");
  a.model_version = root.string("model_version");
  ObjectReader meta(root.object("meta"), "meta",
                    {"name", "institute", "sector", "classification", "notes"});
  a.meta.name = meta.string("name");
  a.meta.institute = meta.has("institute") ? meta.string("institute") : "";
  a.meta.sector = meta.has("sector") ? meta.string("sector") : "";
  const std::string cls = meta.string("classification");
  auto parsed = classification_from_string(cls);
  if (!parsed) {
    throw Error(ErrorCode::Parse,
                "meta.classification: unknown classification '" + cls +
                    "' (expected Physical|Simulation|Virtual|Hybrid)");
  }
  a.meta.classification = *parsed;
  a.meta.notes = meta.has("notes") ? meta.string("notes") : "";
  a.responses = responses_from_json(root.at("responses"), "responses");
  a.created = parse_iso8601(root.string("created"));
  a.modified = parse_iso8601(root.string("modified"));
  if (root.has("fixture_note")) a.fixture_note = root.string("fixture_note");
  if (a.meta.name.empty()) {
    throw Error(ErrorCode::Parse, "meta.name: testbed name is empty");
  }
  return a;
}

inline Assessment parse_assessment(std::string_view source) {
  return assessment_from_json(json_io::parse_document(source, "assessment"));
}

inline std::string serialize_assessment(const Assessment& a) {
  return json_io::dump(to_json(a));
}

// ---------------------------------------------------------------------------
// Scorecard codec

inline Json to_json(const DomainScore& s) {
  Json levels = Json::array();
  for (const auto& [level, b] : s.per_level) {
    levels.push_back(Json{{"level", level},
                          {"introduced", b.introduced},
                          {"satisfied", b.satisfied},
                          {"full", b.full},
                          {"partial", b.partial},
                          {"none", b.none},
                          {"not_assessed", b.not_assessed}});
  }
  return Json{{"domain_id", s.domain_id},
              {"achieved_mil", s.achieved_mil},
              {"blocking_level", s.blocking_level ? Json(*s.blocking_level)
                                                  : Json(nullptr)},
              {"per_level", std::move(levels)}};
}

inline Json to_json(const Scorecard& card) {
  Json domains = Json::array();
  for (const auto& d : card.domains) domains.push_back(to_json(d));
  return Json{{"assessment_id", card.assessment_id},
              {"model_id", card.model_id},
              {"model_version", card.model_version},
              {"policy", to_string(card.policy)},
              {"generated_at", to_iso8601(card.generated_at)},
              {"domains", std::move(domains)},
              {"warnings", card.warnings}};
}

namespace detail {

inline ScoringPolicy policy_field(const json_io::ObjectReader& r) {
  const auto text = r.string("policy");
  auto p = policy_from_string(text);
  if (!p) throw Error(ErrorCode::Parse, "policy: unknown policy '" + text + "'");
  return *p;
}

inline std::size_t count_field(const json_io::ObjectReader& r,
                               std::string_view key) {
  auto v = r.integer(key);
  if (v < 0) throw Error(ErrorCode::Parse, r.path(key) + ": negative count");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline DomainScore domain_score_from_json(const Json& j,
                                          const std::string& path) {
  using json_io::ObjectReader;
  ObjectReader r(j, path,
                 {"domain_id", "achieved_mil", "blocking_level", "per_level"});
  DomainScore s;
  s.domain_id = r.string("domain_id");
  s.achieved_mil = static_cast<int>(r.integer("achieved_mil"));
  if (!r.at("blocking_level").is_null()) {
    s.blocking_level = static_cast<int>(r.integer("blocking_level"));
  }
  const auto& levels = r.array("per_level");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    ObjectReader lr(levels[i], json_io::index(r.path("per_level"), i),
                    {"level", "introduced", "satisfied", "full", "partial",
                     "none", "not_assessed"});
    LevelBreakdown b;
    b.introduced = detail::count_field(lr, "introduced");
    b.satisfied = detail::count_field(lr, "satisfied");
    b.full = detail::count_field(lr, "full");
    b.partial = detail::count_field(lr, "partial");
    b.none = detail::count_field(lr, "none");
    b.not_assessed = detail::count_field(lr, "not_assessed");
    s.per_level[static_cast<int>(lr.integer("level"))] = b;
  }
  return s;
}

inline Scorecard scorecard_from_json(const Json& j) {
  using json_io::ObjectReader;
  ObjectReader r(j, "",
                 {"assessment_id", "model_id", "model_version", "policy",
                  "generated_at", "domains", "warnings"});
  Scorecard card;
  card.assessment_id = r.string("assessment_id");
  card.model_id = r.string("model_id");
  card.model_version = r.string("model_version");
  card.policy = detail::policy_field(r);
  card.generated_at = parse_iso8601(r.string("generated_at"));
  const auto& domains = r.array("domains");
  for (std::size_t i = 0; i < domains.size(); ++i) {
    card.domains.push_back(
        domain_score_from_json(domains[i], json_io::index("domains", i)));
  }
  card.warnings = r.strings("warnings");
  return card;
}

inline std::string serialize_scorecard(const Scorecard& card) {
  return json_io::dump(to_json(card));
}

}  // namespace ctm2
