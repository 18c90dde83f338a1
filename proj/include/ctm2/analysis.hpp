#pragma once

// Radar, ring, comparison, gap and what-if analyses over scored assessments.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ctm2/error.hpp"
#include "ctm2/json_io.hpp"
#include "ctm2/model.hpp"
#include "ctm2/scoring.hpp"
#include "ctm2/timestamp.hpp"

namespace ctm2 {

// Binding shared by every report: which model and policy produced it.
struct ReportHeader {
  std::string model_id;
  std::string model_version;
  ScoringPolicy policy = ScoringPolicy::Strict;
  Timestamp generated_at;

  friend bool operator==(const ReportHeader&, const ReportHeader&) = default;
};

struct DomainLabel {
  std::string id;
  std::string name;

  friend bool operator==(const DomainLabel&, const DomainLabel&) = default;
};

struct RadarEntry {
  std::string assessment_id;
  std::string testbed;
  std::vector<int> mils;  // catalog domain order

  friend bool operator==(const RadarEntry&, const RadarEntry&) = default;
};

struct RadarReport {
  ReportHeader header;
  int max_level = kDefaultMaxLevel;
  std::vector<DomainLabel> domains;
  std::vector<RadarEntry> entries;

  friend bool operator==(const RadarReport&, const RadarReport&) = default;
};

struct StateCounts {
  std::size_t full = 0;
  std::size_t partial = 0;
  std::size_t none = 0;
  std::size_t not_assessed = 0;

  std::size_t total() const { return full + partial + none + not_assessed; }

  std::size_t of(ImplementationState s) const {
    switch (s) {
      case ImplementationState::Full: return full;
      case ImplementationState::Partial: return partial;
      case ImplementationState::None: return none;
      case ImplementationState::NotAssessed: return not_assessed;
    }
    return 0;
  }

  void add(ImplementationState s) {
    switch (s) {
      case ImplementationState::Full: ++full; break;
      case ImplementationState::Partial: ++partial; break;
      case ImplementationState::None: ++none; break;
      case ImplementationState::NotAssessed: ++not_assessed; break;
    }
  }

  StateCounts& operator+=(const StateCounts& o) {
    full += o.full;
    partial += o.partial;
    none += o.none;
    not_assessed += o.not_assessed;
    return *this;
  }

  friend bool operator==(const StateCounts&, const StateCounts&) = default;
};

// One level of a domain ring. `segment` counts criteria introduced at this
// level; `cumulative` counts criteria at this level and every level below.
struct RingLevel {
  int level = 1;
  std::size_t cumulative_total = 0;
  std::size_t introduced = 0;
  StateCounts segment;
  StateCounts cumulative;

  friend bool operator==(const RingLevel&, const RingLevel&) = default;
};

struct RingDomain {
  std::string domain_id;
  std::string name;
  int achieved_mil = 0;
  std::vector<RingLevel> levels;

  friend bool operator==(const RingDomain&, const RingDomain&) = default;
};

// Always describes exactly one assessment; rings never combine testbeds.
struct RingReport {
  ReportHeader header;
  std::string assessment_id;
  std::string testbed;
  int max_level = kDefaultMaxLevel;
  std::vector<RingDomain> domains;

  friend bool operator==(const RingReport&, const RingReport&) = default;

  const RingDomain& domain(std::string_view domain_id) const {
    for (const auto& d : domains) {
      if (d.domain_id == domain_id) return d;
    }
    throw Error(ErrorCode::NotFound,
                "ring report has no domain '" + std::string(domain_id) + "'");
  }
};

struct MatrixRow {
  std::string assessment_id;
  std::string testbed;
  std::string institute;
  std::string sector;
  std::vector<int> mils;

  friend bool operator==(const MatrixRow&, const MatrixRow&) = default;
};

struct ComparisonMatrix {
  ReportHeader header;
  std::vector<DomainLabel> domains;
  std::vector<MatrixRow> rows;

  friend bool operator==(const ComparisonMatrix&, const ComparisonMatrix&) =
      default;
};

struct BlockingCriterion {
  std::string id;
  std::string text;
  ImplementationState state = ImplementationState::NotAssessed;

  friend bool operator==(const BlockingCriterion&, const BlockingCriterion&) =
      default;
};

struct GapDomain {
  std::string domain_id;
  std::string name;
  int achieved_mil = 0;
  std::optional<int> target_level;  // absent at the ceiling
  std::vector<BlockingCriterion> blocking;

  friend bool operator==(const GapDomain&, const GapDomain&) = default;
};

struct GapReport {
  ReportHeader header;
  std::string assessment_id;
  std::string testbed;
  int max_level = kDefaultMaxLevel;
  std::vector<GapDomain> domains;

  friend bool operator==(const GapReport&, const GapReport&) = default;
};

struct DomainDelta {
  std::string domain_id;
  int before = 0;
  int after = 0;
  int delta = 0;

  friend bool operator==(const DomainDelta&, const DomainDelta&) = default;
};

struct WhatIfResult {
  Scorecard before;
  Scorecard after;
  std::vector<DomainDelta> deltas;

  friend bool operator==(const WhatIfResult&, const WhatIfResult&) = default;
};

// ---------------------------------------------------------------------------

namespace detail {

inline ReportHeader header_for(const MaturityModel& model,
                               ScoringPolicy policy, Timestamp generated_at) {
  return ReportHeader{model.id, model.version, policy, generated_at};
}

inline std::vector<DomainLabel> domain_labels(const MaturityModel& model) {
  std::vector<DomainLabel> out;
  for (const auto& d : model.domains) out.push_back({d.id, d.name});
  return out;
}

inline std::vector<int> mils_of(const Scorecard& card) {
  std::vector<int> out;
  for (const auto& d : card.domains) out.push_back(d.achieved_mil);
  return out;
}

inline void require_non_empty(const std::vector<Assessment>& assessments) {
  if (assessments.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "analysis needs at least one assessment");
  }
}

}  // namespace detail

inline RadarReport radar_analysis(const MaturityModel& model,
                                  const std::vector<Assessment>& assessments,
                                  ScoringPolicy policy = ScoringPolicy::Strict,
                                  Timestamp generated_at = Timestamp::now()) {
  detail::require_non_empty(assessments);
  RadarReport report;
  report.header = detail::header_for(model, policy, generated_at);
  report.max_level = model.max_level;
  report.domains = detail::domain_labels(model);
  for (const auto& a : assessments) {
    auto card = score_assessment(model, a, policy, generated_at);
    report.entries.push_back({a.id, a.meta.name, detail::mils_of(card)});
  }
  return report;
}

inline ComparisonMatrix compare(const MaturityModel& model,
                                const std::vector<Assessment>& assessments,
                                ScoringPolicy policy = ScoringPolicy::Strict,
                                Timestamp generated_at = Timestamp::now()) {
  detail::require_non_empty(assessments);
  ComparisonMatrix matrix;
  matrix.header = detail::header_for(model, policy, generated_at);
  matrix.domains = detail::domain_labels(model);
  for (const auto& a : assessments) {
    auto card = score_assessment(model, a, policy, generated_at);
    matrix.rows.push_back({a.id, a.meta.name, a.meta.institute, a.meta.sector,
                           detail::mils_of(card)});
  }
  return matrix;
}

inline RingReport ring_analysis(const MaturityModel& model,
                                const Assessment& assessment,
                                ScoringPolicy policy = ScoringPolicy::Strict,
                                Timestamp generated_at = Timestamp::now()) {
  auto card = score_assessment(model, assessment, policy, generated_at);
  RingReport report;
  report.header = detail::header_for(model, policy, generated_at);
  report.assessment_id = assessment.id;
  report.testbed = assessment.meta.name;
  report.max_level = model.max_level;
  for (std::size_t di = 0; di < model.domains.size(); ++di) {
    const Domain& d = model.domains[di];
    RingDomain ring;
    ring.domain_id = d.id;
    ring.name = d.name;
    ring.achieved_mil = card.domains[di].achieved_mil;
    StateCounts running;
    for (int level = 1; level <= model.max_level; ++level) {
      RingLevel rl;
      rl.level = level;
      for (const auto& c : d.criteria) {
        if (c.level == level) rl.segment.add(assessment.state_of(c.id));
      }
      rl.introduced = rl.segment.total();
      running += rl.segment;
      rl.cumulative = running;
      rl.cumulative_total = running.total();
      ring.levels.push_back(rl);
    }
    report.domains.push_back(std::move(ring));
  }
  return report;
}

// Blocking criteria are the unsatisfied ones at levels <= achieved + 1.
inline GapReport gap_analysis(const MaturityModel& model,
                              const Assessment& assessment,
                              ScoringPolicy policy = ScoringPolicy::Strict,
                              Timestamp generated_at = Timestamp::now()) {
  auto card = score_assessment(model, assessment, policy, generated_at);
  GapReport report;
  report.header = detail::header_for(model, policy, generated_at);
  report.assessment_id = assessment.id;
  report.testbed = assessment.meta.name;
  report.max_level = model.max_level;
  for (std::size_t di = 0; di < model.domains.size(); ++di) {
    const Domain& d = model.domains[di];
    GapDomain gap;
    gap.domain_id = d.id;
    gap.name = d.name;
    gap.achieved_mil = card.domains[di].achieved_mil;
    if (gap.achieved_mil < model.max_level) {
      gap.target_level = gap.achieved_mil + 1;
      for (const auto& c : d.criteria) {
        const auto state = assessment.state_of(c.id);
        if (c.level <= *gap.target_level && !is_satisfied(state, policy)) {
          gap.blocking.push_back({c.id, c.text, state});
        }
      }
    }
    report.domains.push_back(std::move(gap));
  }
  return report;
}

inline WhatIfResult what_if(const MaturityModel& model,
                            const Assessment& assessment,
                            ScoringPolicy policy, const Responses& changes,
                            Timestamp generated_at = Timestamp::now()) {
  check_binding(model, assessment);
  for (const auto& [id, state] : changes) {
    if (!model.find_criterion(id)) {
      throw Error(ErrorCode::NotFound, "what-if change references unknown "
                                       "criterion '" + id + "'");
    }
  }
  WhatIfResult result;
  result.before = score_assessment(model, assessment, policy, generated_at);
  Responses overlaid = assessment.responses;
  for (const auto& [id, state] : changes) overlaid[id] = state;
  result.after = score_responses(model, assessment.id, overlaid, policy,
                                 generated_at);
  for (std::size_t i = 0; i < result.before.domains.size(); ++i) {
    const int b = result.before.domains[i].achieved_mil;
    const int a = result.after.domains[i].achieved_mil;
    result.deltas.push_back(
        {result.before.domains[i].domain_id, b, a, a - b});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Report codecs

inline Json header_fields(const ReportHeader& h) {
  return Json{{"model_id", h.model_id},
              {"model_version", h.model_version},
              {"policy", to_string(h.policy)},
              {"generated_at", to_iso8601(h.generated_at)}};
}

inline Json to_json(const std::vector<DomainLabel>& labels) {
  Json out = Json::array();
  for (const auto& l : labels) out.push_back(Json{{"id", l.id}, {"name", l.name}});
  return out;
}

inline Json to_json(const StateCounts& c) {
  return Json{{"full", c.full},
              {"partial", c.partial},
              {"none", c.none},
              {"not_assessed", c.not_assessed}};
}

inline Json to_json(const RadarReport& r) {
  Json j{{"report", "radar"}};
  j.update(header_fields(r.header));
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    entries.push_back(Json{{"assessment_id", e.assessment_id},
                           {"testbed", e.testbed},
                           {"mils", e.mils}});
  }
  j["max_level"] = r.max_level;
  j["domains"] = to_json(r.domains);
  j["entries"] = std::move(entries);
  return j;
}

inline Json to_json(const RingReport& r) {
  Json j{{"report", "ring"}};
  j.update(header_fields(r.header));
  j["assessment_id"] = r.assessment_id;
  j["testbed"] = r.testbed;
  j["max_level"] = r.max_level;
  Json domains = Json::array();
  for (const auto& d : r.domains) {
    Json levels = Json::array();
    for (const auto& l : d.levels) {
      levels.push_back(Json{{"level", l.level},
                            {"cumulative_total", l.cumulative_total},
                            {"introduced", l.introduced},
                            {"segment", to_json(l.segment)},
                            {"cumulative", to_json(l.cumulative)}});
    }
    domains.push_back(Json{{"domain_id", d.domain_id},
                           {"name", d.name},
                           {"achieved_mil", d.achieved_mil},
                           {"levels", std::move(levels)}});
  }
  j["domains"] = std::move(domains);
  return j;
}

inline Json to_json(const ComparisonMatrix& m) {
  Json j{{"report", "compare"}};
  j.update(header_fields(m.header));
  j["domains"] = to_json(m.domains);
  Json rows = Json::array();
  for (const auto& row : m.rows) {
    rows.push_back(Json{{"assessment_id", row.assessment_id},
                        {"testbed", row.testbed},
                        {"institute", row.institute},
                        {"sector", row.sector},
                        {"mils", row.mils}});
  }
  j["rows"] = std::move(rows);
  return j;
}

inline Json to_json(const GapReport& g) {
  Json j{{"report", "gap"}};
  j.update(header_fields(g.header));
  j["assessment_id"] = g.assessment_id;
  j["testbed"] = g.testbed;
  j["max_level"] = g.max_level;
  Json domains = Json::array();
  for (const auto& d : g.domains) {
    Json blocking = Json::array();
    for (const auto& b : d.blocking) {
      blocking.push_back(
          Json{{"id", b.id}, {"text", b.text}, {"state", to_string(b.state)}});
    }
    domains.push_back(Json{
        {"domain_id", d.domain_id},
        {"name", d.name},
        {"achieved_mil", d.achieved_mil},
        {"target_level",
         d.target_level ? Json(*d.target_level) : Json(nullptr)},
        {"blocking", std::move(blocking)}});
  }
  j["domains"] = std::move(domains);
  return j;
}

inline Json to_json(const WhatIfResult& w) {
  Json deltas = Json::array();
  for (const auto& d : w.deltas) {
    deltas.push_back(Json{{"domain_id", d.domain_id},
                          {"before", d.before},
                          {"after", d.after},
                          {"delta", d.delta}});
  }
  return Json{{"before", to_json(w.before)},
              {"after", to_json(w.after)},
              {"deltas", std::move(deltas)}};
}

namespace detail {

inline void expect_report_kind(const json_io::ObjectReader& r,
                               std::string_view kind) {
  if (r.string("report") != kind) {
    throw Error(ErrorCode::Parse, "report: expected '" + std::string(kind) +
                                      "' report, got '" + r.string("report") +
                                      "'");
  }
}

inline ReportHeader header_from(const json_io::ObjectReader& r) {
  return ReportHeader{r.string("model_id"), r.string("model_version"),
                      policy_field(r), parse_iso8601(r.string("generated_at"))};
}

inline std::vector<DomainLabel> labels_from(const Json& arr,
                                            const std::string& path) {
  std::vector<DomainLabel> out;
  json_io::as_array(arr, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    json_io::ObjectReader lr(arr[i], json_io::index(path, i), {"id", "name"});
    out.push_back({lr.string("id"), lr.string("name")});
  }
  return out;
}

inline std::vector<int> ints_from(const Json& arr, const std::string& path) {
  std::vector<int> out;
  json_io::as_array(arr, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(static_cast<int>(
        json_io::as_int(arr[i], json_io::index(path, i))));
  }
  return out;
}

inline StateCounts counts_from(const Json& j, const std::string& path) {
  json_io::ObjectReader r(j, path, {"full", "partial", "none", "not_assessed"});
  return StateCounts{count_field(r, "full"), count_field(r, "partial"),
                     count_field(r, "none"), count_field(r, "not_assessed")};
}

inline std::optional<int> optional_int(const json_io::ObjectReader& r,
                                       std::string_view key) {
  if (r.at(key).is_null()) return std::nullopt;
  return static_cast<int>(r.integer(key));
}

}  // namespace detail

inline RadarReport radar_from_json(const Json& j) {
  using json_io::ObjectReader;
  ObjectReader r(j, "",
                 {"report", "model_id", "model_version", "policy",
                  "generated_at", "max_level", "domains", "entries"});
  detail::expect_report_kind(r, "radar");
  RadarReport out;
  out.header = detail::header_from(r);
  out.max_level = static_cast<int>(r.integer("max_level"));
  out.domains = detail::labels_from(r.at("domains"), "domains");
  const auto& entries = r.array("entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto path = json_io::index("entries", i);
    ObjectReader er(entries[i], path, {"assessment_id", "testbed", "mils"});
    out.entries.push_back({er.string("assessment_id"), er.string("testbed"),
                           detail::ints_from(er.at("mils"), er.path("mils"))});
  }
  return out;
}

inline RingReport ring_from_json(const Json& j) {
  using json_io::ObjectReader;
  ObjectReader r(j, "",
                 {"report", "model_id", "model_version", "policy",
                  "generated_at", "assessment_id", "testbed", "max_level",
                  "domains"});
  detail::expect_report_kind(r, "ring");
  RingReport out;
  out.header = detail::header_from(r);
  out.assessment_id = r.string("assessment_id");
  out.testbed = r.string("testbed");
  out.max_level = static_cast<int>(r.integer("max_level"));
  const auto& domains = r.array("domains");
  for (std::size_t i = 0; i < domains.size(); ++i) {
    ObjectReader dr(domains[i], json_io::index("domains", i),
                    {"domain_id", "name", "achieved_mil", "levels"});
    RingDomain d;
    d.domain_id = dr.string("domain_id");
    d.name = dr.string("name");
    d.achieved_mil = static_cast<int>(dr.integer("achieved_mil"));
    const auto& levels = dr.array("levels");
    for (std::size_t k = 0; k < levels.size(); ++k) {
      ObjectReader lr(levels[k], json_io::index(dr.path("levels"), k),
                      {"level", "cumulative_total", "introduced", "segment",
                       "cumulative"});
      RingLevel l;
      l.level = static_cast<int>(lr.integer("level"));
      l.cumulative_total = detail::count_field(lr, "cumulative_total");
      l.introduced = detail::count_field(lr, "introduced");
      l.segment = detail::counts_from(lr.at("segment"), lr.path("segment"));
      l.cumulative =
          detail::counts_from(lr.at("cumulative"), lr.path("cumulative"));
      d.levels.push_back(l);
    }
    out.domains.push_back(std::move(d));
  }
  return out;
}

inline ComparisonMatrix matrix_from_json(const Json& j) {
  using json_io::ObjectReader;
  ObjectReader r(j, "",
                 {"report", "model_id", "model_version", "policy",
                  "generated_at", "domains", "rows"});
  detail::expect_report_kind(r, "compare");
  ComparisonMatrix out;
  out.header = detail::header_from(r);
  out.domains = detail::labels_from(r.at("domains"), "domains");
  const auto& rows = r.array("rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ObjectReader rr(rows[i], json_io::index("rows", i),
                    {"assessment_id", "testbed", "institute", "sector",
                     "mils"});
    out.rows.push_back({rr.string("assessment_id"), rr.string("testbed"),
                        rr.string("institute"), rr.string("sector"),
                        detail::ints_from(rr.at("mils"), rr.path("mils"))});
  }
  return out;
}

inline GapReport gap_from_json(const Json& j) {
  using json_io::ObjectReader;
  ObjectReader r(j, "",
                 {"report", "model_id", "model_version", "policy",
                  "generated_at", "assessment_id", "testbed", "max_level",
                  "domains"});
  detail::expect_report_kind(r, "gap");
  GapReport out;
  out.header = detail::header_from(r);
  out.assessment_id = r.string("assessment_id");
  out.testbed = r.string("testbed");
  out.max_level = static_cast<int>(r.integer("max_level"));
  const auto& domains = r.array("domains");
  for (std::size_t i = 0; i < domains.size(); ++i) {
    ObjectReader dr(domains[i], json_io::index("domains", i),
                    {"domain_id", "name", "achieved_mil", "target_level",
                     "blocking"});
    GapDomain d;
    d.domain_id = dr.string("domain_id");
    d.name = dr.string("name");
    d.achieved_mil = static_cast<int>(dr.integer("achieved_mil"));
    d.target_level = detail::optional_int(dr, "target_level");
    const auto& blocking = dr.array("blocking");
    for (std::size_t k = 0; k < blocking.size(); ++k) {
      ObjectReader br(blocking[k], json_io::index(dr.path("blocking"), k),
                      {"id", "text", "state"});
      auto state = state_from_string(br.string("state"));
      if (!state) {
        throw Error(ErrorCode::Parse, br.path("state") + ": unknown state");
      }
      d.blocking.push_back({br.string("id"), br.string("text"), *state});
    }
    out.domains.push_back(std::move(d));
  }
  return out;
}

template <typename Report>
std::string serialize_report(const Report& report) {
  return json_io::dump(to_json(report));
}

}  // namespace ctm2
