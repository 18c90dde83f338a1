#pragma once

// Maturity-model catalogs: a versioned set of domains, each introducing
// evaluation criteria at MIL levels 1..max_level.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctm2/error.hpp"
#include "ctm2/json_io.hpp"

namespace ctm2 {

inline constexpr int kDefaultMaxLevel = 3;
inline constexpr int kReservedLevel = 4;
inline constexpr std::string_view kReconstructedMarker = "[reconstructed]";

struct Criterion {
  std::string id;  // <DOMAIN>.<level>.<ordinal>
  std::string text;
  int level = 1;
  std::vector<std::string> refs;

  friend bool operator==(const Criterion&, const Criterion&) = default;
};

struct Domain {
  std::string id;
  std::string name;
  std::string description;
  std::vector<Criterion> criteria;

  friend bool operator==(const Domain&, const Domain&) = default;
};

struct MaturityModel {
  std::string id;
  std::string version;
  std::string name;
  int max_level = kDefaultMaxLevel;
  std::vector<Domain> domains;

  friend bool operator==(const MaturityModel&, const MaturityModel&) = default;

  const Domain* find_domain(std::string_view domain_id) const {
    for (const auto& d : domains) {
      if (d.id == domain_id) return &d;
    }
    return nullptr;
  }

  const Domain& domain(std::string_view domain_id) const {
    if (const Domain* d = find_domain(domain_id)) return *d;
    throw Error(ErrorCode::NotFound, "unknown domain id '" +
                                         std::string(domain_id) + "' in model " +
                                         id);
  }

  const Criterion* find_criterion(std::string_view criterion_id) const {
    for (const auto& d : domains) {
      for (const auto& c : d.criteria) {
        if (c.id == criterion_id) return &c;
      }
    }
    return nullptr;
  }

  std::size_t criterion_count() const {
    std::size_t n = 0;
    for (const auto& d : domains) n += d.criteria.size();
    return n;
  }
};

// Parsed form of a criterion id. Returns nullopt when the id does not have
// three dot-separated parts with positive integer level and ordinal.
struct CriterionKey {
  std::string domain;
  int level = 0;
  int ordinal = 0;
};

inline std::optional<CriterionKey> split_criterion_id(std::string_view id) {
  auto first = id.find('.');
  if (first == std::string_view::npos || first == 0) return std::nullopt;
  auto second = id.find('.', first + 1);
  if (second == std::string_view::npos) return std::nullopt;
  auto parse_positive = [](std::string_view s) -> std::optional<int> {
    if (s.empty() || s.size() > 6) return std::nullopt;
    int v = 0;
    for (char ch : s) {
      if (ch < '0' || ch > '9') return std::nullopt;
      v = v * 10 + (ch - '0');
    }
    if (v < 1) return std::nullopt;
    return v;
  };
  auto level = parse_positive(id.substr(first + 1, second - first - 1));
  auto ordinal = parse_positive(id.substr(second + 1));
  if (!level || !ordinal) return std::nullopt;
  return CriterionKey{std::string(id.substr(0, first)), *level, *ordinal};
}

inline std::string make_criterion_id(std::string_view domain, int level,
                                     int ordinal) {
  return std::string(domain) + "." + std::to_string(level) + "." +
         std::to_string(ordinal);
}

// ---------------------------------------------------------------------------
// Catalog codec

inline Json to_json(const Criterion& c) {
  return Json{{"id", c.id}, {"text", c.text}, {"level", c.level},
              {"refs", c.refs}};
}

inline Json to_json(const Domain& d) {
  Json criteria = Json::array();
  for (const auto& c : d.criteria) criteria.push_back(to_json(c));
  return Json{{"id", d.id},
              {"name", d.name},
              {"description", d.description},
              {"criteria", std::move(criteria)}};
}

inline Json to_json(const MaturityModel& m) {
  Json domains = Json::array();
  for (const auto& d : m.domains) domains.push_back(to_json(d));
  return Json{{"id", m.id},
              {"version", m.version},
              {"name", m.name},
              {"max_level", m.max_level},
              {"domains", std::move(domains)}};
}

inline MaturityModel model_from_json(const Json& j) {
  using json_io::ObjectReader;
  ObjectReader root(j, "", {"id", "version", "name", "max_level", "domains"});
  MaturityModel m;
  m.id = root.string("id");
  m.version = root.string("version");
  m.name = root.has("name") ? root.string("name") : std::string();
  m.max_level = root.has("max_level")
                    ? static_cast<int>(root.integer("max_level"))
                    : kDefaultMaxLevel;
  const auto& domains = root.array("domains");
  for (std::size_t i = 0; i < domains.size(); ++i) {
    const std::string dpath = json_io::index("domains", i);
    ObjectReader dr(domains[i], dpath,
                    {"id", "name", "description", "criteria"});
    Domain d;
    d.id = dr.string("id");
    d.name = dr.has("name") ? dr.string("name") : std::string();
    d.description =
        dr.has("description") ? dr.string("description") : std::string();
    const auto& criteria = dr.array("criteria");
    for (std::size_t k = 0; k < criteria.size(); ++k) {
      ObjectReader cr(criteria[k], json_io::index(dr.path("criteria"), k),
                      {"id", "text", "level", "refs"});
      Criterion c;
      c.id = cr.string("id");
      c.text = cr.string("text");
      c.level = static_cast<int>(cr.integer("level"));
      if (cr.has("refs")) c.refs = cr.strings("refs");
      d.criteria.push_back(std::move(c));
    }
    m.domains.push_back(std::move(d));
  }
  return m;
}

// Parses a catalog document. Only syntax and shape are checked here;
// semantic checks belong to validate_model.
inline MaturityModel parse_model(std::string_view source) {
  return model_from_json(json_io::parse_document(source, "catalog"));
}

inline std::string serialize_model(const MaturityModel& model) {
  return json_io::dump(to_json(model));
}

// ---------------------------------------------------------------------------
// Validation

enum class Severity { Error, Warning };

inline const char* to_string(Severity s) {
  return s == Severity::Error ? "error" : "warning";
}

struct Finding {
  Severity severity = Severity::Error;
  std::string location;
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  std::size_t error_count() const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
          return f.severity == Severity::Error;
        }));
  }
  std::size_t warning_count() const { return findings.size() - error_count(); }
  bool ok() const { return error_count() == 0; }
};

inline bool is_semver(std::string_view v) {
  int parts = 0;
  std::size_t digits = 0;
  for (char ch : v) {
    if (ch >= '0' && ch <= '9') {
      ++digits;
    } else if (ch == '.') {
      if (digits == 0) return false;
      ++parts;
      digits = 0;
    } else {
      return false;
    }
  }
  return digits > 0 && parts == 2;
}

inline bool is_domain_code(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
           ch == '-';
  });
}

// Checks every catalog invariant. Findings are ordered by catalog position,
// so identical models always produce identical reports.
inline ValidationReport validate_model(const MaturityModel& model) {
  ValidationReport report;
  auto error = [&](std::string loc, std::string msg) {
    report.findings.push_back({Severity::Error, std::move(loc), std::move(msg)});
  };
  auto warning = [&](std::string loc, std::string msg) {
    report.findings.push_back(
        {Severity::Warning, std::move(loc), std::move(msg)});
  };

  if (model.id.empty()) error("id", "model id is empty");
  if (!is_semver(model.version)) {
    error("version", "version '" + model.version +
                         "' is not MAJOR.MINOR.PATCH");
  }
  const bool level_range_ok =
      model.max_level >= 1 && model.max_level <= kReservedLevel;
  if (!level_range_ok) {
    error("max_level", "max_level " + std::to_string(model.max_level) +
                           " outside 1.." + std::to_string(kReservedLevel));
  } else if (model.max_level == kReservedLevel) {
    warning("max_level",
            "MIL4 is reserved for future use; levels above 3 are not part "
            "of the standard scale");
  }
  if (model.domains.empty()) error("domains", "model has no domains");

  std::set<std::string> domain_ids;
  std::set<std::string> criterion_ids;
  std::size_t reconstructed = 0;
  for (const auto& d : model.domains) {
    const std::string dloc = "domain " + d.id;
    if (!is_domain_code(d.id)) {
      error(dloc, "domain id '" + d.id +
                      "' must be a non-empty code of letters, digits, '_' or "
                      "'-'");
    }
    if (!domain_ids.insert(d.id).second) {
      error(dloc, "duplicate domain id '" + d.id + "'");
    }
    if (d.criteria.empty()) error(dloc, "domain has no criteria");

    std::map<int, std::set<int>> ordinals;  // level -> ordinals
    std::set<std::string> texts;
    for (const auto& c : d.criteria) {
      const std::string cloc = "criterion " + c.id;
      if (!criterion_ids.insert(c.id).second) {
        error(cloc, "duplicate criterion id");
      }
      if (c.text.empty()) {
        error(cloc, "criterion text is empty");
      } else if (!texts.insert(c.text).second) {
        warning(cloc, "duplicated criterion text within domain " + d.id);
      }
      if (c.text.find(kReconstructedMarker) != std::string::npos) {
        ++reconstructed;
      }
      if (c.level < 1 || (level_range_ok && c.level > model.max_level)) {
        error(cloc, "level " + std::to_string(c.level) + " outside 1.." +
                        std::to_string(model.max_level));
      }
      auto key = split_criterion_id(c.id);
      if (!key) {
        error(cloc, "criterion id is not <DOMAIN>.<level>.<ordinal>");
        continue;
      }
      if (key->domain != d.id) {
        error(cloc, "criterion id names domain '" + key->domain +
                        "' but belongs to domain '" + d.id + "'");
      }
      if (key->level != c.level) {
        error(cloc, "level in id (" + std::to_string(key->level) +
                        ") differs from level field (" +
                        std::to_string(c.level) + ")");
      }
      ordinals[c.level].insert(key->ordinal);
    }
    for (const auto& [level, ords] : ordinals) {
      int expect = 1;
      for (int ord : ords) {
        if (ord != expect) {
          error(dloc, "ordinals at level " + std::to_string(level) +
                          " are not contiguous from 1 (missing " +
                          d.id + "." + std::to_string(level) + "." +
                          std::to_string(expect) + ")");
          break;
        }
        ++expect;
      }
    }
    if (level_range_ok && !d.criteria.empty()) {
      for (int level = 1; level <= model.max_level; ++level) {
        if (!ordinals.count(level)) {
          warning(dloc, "level " + std::to_string(level) +
                            " introduces no criteria; it is vacuously "
                            "satisfied");
        }
      }
    }
  }
  if (reconstructed > 0) {
    warning("model", std::to_string(reconstructed) +
                         " criteria carry placeholder texts marked " +
                         std::string(kReconstructedMarker));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Level profile

struct LevelProfile {
  std::string domain_id;
  int max_level = kDefaultMaxLevel;
  std::map<int, std::size_t> introduced;  // level -> criteria introduced there
  std::map<int, std::size_t> cumulative;  // level -> criteria at levels <= it

  friend bool operator==(const LevelProfile&, const LevelProfile&) = default;
};

inline LevelProfile level_profile(const MaturityModel& model,
                                  std::string_view domain_id) {
  const Domain& d = model.domain(domain_id);
  LevelProfile p;
  p.domain_id = d.id;
  p.max_level = model.max_level;
  for (int level = 1; level <= model.max_level; ++level) {
    p.introduced[level] = 0;
  }
  for (const auto& c : d.criteria) {
    if (c.level >= 1 && c.level <= model.max_level) ++p.introduced[c.level];
  }
  std::size_t running = 0;
  for (int level = 1; level <= model.max_level; ++level) {
    running += p.introduced[level];
    p.cumulative[level] = running;
  }
  return p;
}

}  // namespace ctm2
