#pragma once

// Workspace persistence: one JSON file per catalog and per assessment.
//
//   <root>/workspace.json            {"format_version": 1} (optional)
//   <root>/catalogs/<id>.json
//   <root>/assessments/<id>.json
//   <root>/reports/                  export target
//
// All writes go through write_file_atomic (temp file, fsync, rename).

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctm2/analysis.hpp"
#include "ctm2/error.hpp"
#include "ctm2/json_io.hpp"
#include "ctm2/model.hpp"
#include "ctm2/render.hpp"
#include "ctm2/scoring.hpp"
#include "ctm2/timestamp.hpp"

namespace ctm2 {

namespace fs = std::filesystem;

inline constexpr int kWorkspaceFormatVersion = 1;

inline bool is_valid_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '-';
  });
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Called with the temp path after the temp file is durable and before the
// rename. Tests use it to simulate a crash at that point.
using BeforeCommitHook = std::function<void(const fs::path& temp)>;

inline void write_file_atomic(const fs::path& path, std::string_view bytes,
                              const BeforeCommitHook& before_commit = {}) {
  const fs::path dir = path.parent_path().empty() ? fs::path(".")
                                                  : path.parent_path();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::Io,
                "cannot create " + dir.string() + ": " + ec.message());
  }
  const fs::path temp = dir / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + temp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "short write to " + temp.string());
  }
  if (int fd = ::open(temp.c_str(), O_RDONLY); fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
  if (before_commit) before_commit(temp);
  if (::rename(temp.c_str(), path.c_str()) != 0) {
    const std::string reason = std::strerror(errno);
    fs::remove(temp, ec);
    throw Error(ErrorCode::Io, "cannot rename " + temp.string() + " to " +
                                   path.string() + ": " + reason);
  }
  if (int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY); fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

struct Workspace {
  fs::path root;
  std::map<std::string, MaturityModel> catalogs;
  std::map<std::string, Assessment> assessments;
  int format_version = kWorkspaceFormatVersion;
  std::vector<std::string> warnings;  // catalog validation warnings

  const MaturityModel& catalog(const std::string& id) const {
    auto it = catalogs.find(id);
    if (it == catalogs.end()) {
      throw Error(ErrorCode::NotFound, "unknown catalog '" + id + "'");
    }
    return it->second;
  }

  const Assessment& assessment(const std::string& id) const {
    auto it = assessments.find(id);
    if (it == assessments.end()) {
      throw Error(ErrorCode::NotFound, "unknown assessment '" + id + "'");
    }
    return it->second;
  }

  const MaturityModel& model_for(const Assessment& a) const {
    auto it = catalogs.find(a.model_id);
    if (it == catalogs.end() || it->second.version != a.model_version) {
      throw Error(ErrorCode::Binding,
                  "assessment " + a.id + " has a dangling model binding " +
                      a.model_id + " " + a.model_version);
    }
    return it->second;
  }

  fs::path catalog_path(const std::string& id) const {
    return root / "catalogs" / (id + ".json");
  }
  fs::path assessment_path(const std::string& id) const {
    return root / "assessments" / (id + ".json");
  }
  fs::path reports_dir() const { return root / "reports"; }
};

namespace detail {

inline std::vector<fs::path> json_files(const fs::path& dir) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto& p = entry.path();
    if (entry.is_regular_file() && p.extension() == ".json" &&
        p.filename().string()[0] != '.') {
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Parse>
auto parse_file(const fs::path& path, Parse parse) {
  const std::string bytes = read_file(path);
  try {
    return parse(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

inline void check_file_id(const fs::path& path, const std::string& id,
                          std::string_view kind) {
  if (!is_valid_id(id)) {
    throw Error(ErrorCode::Validation,
                path.string() + ": " + std::string(kind) + " id '" + id +
                    "' must match [a-z0-9-]{1,64}");
  }
  if (path.stem().string() != id) {
    throw Error(ErrorCode::Validation,
                path.string() + ": filename does not match embedded id '" +
                    id + "'");
  }
}

}  // namespace detail

inline Workspace load_workspace(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::Io,
                "workspace " + root.string() + " is not a directory");
  }
  Workspace ws;
  ws.root = root;

  const fs::path manifest = root / "workspace.json";
  if (fs::exists(manifest, ec)) {
    detail::parse_file(manifest, [&](const std::string& bytes) {
      const Json j = json_io::parse_document(bytes, "workspace");
      json_io::ObjectReader r(j, "", {"format_version"});
      ws.format_version = static_cast<int>(r.integer("format_version"));
      return 0;
    });
    if (ws.format_version != kWorkspaceFormatVersion) {
      throw Error(ErrorCode::Validation,
                  manifest.string() + ": unsupported format_version " +
                      std::to_string(ws.format_version) + " (expected " +
                      std::to_string(kWorkspaceFormatVersion) + ")");
    }
  }

  for (const auto& path : detail::json_files(root / "catalogs")) {
    MaturityModel model = detail::parse_file(path, parse_model);
    if (ws.catalogs.count(model.id)) {
      throw Error(ErrorCode::Validation,
                  path.string() + ": duplicate catalog id '" + model.id + "'");
    }
    detail::check_file_id(path, model.id, "catalog");
    const auto report = validate_model(model);
    for (const auto& f : report.findings) {
      const std::string line = path.string() + ": " + to_string(f.severity) +
                               ": " + f.location + ": " + f.message;
      if (f.severity == Severity::Error) {
        throw Error(ErrorCode::Validation, line);
      }
      ws.warnings.push_back(line);
    }
    ws.catalogs.emplace(model.id, std::move(model));
  }

  for (const auto& path : detail::json_files(root / "assessments")) {
    Assessment a = detail::parse_file(path, parse_assessment);
    if (ws.assessments.count(a.id)) {
      throw Error(ErrorCode::Validation,
                  path.string() + ": duplicate assessment id '" + a.id + "'");
    }
    detail::check_file_id(path, a.id, "assessment");
    try {
      check_response_keys(ws.model_for(a), a.responses);
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
    ws.assessments.emplace(a.id, std::move(a));
  }
  return ws;
}

// Filesystem-safe id derived from a testbed name, unique in `ws`.
inline std::string make_assessment_id(const Workspace& ws,
                                      std::string_view name) {
  std::string base;
  for (char ch : name) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isalnum(u) && u < 0x80) {
      base += static_cast<char>(std::tolower(u));
    } else if (!base.empty() && base.back() != '-') {
      base += '-';
    }
  }
  if (base.size() > 56) base.resize(56);
  while (!base.empty() && base.back() == '-') base.pop_back();
  if (base.empty()) base = "assessment";
  std::string id = base;
  for (int n = 2; ws.assessments.count(id); ++n) {
    id = base + "-" + std::to_string(n);
  }
  return id;
}

struct SaveOptions {
  std::optional<Timestamp> now;  // defaults to the wall clock
  BeforeCommitHook before_commit;
};

// Persists `assessment` and returns the updated workspace snapshot. The
// modified timestamp is set to the save time; created is kept when already
// set and otherwise initialized to the save time.
inline Workspace save_assessment(const Workspace& ws, Assessment assessment,
                                 const SaveOptions& options = {}) {
  if (!is_valid_id(assessment.id)) {
    throw Error(ErrorCode::InvalidArgument,
                "assessment id '" + assessment.id +
                    "' must match [a-z0-9-]{1,64}");
  }
  check_response_keys(ws.model_for(assessment), assessment.responses);
  const Timestamp now = options.now.value_or(Timestamp::now());
  if (auto it = ws.assessments.find(assessment.id);
      it != ws.assessments.end() && assessment.created.seconds == 0) {
    assessment.created = it->second.created;
  }
  if (assessment.created.seconds == 0) assessment.created = now;
  assessment.modified = now;
  write_file_atomic(ws.assessment_path(assessment.id),
                    serialize_assessment(assessment), options.before_commit);
  Workspace updated = ws;
  updated.assessments[assessment.id] = std::move(assessment);
  return updated;
}

inline void save_catalog(const Workspace& ws, const MaturityModel& model) {
  if (!is_valid_id(model.id)) {
    throw Error(ErrorCode::InvalidArgument,
                "catalog id '" + model.id + "' must match [a-z0-9-]{1,64}");
  }
  write_file_atomic(ws.catalog_path(model.id), serialize_model(model));
}

// Writes the manifest, every catalog and every assessment under ws.root
// without touching timestamps.
inline void save_workspace(const Workspace& ws) {
  write_file_atomic(ws.root / "workspace.json",
                    json_io::dump(Json{{"format_version", ws.format_version}}));
  for (const auto& [id, model] : ws.catalogs) save_catalog(ws, model);
  for (const auto& [id, a] : ws.assessments) {
    write_file_atomic(ws.assessment_path(id), serialize_assessment(a));
  }
}

// ---------------------------------------------------------------------------
// Report export

using AnyReport =
    std::variant<Scorecard, RadarReport, RingReport, ComparisonMatrix, GapReport>;

enum class ReportFormat { Json, Markdown, Svg };

inline const char* to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Markdown: return "markdown";
    case ReportFormat::Svg: return "svg";
  }
  return "json";
}

inline std::optional<ReportFormat> format_from_string(std::string_view s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  if (s == "svg") return ReportFormat::Svg;
  return std::nullopt;
}

inline const char* report_kind(const AnyReport& report) {
  switch (report.index()) {
    case 0: return "score";
    case 1: return "radar";
    case 2: return "ring";
    case 3: return "compare";
    default: return "gap";
  }
}

struct ExportOptions {
  RenderOptions render;
  std::string ring_domain;  // empty: first domain of the ring report
};

// The single formatting path for reports; the CLI, the service and
// export_report all go through it.
inline std::string format_report(const AnyReport& report, ReportFormat format,
                                 const ExportOptions& options = {}) {
  auto inapplicable = [&]() -> std::string {
    throw Error(ErrorCode::InvalidArgument,
                std::string("format ") + to_string(format) +
                    " is not available for " + report_kind(report) +
                    " reports");
  };
  return std::visit(
      [&](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        switch (format) {
          case ReportFormat::Json:
            if constexpr (std::is_same_v<T, Scorecard>) {
              return serialize_scorecard(r);
            } else {
              return serialize_report(r);
            }
          case ReportFormat::Markdown:
            if constexpr (std::is_same_v<T, Scorecard> ||
                          std::is_same_v<T, ComparisonMatrix> ||
                          std::is_same_v<T, GapReport>) {
              return render_markdown(r);
            } else {
              return inapplicable();
            }
          case ReportFormat::Svg:
            if constexpr (std::is_same_v<T, RadarReport>) {
              return render_radar_svg(r, options.render);
            } else if constexpr (std::is_same_v<T, RingReport>) {
              if (r.domains.empty()) {
                throw Error(ErrorCode::InvalidArgument,
                            "ring report has no domains");
              }
              return render_ring_svg(r,
                                     options.ring_domain.empty()
                                         ? r.domains.front().domain_id
                                         : options.ring_domain,
                                     options.render);
            } else {
              return inapplicable();
            }
        }
        return inapplicable();
      },
      report);
}

inline void export_report(const AnyReport& report, ReportFormat format,
                          const fs::path& path,
                          const ExportOptions& options = {}) {
  write_file_atomic(path, format_report(report, format, options));
}

}  // namespace ctm2
