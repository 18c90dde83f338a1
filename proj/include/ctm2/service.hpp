#pragma once

// Local HTTP service over a workspace. Reads run against immutable workspace
// snapshots; mutations are serialized by a single writer lock and persisted
// through the interchange layer before the new snapshot is published.

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>

#include "ctm2/analysis.hpp"
#include "ctm2/error.hpp"
#include "ctm2/interchange.hpp"
#include "ctm2/json_io.hpp"
#include "ctm2/scoring.hpp"
#include "ctm2/timestamp.hpp"

namespace ctm2 {

using Clock = std::function<Timestamp()>;

inline constexpr int kDefaultPort = 8642;

inline constexpr const char* kFallbackIndexHtml = R"(<!doctype html>
<html lang="en">
<head><meta charset="utf-8"><title>ICS-CTM2 assessment service</title></head>
<body>
<h1>ICS-CTM2 assessment service</h1>
<p>The engine API is served under <code>/api</code>. Start the service with
<code>--static &lt;dir&gt;</code> to serve the self-evaluation client.</p>
<ul>
<li><a href="/api/catalogs">/api/catalogs</a></li>
<li><a href="/api/assessments">/api/assessments</a></li>
</ul>
</body>
</html>
)";

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Binding: return 409;
    case ErrorCode::Parse: return 400;
    case ErrorCode::InvalidArgument: return 400;
    case ErrorCode::Validation: return 422;
    case ErrorCode::Io: return 500;
  }
  return 500;
}

inline std::string error_body(std::string_view code, std::string_view message) {
  return json_io::dump(
      Json{{"error", Json{{"code", code}, {"message", message}}}});
}

inline std::vector<std::string> split_ids(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Service {
 public:
  struct Options {
    fs::path workspace;
    Clock clock = [] { return Timestamp::now(); };
    std::optional<fs::path> static_dir;
  };

  explicit Service(Options options)
      : options_(std::move(options)),
        snapshot_(std::make_shared<const Workspace>(
            load_workspace(options_.workspace))) {}

  std::shared_ptr<const Workspace> snapshot() const {
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
  }

  void install(httplib::Server& server) {
    server.Get("/api/catalogs", wrap([this](const auto&, auto& res) {
      Json out = Json::array();
      for (const auto& [id, m] : snapshot()->catalogs) {
        out.push_back(Json{{"id", m.id},
                           {"version", m.version},
                           {"name", m.name},
                           {"max_level", m.max_level}});
      }
      send_json(res, json_io::dump(out));
    }));
    server.Get(R"(/api/catalogs/([a-z0-9-]+))",
               wrap([this](const auto& req, auto& res) {
                 send_json(res, serialize_model(
                                    snapshot()->catalog(req.matches[1])));
               }));
    server.Get("/api/assessments", wrap([this](const auto&, auto& res) {
      Json out = Json::array();
      for (const auto& [id, a] : snapshot()->assessments) {
        out.push_back(Json{{"id", a.id},
                           {"model_id", a.model_id},
                           {"model_version", a.model_version},
                           {"name", a.meta.name},
                           {"institute", a.meta.institute},
                           {"sector", a.meta.sector},
                           {"classification", to_string(a.meta.classification)},
                           {"modified", to_iso8601(a.modified)}});
      }
      send_json(res, json_io::dump(out));
    }));
    server.Post("/api/assessments", wrap([this](const auto& req, auto& res) {
      res.status = 201;
      send_json(res, create_assessment(req.body));
    }));
    server.Get(R"(/api/assessments/([a-z0-9-]+))",
               wrap([this](const auto& req, auto& res) {
                 send_json(res, serialize_assessment(
                                    snapshot()->assessment(req.matches[1])));
               }));
    server.Patch(R"(/api/assessments/([a-z0-9-]+)/responses)",
                 wrap([this](const auto& req, auto& res) {
                   std::optional<std::string> expected;
                   if (req.has_header("If-Match")) {
                     expected = req.get_header_value("If-Match");
                   }
                   send_json(res,
                             patch_responses(req.matches[1], req.body, expected));
                 }));
    server.Get(R"(/api/assessments/([a-z0-9-]+)/score)",
               wrap([this](const auto& req, auto& res) {
                 send_json(res, score_json(req.matches[1], policy_of(req)));
               }));
    server.Get(R"(/api/assessments/([a-z0-9-]+)/ring)",
               wrap([this](const auto& req, auto& res) {
                 auto ws = snapshot();
                 const auto& a = ws->assessment(req.matches[1]);
                 AnyReport report = ring_analysis(ws->model_for(a), a,
                                                  policy_of(req), now());
                 send_report(req, res, report);
               }));
    server.Get(R"(/api/assessments/([a-z0-9-]+)/gap)",
               wrap([this](const auto& req, auto& res) {
                 auto ws = snapshot();
                 const auto& a = ws->assessment(req.matches[1]);
                 AnyReport report = gap_analysis(ws->model_for(a), a,
                                                 policy_of(req), now());
                 send_report(req, res, report);
               }));
    server.Post(R"(/api/assessments/([a-z0-9-]+)/whatif)",
                wrap([this](const auto& req, auto& res) {
                  auto ws = snapshot();
                  const auto& a = ws->assessment(req.matches[1]);
                  const auto changes = responses_from_json(
                      json_io::parse_document(req.body, "what-if body"), "");
                  send_json(res, json_io::dump(to_json(
                                     what_if(ws->model_for(a), a,
                                             policy_of(req), changes, now()))));
                }));
    server.Get("/api/radar", wrap([this](const auto& req, auto& res) {
      auto [ws, list] = select(req);
      AnyReport report = radar_analysis(ws->model_for(list.front()), list, policy_of(req), now());
      send_report(req, res, report);
    }));
    server.Get("/api/compare", wrap([this](const auto& req, auto& res) {
      auto [ws, list] = select(req);
      AnyReport report = compare(ws->model_for(list.front()), list, policy_of(req), now());
      send_report(req, res, report);
    }));
    server.Get("/", [this](const httplib::Request&, httplib::Response& res) {
      serve_index(res);
    });
    if (options_.static_dir) {
      server.set_mount_point("/", options_.static_dir->string());
    }
  }

  // --- operations shared by handlers and tests ----------------------------

  std::string score_json(const std::string& id, ScoringPolicy policy) const {
    auto ws = snapshot();
    const auto& a = ws->assessment(id);
    return serialize_scorecard(
        score_assessment(ws->model_for(a), a, policy, now()));
  }

  std::string create_assessment(const std::string& body) {
    const Json j = json_io::parse_document(body, "request body");
    json_io::ObjectReader r(j, "", {"id", "model_id", "model_version", "meta"});
    std::lock_guard writer(write_mutex_);
    auto ws = snapshot();
    const MaturityModel& model = ws->catalog(r.string("model_id"));
    Assessment a;
    a.model_id = model.id;
    a.model_version =
        r.has("model_version") ? r.string("model_version") : model.version;
    Json meta = r.object("meta");
    if (!meta.contains("classification")) meta["classification"] = "Hybrid";
    const Json stub{{"id", "x"},
                    {"model_id", a.model_id},
                    {"model_version", a.model_version},
                    {"meta", meta},
                    {"responses", Json::object()},
                    {"created", to_iso8601(now())},
                    {"modified", to_iso8601(now())}};
    a.meta = assessment_from_json(stub).meta;
    a.id = r.has("id") ? r.string("id") : make_assessment_id(*ws, a.meta.name);
    if (ws->assessments.count(a.id)) {
      throw Error(ErrorCode::Binding, "assessment '" + a.id + "' exists");
    }
    return publish(save_assessment(*ws, a, {now(), {}}), a.id);
  }

  std::string patch_responses(const std::string& id, const std::string& body,
                              const std::optional<std::string>& expected) {
    const auto changes = responses_from_json(
        json_io::parse_document(body, "request body"), "");
    std::lock_guard writer(write_mutex_);
    auto ws = snapshot();
    Assessment a = ws->assessment(id);
    if (expected) {
      std::string want = *expected;
      if (want.size() >= 2 && want.front() == '"' && want.back() == '"') {
        want = want.substr(1, want.size() - 2);
      }
      if (want != to_iso8601(a.modified)) {
        throw Error(ErrorCode::Binding,
                    "assessment " + id + " was modified at " +
                        to_iso8601(a.modified) + ", expected " + want);
      }
    }
    for (const auto& [cid, state] : changes) {
      if (state == ImplementationState::NotAssessed) {
        a.responses.erase(cid);
      } else {
        a.responses[cid] = state;
      }
    }
    return publish(save_assessment(*ws, std::move(a), {now(), {}}), id);
  }

 private:
  using Handler =
      std::function<void(const httplib::Request&, httplib::Response&)>;

  Timestamp now() const { return options_.clock(); }

  static Handler wrap(Handler inner) {
    return [inner = std::move(inner)](const httplib::Request& req,
                                      httplib::Response& res) {
      try {
        inner(req, res);
      } catch (const Error& e) {
        res.status = http_status(e.code());
        res.set_content(error_body(to_string(e.code()), e.what()),
                        "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(error_body("internal", e.what()), "application/json");
      }
    };
  }

  static void send_json(httplib::Response& res, const std::string& body) {
    res.set_content(body, "application/json");
  }

  static ScoringPolicy policy_of(const httplib::Request& req) {
    if (!req.has_param("policy")) return ScoringPolicy::Strict;
    const auto text = req.get_param_value("policy");
    auto p = policy_from_string(text);
    if (!p) {
      throw Error(ErrorCode::InvalidArgument,
                  "policy must be strict or lenient, got '" + text + "'");
    }
    return *p;
  }

  static void send_report(const httplib::Request& req, httplib::Response& res,
                          const AnyReport& report) {
    ReportFormat format = ReportFormat::Json;
    if (req.has_param("format")) {
      auto f = format_from_string(req.get_param_value("format"));
      if (!f) {
        throw Error(ErrorCode::InvalidArgument, "unknown format");
      }
      format = *f;
    }
    ExportOptions options;
    if (req.has_param("domain")) options.ring_domain = req.get_param_value("domain");
    const char* type = format == ReportFormat::Json       ? "application/json"
                       : format == ReportFormat::Svg      ? "image/svg+xml"
                                                          : "text/markdown";
    res.set_content(format_report(report, format, options), type);
  }

  std::pair<std::shared_ptr<const Workspace>, std::vector<Assessment>> select(
      const httplib::Request& req) const {
    auto ws = snapshot();
    std::vector<Assessment> list;
    auto ids = req.has_param("ids") ? split_ids(req.get_param_value("ids"))
                                    : std::vector<std::string>{};
    if (ids.empty()) {
      for (const auto& [id, a] : ws->assessments) list.push_back(a);
    } else {
      for (const auto& id : ids) list.push_back(ws->assessment(id));
    }
    if (list.empty()) {
      throw Error(ErrorCode::InvalidArgument, "no assessments selected");
    }
    return {ws, std::move(list)};
  }

  std::string publish(Workspace updated, const std::string& id) {
    auto next = std::make_shared<const Workspace>(std::move(updated));
    std::string body = serialize_assessment(next->assessment(id));
    std::lock_guard lock(snapshot_mutex_);
    snapshot_ = std::move(next);
    return body;
  }

  void serve_index(httplib::Response& res) const {
    if (options_.static_dir) {
      const auto index = *options_.static_dir / "index.html";
      std::error_code ec;
      if (fs::exists(index, ec)) {
        res.set_content(read_file(index), "text/html");
        return;
      }
    }
    res.set_content(kFallbackIndexHtml, "text/html");
  }

  Options options_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Workspace> snapshot_;
  std::mutex write_mutex_;
};

}  // namespace ctm2
