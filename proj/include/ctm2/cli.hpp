#pragma once

// The `ctm2` command line. run() is the whole program minus process setup, so
// tests drive it in-process and compare its stdout to library serializations.
//
// Exit codes: 0 success, 1 validation error, 2 usage error, 3 I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctm2/analysis.hpp"
#include "ctm2/error.hpp"
#include "ctm2/interchange.hpp"
#include "ctm2/model.hpp"
#include "ctm2/render.hpp"
#include "ctm2/scoring.hpp"
#include "ctm2/service.hpp"
#include "ctm2/timestamp.hpp"

namespace ctm2::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kUsage = 2, kIo = 3 };

struct CommandOutcome {
  int exit_code = kOk;
  std::string out;
  std::string err;
};

struct Environment {
  std::string workspace = ".";
  Clock clock = [] { return Timestamp::now(); };

  // CTM2_WORKSPACE sets the default workspace; SOURCE_DATE_EPOCH pins report
  // timestamps for reproducible output.
  static Environment from_process() {
    Environment env;
    if (const char* ws = std::getenv("CTM2_WORKSPACE"); ws && *ws) {
      env.workspace = ws;
    }
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
      const Timestamp fixed{std::strtoll(epoch, nullptr, 10)};
      env.clock = [fixed] { return fixed; };
    }
    return env;
  }
};

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return kIo;
    case ErrorCode::InvalidArgument: return kUsage;
    default: return kValidation;
  }
}

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline ScoringPolicy parse_policy(const std::string& text) {
  auto p = policy_from_string(text);
  if (!p) throw UsageError("--policy must be strict or lenient");
  return *p;
}

inline ReportFormat parse_format(const std::string& text) {
  auto f = format_from_string(text);
  if (!f) throw UsageError("--format must be json, markdown or svg");
  return *f;
}

inline std::vector<Assessment> pick(const Workspace& ws,
                                    const std::vector<std::string>& ids) {
  std::vector<Assessment> out;
  if (ids.empty()) {
    for (const auto& [id, a] : ws.assessments) out.push_back(a);
  } else {
    for (const auto& id : ids) out.push_back(ws.assessment(id));
  }
  if (out.empty()) {
    throw Error(ErrorCode::NotFound, "workspace has no assessments");
  }
  return out;
}

}  // namespace detail

inline CommandOutcome run(const std::vector<std::string>& args,
                          const Environment& env = Environment::from_process()) {
  CommandOutcome outcome;
  std::ostringstream out, err;

  CLI::App app{"ICS-CTM2 testbed maturity assessment engine", "ctm2"};
  app.require_subcommand(1);
  std::string workspace = env.workspace;
  app.add_option("-w,--workspace", workspace,
                 "Workspace root (default: $CTM2_WORKSPACE or .)");

  std::string policy_text = "strict";
  std::string format_text = "json";
  std::string out_path;
  auto add_report_flags = [&](CLI::App* sub) {
    sub->add_option("--policy", policy_text, "strict | lenient")
        ->capture_default_str();
    sub->add_option("--format", format_text, "json | markdown | svg")
        ->capture_default_str();
    sub->add_option("--out", out_path, "Write the report here instead of stdout");
  };

  auto* model_cmd = app.add_subcommand("model", "Catalog utilities");
  model_cmd->require_subcommand(1);
  auto* validate_cmd =
      model_cmd->add_subcommand("validate", "Validate a catalog file");
  std::string catalog_path;
  validate_cmd->add_option("catalog", catalog_path, "Catalog JSON file")
      ->required();

  auto* assess_cmd = app.add_subcommand(
      "assess", "Create an assessment with every criterion not assessed");
  std::string model_id, name, institute, sector, classification = "Hybrid",
                                                 notes, new_id;
  assess_cmd->add_option("--model", model_id, "Catalog id")->required();
  assess_cmd->add_option("--name", name, "Testbed name")->required();
  assess_cmd->add_option("--institute", institute);
  assess_cmd->add_option("--sector", sector);
  assess_cmd->add_option("--classification", classification,
                         "Physical | Simulation | Virtual | Hybrid")
      ->capture_default_str();
  assess_cmd->add_option("--notes", notes);
  assess_cmd->add_option("--id", new_id, "Assessment id (default: from name)");

  auto* set_cmd =
      app.add_subcommand("set", "Record one criterion's implementation state");
  std::string assessment_id, criterion_id, state_text;
  set_cmd->add_option("assessment", assessment_id)->required();
  set_cmd->add_option("criterion", criterion_id)->required();
  set_cmd->add_option("state", state_text, "full | partial | none | not_assessed")
      ->required();
  set_cmd->add_option("--policy", policy_text, "strict | lenient")
      ->capture_default_str();

  std::vector<std::string> ids;
  std::string ring_domain;
  auto* score_cmd = app.add_subcommand("score", "Score one assessment");
  score_cmd->add_option("assessment", assessment_id)->required();
  add_report_flags(score_cmd);

  auto* radar_cmd = app.add_subcommand("radar", "Radar analysis");
  radar_cmd->add_option("assessments", ids, "Assessment ids (default: all)");
  add_report_flags(radar_cmd);

  auto* ring_cmd = app.add_subcommand("ring", "Ring analysis of one testbed");
  ring_cmd->add_option("assessment", ids, "Assessment id");
  ring_cmd->add_option("--domain", ring_domain, "Domain drawn by --format svg");
  add_report_flags(ring_cmd);

  auto* gap_cmd = app.add_subcommand("gap", "Criteria blocking the next MIL");
  gap_cmd->add_option("assessment", assessment_id)->required();
  add_report_flags(gap_cmd);

  auto* compare_cmd = app.add_subcommand("compare", "Comparison matrix");
  compare_cmd->add_option("assessments", ids, "Assessment ids (default: all)");
  add_report_flags(compare_cmd);

  auto* serve_cmd = app.add_subcommand("serve", "Run the local HTTP service");
  int port = kDefaultPort;
  std::string bind = "127.0.0.1";
  std::string static_dir;
  serve_cmd->add_option("--port", port)->capture_default_str();
  serve_cmd->add_option("--bind", bind)->capture_default_str();
  serve_cmd->add_option("--static", static_dir, "Directory of UI assets");

  auto finish = [&](int code) {
    outcome.exit_code = code;
    outcome.out = out.str();
    outcome.err = err.str();
    return outcome;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return finish(kOk);
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return finish(kOk);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return finish(kUsage);
  }

  // Writes a formatted report to --out or stdout.
  auto emit = [&](const AnyReport& report, ReportFormat format,
                  const ExportOptions& options = {}) {
    if (out_path.empty()) {
      out << format_report(report, format, options);
    } else {
      export_report(report, format, out_path, options);
      err << "wrote " << out_path << "\n";
    }
  };

  try {
    if (validate_cmd->parsed()) {
      std::error_code ec;
      if (!fs::exists(catalog_path, ec)) {
        err << "error: catalog file " << catalog_path << " not found\n";
        return finish(kIo);
      }
      const auto model = parse_model(read_file(catalog_path));
      const auto report = validate_model(model);
      for (const auto& f : report.findings) {
        out << to_string(f.severity) << ": " << f.location << ": "
            << f.message << "\n";
      }
      return finish(report.ok() ? kOk : kValidation);
    }

    if (serve_cmd->parsed()) {
      Service::Options options;
      options.workspace = workspace;
      options.clock = env.clock;
      if (!static_dir.empty()) options.static_dir = static_dir;
      Service service(std::move(options));
      httplib::Server server;
      service.install(server);
      if (!server.bind_to_port(bind, port)) {
        err << "error: cannot bind " << bind << ":" << port << "\n";
        return finish(kIo);
      }
      std::cerr << "serving workspace " << workspace << " on http://" << bind
                << ":" << port << "/\n";
      server.listen_after_bind();
      return finish(kOk);
    }

    const Workspace ws = load_workspace(workspace);
    const ScoringPolicy policy = detail::parse_policy(policy_text);
    const ReportFormat format = detail::parse_format(format_text);

    if (assess_cmd->parsed()) {
      auto cls = classification_from_string(classification);
      if (!cls) {
        err << "usage error: invalid classification '" << classification
            << "'; allowed values: Physical, Simulation, Virtual, Hybrid\n";
        return finish(kUsage);
      }
      const MaturityModel& model = ws.catalog(model_id);
      if (name.empty()) throw detail::UsageError("--name must not be empty");
      Assessment a;
      a.id = new_id.empty() ? make_assessment_id(ws, name) : new_id;
      if (ws.assessments.count(a.id)) {
        throw Error(ErrorCode::Validation,
                    "assessment '" + a.id + "' already exists");
      }
      a.model_id = model.id;
      a.model_version = model.version;
      a.meta = TestbedMeta{name, institute, sector, *cls, notes};
      save_assessment(ws, a, {env.clock(), {}});
      out << a.id << "\n";
      return finish(kOk);
    }

    if (set_cmd->parsed()) {
      auto state = state_from_string(state_text);
      if (!state) {
        throw detail::UsageError(
            "state must be one of full, partial, none, not_assessed");
      }
      Assessment a = ws.assessment(assessment_id);
      const MaturityModel& model = ws.model_for(a);
      const Criterion* c = model.find_criterion(criterion_id);
      if (!c) {
        throw Error(ErrorCode::NotFound,
                    "unknown criterion '" + criterion_id + "'");
      }
      if (*state == ImplementationState::NotAssessed) {
        a.responses.erase(criterion_id);
      } else {
        a.responses[criterion_id] = *state;
      }
      const Workspace updated = save_assessment(ws, a, {env.clock(), {}});
      const auto domain = split_criterion_id(criterion_id)->domain;
      const auto score = score_domain(
          model, domain, updated.assessment(assessment_id).responses, policy);
      out << domain << ": MIL " << score.achieved_mil << "\n";
      return finish(kOk);
    }

    if (score_cmd->parsed()) {
      const auto& a = ws.assessment(assessment_id);
      emit(score_assessment(ws.model_for(a), a, policy, env.clock()), format);
      return finish(kOk);
    }

    if (radar_cmd->parsed() || compare_cmd->parsed()) {
      const auto list = detail::pick(ws, ids);
      const auto& model = ws.model_for(list.front());
      if (radar_cmd->parsed()) {
        emit(radar_analysis(model, list, policy, env.clock()), format);
      } else {
        emit(compare(model, list, policy, env.clock()), format);
      }
      return finish(kOk);
    }

    if (ring_cmd->parsed()) {
      if (ids.size() != 1) {
        err << "usage error: ring analysis is per-testbed; give exactly one "
               "assessment id\n";
        return finish(kUsage);
      }
      const auto& a = ws.assessment(ids.front());
      ExportOptions options;
      options.ring_domain = ring_domain;
      emit(ring_analysis(ws.model_for(a), a, policy, env.clock()), format,
           options);
      return finish(kOk);
    }

    if (gap_cmd->parsed()) {
      const auto& a = ws.assessment(assessment_id);
      emit(gap_analysis(ws.model_for(a), a, policy, env.clock()), format);
      return finish(kOk);
    }
  } catch (const detail::UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return finish(kUsage);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return finish(exit_code_for(e.code()));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return finish(kIo);
  }
  return finish(kUsage);
}

}  // namespace ctm2::cli
