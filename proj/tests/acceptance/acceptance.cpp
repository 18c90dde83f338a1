// Acceptance gate. Runs each acceptance criterion and prints one PASS/FAIL
// line per criterion; exits nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "ctm2/analysis.hpp"
#include "ctm2/interchange.hpp"
#include "ctm2/render.hpp"
#include "ctm2/scoring.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"
#include "support/paths.hpp"

namespace ctm2::acceptance {
namespace {

constexpr std::int64_t kEpoch = 1700000000;
constexpr Timestamp kAt{kEpoch};

// Collects the first few failure messages of a criterion.
struct Check {
  std::size_t failures = 0;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures;
    if (notes.size() < 5) notes.push_back(what);
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Process {
  int exit_code = -1;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

// Runs the installed CLI binary with a pinned report clock.
Process run_cli(const std::vector<std::string>& args) {
  std::string cmd = "SOURCE_DATE_EPOCH=" + std::to_string(kEpoch) + " " +
                    quote(CTM2_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>/dev/null";
  Process p;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return p;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) p.out.append(buf, n);
  const int status = ::pclose(pipe);
  p.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

std::string casestudy() { return test::casestudy_workspace().string(); }

std::vector<Assessment> all_of(const Workspace& ws) {
  std::vector<Assessment> out;
  for (const auto& [id, a] : ws.assessments) out.push_back(a);
  return out;
}

Check ring_counts() {
  Check c;
  const auto start = Clock::now();
  const auto p = run_cli({"-w", casestudy(), "ring", "powercyber"});
  const double elapsed = seconds_since(start);
  c.expect(p.exit_code == 0, "ring exited " + std::to_string(p.exit_code));
  if (p.exit_code != 0) return c;
  const auto ring = ring_from_json(Json::parse(p.out));
  std::map<int, std::size_t> totals;
  for (const auto& l : ring.domain("ARCH").levels) totals[l.level] = l.cumulative_total;
  c.expect(totals == std::map<int, std::size_t>{{1, 5}, {2, 9}, {3, 21}},
           "ARCH cumulative totals differ from {5, 9, 21}");
  c.expect(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
  return c;
}

Check mil_assignment() {
  Check c;
  const auto ws = load_workspace(casestudy());
  const auto& model = ws.catalog("icsctm2-casestudy");
  const auto& pc = ws.assessment("powercyber");
  const auto card = score_assessment(model, pc, ScoringPolicy::Strict, kAt);
  c.expect(card.domain("ARCH").achieved_mil == 2, "ARCH MIL is not 2");
  bool lower_full = true;
  bool mil3_gap = false;
  for (const auto& cr : model.domain("ARCH").criteria) {
    const auto s = pc.state_of(cr.id);
    if (cr.level <= 2 && s != ImplementationState::Full) lower_full = false;
    if (cr.level == 3 && s != ImplementationState::Full) mil3_gap = true;
  }
  c.expect(lower_full, "a MIL1/MIL2 ARCH criterion is not full");
  c.expect(mil3_gap, "no MIL3 ARCH criterion is unsatisfied");
  return c;
}

Check staircase() {
  Check c;
  gen::Rng rng(303);
  gen::CatalogShape shape;
  shape.allow_empty_levels = false;
  const ImplementationState unsatisfied[] = {ImplementationState::None,
                                             ImplementationState::NotAssessed};
  for (int i = 0; i < 500; ++i) {
    const auto m = gen::random_catalog(rng, shape);
    Responses strict_r, lenient_r;
    for (const auto& d : m.domains) {
      std::vector<std::string> level3;
      for (const auto& cr : d.criteria) {
        if (cr.level <= 2) {
          strict_r[cr.id] = lenient_r[cr.id] = ImplementationState::Full;
        } else {
          level3.push_back(cr.id);
          strict_r[cr.id] = gen::random_state(rng);
          lenient_r[cr.id] = gen::random_state(rng);
        }
      }
      const auto& gap = level3[static_cast<std::size_t>(
          gen::uniform(rng, 0, static_cast<int>(level3.size()) - 1))];
      strict_r[gap] = gen::uniform(rng, 0, 1) ? ImplementationState::Partial
                                              : unsatisfied[gen::uniform(rng, 0, 1)];
      lenient_r[gap] = unsatisfied[gen::uniform(rng, 0, 1)];
    }
    for (const auto& d : m.domains) {
      c.expect(score_domain(m, d.id, strict_r, ScoringPolicy::Strict).achieved_mil == 2,
               "instance " + std::to_string(i) + " strict " + d.id);
      c.expect(score_domain(m, d.id, lenient_r, ScoringPolicy::Lenient).achieved_mil == 2,
               "instance " + std::to_string(i) + " lenient " + d.id);
    }
  }
  return c;
}

Check oracle_equivalence() {
  Check c;
  const auto start = Clock::now();
  gen::Rng rng(404);
  for (int i = 0; i < 1000; ++i) {
    const auto m = gen::random_catalog(rng);
    const auto r = gen::random_responses(rng, m);
    const auto policy = gen::uniform(rng, 0, 1) ? ScoringPolicy::Lenient
                                                : ScoringPolicy::Strict;
    for (const auto& d : m.domains) {
      c.expect(score_domain(m, d.id, r, policy).achieved_mil ==
                   oracle::brute_force_mil(m, d, r, policy),
               "instance " + std::to_string(i) + " domain " + d.id);
    }
  }
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 30.0, "runtime " + std::to_string(elapsed) + " s");
  return c;
}

Check monotonicity() {
  Check c;
  gen::Rng rng(505);
  for (int i = 0; i < 1000; ++i) {
    const auto m = gen::random_catalog(rng);
    const auto r = gen::random_responses(rng, m);
    const auto up = gen::upgrade(rng, m, r);
    for (const auto& d : m.domains) {
      for (auto p : {ScoringPolicy::Strict, ScoringPolicy::Lenient}) {
        c.expect(score_domain(m, d.id, r, p).achieved_mil <=
                     score_domain(m, d.id, up, p).achieved_mil,
                 "upgrade lowered MIL, instance " + std::to_string(i));
      }
      c.expect(score_domain(m, d.id, r, ScoringPolicy::Strict).achieved_mil <=
                   score_domain(m, d.id, r, ScoringPolicy::Lenient).achieved_mil,
               "lenient below strict, instance " + std::to_string(i));
    }
  }
  return c;
}

Check triple_consistency() {
  Check c;
  gen::Rng rng(606);
  for (int i = 0; i < 200; ++i) {
    const auto ws = gen::random_workspace(rng, "/nonexistent");
    const auto& model = ws.catalogs.begin()->second;
    const auto list = all_of(ws);
    const auto policy = i % 2 ? ScoringPolicy::Lenient : ScoringPolicy::Strict;
    const auto radar = radar_analysis(model, list, policy, kAt);
    const auto matrix = compare(model, list, policy, kAt);
    for (std::size_t k = 0; k < list.size(); ++k) {
      const auto card = score_assessment(model, list[k], policy, kAt);
      std::vector<int> mils;
      for (const auto& d : card.domains) mils.push_back(d.achieved_mil);
      c.expect(radar.entries[k].assessment_id == list[k].id &&
                   radar.entries[k].mils == mils,
               "radar differs, workspace " + std::to_string(i));
      c.expect(matrix.rows[k].assessment_id == list[k].id &&
                   matrix.rows[k].mils == mils,
               "matrix differs, workspace " + std::to_string(i));
    }
  }
  return c;
}

Check round_trips() {
  Check c;
  gen::Rng rng(707);
  for (int i = 0; i < 500; ++i) {
    const auto m = gen::random_catalog(rng);
    const auto list = gen::random_assessments(rng, m, gen::uniform(rng, 1, 4));
    const auto& a = list.front();
    const auto policy = i % 2 ? ScoringPolicy::Lenient : ScoringPolicy::Strict;
    const Timestamp at{kEpoch + i};
    const std::string n = std::to_string(i);
    c.expect(parse_model(serialize_model(m)) == m, "catalog " + n);
    c.expect(parse_assessment(serialize_assessment(a)) == a, "assessment " + n);
    const auto card = score_assessment(m, a, policy, at);
    c.expect(scorecard_from_json(Json::parse(serialize_scorecard(card))) == card,
             "scorecard " + n);
    const auto radar = radar_analysis(m, list, policy, at);
    c.expect(radar_from_json(Json::parse(serialize_report(radar))) == radar,
             "radar " + n);
    const auto ring = ring_analysis(m, a, policy, at);
    c.expect(ring_from_json(Json::parse(serialize_report(ring))) == ring,
             "ring " + n);
    const auto matrix = compare(m, list, policy, at);
    c.expect(matrix_from_json(Json::parse(serialize_report(matrix))) == matrix,
             "matrix " + n);
    const auto gap = gap_analysis(m, a, policy, at);
    c.expect(gap_from_json(Json::parse(serialize_report(gap))) == gap, "gap " + n);
  }
  for (int i = 0; i < 20; ++i) {
    test::TempDir dir;
    const auto ws = gen::random_workspace(rng, dir.path());
    save_workspace(ws);
    const auto back = load_workspace(dir.path());
    c.expect(back.catalogs == ws.catalogs && back.assessments == ws.assessments,
             "workspace save/load " + std::to_string(i));
  }
  return c;
}

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos;
       pos = s.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

Check render_structure() {
  Check c;
  gen::Rng rng(808);
  const std::regex arc(
      R"re(class="arc [^"]*" data-level="(\d+)"[^>]*data-sweep="([0-9.]+)")re");
  for (int i = 0; i < 200; ++i) {
    const auto m = gen::random_catalog(rng);
    const auto list = gen::random_assessments(rng, m, gen::uniform(rng, 1, 8));
    const auto radar = render_radar_svg(radar_analysis(m, list, ScoringPolicy::Strict, kAt));
    c.expect(count_of(radar, "<line class=\"axis\"") == m.domains.size(),
             "axis count, instance " + std::to_string(i));
    c.expect(count_of(radar, "<circle class=\"gridline\"") ==
                 static_cast<std::size_t>(m.max_level + 1),
             "gridline count, instance " + std::to_string(i));
    const auto ring = ring_analysis(m, list.front(), ScoringPolicy::Strict, kAt);
    for (const auto& d : ring.domains) {
      const auto svg = render_ring_svg(ring, d.domain_id);
      std::map<int, double> sums;
      for (std::sregex_iterator it(svg.begin(), svg.end(), arc), end; it != end; ++it) {
        sums[std::stoi((*it)[1])] += std::stod((*it)[2]);
      }
      for (const auto& l : d.levels) {
        if (l.cumulative_total == 0) continue;
        c.expect(std::fabs(sums[l.level] - 360.0) <= 1e-6,
                 "arc sum " + std::to_string(sums[l.level]) + ", instance " +
                     std::to_string(i));
      }
    }
  }
  const auto ws = load_workspace(casestudy());
  const auto& model = ws.catalog("icsctm2-casestudy");
  const auto ring = ring_analysis(model, ws.assessment("powercyber"),
                                  ScoringPolicy::Strict, kAt);
  const auto radar = radar_analysis(model, all_of(ws), ScoringPolicy::Strict, kAt);
  c.expect(read_file(test::golden("powercyber-ring-arch.svg")) ==
               render_ring_svg(ring, "ARCH"),
           "PowerCyber ring golden differs");
  c.expect(read_file(test::golden("casestudy-radar.svg")) == render_radar_svg(radar),
           "8-testbed radar golden differs");
  return c;
}

Check cli_contract() {
  Check c;
  const auto two = run_cli({"-w", casestudy(), "ring", "powercyber", "sutd-swat"});
  c.expect(two.exit_code == 2, "ring with 2 ids exited " + std::to_string(two.exit_code));
  const auto ws = load_workspace(casestudy());
  const auto& model = ws.catalog("icsctm2-casestudy");
  for (const auto& [id, a] : ws.assessments) {
    for (auto policy : {ScoringPolicy::Strict, ScoringPolicy::Lenient}) {
      const auto p =
          run_cli({"-w", casestudy(), "score", id, "--policy", to_string(policy)});
      c.expect(p.exit_code == 0 &&
                   p.out == serialize_scorecard(score_assessment(model, a, policy, kAt)),
               "score JSON differs for " + id);
    }
  }
  return c;
}

}  // namespace
}  // namespace ctm2::acceptance

int main() {
  using namespace ctm2::acceptance;
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"ring counts ARCH {5, 9, 21} via CLI, < 1 s", ring_counts},
      {"PowerCyber ARCH achieves MIL2", mil_assignment},
      {"staircase rule, 500 instances", staircase},
      {"oracle equivalence, 1000 instances, < 30 s", oracle_equivalence},
      {"monotonicity, 1000 upgrade pairs", monotonicity},
      {"radar/matrix/scorecard consistency, 200 workspaces", triple_consistency},
      {"round-trips, 500 values + workspace save/load", round_trips},
      {"render structure and golden files", render_structure},
      {"CLI contract", cli_contract},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %zu: %s  %s\n", i + 1, c.failures ? "FAIL" : "PASS",
                criteria[i].first.c_str());
    for (const auto& note : c.notes) std::printf("    %s\n", note.c_str());
    if (c.failures) ++failed;
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
