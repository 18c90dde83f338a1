#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cmath>
#include <cstdlib>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "ctm2/analysis.hpp"
#include "ctm2/interchange.hpp"
#include "ctm2/render.hpp"
#include "support/generators.hpp"
#include "support/paths.hpp"

namespace ctm2 {
namespace {

constexpr Timestamp kAt{1700000000};

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

// Values of `attr` on every element whose opening tag contains `marker`.
std::vector<std::string> attribute_values(const std::string& svg,
                                          const std::string& marker,
                                          const std::string& attr) {
  std::vector<std::string> out;
  std::istringstream in(svg);
  std::string line;
  const std::regex re(attr + "=\"([^\"]*)\"");
  while (std::getline(in, line)) {
    if (line.find(marker) == std::string::npos) continue;
    std::smatch m;
    if (std::regex_search(line, m, re)) out.push_back(m[1]);
  }
  return out;
}

std::vector<std::string> text_bodies(const std::string& svg,
                                     const std::string& cls) {
  std::vector<std::string> out;
  const std::regex re("<text class=\"" + cls + "\"[^>]*>([^<]*)</text>");
  for (std::sregex_iterator it(svg.begin(), svg.end(), re), end; it != end;
       ++it) {
    out.push_back((*it)[1]);
  }
  return out;
}

void expect_well_formed_svg(const std::string& svg) {
  boost::property_tree::ptree tree;
  std::istringstream in(svg);
  ASSERT_NO_THROW(boost::property_tree::read_xml(in, tree));
  ASSERT_EQ(tree.size(), 1u);
  EXPECT_EQ(tree.begin()->first, "svg");
  EXPECT_TRUE(tree.get_optional<std::string>("svg.<xmlattr>.viewBox"));
}

class CasestudyRender : public ::testing::Test {
 protected:
  void SetUp() override { ws_ = load_workspace(test::casestudy_workspace()); }
  const MaturityModel& model() const { return ws_.catalog("icsctm2-casestudy"); }
  std::vector<Assessment> all() const {
    std::vector<Assessment> out;
    for (const auto& [id, a] : ws_.assessments) out.push_back(a);
    return out;
  }
  Workspace ws_;
};

TEST_F(CasestudyRender, RadarStructure) {
  const auto radar = radar_analysis(model(), all(), ScoringPolicy::Strict, kAt);
  const auto svg = render_radar_svg(radar);
  expect_well_formed_svg(svg);
  EXPECT_EQ(count_of(svg, "<line class=\"axis\""), 5u);
  EXPECT_EQ(count_of(svg, "<circle class=\"gridline\""), 4u);
  EXPECT_EQ(count_of(svg, "<polyline class=\"series\""), 8u);
  EXPECT_EQ(text_bodies(svg, "legend-label").size(), 8u);
  EXPECT_EQ(render_radar_svg(radar), svg);
}

TEST_F(CasestudyRender, RadarLabelsEqualReportFields) {
  const auto radar = radar_analysis(model(), all(), ScoringPolicy::Strict, kAt);
  const auto svg = render_radar_svg(radar);
  const auto mils = attribute_values(svg, "class=\"series\"", "data-mils");
  ASSERT_EQ(mils.size(), radar.entries.size());
  for (std::size_t i = 0; i < mils.size(); ++i) {
    std::string expect;
    for (int m : radar.entries[i].mils) {
      expect += (expect.empty() ? "" : ",") + std::to_string(m);
    }
    EXPECT_EQ(mils[i], expect);
  }
}

TEST_F(CasestudyRender, RadarSortByName) {
  auto radar = radar_analysis(model(), all(), ScoringPolicy::Strict, kAt);
  RenderOptions o;
  o.sort_series = SeriesOrder::ByName;
  const auto labels = text_bodies(render_radar_svg(radar, o), "legend-label");
  EXPECT_TRUE(std::is_sorted(labels.begin(), labels.end()));
}

TEST(RadarRender, ZeroMilsCollapseToCenter) {
  RadarReport r;
  r.header = {"m", "1.0.0", ScoringPolicy::Strict, kAt};
  r.domains = {{"A", "A"}, {"B", "B"}, {"C", "C"}};
  r.entries = {{"z", "Zero", {0, 0, 0}}};
  const auto svg = render_radar_svg(r);
  const auto points = attribute_values(svg, "class=\"series\"", "points");
  ASSERT_EQ(points.size(), 1u);
  std::istringstream in(points[0]);
  std::string pt, first;
  int n = 0;
  while (in >> pt) {
    if (first.empty()) first = pt;
    EXPECT_EQ(pt, first);
    ++n;
  }
  EXPECT_EQ(n, 4);
  EXPECT_EQ(first, "400.000,401.000");
}

TEST(RadarRender, AxisStartsAtTwelveOClockClockwise) {
  RadarReport r;
  r.header = {"m", "1.0.0", ScoringPolicy::Strict, kAt};
  r.domains = {{"A", "A"}, {"B", "B"}, {"C", "C"}, {"D", "D"}};
  r.entries = {{"x", "X", {3, 3, 3, 3}}};
  RenderOptions o;
  o.legend = false;
  const auto svg = render_radar_svg(r, o);
  const auto x2 = attribute_values(svg, "class=\"axis\"", "x2");
  const auto y2 = attribute_values(svg, "class=\"axis\"", "y2");
  ASSERT_EQ(x2.size(), 4u);
  // Center (400, 420); first axis straight up, second to the right.
  EXPECT_EQ(x2[0], "400.000");
  EXPECT_LT(std::stod(y2[0]), 420.0);
  EXPECT_GT(std::stod(x2[1]), 400.0);
  EXPECT_EQ(y2[1], "420.000");
}

TEST(RenderOptionsCheck, RejectsInvalidOptions) {
  RadarReport r;
  r.domains = {{"A", "A"}};
  r.entries = {{"x", "X", {1}}};
  RenderOptions small;
  small.width = 99;
  EXPECT_THROW(render_radar_svg(r, small), Error);
  RenderOptions bad_color;
  bad_color.states.partial = "amber";
  EXPECT_THROW(render_radar_svg(r, bad_color), Error);
}

TEST_F(CasestudyRender, RingPowerCyberArchLabels) {
  const auto ring = ring_analysis(model(), ws_.assessment("powercyber"),
                                  ScoringPolicy::Strict, kAt);
  const auto svg = render_ring_svg(ring, "ARCH");
  expect_well_formed_svg(svg);
  EXPECT_EQ(text_bodies(svg, "total-label"),
            (std::vector<std::string>{"5", "9", "21"}));
  EXPECT_EQ(count_of(svg, "<g class=\"annulus\""), 3u);
  EXPECT_THROW(render_ring_svg(ring, "NOPE"), Error);
}

TEST_F(CasestudyRender, RingCountLabelsEqualCumulativeCounts) {
  const auto ring = ring_analysis(model(), ws_.assessment("powercyber"),
                                  ScoringPolicy::Strict, kAt);
  for (const auto& d : ring.domains) {
    const auto svg = render_ring_svg(ring, d.domain_id);
    const auto levels = attribute_values(svg, "class=\"arc", "data-level");
    const auto states = attribute_values(svg, "class=\"arc", "data-state");
    const auto counts = attribute_values(svg, "class=\"arc", "data-count");
    ASSERT_EQ(levels.size(), counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const auto& lvl = d.levels[static_cast<std::size_t>(std::stoi(levels[i]) - 1)];
      EXPECT_EQ(std::stoul(counts[i]),
                lvl.cumulative.of(*state_from_string(states[i])));
    }
  }
}

TEST(RingRender, SingleFullCriterionIsOneFullAnnulus) {
  MaturityModel m{"m", "1.0.0", "m", 1, {{"D", "Dom", "", {{"D.1.1", "x", 1, {}}}}}};
  Assessment a;
  a.id = "a";
  a.model_id = "m";
  a.model_version = "1.0.0";
  a.meta.name = "A";
  a.responses = {{"D.1.1", ImplementationState::Full}};
  const auto svg = render_ring_svg(ring_analysis(m, a, ScoringPolicy::Strict, kAt), "D");
  EXPECT_EQ(count_of(svg, "<g class=\"annulus\""), 1u);
  EXPECT_EQ(count_of(svg, "<path class=\"arc "), 1u);
  EXPECT_EQ(attribute_values(svg, "class=\"arc", "data-sweep"),
            (std::vector<std::string>{"360.000000000"}));
  EXPECT_EQ(attribute_values(svg, "class=\"arc", "fill"),
            (std::vector<std::string>{RenderOptions{}.states.full}));
}

TEST(RingRender, ArcAnglesSumToFullTurn) {
  gen::Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto m = gen::random_catalog(rng);
    const auto a = gen::random_assessment(rng, m, "a");
    const auto ring = ring_analysis(m, a, ScoringPolicy::Strict, kAt);
    for (const auto& d : ring.domains) {
      const auto svg = render_ring_svg(ring, d.domain_id);
      std::map<int, double> sums;
      const auto levels = attribute_values(svg, "class=\"arc", "data-level");
      const auto sweeps = attribute_values(svg, "class=\"arc", "data-sweep");
      for (std::size_t k = 0; k < sweeps.size(); ++k) {
        sums[std::stoi(levels[k])] += std::stod(sweeps[k]);
      }
      for (const auto& l : d.levels) {
        if (l.cumulative_total == 0) {
          EXPECT_EQ(sums.count(l.level), 0u);
          continue;
        }
        EXPECT_NEAR(sums[l.level], 360.0, 1e-6);
      }
    }
  }
}

TEST(RingRender, WellFormedForRandomReports) {
  gen::Rng rng(22);
  for (int i = 0; i < 30; ++i) {
    const auto m = gen::random_catalog(rng);
    const auto a = gen::random_assessment(rng, m, "a");
    const auto ring = ring_analysis(m, a, ScoringPolicy::Strict, kAt);
    expect_well_formed_svg(render_ring_svg(ring, m.domains[0].id));
    expect_well_formed_svg(render_radar_svg(radar_analysis(m, {a}, ScoringPolicy::Strict, kAt)));
  }
}

TEST_F(CasestudyRender, GoldenFiles) {
  const auto ring = ring_analysis(model(), ws_.assessment("powercyber"),
                                  ScoringPolicy::Strict, kAt);
  const auto radar = radar_analysis(model(), all(), ScoringPolicy::Strict, kAt);
  const std::map<std::string, std::string> outputs = {
      {"powercyber-ring-arch.svg", render_ring_svg(ring, "ARCH")},
      {"casestudy-radar.svg", render_radar_svg(radar)}};
  for (const auto& [name, bytes] : outputs) {
    if (std::getenv("CTM2_UPDATE_GOLDEN")) {
      write_file_atomic(test::golden(name), bytes);
    }
    EXPECT_EQ(read_file(test::golden(name)), bytes) << name;
  }
}

TEST_F(CasestudyRender, MatrixMarkdown) {
  const auto md = render_markdown(compare(model(), all(), ScoringPolicy::Strict, kAt));
  std::istringstream in(md);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (line.rfind("| ", 0) == 0) rows.push_back(line);
  }
  ASSERT_EQ(rows.size(), 9u);  // header + 8 testbeds
  EXPECT_EQ(rows[0], "| Testbed | Institute | Sector | ARCH | FID | SCL | CST | APP |");
  EXPECT_EQ(render_markdown(compare(model(), all(), ScoringPolicy::Strict, kAt)), md);
}

TEST_F(CasestudyRender, GapMarkdownAtCeiling) {
  Assessment a = ws_.assessment("powercyber");
  for (const auto& d : model().domains) {
    for (const auto& c : d.criteria) a.responses[c.id] = ImplementationState::Full;
  }
  const auto md = render_markdown(gap_analysis(model(), a, ScoringPolicy::Strict, kAt));
  EXPECT_EQ(count_of(md, "No blocking criteria — maximum MIL achieved."), 5u);
}

TEST(MarkdownRender, ScorecardMilCellsEqualJson) {
  gen::Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const auto m = gen::random_catalog(rng);
    const auto card = score_assessment(m, gen::random_assessment(rng, m, "a"),
                                       ScoringPolicy::Strict, kAt);
    const auto md = render_markdown(card);
    const auto json = Json::parse(serialize_scorecard(card));
    const std::regex row(R"(^\| (\w+) \| (\d+) \| (\d+|-) \|$)");
    std::istringstream in(md);
    std::string line;
    std::size_t k = 0;
    while (std::getline(in, line)) {
      std::smatch match;
      if (!std::regex_match(line, match, row)) continue;
      ASSERT_LT(k, json["domains"].size());
      EXPECT_EQ(match[1].str(), json["domains"][k]["domain_id"].get<std::string>());
      EXPECT_EQ(std::stoi(match[2]), json["domains"][k]["achieved_mil"].get<int>());
      ++k;
    }
    EXPECT_EQ(k, card.domains.size());
  }
}

TEST(MarkdownRender, EscapesPipes) {
  ComparisonMatrix m;
  m.header = {"m", "1.0.0", ScoringPolicy::Strict, kAt};
  m.domains = {{"A", "A"}};
  m.rows = {{"x", "Nuclear | Test", "I", "S", {1}}};
  EXPECT_NE(render_markdown(m).find("Nuclear \\| Test"), std::string::npos);
}

}  // namespace
}  // namespace ctm2
