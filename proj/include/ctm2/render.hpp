#pragma once

// SVG and markdown renderers. Renderers only format report fields; they never
// rescore. Output is a pure function of (report, options).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ctm2/analysis.hpp"
#include "ctm2/error.hpp"
#include "ctm2/scoring.hpp"

namespace ctm2 {

struct StatePalette {
  std::string full = "#2e7d32";
  std::string partial = "#f9a825";
  std::string none = "#c62828";
  std::string not_assessed = "#9e9e9e";

  const std::string& of(ImplementationState s) const {
    switch (s) {
      case ImplementationState::Full: return full;
      case ImplementationState::Partial: return partial;
      case ImplementationState::None: return none;
      case ImplementationState::NotAssessed: return not_assessed;
    }
    return not_assessed;
  }
};

enum class SeriesOrder { None, ByName };

struct RenderOptions {
  int width = 800;
  int height = 800;
  StatePalette states;
  std::vector<std::string> series = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                     "#d62728", "#9467bd", "#8c564b",
                                     "#e377c2", "#17becf"};
  bool legend = true;
  SeriesOrder sort_series = SeriesOrder::None;
};

namespace render_detail {

inline bool is_hex_color(std::string_view c) {
  if (c.size() != 7 && c.size() != 4) return false;
  if (c[0] != '#') return false;
  return std::all_of(c.begin() + 1, c.end(), [](char ch) {
    return (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f') ||
           (ch >= 'A' && ch <= 'F');
  });
}

inline void check_options(const RenderOptions& o) {
  if (o.width < 100 || o.height < 100) {
    throw Error(ErrorCode::InvalidArgument,
                "render size must be at least 100x100");
  }
  for (const auto* c : {&o.states.full, &o.states.partial, &o.states.none,
                        &o.states.not_assessed}) {
    if (!is_hex_color(*c)) {
      throw Error(ErrorCode::InvalidArgument,
                  "state color '" + *c + "' is not a hex color");
    }
  }
  if (o.series.empty()) {
    throw Error(ErrorCode::InvalidArgument, "series palette is empty");
  }
  for (const auto& c : o.series) {
    if (!is_hex_color(c)) {
      throw Error(ErrorCode::InvalidArgument,
                  "series color '" + c + "' is not a hex color");
    }
  }
}

inline std::string num(double v, int decimals = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  // Normalize negative zero so output does not depend on rounding sign.
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

inline std::string xml_escape(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (char ch : in) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Point {
  double x = 0;
  double y = 0;
};

// Angle in degrees, clockwise from 12 o'clock.
inline Point polar(Point c, double radius, double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  return {c.x + radius * std::sin(rad), c.y - radius * std::cos(rad)};
}

inline std::string svg_open(const RenderOptions& o) {
  const auto w = std::to_string(o.width);
  const auto h = std::to_string(o.height);
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         w + "\" height=\"" + h + "\" viewBox=\"0 0 " + w + " " + h +
         "\" font-family=\"sans-serif\">\n"
         "  <rect class=\"background\" x=\"0\" y=\"0\" width=\"" +
         w + "\" height=\"" + h + "\" fill=\"#ffffff\"/>\n";
}

inline std::string text(Point p, std::string_view cls, std::string_view body,
                        std::string_view extra = {},
                        std::string_view anchor = "middle", int size = 14) {
  std::string s = "  <text class=\"" + std::string(cls) + "\" x=\"" +
                  num(p.x) + "\" y=\"" + num(p.y) + "\" font-size=\"" +
                  std::to_string(size) + "\" text-anchor=\"" +
                  std::string(anchor) + "\" dominant-baseline=\"middle\"";
  if (!extra.empty()) s += " " + std::string(extra);
  s += ">" + xml_escape(body) + "</text>\n";
  return s;
}

// Closed annular sector between `inner` and `outer` radii spanning
// [start, start + sweep] degrees. A full turn is drawn as two rings with the
// even-odd rule since a single SVG arc cannot close on itself.
inline std::string annular_sector(Point c, double inner, double outer,
                                  double start, double sweep) {
  auto circle = [&](double r) {
    const Point top = polar(c, r, 0.0);
    const Point bottom = polar(c, r, 180.0);
    return "M " + num(top.x) + " " + num(top.y) + " A " + num(r) + " " +
           num(r) + " 0 1 1 " + num(bottom.x) + " " + num(bottom.y) + " A " +
           num(r) + " " + num(r) + " 0 1 1 " + num(top.x) + " " + num(top.y) +
           " Z";
  };
  if (sweep >= 360.0 - 1e-9) {
    return circle(outer) + " " + circle(inner);
  }
  const double end = start + sweep;
  const char* large = sweep > 180.0 ? "1" : "0";
  const Point o0 = polar(c, outer, start);
  const Point o1 = polar(c, outer, end);
  const Point i1 = polar(c, inner, end);
  const Point i0 = polar(c, inner, start);
  return "M " + num(o0.x) + " " + num(o0.y) + " A " + num(outer) + " " +
         num(outer) + " 0 " + large + " 1 " + num(o1.x) + " " + num(o1.y) +
         " L " + num(i1.x) + " " + num(i1.y) + " A " + num(inner) + " " +
         num(inner) + " 0 " + large + " 0 " + num(i0.x) + " " + num(i0.y) +
         " Z";
}

}  // namespace render_detail

// ---------------------------------------------------------------------------
// Radar

inline std::string render_radar_svg(const RadarReport& report,
                                    const RenderOptions& options = {}) {
  using namespace render_detail;
  check_options(options);

  std::vector<const RadarEntry*> series;
  for (const auto& e : report.entries) series.push_back(&e);
  if (options.sort_series == SeriesOrder::ByName) {
    std::stable_sort(series.begin(), series.end(),
                     [](const RadarEntry* a, const RadarEntry* b) {
                       return a->testbed < b->testbed;
                     });
  }

  const double title_h = 40.0;
  const double legend_h =
      options.legend ? 22.0 * static_cast<double>(series.size()) + 16.0 : 0.0;
  const double plot_h = options.height - title_h - legend_h;
  const Point center{options.width / 2.0, title_h + plot_h / 2.0};
  const double radius =
      std::max(10.0, std::min<double>(options.width, plot_h) / 2.0 - 70.0);
  const int max_level = std::max(1, report.max_level);
  const std::size_t n = report.domains.size();
  auto angle_of = [&](std::size_t i) {
    return 360.0 * static_cast<double>(i) / static_cast<double>(n);
  };

  std::string svg = svg_open(options);
  svg += text({options.width / 2.0, 22.0}, "title",
              "Radar analysis: " + report.header.model_id + " " +
                  report.header.model_version + " (" +
                  to_string(report.header.policy) + ")",
              {}, "middle", 16);

  svg += "  <g class=\"gridlines\" fill=\"none\" stroke=\"#cccccc\">\n";
  for (int level = 0; level <= max_level; ++level) {
    const double r = radius * level / max_level;
    svg += "    <circle class=\"gridline\" data-level=\"" +
           std::to_string(level) + "\" cx=\"" + num(center.x) + "\" cy=\"" +
           num(center.y) + "\" r=\"" + num(r) + "\"/>\n";
  }
  svg += "  </g>\n";
  for (int level = 1; level <= max_level; ++level) {
    const Point p = polar(center, radius * level / max_level, 0.0);
    svg += text({p.x + 4.0, p.y - 8.0}, "grid-label",
                "MIL" + std::to_string(level), {}, "start", 11);
  }

  svg += "  <g class=\"axes\" stroke=\"#888888\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    const Point end = polar(center, radius, angle_of(i));
    svg += "    <line class=\"axis\" data-domain=\"" +
           xml_escape(report.domains[i].id) + "\" x1=\"" + num(center.x) +
           "\" y1=\"" + num(center.y) + "\" x2=\"" + num(end.x) +
           "\" y2=\"" + num(end.y) + "\"/>\n";
  }
  svg += "  </g>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = polar(center, radius + 30.0, angle_of(i));
    const auto& d = report.domains[i];
    svg += text(p, "axis-label", d.name.empty() ? d.id : d.name,
                "data-domain=\"" + xml_escape(d.id) + "\"");
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const RadarEntry& e = *series[s];
    const std::string& color = options.series[s % options.series.size()];
    std::string points;
    std::string mils;
    for (std::size_t i = 0; i <= n; ++i) {
      const std::size_t k = i % n;
      const double mil = k < e.mils.size() ? e.mils[k] : 0;
      const Point p = polar(center, radius * mil / max_level, angle_of(k));
      if (!points.empty()) points += " ";
      points += num(p.x) + "," + num(p.y);
      if (i < n) {
        if (!mils.empty()) mils += ",";
        mils += std::to_string(k < e.mils.size() ? e.mils[k] : 0);
      }
    }
    svg += "  <polyline class=\"series\" data-assessment=\"" +
           xml_escape(e.assessment_id) + "\" data-mils=\"" + mils +
           "\" points=\"" + points + "\" fill=\"" + color +
           "\" fill-opacity=\"0.15\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
  }

  if (options.legend) {
    double y = title_h + plot_h + 8.0;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const std::string& color = options.series[s % options.series.size()];
      svg += "  <rect class=\"legend-swatch\" x=\"40\" y=\"" + num(y) +
             "\" width=\"14\" height=\"14\" fill=\"" + color + "\"/>\n";
      svg += text({62.0, y + 7.0}, "legend-label", series[s]->testbed,
                  "data-assessment=\"" + xml_escape(series[s]->assessment_id) +
                      "\"",
                  "start", 13);
      y += 22.0;
    }
  }
  svg += "</svg>\n";
  return svg;
}

// ---------------------------------------------------------------------------
// Ring

// Draws one domain's rings: one annulus per level, MIL1 innermost. The inner
// band of each annulus carries the cumulative criterion total; the outer band
// is split into arcs proportional to the cumulative state counts.
inline std::string render_ring_svg(const RingReport& report,
                                   std::string_view domain_id,
                                   const RenderOptions& options = {}) {
  using namespace render_detail;
  check_options(options);
  const RingDomain& domain = report.domain(domain_id);

  const double title_h = 40.0;
  const double legend_h = options.legend ? 40.0 : 0.0;
  const double plot_h = options.height - title_h - legend_h;
  const Point center{options.width / 2.0, title_h + plot_h / 2.0};
  const double outer_radius =
      std::max(20.0, std::min<double>(options.width, plot_h) / 2.0 - 20.0);
  const double hole = outer_radius * 0.18;
  const std::size_t levels = std::max<std::size_t>(1, domain.levels.size());
  const double band = (outer_radius - hole) / static_cast<double>(levels);

  std::string svg = svg_open(options);
  svg += text({options.width / 2.0, 22.0}, "title",
              "Ring analysis: " + report.testbed + " / " +
                  (domain.name.empty() ? domain.domain_id : domain.name) +
                  " (" + to_string(report.header.policy) + ")",
              {}, "middle", 16);
  svg += text(center, "mil-label", "MIL " + std::to_string(domain.achieved_mil),
              "data-domain=\"" + xml_escape(domain.domain_id) +
                  "\" data-mil=\"" + std::to_string(domain.achieved_mil) + "\"",
              "middle", 18);

  for (std::size_t li = 0; li < domain.levels.size(); ++li) {
    const RingLevel& level = domain.levels[li];
    const double r0 = hole + band * static_cast<double>(li);
    const double split = r0 + band * 0.35;
    const double r1 = r0 + band - 2.0;
    const std::string lvl = std::to_string(level.level);
    svg += "  <g class=\"annulus\" data-level=\"" + lvl + "\">\n";
    svg += "    <path class=\"total-band\" data-level=\"" + lvl + "\" d=\"" +
           annular_sector(center, r0, split, 0.0, 360.0) +
           "\" fill=\"#eceff1\" fill-rule=\"evenodd\" stroke=\"#ffffff\"/>\n";

    if (level.cumulative_total == 0) {
      svg += "    <path class=\"empty-level\" data-level=\"" + lvl +
             "\" d=\"" + annular_sector(center, split, r1, 0.0, 360.0) +
             "\" fill=\"none\" fill-rule=\"evenodd\" stroke=\"#cccccc\"/>\n";
    } else {
      double start = 0.0;
      for (auto state : {ImplementationState::Full,
                         ImplementationState::Partial,
                         ImplementationState::None,
                         ImplementationState::NotAssessed}) {
        const std::size_t count = level.cumulative.of(state);
        if (count == 0) continue;
        const double sweep = 360.0 * static_cast<double>(count) /
                             static_cast<double>(level.cumulative_total);
        svg += std::string("    <path class=\"arc state-") + to_string(state) +
               "\" data-level=\"" + lvl + "\" data-state=\"" +
               to_string(state) + "\" data-count=\"" + std::to_string(count) +
               "\" data-start=\"" + num(start, 9) + "\" data-sweep=\"" +
               num(sweep, 9) + "\" d=\"" +
               annular_sector(center, split, r1, start, sweep) +
               "\" fill=\"" + options.states.of(state) +
               "\" fill-rule=\"evenodd\" stroke=\"#ffffff\"/>\n";
        const Point mid =
            polar(center, (split + r1) / 2.0, start + sweep / 2.0);
        svg += "  " + text(mid, "count-label", std::to_string(count),
                           std::string("data-level=\"") + lvl +
                               "\" data-state=\"" + to_string(state) + "\"",
                           "middle", 12);
        start += sweep;
      }
    }
    const Point label = polar(center, (r0 + split) / 2.0, 0.0);
    svg += "  " + text(label, "total-label",
                       std::to_string(level.cumulative_total),
                       "data-level=\"" + lvl + "\"", "middle", 12);
    svg += "  </g>\n";
  }

  if (options.legend) {
    double x = 40.0;
    const double y = options.height - legend_h + 12.0;
    for (auto state :
         {ImplementationState::Full, ImplementationState::Partial,
          ImplementationState::None, ImplementationState::NotAssessed}) {
      svg += "  <rect class=\"legend-swatch\" x=\"" + num(x) + "\" y=\"" +
             num(y) + "\" width=\"14\" height=\"14\" fill=\"" +
             options.states.of(state) + "\"/>\n";
      svg += text({x + 20.0, y + 7.0}, "legend-label", to_string(state), {},
                  "start", 13);
      x += 150.0;
    }
  }
  svg += "</svg>\n";
  return svg;
}

// ---------------------------------------------------------------------------
// Markdown

namespace render_detail {

inline std::string cell(std::string_view in) {
  std::string out;
  for (char ch : in) {
    if (ch == '|') {
      out += "\\|";
    } else if (ch == '\n') {
      out += ' ';
    } else {
      out += ch;
    }
  }
  return out;
}

inline std::string header_line(const ReportHeader& h) {
  return "Model: `" + h.model_id + "` " + h.model_version +
         " | Policy: " + to_string(h.policy) +
         " | Generated: " + to_iso8601(h.generated_at) + "\n";
}

}  // namespace render_detail

inline std::string render_markdown(const Scorecard& card) {
  using render_detail::cell;
  std::ostringstream out;
  out << "# Scorecard: " << cell(card.assessment_id) << "\n\n";
  out << render_detail::header_line(ReportHeader{card.model_id,
                                                 card.model_version,
                                                 card.policy,
                                                 card.generated_at})
      << "\n";
  out << "| Domain | MIL | Blocking level |\n|---|---:|---:|\n";
  for (const auto& d : card.domains) {
    out << "| " << cell(d.domain_id) << " | " << d.achieved_mil << " | "
        << (d.blocking_level ? std::to_string(*d.blocking_level) : "-")
        << " |\n";
  }
  out << "\n| Domain | Level | Introduced | Satisfied | Full | Partial | None "
         "| Not assessed |\n|---|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& d : card.domains) {
    for (const auto& [level, b] : d.per_level) {
      out << "| " << cell(d.domain_id) << " | " << level << " | "
          << b.introduced << " | " << b.satisfied << " | " << b.full << " | "
          << b.partial << " | " << b.none << " | " << b.not_assessed
          << " |\n";
    }
  }
  if (!card.warnings.empty()) {
    out << "\nWarnings:\n\n";
    for (const auto& w : card.warnings) out << "- " << w << "\n";
  }
  return out.str();
}

inline std::string render_markdown(const ComparisonMatrix& matrix) {
  using render_detail::cell;
  std::ostringstream out;
  out << "# Testbed comparison\n\n"
      << render_detail::header_line(matrix.header) << "\n";
  out << "| Testbed | Institute | Sector |";
  for (const auto& d : matrix.domains) out << " " << cell(d.id) << " |";
  out << "\n|---|---|---|";
  for (std::size_t i = 0; i < matrix.domains.size(); ++i) out << "---:|";
  out << "\n";
  for (const auto& row : matrix.rows) {
    out << "| " << cell(row.testbed) << " | " << cell(row.institute) << " | "
        << cell(row.sector) << " |";
    for (int mil : row.mils) out << " " << mil << " |";
    out << "\n";
  }
  return out.str();
}

inline std::string render_markdown(const GapReport& gap) {
  using render_detail::cell;
  std::ostringstream out;
  out << "# Gap analysis: " << cell(gap.testbed) << " ("
      << cell(gap.assessment_id) << ")\n\n"
      << render_detail::header_line(gap.header);
  for (const auto& d : gap.domains) {
    out << "\n## " << d.domain_id;
    if (!d.name.empty()) out << " " << d.name;
    out << ": MIL " << d.achieved_mil;
    if (d.target_level) out << ", target MIL " << *d.target_level;
    out << "\n\n";
    if (d.blocking.empty()) {
      out << "No blocking criteria — maximum MIL achieved.\n";
      continue;
    }
    out << "| Criterion | State | Text |\n|---|---|---|\n";
    for (const auto& b : d.blocking) {
      out << "| " << cell(b.id) << " | " << to_string(b.state) << " | "
          << cell(b.text) << " |\n";
    }
  }
  return out.str();
}

}  // namespace ctm2
