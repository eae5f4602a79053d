#pragma once

// CSV and SVG emission for learning curves. Numbers are written with
// std::to_chars (shortest round-trip form, locale independent).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rshape/harness/stats.hpp"

namespace rshape {

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error("malformed number '" + std::string(s) + "'");
  return v;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

// Header `episode,mean,stderr,auc_total`; auc_total is the area under the mean
// curve up to and including that episode, so the last row holds the total.
inline std::string curve_csv(const LearningCurve& curve) {
  std::string out = "episode,mean,stderr,auc_total\n";
  double area = 0.0;
  for (std::size_t e = 0; e < curve.episodes(); ++e) {
    area += curve.mean()[e];
    out += std::to_string(e + 1);
    out += ',';
    out += format_number(curve.mean()[e]);
    out += ',';
    out += format_number(curve.standard_error()[e]);
    out += ',';
    out += format_number(area);
    out += '\n';
  }
  return out;
}

inline void emit_csv(const LearningCurve& curve, const std::string& path) {
  if (curve.episodes() == 0) throw std::invalid_argument("cannot emit an empty learning curve");
  write_text_file(path, curve_csv(curve));
}

struct CurveRow {
  int episode = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double auc_total = 0.0;
};

inline std::vector<CurveRow> read_curve_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "episode,mean,stderr,auc_total")
    throw std::runtime_error("'" + path + "': unexpected CSV header");
  std::vector<CurveRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      cells.push_back(rest.substr(0, pos));
    cells.push_back(rest);
    if (cells.size() != 4) throw std::runtime_error("'" + path + "': malformed CSV row");
    rows.push_back({static_cast<int>(parse_number(cells[0])), parse_number(cells[1]),
                    parse_number(cells[2]), parse_number(cells[3])});
  }
  return rows;
}

enum class Orientation { LowerBetter, HigherBetter };

struct NamedCurve {
  std::string name;
  const LearningCurve* curve = nullptr;
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fixed(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                           "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace detail

// Line chart of mean steps per episode with a translucent +-1 standard error
// band per curve and a legend entry per curve.
inline std::string curves_svg(const std::vector<NamedCurve>& curves, Orientation orientation,
                              std::string_view title = {}) {
  if (curves.empty()) throw std::invalid_argument("plot needs at least one curve");
  std::size_t episodes = 0;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& nc : curves) {
    if (nc.curve == nullptr || nc.curve->episodes() == 0) throw std::invalid_argument("empty curve in plot");
    episodes = std::max(episodes, nc.curve->episodes());
    for (std::size_t e = 0; e < nc.curve->episodes(); ++e) {
      lo = std::min(lo, nc.curve->mean()[e] - nc.curve->standard_error()[e]);
      hi = std::max(hi, nc.curve->mean()[e] + nc.curve->standard_error()[e]);
    }
  }
  lo = std::min(lo, 0.0);
  if (hi - lo < 1e-9) hi = lo + 1.0;
  hi += 0.05 * (hi - lo);

  const double width = 760, height = 460;
  const double left = 70, right = 200, top = 40, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  const double x_span = episodes > 1 ? static_cast<double>(episodes - 1) : 1.0;
  auto px = [&](std::size_t e) { return left + plot_w * static_cast<double>(e) / x_span; };
  auto py = [&](double v) { return top + plot_h * (1.0 - (v - lo) / (hi - lo)); };
  using detail::fixed;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width) << "\" height=\""
      << fixed(height) << "\" viewBox=\"0 0 " << fixed(width) << ' ' << fixed(height) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fixed(width) << "\" height=\"" << fixed(height)
      << "\" fill=\"white\"/>\n";
  std::string heading(title);
  heading += orientation == Orientation::LowerBetter ? " (lower is better)" : " (higher is better)";
  svg << "<text x=\"" << fixed(left) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
      << detail::xml_escape(heading) << "</text>\n";

  // Axes and ticks.
  svg << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top + plot_h) << "\" x2=\"" << fixed(left + plot_w)
      << "\" y2=\"" << fixed(top + plot_h) << "\"/>\n"
      << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(left) << "\" y2=\""
      << fixed(top + plot_h) << "\"/>\n</g>\n";
  svg << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = lo + (hi - lo) * i / 5.0;
    svg << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(py(v) + 4) << "\" text-anchor=\"end\">"
        << fixed(v) << "</text>\n";
    const auto e = static_cast<std::size_t>(std::lround(x_span * i / 5.0));
    svg << "<text x=\"" << fixed(px(e)) << "\" y=\"" << fixed(top + plot_h + 16)
        << "\" text-anchor=\"middle\">" << std::to_string(e + 1) << "</text>\n";
  }
  svg << "<text x=\"" << fixed(left + plot_w / 2) << "\" y=\"" << fixed(height - 10)
      << "\" text-anchor=\"middle\">episode</text>\n"
      << "<text x=\"16\" y=\"" << fixed(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fixed(top + plot_h / 2) << ")\">steps per episode</text>\n</g>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = *curves[i].curve;
    const char* color = detail::kPalette[i % std::size(detail::kPalette)];
    svg << "<g class=\"curve\">\n<polygon class=\"stderr-band\" fill=\"" << color
        << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t e = 0; e < c.episodes(); ++e)
      svg << fixed(px(e)) << ',' << fixed(py(c.mean()[e] + c.standard_error()[e])) << ' ';
    for (std::size_t e = c.episodes(); e-- > 0;)
      svg << fixed(px(e)) << ',' << fixed(py(c.mean()[e] - c.standard_error()[e])) << (e ? " " : "");
    svg << "\"/>\n<polyline class=\"mean\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t e = 0; e < c.episodes(); ++e)
      svg << fixed(px(e)) << ',' << fixed(py(c.mean()[e])) << (e + 1 < c.episodes() ? " " : "");
    svg << "\"/>\n</g>\n";
  }

  svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double y = top + 10 + 20.0 * static_cast<double>(i);
    const char* color = detail::kPalette[i % std::size(detail::kPalette)];
    svg << "<g class=\"legend-entry\"><rect x=\"" << fixed(left + plot_w + 15) << "\" y=\"" << fixed(y - 9)
        << "\" width=\"14\" height=\"10\" fill=\"" << color << "\"/><text x=\"" << fixed(left + plot_w + 35)
        << "\" y=\"" << fixed(y) << "\">" << detail::xml_escape(curves[i].name) << "</text></g>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

inline void emit_plot(const std::vector<NamedCurve>& curves, const std::string& path, Orientation orientation,
                      std::string_view title = {}) {
  write_text_file(path, curves_svg(curves, orientation, title));
}

}  // namespace rshape
