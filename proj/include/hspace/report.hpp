#pragma once

// Report rows and their CSV / JSON / SVG renderings.

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace hspace {

struct ReportRow {
  std::string arch;
  std::size_t params = 0;
  std::size_t values = 0;
  std::string method;  ///< bound | exact | symbolic | numeric:<activation>
  std::string policy;  ///< normalization policy, tolerance, or "-"
  std::string count;   ///< decimal integer, or p/q for the bound
  double seconds = 0.0;

  bool operator==(const ReportRow&) const = default;
};

inline constexpr std::string_view csv_header = "arch,P,V,method,policy,count,seconds";

namespace detail {

inline std::string format_seconds(double s) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s);
  if (ec != std::errc{}) throw std::runtime_error("cannot format seconds");
  return std::string(buf, ptr);
}

inline double parse_seconds(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw std::invalid_argument("malformed seconds field '" + std::string(text) + "'");
  return v;
}

inline std::size_t parse_size(std::string_view text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw std::invalid_argument("malformed integer field '" + std::string(text) + "'");
  return v;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.emplace_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace detail

inline std::string to_csv_line(const ReportRow& r, bool with_seconds = true) {
  std::string line = r.arch + "," + std::to_string(r.params) + "," + std::to_string(r.values) + "," + r.method + "," + r.policy + "," + r.count;
  line += ",";
  if (with_seconds) line += detail::format_seconds(r.seconds);
  return line;
}

inline std::string to_csv(const std::vector<ReportRow>& rows, bool with_seconds = true) {
  std::string out(csv_header);
  out += "\n";
  for (const auto& r : rows) out += to_csv_line(r, with_seconds) + "\n";
  return out;
}

inline std::vector<ReportRow> parse_csv(std::string_view text) {
  std::vector<ReportRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != csv_header) throw std::invalid_argument("missing or wrong CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 7) throw std::invalid_argument("CSV row has " + std::to_string(f.size()) + " fields: " + line);
    rows.push_back({f[0], detail::parse_size(f[1]), detail::parse_size(f[2]), f[3], f[4], f[5],
                    f[6].empty() ? 0.0 : detail::parse_seconds(f[6])});
  }
  return rows;
}

inline std::string to_json(const std::vector<ReportRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"arch", r.arch}, {"P", r.params}, {"V", r.values}, {"method", r.method},
                   {"policy", r.policy}, {"count", r.count}, {"seconds", r.seconds}});
  return arr.dump(2) + "\n";
}

inline std::vector<ReportRow> parse_json(std::string_view text) {
  const auto arr = nlohmann::json::parse(text);
  if (!arr.is_array()) throw std::invalid_argument("report JSON must be an array");
  std::vector<ReportRow> rows;
  for (const auto& o : arr)
    rows.push_back({o.at("arch").get<std::string>(), o.at("P").get<std::size_t>(), o.at("V").get<std::size_t>(),
                    o.at("method").get<std::string>(), o.at("policy").get<std::string>(), o.at("count").get<std::string>(),
                    o.at("seconds").get<double>()});
  return rows;
}

/// Decimal integer or p/q as a double, for plotting only.
inline double count_as_double(const std::string& count) {
  const auto slash = count.find('/');
  if (slash == std::string::npos) return std::stod(count);
  return std::stod(count.substr(0, slash)) / std::stod(count.substr(slash + 1));
}

/// Count (log scale) against P, one panel per V. Series are grouped by the
/// number of hidden layers; bound lines are dashed, all others solid.
inline std::string render_svg(const std::vector<ReportRow>& rows) {
  std::set<std::size_t> vs;
  for (const auto& r : rows) vs.insert(r.values);
  const double panel_w = 460, panel_h = 340, margin = 60;
  const double width = std::max<double>(1, static_cast<double>(vs.size())) * panel_w;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << panel_h
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  auto depth_of = [](const std::string& arch) { return static_cast<std::size_t>(std::count(arch.begin(), arch.end(), '-')); };
  static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"};

  std::size_t panel = 0;
  for (auto v : vs) {
    const double ox = static_cast<double>(panel++) * panel_w;
    double pmin = 1e300, pmax = -1e300, ymin = 1e300, ymax = -1e300;
    std::map<std::pair<std::size_t, std::string>, std::vector<std::pair<double, double>>> series;
    for (const auto& r : rows) {
      if (r.values != v) continue;
      const double y = std::log10(std::max(count_as_double(r.count), 1e-300));
      const double x = static_cast<double>(r.params);
      series[{depth_of(r.arch), r.method + (r.policy == "-" ? "" : " " + r.policy)}].push_back({x, y});
      pmin = std::min(pmin, x), pmax = std::max(pmax, x), ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    }
    if (pmax <= pmin) pmax = pmin + 1;
    ymin = std::floor(ymin), ymax = std::ceil(ymax);
    if (ymax <= ymin) ymax = ymin + 1;
    auto sx = [&](double x) { return ox + margin + (x - pmin) / (pmax - pmin) * (panel_w - 2 * margin); };
    auto sy = [&](double y) { return panel_h - margin + -(y - ymin) / (ymax - ymin) * (panel_h - 2 * margin); };

    svg << "<text x=\"" << ox + panel_w / 2 << "\" y=\"20\" text-anchor=\"middle\">V=" << v << "</text>\n";
    svg << "<line x1=\"" << sx(pmin) << "\" y1=\"" << sy(ymin) << "\" x2=\"" << sx(pmax) << "\" y2=\"" << sy(ymin) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << sx(pmin) << "\" y1=\"" << sy(ymin) << "\" x2=\"" << sx(pmin) << "\" y2=\"" << sy(ymax) << "\" stroke=\"black\"/>\n";
    for (double e = ymin; e <= ymax; e += 1)
      svg << "<text x=\"" << sx(pmin) - 6 << "\" y=\"" << sy(e) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    svg << "<text x=\"" << ox + panel_w / 2 << "\" y=\"" << panel_h - 15 << "\" text-anchor=\"middle\">P</text>\n";

    std::size_t legend = 0;
    for (auto& [key, pts] : series) {
      std::sort(pts.begin(), pts.end());
      const bool dashed = key.second.rfind("bound", 0) == 0;
      const char* colour = palette[(key.first - 1) % 5];
      svg << "<polyline fill=\"none\" stroke=\"" << colour << "\"" << (dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
      for (const auto& [x, y] : pts) svg << sx(x) << "," << sy(y) << " ";
      svg << "\"/>\n";
      for (const auto& [x, y] : pts) svg << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"2.5\" fill=\"" << colour << "\"/>\n";
      svg << "<text x=\"" << ox + margin + 8 << "\" y=\"" << 40 + 14 * legend++ << "\" fill=\"" << colour << "\">" << key.first
          << " hidden layer(s), " << key.second << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace hspace
