#include "airshed/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "airshed/error.hpp"

namespace airshed {

namespace {

constexpr std::string_view kNoDataFill = "#ffffff";
constexpr std::string_view kStroke = "#4d4d4d";

class Svg {
 public:
  Svg(double width, double height) : width_(width), height_(height) {}

  template <typename... Args>
  void add(fmt::format_string<Args...> f, Args&&... args) {
    fmt::format_to(std::back_inserter(body_), f, std::forward<Args>(args)...);
    body_.push_back('\n');
  }

  void text(double x, double y, std::string_view s, std::string_view anchor = "start",
            int size = 12) {
    add(R"(<text x="{:.2f}" y="{:.2f}" font-size="{}" text-anchor="{}">{}</text>)", x, y, size,
        anchor, escape(s));
  }

  std::string finish() const {
    return fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.2f}\" height=\"{1:.2f}\" "
        "viewBox=\"0 0 {0:.2f} {1:.2f}\" font-family=\"sans-serif\">\n{2}</svg>\n",
        width_, height_, fmt::to_string(body_));
  }

  static std::string escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
      switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(ch);
      }
    }
    return out;
  }

 private:
  double width_;
  double height_;
  fmt::memory_buffer body_;
};

struct Scale {
  double d0, d1, r0, r1;
  double operator()(double v) const {
    if (d1 == d0) return 0.5 * (r0 + r1);
    return r0 + (v - d0) / (d1 - d0) * (r1 - r0);
  }
};

std::string_view cluster_color(int label) {
  return kClusterPalette[static_cast<std::size_t>(label) % kClusterPalette.size()];
}

void legend_swatch(Svg& svg, double x, double y, std::string_view fill, std::string_view label) {
  svg.add(R"(<rect x="{:.2f}" y="{:.2f}" width="14" height="14" fill="{}" stroke="{}"/>)", x, y,
          fill, kStroke);
  svg.text(x + 20, y + 12, label);
}

// Frame, axes, and tick labels for a line chart panel.
void axes(Svg& svg, const Scale& x, const Scale& y, const std::vector<std::size_t>& ks,
          double y_min, double y_max, std::string_view title, std::string_view y_label) {
  svg.add(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}"/>)", x.r0, y.r0,
          x.r1, y.r0, kStroke);
  svg.add(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}"/>)", x.r0, y.r0,
          x.r0, y.r1, kStroke);
  for (std::size_t k : ks) {
    svg.text(x(static_cast<double>(k)), y.r0 + 16, fmt::format("{}", k), "middle", 10);
  }
  for (int t = 0; t <= 4; ++t) {
    const double v = y_min + (y_max - y_min) * t / 4.0;
    svg.text(x.r0 - 6, y(v) + 4, fmt::format("{:.3g}", v), "end", 10);
  }
  svg.text(0.5 * (x.r0 + x.r1), y.r1 - 10, title, "middle", 14);
  svg.text(x.r0 - 50, 0.5 * (y.r0 + y.r1), y_label, "middle", 11);
}

void curve_panel(Svg& svg, const ElbowCurve& curve, std::optional<std::size_t> marked,
                 double top, double height, std::string_view title, std::string_view color) {
  const double left = 70, right = 620;
  const auto [lo, hi] = std::minmax_element(curve.scores.begin(), curve.scores.end());
  double y_min = *lo, y_max = *hi;
  if (y_max == y_min) y_max = y_min + 1.0;
  const Scale x{static_cast<double>(curve.ks.front()), static_cast<double>(curve.ks.back()), left,
                right};
  const Scale y{y_min, y_max, top + height - 30, top + 30};
  axes(svg, x, y, curve.ks, y_min, y_max, title, to_string(curve.metric));

  std::string points;
  for (std::size_t i = 0; i < curve.ks.size(); ++i) {
    if (i) points += ' ';
    points += fmt::format("{:.2f},{:.2f}", x(static_cast<double>(curve.ks[i])), y(curve.scores[i]));
  }
  svg.add(R"(<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>)", points, color);
  for (std::size_t i = 0; i < curve.ks.size(); ++i) {
    svg.add(R"(<circle cx="{:.2f}" cy="{:.2f}" r="3" fill="{}"/>)",
            x(static_cast<double>(curve.ks[i])), y(curve.scores[i]), color);
  }
  if (marked) {
    const double mx = x(static_cast<double>(*marked));
    svg.add(
        R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="#000000" stroke-dasharray="6,4"/>)",
        mx, y.r0, y.r1);
    svg.text(mx + 4, y.r1 + 12, fmt::format("k = {}", *marked), "start", 11);
  }
}

}  // namespace

std::string render_choropleth(std::span<const Region> regions,
                              const std::map<std::string, int>& labels) {
  std::set<std::string> known;
  for (const Region& r : regions) known.insert(r.name);
  for (const auto& [name, label] : labels) {
    if (!known.count(name)) {
      throw Error(ErrorCode::UnknownRegionName, fmt::format("no region named '{}'", name));
    }
  }

  double min_lon = std::numeric_limits<double>::infinity(), max_lon = -min_lon;
  double min_lat = min_lon, max_lat = -min_lon;
  for (const Region& r : regions) {
    for (const Polygon& p : r.polygons) {
      for (const LonLat& v : p.outer) {
        min_lon = std::min(min_lon, v.lon);
        max_lon = std::max(max_lon, v.lon);
        min_lat = std::min(min_lat, v.lat);
        max_lat = std::max(max_lat, v.lat);
      }
    }
  }
  if (regions.empty()) min_lon = max_lon = min_lat = max_lat = 0.0;

  constexpr double kMapHeight = 600.0, kMargin = 10.0, kLegendWidth = 170.0;
  const double lat_span = max_lat - min_lat;
  const double lon_span = max_lon - min_lon;
  const double scale = lat_span > 0.0 ? (kMapHeight - 2 * kMargin) / lat_span : 1.0;
  const double map_width = std::max(lon_span * scale, 1.0) + 2 * kMargin;

  std::set<int> used;
  bool any_unlabelled = false;
  for (const Region& r : regions) {
    auto it = labels.find(r.name);
    if (it == labels.end()) any_unlabelled = true;
    else used.insert(it->second);
  }
  const std::size_t legend_rows = used.size() + (any_unlabelled ? 1 : 0);
  const double height = std::max(kMapHeight, 40.0 + 22.0 * static_cast<double>(legend_rows));

  Svg svg(map_width + kLegendWidth, height);
  svg.add(
      R"svg(<defs><pattern id="noise-hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><rect width="6" height="6" fill="#bdbdbd"/><line x1="0" y1="0" x2="0" y2="6" stroke="#636363" stroke-width="2"/></pattern></defs>)svg");

  auto px = [&](const LonLat& v) {
    return std::pair{kMargin + (v.lon - min_lon) * scale, kMargin + (max_lat - v.lat) * scale};
  };
  for (const Region& r : regions) {
    auto it = labels.find(r.name);
    std::string fill;
    if (it == labels.end()) fill = std::string(kNoDataFill);
    else if (it->second < 0) fill = "url(#noise-hatch)";
    else fill = std::string(cluster_color(it->second));
    for (const Polygon& p : r.polygons) {
      std::string d;
      auto ring_path = [&](const Ring& ring) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
          const auto [x, y] = px(ring[i]);
          d += fmt::format("{}{:.2f} {:.2f} ", i == 0 ? "M" : "L", x, y);
        }
        d += "Z ";
      };
      ring_path(p.outer);
      for (const Ring& hole : p.holes) ring_path(hole);
      d.pop_back();
      svg.add(R"(<path d="{}" fill="{}" fill-rule="evenodd" stroke="{}" stroke-width="0.5"><title>{}</title></path>)",
              d, fill, kStroke, Svg::escape(r.name));
    }
  }

  double ly = 20;
  const double lx = map_width + 10;
  for (int label : used) {
    if (label < 0) legend_swatch(svg, lx, ly, "url(#noise-hatch)", "Noise");
    else legend_swatch(svg, lx, ly, cluster_color(label), fmt::format("Cluster {}", label));
    ly += 22;
  }
  if (any_unlabelled) legend_swatch(svg, lx, ly, kNoDataFill, "No data");
  return svg.finish();
}

std::string render_elbow(const ElbowCurve& distortion, const ElbowCurve* silhouette,
                         std::optional<std::size_t> marked_k) {
  const double panel = 320;
  Svg svg(660, silhouette ? 2 * panel : panel);
  curve_panel(svg, distortion, marked_k, 0, panel, "Distortion score elbow", "#1f78b4");
  if (silhouette) {
    curve_panel(svg, *silhouette, marked_k, panel, panel, "Silhouette score", "#33a02c");
  }
  return svg.finish();
}

std::string render_silhouette(const SilhouetteReport& report) {
  constexpr double kBar = 6.0, kGap = 14.0, kTop = 40.0, kLeft = 80.0, kWidth = 480.0;
  std::size_t bars = 0;
  for (const auto& c : report.per_cluster) bars += c.size();
  const double height = kTop + 40 + static_cast<double>(bars) * kBar +
                        static_cast<double>(report.per_cluster.size()) * kGap;
  Svg svg(kLeft + kWidth + 40, height);
  const Scale x{-1.0, 1.0, kLeft, kLeft + kWidth};
  svg.text(kLeft + kWidth / 2, 24, fmt::format("Silhouette per cluster (mean {:.3f})", report.mean),
           "middle", 14);

  double y = kTop;
  for (std::size_t c = 0; c < report.per_cluster.size(); ++c) {
    const double group_top = y;
    for (double s : report.per_cluster[c]) {
      const double x0 = std::min(x(0.0), x(s));
      svg.add(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}"/>)", x0, y,
              std::abs(x(s) - x(0.0)), kBar, cluster_color(static_cast<int>(c)));
      y += kBar;
    }
    svg.text(kLeft - 8, 0.5 * (group_top + y) + 4, fmt::format("Cluster {}", c), "end", 11);
    y += kGap;
  }
  svg.add(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="{3}"/>)", x(0.0),
          kTop, y, kStroke);
  svg.add(
      R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="#e31a1c" stroke-dasharray="5,3"/>)",
      x(report.mean), kTop, y);
  for (double t : {-1.0, -0.5, 0.0, 0.5, 1.0}) svg.text(x(t), y + 16, fmt::format("{:.1f}", t), "middle", 10);
  return svg.finish();
}

std::string render_signatures(const SignatureReport& report) {
  static constexpr std::array<std::string_view, 6> kPollutantColors = {
      "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};
  const std::size_t k = report.signatures.size();
  const std::size_t d = kCanonicalPollutants.size();
  constexpr double kBar = 12.0, kGroupGap = 24.0, kLeft = 70.0, kTop = 40.0, kPlot = 300.0;
  const double width = kLeft + static_cast<double>(k) * (static_cast<double>(d) * kBar + kGroupGap) + 140;

  double lo = 0.0, hi = 0.0;
  for (const auto& s : report.signatures) {
    for (double v : s) lo = std::min(lo, v), hi = std::max(hi, v);
  }
  if (hi == lo) hi = lo + 1.0;
  Svg svg(width, kTop + kPlot + 50);
  const Scale y{lo, hi, kTop + kPlot, kTop};
  svg.text(width / 2, 24, "Pollution signatures (standardized means)", "middle", 14);
  svg.add(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}"/>)", kLeft, y(0.0),
          width - 140, y(0.0), kStroke);
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    svg.text(kLeft - 6, y(v) + 4, fmt::format("{:.2f}", v), "end", 10);
  }
  for (std::size_t c = 0; c < k; ++c) {
    const double gx = kLeft + 10 + static_cast<double>(c) * (static_cast<double>(d) * kBar + kGroupGap);
    for (std::size_t j = 0; j < d; ++j) {
      const double v = report.signatures[c][j];
      svg.add(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}"/>)",
              gx + static_cast<double>(j) * kBar, std::min(y(v), y(0.0)), kBar - 1,
              std::abs(y(v) - y(0.0)), kPollutantColors[j]);
    }
    svg.text(gx + static_cast<double>(d) * kBar / 2, kTop + kPlot + 20, fmt::format("Cluster {}", c),
             "middle", 11);
  }
  double ly = kTop;
  for (std::size_t j = 0; j < d; ++j) {
    legend_swatch(svg, width - 120, ly, kPollutantColors[j], to_string(kCanonicalPollutants[j]));
    ly += 22;
  }
  return svg.finish();
}

}  // namespace airshed
