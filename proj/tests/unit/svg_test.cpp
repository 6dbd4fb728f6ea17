#include <gtest/gtest.h>

#include <regex>

#include "airshed/clustering.hpp"
#include "airshed/error.hpp"
#include "airshed/svg.hpp"

namespace airshed {
namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

Ring square(double x0, double y0, double size) {
  return {{x0, y0}, {x0 + size, y0}, {x0 + size, y0 + size}, {x0, y0 + size}, {x0, y0}};
}

TEST(Choropleth, SingleRegion) {
  const std::vector<Region> regions = {{"A", {Polygon{square(0, 0, 1), {}}}}};
  const std::string svg = render_choropleth(regions, {{"A", 0}});
  EXPECT_EQ(count(svg, "<path "), 1u);
  EXPECT_EQ(count(svg, "Cluster 0"), 1u);
  EXPECT_NE(svg.find(kClusterPalette[0]), std::string::npos);
  EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Choropleth, HoleBecomesSecondSubpath) {
  const std::vector<Region> regions = {{"A", {Polygon{square(0, 0, 4), {square(1, 1, 2)}}}}};
  const std::string svg = render_choropleth(regions, {{"A", 0}});
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, std::regex(R"re(<path d="([^"]*)")re")));
  EXPECT_EQ(count(m[1].str(), "M"), 2u);
  EXPECT_EQ(count(m[1].str(), "Z"), 2u);
  EXPECT_NE(svg.find(R"(fill-rule="evenodd")"), std::string::npos);
}

TEST(Choropleth, DeterministicAndNoiseHatched) {
  const std::vector<Region> regions = {{"A", {Polygon{square(0, 0, 1), {}}}},
                                       {"B", {Polygon{square(1, 0, 1), {}}}},
                                       {"C", {Polygon{square(2, 0, 1), {}}}}};
  const std::map<std::string, int> labels = {{"A", 1}, {"B", kNoise}};
  const std::string first = render_choropleth(regions, labels);
  EXPECT_EQ(first, render_choropleth(regions, labels));
  EXPECT_NE(first.find("url(#noise-hatch)"), std::string::npos);
  EXPECT_NE(first.find("No data"), std::string::npos);
  EXPECT_EQ(count(first, "<path "), 3u);
}

TEST(Choropleth, UnknownRegionName) {
  const std::vector<Region> regions = {{"A", {Polygon{square(0, 0, 1), {}}}}};
  try {
    render_choropleth(regions, {{"Z", 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownRegionName);
  }
}

TEST(Charts, ElbowSilhouetteAndSignatures) {
  ElbowCurve distortion{{2, 3, 4, 5}, {10, 4, 3, 2.5}, Metric::Distortion, 3};
  ElbowCurve sil{{2, 3, 4, 5}, {0.3, 0.5, 0.4, 0.35}, Metric::Silhouette, 3};
  const std::string elbow = render_elbow(distortion, &sil, 3);
  EXPECT_EQ(elbow, render_elbow(distortion, &sil, 3));
  EXPECT_NE(elbow.find("k = 3"), std::string::npos);

  SilhouetteReport report;
  report.rows = {0, 1, 2};
  report.per_point = {0.5, -0.1, 0.2};
  report.per_cluster = {{0.5, -0.1}, {0.2}};
  report.mean = 0.2;
  EXPECT_NE(render_silhouette(report).find("<rect"), std::string::npos);

  SignatureReport sig;
  sig.signatures = {{-1, 0, 1, 0, 0, 0}, {1, 0, -1, 0, 0, 0}};
  sig.membership = {{"a"}, {"b"}};
  const std::string bars = render_signatures(sig);
  EXPECT_NE(bars.find("AER_AI"), std::string::npos);
}

}  // namespace
}  // namespace airshed
