#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "airshed/geometry.hpp"
#include "airshed/model_selection.hpp"
#include "airshed/signatures.hpp"

namespace airshed {

/// Qualitative 6-color palette indexed by semantic cluster id (mod 6).
inline constexpr std::array<std::string_view, 6> kClusterPalette = {
    "#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3", "#a6d854", "#ffd92f"};

/// Equirectangular cluster map. Labels are semantic ids or kNoise; regions
/// without a label are drawn as "no data". Throws Error(UnknownRegionName)
/// when a label names a region that is not in `regions`.
std::string render_choropleth(std::span<const Region> regions,
                              const std::map<std::string, int>& labels);

/// Distortion curve with the chosen k marked, plus the silhouette curve when given.
std::string render_elbow(const ElbowCurve& distortion, const ElbowCurve* silhouette,
                         std::optional<std::size_t> marked_k);

/// Per-cluster sorted silhouette bars with the overall mean.
std::string render_silhouette(const SilhouetteReport& report);

/// Grouped bars: one group per semantic cluster, one bar per pollutant.
std::string render_signatures(const SignatureReport& report);

}  // namespace airshed
