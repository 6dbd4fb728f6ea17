#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace airshed {

enum class Pollutant { NO2, SO2, CO, AER_AI, O3, HCHO };

/// Column order used by every feature table. CH4 is deliberately absent.
inline constexpr std::array<Pollutant, 6> kCanonicalPollutants = {
    Pollutant::NO2, Pollutant::SO2, Pollutant::CO,
    Pollutant::AER_AI, Pollutant::O3, Pollutant::HCHO};

std::string_view to_string(Pollutant p) noexcept;
std::optional<Pollutant> parse_pollutant(std::string_view name) noexcept;

constexpr std::size_t index_of(Pollutant p) noexcept {
  return static_cast<std::size_t>(p);
}

}  // namespace airshed
