#include "airshed/pollutant.hpp"

namespace airshed {

std::string_view to_string(Pollutant p) noexcept {
  switch (p) {
    case Pollutant::NO2: return "NO2";
    case Pollutant::SO2: return "SO2";
    case Pollutant::CO: return "CO";
    case Pollutant::AER_AI: return "AER_AI";
    case Pollutant::O3: return "O3";
    case Pollutant::HCHO: return "HCHO";
  }
  return "?";
}

std::optional<Pollutant> parse_pollutant(std::string_view name) noexcept {
  for (Pollutant p : kCanonicalPollutants) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

}  // namespace airshed
