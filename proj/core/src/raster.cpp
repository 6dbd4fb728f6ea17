#include "airshed/raster.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "airshed/error.hpp"
#include "airshed/parallel.hpp"
#include "text_util.hpp"

namespace airshed {

namespace {

bool close_to(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-9 * scale;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

bool GridGeometry::matches(const GridGeometry& other) const noexcept {
  const double scale = std::max(cell_size, other.cell_size);
  return ncols == other.ncols && nrows == other.nrows &&
         close_to(cell_size, other.cell_size, scale) &&
         close_to(x_origin, other.x_origin, scale) &&
         close_to(y_origin, other.y_origin, scale);
}

Grid::Grid(GridGeometry geometry)
    : geometry_(geometry),
      values_(geometry.size(), 0.0),
      valid_(geometry.size(), 0) {}

Grid::Grid(GridGeometry geometry, std::vector<std::optional<double>> cells)
    : Grid(geometry) {
  if (cells.size() != geometry.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("expected {} cells, got {}", geometry.size(), cells.size()));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i]) set(i, *cells[i]);
  }
}

void Grid::set(std::size_t i, double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonNumericCell, "non-finite cell value");
  }
  values_[i] = value;
  valid_[i] = 1;
}

std::size_t Grid::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), 1));
}

bool operator==(const Grid& a, const Grid& b) {
  if (!a.geometry_.matches(b.geometry_)) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.at(i) != b.at(i)) return false;
  }
  return true;
}

Scene make_scene(Pollutant pollutant, std::string date, Grid data,
                 std::optional<Grid> qa) {
  if (qa) {
    if (!qa->geometry().matches(data.geometry())) {
      throw Error(ErrorCode::GeoreferenceMismatch,
                  fmt::format("{} {}: qa band does not match data band",
                              to_string(pollutant), date));
    }
    for (std::size_t i = 0; i < qa->size(); ++i) {
      if (auto q = qa->at(i); q && (*q < 0.0 || *q > 1.0)) {
        throw Error(ErrorCode::QaOutOfRange,
                    fmt::format("{} {}: qa value {} outside [0,1]",
                                to_string(pollutant), date, *q));
      }
    }
  }
  return Scene{pollutant, std::move(date), std::move(data), std::move(qa)};
}

QaPolicy QaPolicy::defaults() {
  QaPolicy policy;
  policy.thresholds = {
      {Pollutant::AER_AI, 0.8}, {Pollutant::NO2, 0.75}, {Pollutant::O3, std::nullopt},
      {Pollutant::SO2, 0.5},    {Pollutant::CO, 0.5},   {Pollutant::HCHO, 0.5},
  };
  return policy;
}

std::optional<double> QaPolicy::threshold(Pollutant p) const {
  auto it = thresholds.find(p);
  if (it == thresholds.end()) return std::nullopt;
  return it->second;
}

Grid parse_grid(std::string_view text) {
  static constexpr std::array<std::string_view, 6> kKeys = {
      "ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"};
  std::array<std::optional<std::string_view>, 6> header{};

  // Header lines start with a letter; the first line that does not ends it.
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = detail::trim(text.substr(pos, eol - pos));
    if (line.empty()) {
      pos = eol + 1;
      continue;
    }
    if (!std::isalpha(static_cast<unsigned char>(line.front()))) break;
    const auto tokens = detail::split_whitespace(line);
    if (tokens.size() != 2) {
      throw Error(ErrorCode::MalformedHeader, fmt::format("bad header line '{}'", line));
    }
    const std::string key = detail::to_lower(tokens[0]);
    auto it = std::find(kKeys.begin(), kKeys.end(), key);
    if (it == kKeys.end()) {
      throw Error(ErrorCode::MalformedHeader, fmt::format("unknown header key '{}'", tokens[0]));
    }
    auto& slot = header[static_cast<std::size_t>(it - kKeys.begin())];
    if (slot) {
      throw Error(ErrorCode::MalformedHeader, fmt::format("duplicate header key '{}'", tokens[0]));
    }
    slot = tokens[1];
    pos = eol + 1;
  }

  for (std::size_t k = 0; k < 5; ++k) {
    if (!header[k]) {
      throw Error(ErrorCode::MalformedHeader, fmt::format("missing header key '{}'", kKeys[k]));
    }
  }

  auto header_real = [&](std::size_t k) {
    auto v = detail::parse_real(*header[k]);
    if (!v) {
      throw Error(ErrorCode::MalformedHeader,
                  fmt::format("header '{}' is not a number", kKeys[k]));
    }
    return *v;
  };
  auto header_count = [&](std::size_t k) {
    const std::string_view s = *header[k];
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) {
      throw Error(ErrorCode::MalformedHeader,
                  fmt::format("header '{}' must be a positive integer", kKeys[k]));
    }
    return v;
  };

  GridGeometry geometry;
  geometry.ncols = header_count(0);
  geometry.nrows = header_count(1);
  geometry.x_origin = header_real(2);
  geometry.y_origin = header_real(3);
  geometry.cell_size = header_real(4);
  if (!(geometry.cell_size > 0.0)) {
    throw Error(ErrorCode::MalformedHeader, "cellsize must be positive");
  }
  const double nodata = header[5] ? header_real(5) : kDefaultNoData;

  const auto tokens = detail::split_whitespace(pos < text.size() ? text.substr(pos) : "");
  std::vector<double> numbers;
  numbers.reserve(tokens.size());
  for (std::string_view token : tokens) {
    auto v = detail::parse_real(token);
    if (!v) throw Error(ErrorCode::NonNumericCell, fmt::format("bad cell value '{}'", token));
    numbers.push_back(*v);
  }
  if (numbers.size() != geometry.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("expected {}x{}={} cells, got {}", geometry.ncols, geometry.nrows,
                            geometry.size(), numbers.size()));
  }

  Grid grid(geometry);
  for (std::size_t file_row = 0; file_row < geometry.nrows; ++file_row) {
    const std::size_t row = geometry.nrows - 1 - file_row;
    for (std::size_t col = 0; col < geometry.ncols; ++col) {
      const double v = numbers[file_row * geometry.ncols + col];
      if (v != nodata) grid.set(grid.index(row, col), v);
    }
  }
  return grid;
}

Grid read_grid_file(const std::filesystem::path& path) {
  try {
    return parse_grid(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.filename().string() + ": " + e.what());
  }
}

std::string serialize_grid(const Grid& grid, double nodata) {
  const GridGeometry& g = grid.geometry();
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out),
                 "ncols {}\nnrows {}\nxllcorner {}\nyllcorner {}\ncellsize {}\nNODATA_value {}\n",
                 g.ncols, g.nrows, g.x_origin, g.y_origin, g.cell_size, nodata);
  for (std::size_t file_row = 0; file_row < g.nrows; ++file_row) {
    const std::size_t row = g.nrows - 1 - file_row;
    for (std::size_t col = 0; col < g.ncols; ++col) {
      if (col > 0) out.push_back(' ');
      const auto v = grid.at(row, col);
      fmt::format_to(std::back_inserter(out), "{:.9g}", v ? *v : nodata);
    }
    out.push_back('\n');
  }
  return fmt::to_string(out);
}

void write_grid_file(const std::filesystem::path& path, const Grid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << serialize_grid(grid);
}

Grid qa_filter(const Scene& scene, const QaPolicy& policy) {
  const auto threshold = policy.threshold(scene.pollutant);
  if (!threshold) return scene.data;
  if (!scene.qa) {
    throw Error(ErrorCode::MissingQaBand,
                fmt::format("{} {}: qa band required for threshold {}",
                            to_string(scene.pollutant), scene.date, *threshold));
  }
  Grid out(scene.data.geometry());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto value = scene.data.at(i);
    const auto q = scene.qa->at(i);
    if (value && q && *q >= *threshold) out.set(i, *value);
  }
  return out;
}

Grid composite_mean(std::span<const Grid> grids) {
  if (grids.empty()) throw Error(ErrorCode::EmptyInput, "no scenes to composite");
  const GridGeometry& geometry = grids.front().geometry();
  for (const Grid& g : grids) {
    if (!g.geometry().matches(geometry)) {
      throw Error(ErrorCode::GeoreferenceMismatch, "scenes do not share georeferencing");
    }
  }
  Grid out(geometry);
  parallel_for(out.size(), 0, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      detail::ShiftedMean mean;
      for (const Grid& g : grids) {
        if (auto v = g.at(i)) mean.add(*v);
      }
      if (mean.count() > 0) out.set(i, mean.value());
    }
  });
  return out;
}

std::optional<SceneFileName> parse_scene_file_name(std::string_view name) {
  static const std::regex pattern(
      R"(^(NO2|SO2|CO|AER_AI|O3|HCHO)_(\d{4})-(\d{2})-(\d{2})(_qa)?\.asc$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(name.begin(), name.end(), m, pattern)) return std::nullopt;
  const int month = std::stoi(m[3].str());
  const int day = std::stoi(m[4].str());
  if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
  return SceneFileName{*parse_pollutant(m[1].str()),
                       m[2].str() + "-" + m[3].str() + "-" + m[4].str(), m[5].matched};
}

std::string scene_file_name(Pollutant p, std::string_view date, bool is_qa) {
  return fmt::format("{}_{}{}.asc", to_string(p), date, is_qa ? "_qa" : "");
}

std::vector<Scene> load_scene_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "scene directory not found: " + dir.string());
  }
  struct Bands {
    std::optional<std::filesystem::path> data;
    std::optional<std::filesystem::path> qa;
  };
  std::map<std::pair<Pollutant, std::string>, Bands> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string filename = entry.path().filename().string();
    const auto parsed = parse_scene_file_name(filename);
    if (!parsed) continue;
    auto& bands = files[{parsed->pollutant, parsed->date}];
    (parsed->is_qa ? bands.qa : bands.data) = entry.path();
  }

  std::vector<Scene> scenes;
  for (const auto& [key, bands] : files) {
    if (!bands.data) {
      throw Error(ErrorCode::BadSceneName,
                  fmt::format("qa band without data band: {}",
                              scene_file_name(key.first, key.second, true)));
    }
    std::optional<Grid> qa;
    if (bands.qa) qa = read_grid_file(*bands.qa);
    scenes.push_back(make_scene(key.first, key.second, read_grid_file(*bands.data), std::move(qa)));
  }
  return scenes;
}

std::map<Pollutant, Grid> composite_scenes(std::span<const Scene> scenes,
                                           const QaPolicy& policy) {
  std::map<Pollutant, std::vector<Grid>> filtered;
  for (const Scene& scene : scenes) {
    filtered[scene.pollutant].push_back(qa_filter(scene, policy));
  }
  std::map<Pollutant, Grid> composites;
  for (const auto& [pollutant, grids] : filtered) {
    composites.emplace(pollutant, composite_mean(grids));
  }
  return composites;
}

}  // namespace airshed
