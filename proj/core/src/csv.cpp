#include "dvlfill/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "dvlfill/errors.hpp"

namespace dvlfill {
namespace {

constexpr std::string_view kImuHeader = "t,fx,fy,fz,wx,wy,wz";
constexpr std::string_view kDvlHeader = "t,b1,b2,b3,b4";
constexpr std::string_view kTruthHeader = "t,vx,vy,vz";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Calls row_fn(line_no, fields) for every data row after validating the
// header, field count, finiteness and strictly increasing first column.
template <std::size_t N, typename RowFn>
void parse_csv(const std::filesystem::path& path, std::string_view header, RowFn&& row_fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(path.string(), 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const std::string where = path.string();

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool seen_header = false;
  double last_t = -INFINITY;
  std::array<double, N> fields{};

  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;

    if (!seen_header) {
      if (line != header) {
        throw CsvError(where, line_no, fmt::format("expected header '{}', found '{}'", header, line));
      }
      seen_header = true;
      continue;
    }
    if (line.empty()) continue;

    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view field = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      if (count >= N) throw CsvError(where, line_no, fmt::format("expected {} fields, found more", N));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw CsvError(where, line_no, fmt::format("field {} '{}' is not a number", count + 1, field));
      }
      if (!std::isfinite(value)) {
        throw CsvError(where, line_no, fmt::format("field {} is not finite ('{}')", count + 1, field));
      }
      fields[count++] = value;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (count != N) throw CsvError(where, line_no, fmt::format("expected {} fields, found {}", N, count));
    if (!(fields[0] > last_t)) {
      throw CsvError(where, line_no, fmt::format("timestamp {} does not increase (previous {})", fields[0], last_t));
    }
    last_t = fields[0];
    row_fn(fields);
  }
  if (!seen_header) throw CsvError(where, 1, fmt::format("missing header '{}'", header));
}

void write_text(const std::filesystem::path& path, const fmt::memory_buffer& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(fmt::format("write failed for {}", path.string()));
}

}  // namespace

ImuSeries read_imu_csv(const std::filesystem::path& path) {
  ImuSeries series;
  parse_csv<7>(path, kImuHeader, [&](const std::array<double, 7>& f) {
    series.push_back(ImuSample{f[0], Vec3(f[1], f[2], f[3]), Vec3(f[4], f[5], f[6])});
  });
  return series;
}

DvlSeries read_dvl_csv(const std::filesystem::path& path) {
  DvlSeries series;
  parse_csv<5>(path, kDvlHeader, [&](const std::array<double, 5>& f) {
    series.push_back(DvlSample{f[0], Vec4(f[1], f[2], f[3], f[4]), BeamMask::all()});
  });
  return series;
}

TruthSeries read_truth_csv(const std::filesystem::path& path) {
  TruthSeries series;
  parse_csv<4>(path, kTruthHeader,
               [&](const std::array<double, 4>& f) { series.push_back(TruthSample{f[0], Vec3(f[1], f[2], f[3])}); });
  return series;
}

std::pair<ImuSeries, DvlSeries> load_csv(const std::filesystem::path& imu_path,
                                         const std::filesystem::path& dvl_path) {
  return {read_imu_csv(imu_path), read_dvl_csv(dvl_path)};
}

void write_imu_csv(const std::filesystem::path& path, const ImuSeries& imu) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kImuHeader);
  for (const auto& s : imu) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{}\n", s.t, s.accel_mps2.x(), s.accel_mps2.y(),
                   s.accel_mps2.z(), s.gyro_radps.x(), s.gyro_radps.y(), s.gyro_radps.z());
  }
  write_text(path, buf);
}

void write_dvl_csv(const std::filesystem::path& path, const DvlSeries& dvl) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kDvlHeader);
  for (const auto& s : dvl) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{}\n", s.epoch_s, s.beams_mps(0), s.beams_mps(1),
                   s.beams_mps(2), s.beams_mps(3));
  }
  write_text(path, buf);
}

void write_truth_csv(const std::filesystem::path& path, const TruthSeries& truth) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kTruthHeader);
  for (const auto& s : truth) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{}\n", s.t, s.v_mps.x(), s.v_mps.y(), s.v_mps.z());
  }
  write_text(path, buf);
}

}  // namespace dvlfill
