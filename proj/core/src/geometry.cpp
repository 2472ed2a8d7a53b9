#include "dvlfill/geometry.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dvlfill/errors.hpp"

namespace dvlfill {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::size_t beam_index(int beam) {
  if (beam < 1 || beam > static_cast<int>(kNumBeams)) {
    throw DomainError(fmt::format("beam number {} outside 1..4", beam));
  }
  return static_cast<std::size_t>(beam - 1);
}

template <typename Range>
BeamMask mask_from(const Range& beams, bool listed_value) {
  BeamMask mask = listed_value ? BeamMask::none() : BeamMask::all();
  for (int beam : beams) {
    mask.set(beam_index(beam), listed_value);
  }
  return mask;
}

}  // namespace

BeamMask BeamMask::with_available(std::initializer_list<int> beams) { return mask_from(beams, true); }
BeamMask BeamMask::with_available(const std::vector<int>& beams) { return mask_from(beams, true); }
BeamMask BeamMask::with_missing(std::initializer_list<int> beams) { return mask_from(beams, false); }
BeamMask BeamMask::with_missing(const std::vector<int>& beams) { return mask_from(beams, false); }

int BeamMask::count() const {
  int n = 0;
  for (bool a : available_) n += a ? 1 : 0;
  return n;
}

BeamMask BeamMask::complement() const {
  BeamMask out;
  for (std::size_t i = 0; i < kNumBeams; ++i) out.available_[i] = !available_[i];
  return out;
}

std::vector<int> BeamMask::available_beams() const {
  std::vector<int> beams;
  for (std::size_t i = 0; i < kNumBeams; ++i) {
    if (available_[i]) beams.push_back(static_cast<int>(i) + 1);
  }
  return beams;
}

std::vector<int> BeamMask::missing_beams() const { return complement().available_beams(); }

std::string BeamMask::to_string() const { return fmt::format("{{{}}}", fmt::join(available_beams(), ",")); }

std::array<double, kNumBeams> default_headings() {
  std::array<double, kNumBeams> psi{};
  for (std::size_t i = 0; i < kNumBeams; ++i) {
    psi[i] = static_cast<double>(i) * std::numbers::pi / 2.0 + std::numbers::pi / 4.0;
  }
  return psi;
}

Vec3 beam_direction(double pitch_deg, double heading_rad) {
  if (!(pitch_deg > 0.0 && pitch_deg < 90.0)) {
    throw DomainError(fmt::format("transducer pitch {} deg outside (0, 90)", pitch_deg));
  }
  const double theta = pitch_deg * kDegToRad;
  const double s = std::sin(theta);
  return Vec3(std::cos(heading_rad) * s, std::sin(heading_rad) * s, std::cos(theta));
}

BeamMatrix build_h(double pitch_deg, const std::array<double, kNumBeams>& headings_rad) {
  BeamMatrix h;
  for (std::size_t i = 0; i < kNumBeams; ++i) {
    h.row(static_cast<Eigen::Index>(i)) = beam_direction(pitch_deg, headings_rad[i]).transpose();
  }
  return h;
}

ReducedBeamMatrix reduce_h(const BeamMatrix& h, BeamMask mask) {
  ReducedBeamMatrix out(mask.count(), 3);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < kNumBeams; ++i) {
    if (mask[i]) out.row(row++) = h.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

BeamGeometry::BeamGeometry(double pitch_deg, std::array<double, kNumBeams> headings_rad)
    : pitch_rad_(pitch_deg * kDegToRad), headings_rad_(headings_rad), h_(build_h(pitch_deg, headings_rad)) {}

double BeamGeometry::pitch_deg() const { return pitch_rad_ / kDegToRad; }

}  // namespace dvlfill
