// Janus DVL beam geometry: beam direction cosines and the beam-to-body
// measurement matrix H (beam velocities = H * body velocity).
#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dvlfill {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using BeamMatrix = Eigen::Matrix<double, 4, 3>;
using ReducedBeamMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

inline constexpr std::size_t kNumBeams = 4;
inline constexpr double kDefaultPitchDeg = 20.0;

/// Per-beam availability flags. Beam numbers in the public API are 1-based,
/// indices into operator[] are 0-based.
class BeamMask {
 public:
  constexpr BeamMask() = default;
  constexpr explicit BeamMask(std::array<bool, kNumBeams> available) : available_(available) {}

  static constexpr BeamMask all() { return BeamMask({true, true, true, true}); }
  static constexpr BeamMask none() { return BeamMask(); }

  /// Mask with the listed 1-based beams available. Throws DomainError on a
  /// beam number outside 1..4.
  static BeamMask with_available(std::initializer_list<int> beams);
  static BeamMask with_available(const std::vector<int>& beams);
  /// Mask with the listed 1-based beams missing (all others available).
  static BeamMask with_missing(std::initializer_list<int> beams);
  static BeamMask with_missing(const std::vector<int>& beams);

  constexpr bool operator[](std::size_t i) const { return available_[i]; }
  void set(std::size_t i, bool value) { available_[i] = value; }

  int count() const;
  BeamMask complement() const;
  std::vector<int> available_beams() const;
  std::vector<int> missing_beams() const;
  std::string to_string() const;

  friend constexpr bool operator==(const BeamMask&, const BeamMask&) = default;

 private:
  std::array<bool, kNumBeams> available_{};
};

/// psi_i = (i-1) * pi/2 + pi/4 for i = 1..4.
std::array<double, kNumBeams> default_headings();

/// Unit direction [cos(psi) sin(theta), sin(psi) sin(theta), cos(theta)].
/// Throws DomainError unless 0 < pitch_deg < 90.
Vec3 beam_direction(double pitch_deg, double heading_rad);

/// Stacks beam_direction for each heading into the 4x3 matrix H.
BeamMatrix build_h(double pitch_deg, const std::array<double, kNumBeams>& headings_rad);

/// Keeps the rows of `h` whose beams are available, in beam order.
ReducedBeamMatrix reduce_h(const BeamMatrix& h, BeamMask mask);

/// Fixed transducer tilt plus per-beam headings. Immutable after construction.
class BeamGeometry {
 public:
  explicit BeamGeometry(double pitch_deg = kDefaultPitchDeg,
                        std::array<double, kNumBeams> headings_rad = default_headings());

  double pitch_rad() const { return pitch_rad_; }
  double pitch_deg() const;
  const std::array<double, kNumBeams>& headings_rad() const { return headings_rad_; }
  const BeamMatrix& h() const { return h_; }

 private:
  double pitch_rad_;
  std::array<double, kNumBeams> headings_rad_;
  BeamMatrix h_;
};

}  // namespace dvlfill
