#include "dvlfill/dataset.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dvlfill/errors.hpp"
#include "dvlfill/solver.hpp"

namespace dvlfill {
namespace {

const TruthSample* find_truth(const TruthSeries& truth, double t, double tol) {
  auto it = std::lower_bound(truth.begin(), truth.end(), t - tol,
                             [](const TruthSample& s, double value) { return s.t < value; });
  if (it != truth.end() && std::abs(it->t - t) <= tol) return &*it;
  return nullptr;
}

}  // namespace

TupleSet assemble_tuples(const ImuSeries& imu, const DvlSeries& dvl, const TruthSeries& truth, BeamMask mask,
                         const AssembleOptions& options) {
  if (mask.count() != 2) {
    throw ContractViolation(fmt::format("training mask {} must have exactly two available beams", mask.to_string()));
  }
  if (options.window_len == 0 || !(options.window_s > 0.0)) {
    throw ContractViolation("window length and duration must be positive");
  }

  const auto value_less = [](double value, const ImuSample& s) { return value < s.t; };
  const auto n = static_cast<Eigen::Index>(options.window_len);
  const BeamMask missing = mask.complement();

  TupleSet out;
  out.tuples.reserve(dvl.size());
  for (const DvlSample& sample : dvl) {
    const double epoch = sample.epoch_s;
    const double tol = options.time_tolerance_s;
    // Window is (epoch - window_s, epoch].
    const auto first = std::upper_bound(imu.begin(), imu.end(), epoch - options.window_s + tol, value_less);
    const auto last = std::upper_bound(first, imu.end(), epoch + tol, value_less);
    if (std::distance(first, last) != n) {
      ++out.gaps.imu_gaps;
      out.gaps.skipped_epochs.push_back(epoch);
      continue;
    }
    if (sample.validity != BeamMask::all()) {
      ++out.gaps.invalid_beams;
      out.gaps.skipped_epochs.push_back(epoch);
      continue;
    }
    const TruthSample* truth_sample = find_truth(truth, epoch, tol);
    if (truth_sample == nullptr) {
      ++out.gaps.missing_truth;
      out.gaps.skipped_epochs.push_back(epoch);
      continue;
    }

    TrainingTuple tuple;
    tuple.window.epoch_s = epoch;
    tuple.window.accel_mps2.resize(n, 3);
    tuple.window.gyro_radps.resize(n, 3);
    Eigen::Index row = 0;
    for (auto it = first; it != last; ++it, ++row) {
      tuple.window.accel_mps2.row(row) = it->accel_mps2.transpose();
      tuple.window.gyro_radps.row(row) = it->gyro_radps.transpose();
    }
    Eigen::Index a = 0;
    Eigen::Index m = 0;
    for (std::size_t i = 0; i < kNumBeams; ++i) {
      const double beam = sample.beams_mps(static_cast<Eigen::Index>(i));
      if (mask[i]) {
        tuple.partial_beams_mps(a++) = beam;
      } else if (missing[i]) {
        tuple.target_beams_mps(m++) = beam;
      }
    }
    tuple.v_true_mps = truth_sample->v_mps;
    tuple.mask = mask;
    out.tuples.push_back(std::move(tuple));
  }
  return out;
}

TruthSeries truth_from_beams(const DvlSeries& dvl, const BeamGeometry& geometry) {
  TruthSeries truth;
  truth.reserve(dvl.size());
  for (const DvlSample& s : dvl) {
    if (s.validity.count() < 3) continue;
    const Eigen::VectorXd y = [&] {
      Eigen::VectorXd v(s.validity.count());
      Eigen::Index k = 0;
      for (std::size_t i = 0; i < kNumBeams; ++i) {
        if (s.validity[i]) v(k++) = s.beams_mps(static_cast<Eigen::Index>(i));
      }
      return v;
    }();
    truth.push_back(TruthSample{s.epoch_s, solve_velocity(y, reduce_h(geometry.h(), s.validity)).v_body_mps});
  }
  return truth;
}

std::pair<std::vector<TrainingTuple>, std::vector<TrainingTuple>> split(const std::vector<TrainingTuple>& tuples,
                                                                         double train_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw DomainError(fmt::format("train_frac must lie in (0, 1), got {}", train_frac));
  }
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(tuples.size()) * train_frac + 1e-9));
  const auto cut = tuples.begin() + static_cast<std::ptrdiff_t>(n_train);
  return {std::vector<TrainingTuple>(tuples.begin(), cut), std::vector<TrainingTuple>(cut, tuples.end())};
}

}  // namespace dvlfill
