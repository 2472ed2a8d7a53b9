// Speed-error metrics: RMSE, MAE, R^2 and variance accounted for (VAF).
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dvlfill/solver.hpp"

namespace dvlfill {

struct MetricsReport {
  double rmse_mps = 0.0;
  double mae_mps = 0.0;
  double rmse_pct = 0.0;  ///< of mean ground-truth speed
  double mae_pct = 0.0;
  std::optional<double> r2;   ///< absent when the truth has zero variance
  std::optional<double> vaf;  ///< percent, absent when the truth has zero variance
  std::size_t n = 0;
  double mean_speed_mps = 0.0;
};

/// Population (1/N) statistics throughout. Throws ContractViolation on
/// unequal lengths or n < 2.
MetricsReport evaluate(std::span<const double> truth_speeds, std::span<const double> predicted_speeds);

std::vector<double> speed_series(std::span<const VelocityEstimate> estimates);

using NamedReport = std::pair<std::string, MetricsReport>;

/// Aligned text table, one column per report, rows as in the published table.
std::string format_table(std::span<const NamedReport> columns);

/// {"config_hash": ..., "reports": {"<name>": {...}, ...}}
std::string metrics_json(std::span<const NamedReport> reports, std::string_view config_hash);

}  // namespace dvlfill
