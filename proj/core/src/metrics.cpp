#include "dvlfill/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "dvlfill/errors.hpp"

namespace dvlfill {

MetricsReport evaluate(std::span<const double> truth_speeds, std::span<const double> predicted_speeds) {
  if (truth_speeds.size() != predicted_speeds.size()) {
    throw ContractViolation(fmt::format("truth has {} samples, prediction {}", truth_speeds.size(),
                                        predicted_speeds.size()));
  }
  const std::size_t n = truth_speeds.size();
  if (n < 2) throw ContractViolation("metrics need at least two samples");
  const double nd = static_cast<double>(n);

  double truth_sum = 0.0;
  double err_sum = 0.0;
  double sq_err = 0.0;
  double abs_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = truth_speeds[i] - predicted_speeds[i];
    truth_sum += truth_speeds[i];
    err_sum += e;
    sq_err += e * e;
    abs_err += std::abs(e);
  }
  const double truth_mean = truth_sum / nd;
  const double err_mean = err_sum / nd;

  double truth_ss = 0.0;
  double err_ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = truth_speeds[i] - truth_mean;
    const double de = (truth_speeds[i] - predicted_speeds[i]) - err_mean;
    truth_ss += dt * dt;
    err_ss += de * de;
  }

  MetricsReport r;
  r.n = n;
  r.mean_speed_mps = truth_mean;
  r.rmse_mps = std::sqrt(sq_err / nd);
  r.mae_mps = abs_err / nd;
  const double denom = truth_mean != 0.0 ? truth_mean : std::numeric_limits<double>::quiet_NaN();
  r.rmse_pct = 100.0 * r.rmse_mps / denom;
  r.mae_pct = 100.0 * r.mae_mps / denom;
  if (truth_ss > 0.0) {
    r.r2 = 1.0 - sq_err / truth_ss;
    r.vaf = (1.0 - (err_ss / nd) / (truth_ss / nd)) * 100.0;
  }
  return r;
}

std::vector<double> speed_series(std::span<const VelocityEstimate> estimates) {
  std::vector<double> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates) out.push_back(e.v_body_mps.norm());
  return out;
}

std::string format_table(std::span<const NamedReport> columns) {
  const auto opt = [](const std::optional<double>& v, int digits) {
    return v ? fmt::format("{:.{}f}", *v, digits) : std::string("n/a");
  };
  struct Row {
    std::string label;
    std::function<std::string(const MetricsReport&)> cell;
  };
  const std::vector<Row> rows = {
      {"RMSE [m/s]", [](const MetricsReport& r) { return fmt::format("{:.4f}", r.rmse_mps); }},
      {"RMSE [%]", [](const MetricsReport& r) { return fmt::format("{:.2f}", r.rmse_pct); }},
      {"MAE [m/s]", [](const MetricsReport& r) { return fmt::format("{:.4f}", r.mae_mps); }},
      {"MAE [%]", [](const MetricsReport& r) { return fmt::format("{:.2f}", r.mae_pct); }},
      {"R^2", [&](const MetricsReport& r) { return opt(r.r2, 4); }},
      {"VAF", [&](const MetricsReport& r) { return opt(r.vaf, 2); }},
      {"Mean speed [m/s]", [](const MetricsReport& r) { return fmt::format("{:.3f}", r.mean_speed_mps); }},
      {"N", [](const MetricsReport& r) { return fmt::format("{}", r.n); }},
  };

  std::size_t label_w = std::string_view("Evaluation Metrics").size();
  for (const auto& row : rows) label_w = std::max(label_w, row.label.size());
  std::vector<std::size_t> col_w;
  for (const auto& [name, report] : columns) {
    std::size_t w = name.size();
    for (const auto& row : rows) w = std::max(w, row.cell(report).size());
    col_w.push_back(w);
  }

  std::string out = fmt::format("{:<{}}", "Evaluation Metrics", label_w);
  for (std::size_t c = 0; c < columns.size(); ++c) out += fmt::format(" | {:>{}}", columns[c].first, col_w[c]);
  out += '\n';
  std::size_t total = label_w;
  for (std::size_t w : col_w) total += 3 + w;
  out += std::string(total, '-') + '\n';
  for (const auto& row : rows) {
    out += fmt::format("{:<{}}", row.label, label_w);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out += fmt::format(" | {:>{}}", row.cell(columns[c].second), col_w[c]);
    }
    out += '\n';
  }
  return out;
}

std::string metrics_json(std::span<const NamedReport> reports, std::string_view config_hash) {
  using nlohmann::json;
  json doc = {{"config_hash", config_hash}, {"reports", json::object()}};
  for (const auto& [name, r] : reports) {
    json j = {{"rmse_mps", r.rmse_mps},
              {"mae_mps", r.mae_mps},
              {"rmse_pct", r.rmse_pct},
              {"mae_pct", r.mae_pct},
              {"n", r.n},
              {"mean_speed_mps", r.mean_speed_mps}};
    j["r2"] = r.r2 ? json(*r.r2) : json(nullptr);
    j["vaf"] = r.vaf ? json(*r.vaf) : json(nullptr);
    doc["reports"][name] = j;
  }
  return doc.dump(2);
}

}  // namespace dvlfill
