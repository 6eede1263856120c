#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lsam {

// One row of the per-iteration time series. wall_ns is the simulated clock
// under the deterministic schedulers (one tick per worker step) so that
// repeated runs of one config produce byte-identical files; only the
// real-concurrent scheduler reports measured time.
struct MetricsRecord {
  std::int64_t t = 0;
  std::int64_t wall_ns = 0;
  double f_val = 0.0;
  double grad_norm_sq = 0.0;
  double G_norm_sq = 0.0;
  double z_norm_sq = 0.0;
  double phi = 0.0;
  bool sync_flag = false;
  int worker_id = -1;
};

inline constexpr const char* kMetricsCsvHeader =
    "t,wall_ns,f_val,grad_norm_sq,G_norm_sq,z_norm_sq,phi,sync_flag,worker_id";

// Downsampling policy: full resolution for t < 1000, then every 10th step.
// Sync events are always recorded regardless of this predicate.
inline bool keep_step(std::int64_t t) { return t < 1000 || t % 10 == 0; }

std::string to_csv_line(const MetricsRecord& r);
void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> read_metrics_csv(const std::string& path);

// Summary statistics computed from the logged records alone, so the summary
// file is reproducible from the CSV.
struct RunSummary {
  std::int64_t rows = 0;
  std::int64_t final_t = 0;
  double final_f = 0.0;
  double final_grad_norm_sq = 0.0;
  double mean_G_norm_sq = 0.0;
  double mean_grad_norm_sq = 0.0;
  double z_sq_loglog_slope = 0.0;  // fitted over t in [1e3, 1e5]
  std::int64_t sync_events = 0;
};

RunSummary summarize(const std::vector<MetricsRecord>& records);
std::string summary_to_json(const RunSummary& s);
void write_summary_json(const std::string& path, const RunSummary& s);

// Least-squares slope of log(value) against log(t) over t in [t_lo, t_hi].
// Pairs with nonpositive value or t are skipped. Returns 0 when fewer than
// two usable points remain.
double fit_loglog_slope(const std::vector<std::pair<double, double>>& series,
                        double t_lo, double t_hi);

}  // namespace lsam
