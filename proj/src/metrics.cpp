#include "lsam/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lsam/errors.hpp"

namespace lsam {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_csv_line(const MetricsRecord& r) {
  std::ostringstream os;
  os << r.t << ',' << r.wall_ns << ',' << fmt_double(r.f_val) << ','
     << fmt_double(r.grad_norm_sq) << ',' << fmt_double(r.G_norm_sq) << ','
     << fmt_double(r.z_norm_sq) << ',' << fmt_double(r.phi) << ','
     << (r.sync_flag ? 1 : 0) << ',' << r.worker_id;
  return os.str();
}

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open metrics file for writing: " + path);
  out << kMetricsCsvHeader << '\n';
  for (const MetricsRecord& r : records) out << to_csv_line(r) << '\n';
}

std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metrics file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsCsvHeader) {
    throw ConfigError("metrics file has an unexpected header: " + path);
  }
  std::vector<MetricsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    MetricsRecord r;
    int sync = 0;
    const int got = std::sscanf(
        line.c_str(), "%ld,%ld,%lf,%lf,%lf,%lf,%lf,%d,%d", &r.t, &r.wall_ns,
        &r.f_val, &r.grad_norm_sq, &r.G_norm_sq, &r.z_norm_sq, &r.phi, &sync,
        &r.worker_id);
    if (got != 9) throw ConfigError("malformed metrics row: " + line);
    r.sync_flag = sync != 0;
    records.push_back(r);
  }
  return records;
}

RunSummary summarize(const std::vector<MetricsRecord>& records) {
  RunSummary s;
  s.rows = static_cast<std::int64_t>(records.size());
  if (records.empty()) return s;
  double sum_G = 0.0;
  double sum_grad = 0.0;
  std::vector<std::pair<double, double>> z_series;
  for (const MetricsRecord& r : records) {
    sum_G += r.G_norm_sq;
    sum_grad += r.grad_norm_sq;
    if (r.sync_flag) ++s.sync_events;
    z_series.emplace_back(static_cast<double>(r.t), r.z_norm_sq);
  }
  const MetricsRecord& last = records.back();
  s.final_t = last.t;
  s.final_f = last.f_val;
  s.final_grad_norm_sq = last.grad_norm_sq;
  s.mean_G_norm_sq = sum_G / static_cast<double>(records.size());
  s.mean_grad_norm_sq = sum_grad / static_cast<double>(records.size());
  s.z_sq_loglog_slope = fit_loglog_slope(z_series, 1e3, 1e5);
  return s;
}

std::string summary_to_json(const RunSummary& s) {
  std::ostringstream os;
  os << "{\n"
     << "  \"rows\": " << s.rows << ",\n"
     << "  \"final_t\": " << s.final_t << ",\n"
     << "  \"final_f\": " << fmt_double(s.final_f) << ",\n"
     << "  \"final_grad_norm_sq\": " << fmt_double(s.final_grad_norm_sq)
     << ",\n"
     << "  \"mean_G_norm_sq\": " << fmt_double(s.mean_G_norm_sq) << ",\n"
     << "  \"mean_grad_norm_sq\": " << fmt_double(s.mean_grad_norm_sq)
     << ",\n"
     << "  \"z_sq_loglog_slope\": " << fmt_double(s.z_sq_loglog_slope)
     << ",\n"
     << "  \"sync_events\": " << s.sync_events << "\n"
     << "}\n";
  return os.str();
}

void write_summary_json(const std::string& path, const RunSummary& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open summary file for writing: " + path);
  out << summary_to_json(s);
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& series,
                        double t_lo, double t_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for (const auto& [t, v] : series) {
    if (t < t_lo || t > t_hi || t <= 0.0 || v <= 0.0) continue;
    const double x = std::log(t);
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace lsam
