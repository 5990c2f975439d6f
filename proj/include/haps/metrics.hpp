#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace haps {

// One row per (episode, phase, scenario); comma-separated with a header.
struct MetricsRow {
  int episode = 0;
  std::string phase;     // "train" or "eval"
  std::string scenario;  // "1".."4", "random" or "custom"
  double mean_reward = 0.0;
  double mean_fair_rate = 0.0;
  double mean_sum_throughput_mbps = 0.0;
  std::vector<double> haps_distance_m;  // mean distance to own hotspot
  double wind_speed_mean = 0.0;
  double wind_speed_max = 0.0;
};

std::string metrics_header(int num_haps);
std::string format_metrics_row(const MetricsRow& row);
// Throws ConfigError on schema violations.
MetricsRow parse_metrics_row(const std::string& line, int num_haps);

class MetricsWriter {
 public:
  MetricsWriter(const std::string& path, int num_haps);
  void append(const MetricsRow& row);

 private:
  std::ofstream out_;
  int num_haps_;
};

std::vector<MetricsRow> read_metrics(const std::string& path);

}  // namespace haps
