#pragma once

#include <string>
#include <vector>

#include "haps/metrics.hpp"

namespace haps {

// Trailing moving average; window 1 returns the input.
std::vector<double> moving_average(const std::vector<double>& xs, int window);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Standalone SVG line chart. Output depends only on the arguments.
std::string render_svg(const std::string& title, const std::string& y_label,
                       const std::vector<Series>& series);

// Writes train_reward.svg, train_throughput.svg, eval_reward.svg and
// eval_throughput.svg into `out_dir`; returns the written paths. Throws
// ConfigError for an empty metrics set.
std::vector<std::string> plot_metrics(const std::vector<MetricsRow>& rows,
                                      const std::string& out_dir, int window);

}  // namespace haps
