#include "haps/metrics.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "haps/errors.hpp"

namespace haps {

namespace {
constexpr int kFixedColumns = 8;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ConfigError("metrics: bad number \"" + s + "\"");
  return v;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}
}  // namespace

std::string metrics_header(int num_haps) {
  std::string h = "episode,phase,scenario,mean_reward,mean_fair_rate,mean_sum_throughput_mbps";
  for (int d = 1; d <= num_haps; ++d) h += ",haps" + std::to_string(d) + "_distance_m";
  h += ",wind_speed_mean,wind_speed_max";
  return h;
}

std::string format_metrics_row(const MetricsRow& r) {
  std::string s = std::to_string(r.episode) + "," + r.phase + "," + r.scenario + "," +
                  num(r.mean_reward) + "," + num(r.mean_fair_rate) + "," +
                  num(r.mean_sum_throughput_mbps);
  for (double d : r.haps_distance_m) s += "," + num(d);
  s += "," + num(r.wind_speed_mean) + "," + num(r.wind_speed_max);
  return s;
}

MetricsRow parse_metrics_row(const std::string& line, int num_haps) {
  const auto cells = split(line);
  if (static_cast<int>(cells.size()) != kFixedColumns + num_haps)
    throw ConfigError("metrics: row has " + std::to_string(cells.size()) +
                      " columns, expected " + std::to_string(kFixedColumns + num_haps));
  MetricsRow r;
  r.episode = static_cast<int>(to_double(cells[0]));
  r.phase = cells[1];
  if (r.phase != "train" && r.phase != "eval")
    throw ConfigError("metrics: unknown phase \"" + r.phase + "\"");
  r.scenario = cells[2];
  r.mean_reward = to_double(cells[3]);
  r.mean_fair_rate = to_double(cells[4]);
  r.mean_sum_throughput_mbps = to_double(cells[5]);
  for (int d = 0; d < num_haps; ++d) r.haps_distance_m.push_back(to_double(cells[6 + d]));
  r.wind_speed_mean = to_double(cells[6 + num_haps]);
  r.wind_speed_max = to_double(cells[7 + num_haps]);
  return r;
}

MetricsWriter::MetricsWriter(const std::string& path, int num_haps)
    : out_(path), num_haps_(num_haps) {
  if (!out_) throw ConfigError("cannot write metrics file " + path);
  out_ << metrics_header(num_haps) << '\n';
  out_.flush();
}

void MetricsWriter::append(const MetricsRow& row) {
  if (static_cast<int>(row.haps_distance_m.size()) != num_haps_)
    throw std::invalid_argument("metrics row has the wrong number of HAPS");
  out_ << format_metrics_row(row) << '\n';
  out_.flush();
}

std::vector<MetricsRow> read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read metrics file " + path);
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("metrics file " + path + " is empty");
  const int num_haps = static_cast<int>(split(header).size()) - kFixedColumns;
  if (num_haps < 1 || header != metrics_header(num_haps))
    throw ConfigError("metrics file " + path + " has an unexpected header");
  std::vector<MetricsRow> rows;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(parse_metrics_row(line, num_haps));
  return rows;
}

}  // namespace haps
