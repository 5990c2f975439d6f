#include "haps/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "haps/errors.hpp"

namespace haps {

std::vector<double> moving_average(const std::vector<double>& xs, int window) {
  if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
  std::vector<double> out(xs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    acc += xs[i];
    if (i >= static_cast<std::size_t>(window)) acc -= xs[i - window];
    const auto n = std::min<std::size_t>(i + 1, window);
    out[i] = window == 1 ? xs[i] : acc / static_cast<double>(n);
  }
  return out;
}

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::string& title, const std::string& y_label,
                       const std::vector<Series>& series) {
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
                    "viewBox=\"0 0 640 400\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";
  svg += "<line x1=\"" + fixed(L) + "\" y1=\"" + fixed(H - B) + "\" x2=\"" + fixed(W - R) +
         "\" y2=\"" + fixed(H - B) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fixed(L) + "\" y1=\"" + fixed(T) + "\" x2=\"" + fixed(L) +
         "\" y2=\"" + fixed(H - B) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    const double yv = y0 + (y1 - y0) * t / 4.0;
    svg += "<text x=\"" + fixed(px(xv)) + "\" y=\"" + fixed(H - B + 16) +
           "\" text-anchor=\"middle\">" + fmt(xv) + "</text>\n";
    svg += "<text x=\"" + fixed(L - 6) + "\" y=\"" + fixed(py(yv) + 4) +
           "\" text-anchor=\"end\">" + fmt(yv) + "</text>\n";
  }
  svg += "<text x=\"" + fixed((L + W - R) / 2) + "\" y=\"" + fixed(H - 12) +
         "\" text-anchor=\"middle\">episode</text>\n";
  svg += "<text x=\"16\" y=\"" + fixed((T + H - B) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + fixed((T + H - B) / 2) +
         ")\">" + y_label + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) svg += ' ';
      svg += fixed(px(s.x[i])) + "," + fixed(py(s.y[i]));
    }
    svg += "\"/>\n";
    svg += "<text x=\"" + fixed(W - R - 4) + "\" y=\"" + fixed(T + 14 * (k + 1)) +
           "\" text-anchor=\"end\" fill=\"" + color + "\">" + s.label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::string> plot_metrics(const std::vector<MetricsRow>& rows,
                                      const std::string& out_dir, int window) {
  if (rows.empty()) throw ConfigError("metrics file has no rows to plot");
  Series train_reward{"train", {}, {}}, train_tput{"train", {}, {}};
  std::map<std::string, Series> eval_reward, eval_tput;
  for (const auto& r : rows) {
    if (r.phase == "train") {
      train_reward.x.push_back(r.episode);
      train_reward.y.push_back(r.mean_reward);
      train_tput.x.push_back(r.episode);
      train_tput.y.push_back(r.mean_sum_throughput_mbps);
    } else {
      auto& er = eval_reward[r.scenario];
      auto& et = eval_tput[r.scenario];
      er.label = et.label = "scenario " + r.scenario;
      er.x.push_back(r.episode);
      er.y.push_back(r.mean_reward);
      et.x.push_back(r.episode);
      et.y.push_back(r.mean_sum_throughput_mbps);
    }
  }
  train_reward.y = moving_average(train_reward.y, window);
  train_tput.y = moving_average(train_tput.y, window);
  auto values = [&](std::map<std::string, Series>& m) {
    std::vector<Series> out;
    for (auto& [_, s] : m) {
      s.y = moving_average(s.y, window);
      out.push_back(s);
    }
    return out;
  };

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::vector<std::pair<std::string, std::string>> files{
      {"train_reward.svg", render_svg("Mean training reward", "reward", {train_reward})},
      {"train_throughput.svg",
       render_svg("Mean training throughput", "sum throughput (Mbps)", {train_tput})},
      {"eval_reward.svg", render_svg("Mean evaluation reward", "reward", values(eval_reward))},
      {"eval_throughput.svg",
       render_svg("Mean evaluation throughput", "sum throughput (Mbps)", values(eval_tput))}};
  std::vector<std::string> paths;
  for (const auto& [name, content] : files) {
    const auto path = (fs::path(out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
    paths.push_back(path);
  }
  return paths;
}

}  // namespace haps
