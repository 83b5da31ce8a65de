#pragma once

#include <string>
#include <vector>

namespace refugia {

/// Minimal polyline plotter emitting standalone SVG. Diagnostic grade: axes,
/// ticks, optional log scales, a handful of colors. No external dependencies.
class SvgPlot {
public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool logx = false,
          bool logy = false);

  void add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& label = "");
  void add_points(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& label = "");
  void write(const std::string& path) const;

private:
  struct Series {
    std::vector<double> xs, ys;
    std::string label;
    bool points;
  };
  std::string title_, xlabel_, ylabel_;
  bool logx_, logy_;
  std::vector<Series> series_;
};

}  // namespace refugia
