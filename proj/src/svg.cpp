#include "refugia/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "refugia/errors.hpp"

namespace refugia {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool logx,
                 bool logy)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
      logx_(logx), logy_(logy) {}

void SvgPlot::add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::string& label) {
  series_.push_back({xs, ys, label, false});
}

void SvgPlot::add_points(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::string& label) {
  series_.push_back({xs, ys, label, true});
}

void SvgPlot::write(const std::string& path) const {
  auto tx = [this](double v) { return logx_ ? std::log10(v) : v; };
  auto ty = [this](double v) { return logy_ ? std::log10(v) : v; };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series_)
    for (size_t i = 0; i < s.xs.size(); ++i) {
      if (logx_ && s.xs[i] <= 0.0) continue;
      if (logy_ && s.ys[i] <= 0.0) continue;
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      xmin = std::min(xmin, tx(s.xs[i]));
      xmax = std::max(xmax, tx(s.xs[i]));
      ymin = std::min(ymin, ty(s.ys[i]));
      ymax = std::max(ymax, ty(s.ys[i]));
    }
  if (!(xmin < xmax)) { xmin -= 0.5; xmax += 0.5; }
  if (!(ymin < ymax)) { ymin -= 0.5; ymax += 0.5; }
  const double xpad = 0.04 * (xmax - xmin), ypad = 0.04 * (ymax - ymin);
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

  auto px = [&](double v) {
    return kLeft + (tx(v) - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
  };
  auto py = [&](double v) {
    return kHeight - kBottom - (ty(v) - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
  };

  std::ofstream out(path);
  if (!out) fail(Errc::validation_error, "cannot open " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='"
      << kHeight << "' viewBox='0 0 " << kWidth << " " << kHeight << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-size='15'>"
      << title_ << "</text>\n";

  // axes box and ticks
  out << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << kWidth - kLeft - kRight
      << "' height='" << kHeight - kTop - kBottom
      << "' fill='none' stroke='black' stroke-width='1'/>\n";
  const int nticks = 5;
  for (int k = 0; k <= nticks; ++k) {
    const double fx = xmin + k * (xmax - xmin) / nticks;
    const double fy = ymin + k * (ymax - ymin) / nticks;
    const double sx = kLeft + k * (kWidth - kLeft - kRight) / nticks;
    const double sy = kHeight - kBottom - k * (kHeight - kTop - kBottom) / nticks;
    const double vx = logx_ ? std::pow(10.0, fx) : fx;
    const double vy = logy_ ? std::pow(10.0, fy) : fy;
    out << "<line x1='" << sx << "' y1='" << kHeight - kBottom << "' x2='" << sx << "' y2='"
        << kHeight - kBottom + 5 << "' stroke='black'/>\n"
        << "<text x='" << sx << "' y='" << kHeight - kBottom + 18
        << "' text-anchor='middle' font-size='11'>" << fmt(vx) << "</text>\n";
    out << "<line x1='" << kLeft - 5 << "' y1='" << sy << "' x2='" << kLeft << "' y2='" << sy
        << "' stroke='black'/>\n"
        << "<text x='" << kLeft - 8 << "' y='" << sy + 4
        << "' text-anchor='end' font-size='11'>" << fmt(vy) << "</text>\n";
  }
  out << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12
      << "' text-anchor='middle' font-size='13'>" << xlabel_ << (logx_ ? " (log)" : "")
      << "</text>\n";
  out << "<text x='16' y='" << kHeight / 2 << "' text-anchor='middle' font-size='13' "
      << "transform='rotate(-90 16 " << kHeight / 2 << ")'>" << ylabel_
      << (logy_ ? " (log)" : "") << "</text>\n";

  int ci = 0;
  double legend_y = kTop + 16;
  for (const auto& s : series_) {
    const char* color = kColors[ci++ % 8];
    if (s.points) {
      for (size_t i = 0; i < s.xs.size(); ++i) {
        if ((logx_ && s.xs[i] <= 0.0) || (logy_ && s.ys[i] <= 0.0)) continue;
        out << "<circle cx='" << px(s.xs[i]) << "' cy='" << py(s.ys[i])
            << "' r='3' fill='" << color << "'/>\n";
      }
    } else {
      out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
      for (size_t i = 0; i < s.xs.size(); ++i) {
        if ((logx_ && s.xs[i] <= 0.0) || (logy_ && s.ys[i] <= 0.0)) continue;
        out << px(s.xs[i]) << "," << py(s.ys[i]) << " ";
      }
      out << "'/>\n";
    }
    if (!s.label.empty()) {
      out << "<line x1='" << kWidth - 180 << "' y1='" << legend_y << "' x2='"
          << kWidth - 160 << "' y2='" << legend_y << "' stroke='" << color
          << "' stroke-width='2'/>\n"
          << "<text x='" << kWidth - 154 << "' y='" << legend_y + 4 << "' font-size='12'>"
          << s.label << "</text>\n";
      legend_y += 16;
    }
  }
  out << "</svg>\n";
}

}  // namespace refugia
