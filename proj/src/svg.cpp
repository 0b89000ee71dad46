#include "curla/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace curla {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b",
                          "#17becf", "#e377c2"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace

void write_svg_chart(const std::string& path, const SvgChart& chart) {
  if (chart.series.empty())
    throw std::invalid_argument("svg chart needs at least one series");

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : chart.series) {
    for (const auto& p : s.points) {
      x_min = std::min(x_min, p.x);
      x_max = std::max(x_max, p.x);
      y_min = std::min(y_min, p.y);
      y_max = std::max(y_max, p.y);
    }
  }
  if (!(x_min <= x_max))
    throw std::invalid_argument("svg chart series have no points");
  if (x_max == x_min) { x_min -= 1.0; x_max += 1.0; }
  if (y_max == y_min) { y_min -= 1.0; y_max += 1.0; }
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double ml = 62, mr = 18, mt = 40, mb = 48;
  const double pw = chart.width - ml - mr;
  const double ph = chart.height - mt - mb;
  const auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  const auto sy = [&](double y) { return mt + ph - (y - y_min) / (y_max - y_min) * ph; };

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width
      << "\" height=\"" << chart.height << "\" viewBox=\"0 0 " << chart.width
      << " " << chart.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt + ph) << "\" x2=\""
      << num(ml + pw) << "\" y2=\"" << num(mt + ph)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt) << "\" x2=\""
      << num(ml) << "\" y2=\"" << num(mt + ph)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double tx = x_min + (x_max - x_min) * i / ticks;
    const double ty = y_min + (y_max - y_min) * i / ticks;
    out << "<line x1=\"" << num(sx(tx)) << "\" y1=\"" << num(mt + ph)
        << "\" x2=\"" << num(sx(tx)) << "\" y2=\"" << num(mt + ph + 4)
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << num(sx(tx)) << "\" y=\"" << num(mt + ph + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << num(tx)
        << "</text>\n";
    out << "<line x1=\"" << num(ml - 4) << "\" y1=\"" << num(sy(ty))
        << "\" x2=\"" << num(ml) << "\" y2=\"" << num(sy(ty))
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(sy(ty) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(ty) << "</text>\n";
  }

  out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"22\" font-size=\"15\" "
      << "text-anchor=\"middle\" font-weight=\"bold\">" << escape(chart.title)
      << "</text>\n";
  out << "<text x=\"" << num(ml + pw / 2) << "\" y=\""
      << num(chart.height - 8) << "\" font-size=\"12\" text-anchor=\"middle\">"
      << escape(chart.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << num(mt + ph / 2)
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num(mt + ph / 2) << ")\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const auto& series = chart.series[s];
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string pixels, logical;
    for (const auto& p : series.points) {
      pixels += num(sx(p.x)) + "," + num(sy(p.y)) + " ";
      logical += num(p.x) + "," + num(p.y) + " ";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"" << pixels << "\" data-label=\""
        << escape(series.label) << "\" data-points=\"" << logical << "\"/>\n";
    // legend entry
    const double ly = mt + 14 + 16 * static_cast<double>(s);
    out << "<line x1=\"" << num(ml + pw - 130) << "\" y1=\"" << num(ly - 4)
        << "\" x2=\"" << num(ml + pw - 110) << "\" y2=\"" << num(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(ml + pw - 104) << "\" y=\"" << num(ly)
        << "\" font-size=\"11\">" << escape(series.label) << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace curla
