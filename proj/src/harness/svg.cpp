#include <algorithm>
#include <sstream>

#include "abcmc/empirical.hpp"
#include "abcmc/harness.hpp"
#include "abcmc/text.hpp"

namespace abcmc {
namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d"};

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
}

double px(double x) { return kLeft + x * (kWidth - kLeft - kRight); }
double py(double y) { return kHeight - kBottom - y * (kHeight - kTop - kBottom); }

void frame(std::ostringstream& o, const std::string& title, const std::string& x_label, const std::string& y_label,
           bool x_ticks) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
  o << "<rect x=\"" << px(0) << "\" y=\"" << py(1) << "\" width=\"" << px(1) - px(0) << "\" height=\""
    << py(0) - py(1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = t / 5.0;
    o << "<text x=\"" << px(0) - 6 << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">" << num(v)
      << "</text>\n";
    if (x_ticks) {
      o << "<text x=\"" << num(px(v)) << "\" y=\"" << py(0) + 18 << "\" text-anchor=\"middle\">" << num(v)
        << "</text>\n";
    }
  }
  if (!x_label.empty()) {
    o << "<text x=\"" << num((px(0) + px(1)) / 2) << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  }
  o << "<text transform=\"translate(18," << num((py(0) + py(1)) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(y_label) << "</text>\n";
}

}  // namespace

std::string scatter_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                        const std::vector<PlotSeries>& series) {
  std::ostringstream o;
  frame(o, title, x_label, y_label, true);
  o << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(1)
    << "\" stroke=\"grey\" stroke-dasharray=\"4 4\"/>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kPalette[s % std::size(kPalette)];
    for (const auto& [x, y] : series[s].points) {
      o << "<circle cx=\"" << num(px(std::clamp(x, 0.0, 1.0))) << "\" cy=\"" << num(py(std::clamp(y, 0.0, 1.0)))
        << "\" r=\"3\" fill=\"" << colour << "\" fill-opacity=\"0.4\"/>\n";
    }
    const double ly = kTop + 20 + 20 * static_cast<double>(s);
    o << "<circle cx=\"" << px(1) + 20 << "\" cy=\"" << ly << "\" r=\"4\" fill=\"" << colour << "\"/>\n";
    o << "<text x=\"" << px(1) + 30 << "\" y=\"" << ly + 4 << "\">" << escape(series[s].name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string boxplot_svg(const std::string& title, const std::string& y_label, const std::vector<BoxGroup>& groups) {
  std::ostringstream o;
  frame(o, title, "", y_label, false);
  const double slot = groups.empty() ? 1.0 : 1.0 / static_cast<double>(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const char* colour = kPalette[g % std::size(kPalette)];
    const double centre = (static_cast<double>(g) + 0.5) * slot;
    const double half = 0.3 * slot;
    o << "<text x=\"" << num(px(centre)) << "\" y=\"" << py(0) + 18 << "\" text-anchor=\"middle\">"
      << escape(groups[g].name) << "</text>\n";
    if (groups[g].values.empty()) continue;
    std::vector<double> v = groups[g].values;
    std::sort(v.begin(), v.end());
    const double q1 = quantile_sorted(v, 0.25), med = quantile_sorted(v, 0.5), q3 = quantile_sorted(v, 0.75);
    const double reach = 1.5 * (q3 - q1);
    const double lo = *std::lower_bound(v.begin(), v.end(), q1 - reach);
    const double hi = *(std::upper_bound(v.begin(), v.end(), q3 + reach) - 1);
    o << "<line x1=\"" << num(px(centre)) << "\" y1=\"" << num(py(lo)) << "\" x2=\"" << num(px(centre))
      << "\" y2=\"" << num(py(hi)) << "\" stroke=\"black\"/>\n";
    o << "<rect x=\"" << num(px(centre - half)) << "\" y=\"" << num(py(q3)) << "\" width=\""
      << num(px(centre + half) - px(centre - half)) << "\" height=\"" << num(py(q1) - py(q3)) << "\" fill=\""
      << colour << "\" fill-opacity=\"0.5\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << num(px(centre - half)) << "\" y1=\"" << num(py(med)) << "\" x2=\""
      << num(px(centre + half)) << "\" y2=\"" << num(py(med)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    for (double x : v) {
      if (x < lo || x > hi) {
        o << "<circle cx=\"" << num(px(centre)) << "\" cy=\"" << num(py(x)) << "\" r=\"2.5\" fill=\"none\" stroke=\""
          << colour << "\"/>\n";
      }
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace abcmc
