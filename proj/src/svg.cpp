#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sgobs/io.hpp"

namespace sgobs {

namespace {

struct Series {
  const std::vector<double>* values;
  const char* label;
  const char* color;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void panel(std::ostringstream& svg, const std::vector<double>& t,
           const std::vector<Series>& series, bool log_scale, double top, double width,
           double height, const std::string& title) {
  constexpr double left = 70.0, right = 20.0, pad_top = 24.0, pad_bottom = 28.0;
  const double plot_w = width - left - right;
  const double plot_h = height - pad_top - pad_bottom;
  const double y0 = top + pad_top;

  auto transform = [log_scale](double v) {
    if (!log_scale) return v;
    return std::log10(std::max(v, 1e-300));
  };

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Series& s : series)
    for (double v : *s.values) {
      if (log_scale && !(v > 0.0)) continue;
      const double w = transform(v);
      if (!std::isfinite(w)) continue;
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double t_lo = t.empty() ? 0.0 : t.front();
  const double t_hi = t.empty() || t.back() == t_lo ? t_lo + 1.0 : t.back();

  auto px = [&](double tv) { return left + (tv - t_lo) / (t_hi - t_lo) * plot_w; };
  auto py = [&](double v) { return y0 + (hi - transform(v)) / (hi - lo) * plot_h; };

  svg << "<text x=\"" << fmt(left) << "\" y=\"" << fmt(top + 16) << "\" font-size=\"13\">"
      << title << (log_scale ? " (log scale)" : "") << "</text>\n";
  svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(plot_w)
      << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double frac = i / 4.0;
    const double value = hi - frac * (hi - lo);
    const double yy = y0 + frac * plot_h;
    svg << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(yy + 4)
        << "\" font-size=\"10\" text-anchor=\"end\">"
        << (log_scale ? "1e" + tick(value) : tick(value)) << "</text>\n";
    const double tv = t_lo + frac * (t_hi - t_lo);
    svg << "<text x=\"" << fmt(px(tv)) << "\" y=\"" << fmt(y0 + plot_h + 14)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << tick(tv) << "</text>\n";
  }

  double legend_x = left + plot_w - 10.0;
  for (auto it = series.rbegin(); it != series.rend(); ++it) {
    svg << "<text x=\"" << fmt(legend_x) << "\" y=\"" << fmt(top + 16)
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << it->color << "\">" << it->label
        << "</text>\n";
    legend_x -= 60.0;
  }

  for (const Series& s : series) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
    const auto& values = *s.values;
    for (std::size_t i = 0; i < values.size() && i < t.size(); ++i) {
      if (log_scale && !(values[i] > 0.0)) continue;
      if (!std::isfinite(values[i])) continue;
      svg << fmt(px(t[i])) << ',' << fmt(py(values[i])) << ' ';
    }
    svg << "\"/>\n";
  }
}

}  // namespace

std::string render_svg(const TimeSeriesRecord& record, const PlotOptions& options) {
  const double width = options.width;
  const double ph = options.panel_height;
  const double title_h = options.title.empty() ? 0.0 : 24.0;
  const double height = title_h + 3 * ph;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << options.width << ' '
      << fmt(height) << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty())
    svg << "<text x=\"" << fmt(width / 2) << "\" y=\"18\" font-size=\"15\" "
        << "text-anchor=\"middle\">" << escape(options.title) << "</text>\n";

  panel(svg, record.t, {{&record.H, "H", "#1f77b4"}, {&record.H_hat, "H_hat", "#d62728"}},
        false, title_h, width, ph, "energy");
  panel(svg, record.t, {{&record.E, "E", "#2ca02c"}}, options.log_error, title_h + ph, width,
        ph, "weighted error");
  panel(svg, record.t, {{&record.u, "u", "#9467bd"}}, false, title_h + 2 * ph, width, ph,
        "control");
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace sgobs
