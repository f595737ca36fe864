#include "anneal/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <vector>

namespace anneal {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Series {
  double eta;
  std::vector<double> tf;
  std::vector<double> eps;
};

}  // namespace

bool emit_plot(const SweepResult& result, const std::filesystem::path& path) {
  // One series per eta, in config order; t_f = 0 cannot sit on a log axis and
  // is left to the CSV.
  std::vector<Series> series;
  for (double eta : result.config.eta_values) {
    Series s;
    s.eta = eta;
    for (const SweepRow& row : result.rows)
      if (row.ok() && row.eta == eta && row.tf > 0.0) {
        s.tf.push_back(row.tf);
        s.eps.push_back(row.residual_energy);
      }
    if (!s.tf.empty()) series.push_back(std::move(s));
  }
  if (series.empty()) {
    std::cerr << "emit_plot: no plottable rows, skipping " << path.string()
              << "\n";
    return false;
  }

  double xlo = std::numeric_limits<double>::max(), xhi = -xlo;
  double yhi = 0.0;
  for (const Series& s : series)
    for (size_t i = 0; i < s.tf.size(); ++i) {
      xlo = std::min(xlo, std::log10(s.tf[i]));
      xhi = std::max(xhi, std::log10(s.tf[i]));
      yhi = std::max(yhi, s.eps[i]);
    }
  if (xhi - xlo < 1e-12) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  if (yhi <= 0.0) yhi = 1.0;
  yhi *= 1.08;

  const double width = 760, height = 500;
  const double ml = 70, mr = 175, mt = 30, mb = 55;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto xpix = [&](double tf) {
    return ml + (std::log10(tf) - xlo) / (xhi - xlo) * pw;
  };
  auto ypix = [&](double eps) { return mt + (1.0 - eps / yhi) * ph; };

  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    std::cerr << "emit_plot: cannot write " << path.string() << "\n";
    return false;
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<!-- residual energy vs annealing time; t_f = 0 rows omitted from "
         "the log axis, see sweep.csv -->\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";

  // decade ticks on the time axis
  for (int d = static_cast<int>(std::ceil(xlo)); d <= std::floor(xhi); ++d) {
    const double x = ml + (d - xlo) / (xhi - xlo) * pw;
    out << "<line x1=\"" << x << "\" y1=\"" << mt + ph << "\" x2=\"" << x
        << "\" y2=\"" << mt + ph + 6 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << mt + ph + 22
        << "\" text-anchor=\"middle\" font-size=\"13\">1e" << d
        << "</text>\n";
  }
  // y ticks
  for (int k = 0; k <= 5; ++k) {
    const double v = yhi * k / 5.0;
    const double y = ypix(v);
    out << "<line x1=\"" << ml - 6 << "\" y1=\"" << y << "\" x2=\"" << ml
        << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 10 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"13\">" << format_number(v)
        << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"15\">annealing time t_f "
         "[1/E]</text>\n";
  out << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-size=\"15\" transform=\"rotate(-90 "
         "18 "
      << mt + ph / 2 << ")\">residual energy [E]</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))];
    if (s.tf.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.8\" points=\"";
      for (size_t i = 0; i < s.tf.size(); ++i)
        out << xpix(s.tf[i]) << ',' << ypix(s.eps[i]) << ' ';
      out << "\"/>\n";
    }
    for (size_t i = 0; i < s.tf.size(); ++i)
      out << "<circle cx=\"" << xpix(s.tf[i]) << "\" cy=\"" << ypix(s.eps[i])
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    // legend
    const double ly = mt + 14 + 22 * static_cast<double>(si);
    out << "<line x1=\"" << ml + pw + 14 << "\" y1=\"" << ly << "\" x2=\""
        << ml + pw + 44 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + pw + 50 << "\" y=\"" << ly + 4
        << "\" font-size=\"13\">eta = " << format_number(s.eta)
        << "</text>\n";
  }
  out << "</svg>\n";
  return true;
}

}  // namespace anneal
