#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fgscan/dataset.hpp"

namespace fgscan::cli {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 60, kRight = 20, kTop = 30, kBottom = 50;

struct Frame {
  double t_max;
  double x(double t) const { return kLeft + (kWidth - kLeft - kRight) * t / t_max; }
  double y(double f) const { return kHeight - kBottom - (kHeight - kTop - kBottom) * f; }
};

std::string num(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

void step_path(std::ostringstream& out, const Frame& f, const std::vector<double>& t,
               const std::vector<double>& v, double end, const std::string& style) {
  if (t.empty()) return;
  out << "<path fill=\"none\" " << style << " d=\"M" << num(f.x(t[0])) << ' ' << num(f.y(v[0]));
  for (std::size_t k = 1; k < t.size(); ++k) out << " H" << num(f.x(t[k])) << " V" << num(f.y(v[k]));
  out << " H" << num(f.x(end)) << "\"/>\n";
}

}  // namespace

std::string cif_svg(const CifEstimate& cif, double alpha) {
  const double t_max = cif.times.empty() ? 1.0 : cif.times.back() * 1.02;
  const Frame f{t_max};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Axes and ticks.
  out << "<line x1=\"" << kLeft << "\" y1=\"" << num(f.y(0)) << "\" x2=\"" << kWidth - kRight << "\" y2=\""
      << num(f.y(0)) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << num(f.y(0)) << "\" x2=\"" << kLeft << "\" y2=\"" << num(f.y(1))
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double v = k / 5.0;
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(f.y(v) + 4) << "\" text-anchor=\"end\">"
        << format_double(v) << "</text>\n";
    const double t = t_max * k / 5.0;
    out << "<text x=\"" << num(f.x(t)) << "\" y=\"" << num(f.y(0) + 18) << "\" text-anchor=\"middle\">"
        << num(t) << "</text>\n";
  }
  out << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">time</text>\n";
  out << "<text x=\"15\" y=\"" << num(f.y(0.5)) << "\" transform=\"rotate(-90 15 " << num(f.y(0.5))
      << ")\" text-anchor=\"middle\">cumulative incidence</text>\n";

  std::vector<double> t{0.0};
  std::vector<double> v{0.0};
  t.insert(t.end(), cif.times.begin(), cif.times.end());
  v.insert(v.end(), cif.values.begin(), cif.values.end());
  step_path(out, f, t, v, t_max, "stroke=\"black\" stroke-width=\"2\"");
  const double grid_end = cif.grid.empty() ? 0.0 : cif.grid.back();
  const std::string dashed = "stroke=\"steelblue\" stroke-dasharray=\"6 4\"";
  const std::string dotted = "stroke=\"firebrick\" stroke-dasharray=\"2 3\"";
  step_path(out, f, cif.grid, cif.lower, grid_end, dashed);
  step_path(out, f, cif.grid, cif.upper, grid_end, dashed);
  if (!cif.band_lower.empty()) {
    step_path(out, f, cif.grid, cif.band_lower, grid_end, dotted);
    step_path(out, f, cif.grid, cif.band_upper, grid_end, dotted);
  }
  const int level = static_cast<int>(std::lround(100 * (1 - alpha)));
  out << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop - 10 << "\">estimate (solid), " << level
      << "% pointwise (dashed)" << (cif.band_lower.empty() ? "" : ", band (dotted)") << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace fgscan::cli
