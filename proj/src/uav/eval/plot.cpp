#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "uav/eval/metrics.hpp"

namespace uav::eval {

namespace {

struct Series {
  std::vector<double> t;
  std::vector<double> v;
};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void write_axis_svg(const std::filesystem::path& path, const std::string& axis_name,
                    const Series& gt, const Series& est) {
  constexpr double width = 840.0;
  constexpr double height = 420.0;
  constexpr double margin = 50.0;

  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -t_min;
  double v_min = t_min;
  double v_max = -t_min;
  auto scan = [&](const Series& s) {
    for (size_t i = 0; i < s.t.size(); ++i) {
      t_min = std::min(t_min, s.t[i]);
      t_max = std::max(t_max, s.t[i]);
      v_min = std::min(v_min, s.v[i]);
      v_max = std::max(v_max, s.v[i]);
    }
  };
  scan(gt);
  scan(est);
  if (!(t_max > t_min)) t_max = t_min + 1.0;
  if (!(v_max > v_min)) v_max = v_min + 1.0;

  auto sx = [&](double t) { return margin + (t - t_min) / (t_max - t_min) * (width - 2 * margin); };
  auto sy = [&](double v) {
    return height - margin - (v - v_min) / (v_max - v_min) * (height - 2 * margin);
  };

  std::ofstream out(path);
  if (!out) {
    raise(ErrorCode::io_error, "cannot open for writing: " + path.string());
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << axis_name << " position vs ground truth</text>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 30
      << "\" text-anchor=\"end\" font-size=\"12\">t [s] (" << fmt2(t_min) << " .. "
      << fmt2(t_max) << ")</text>\n";
  out << "<text x=\"" << margin << "\" y=\"" << margin - 10 << "\" font-size=\"12\">" << axis_name
      << " [mm] (" << fmt2(v_min) << " .. " << fmt2(v_max) << ")</text>\n";

  auto polyline = [&](const Series& s, const char* color) {
    if (s.t.empty()) return;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.t.size(); ++i) {
      if (i) out << ' ';
      out << fmt2(sx(s.t[i])) << ',' << fmt2(sy(s.v[i]));
    }
    out << "\"/>\n";
  };
  polyline(gt, "red");
  polyline(est, "blue");

  out << "<text x=\"" << width - margin - 140 << "\" y=\"" << margin
      << "\" font-size=\"12\" fill=\"red\">ground truth</text>\n";
  out << "<text x=\"" << width - margin - 140 << "\" y=\"" << margin + 16
      << "\" font-size=\"12\" fill=\"blue\">estimate</text>\n";
  out << "</svg>\n";
}

}  // namespace

void write_svg_plots(const std::filesystem::path& dir,
                     std::span<const state::WorldState> estimates,
                     std::span<const io::GroundTruthSample> gt) {
  std::filesystem::create_directories(dir);
  const char* names[3] = {"x", "y", "z"};
  for (size_t axis = 0; axis < 3; ++axis) {
    Series gt_series;
    for (const auto& s : gt) {
      gt_series.t.push_back(s.timestamp);
      const Vec3& p = s.position_mm;
      gt_series.v.push_back(axis == 0 ? p.x : (axis == 1 ? p.y : p.z));
    }
    Series est_series;
    for (const auto& s : estimates) {
      est_series.t.push_back(s.timestamp);
      const Vec3& p = s.position_mm;
      est_series.v.push_back(axis == 0 ? p.x : (axis == 1 ? p.y : p.z));
    }
    write_axis_svg(dir / (std::string("plot_") + names[axis] + ".svg"), names[axis], gt_series,
                   est_series);
  }
}

}  // namespace uav::eval
