#include "qrocket/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrocket/errors.hpp"

namespace qrocket::harness {

namespace fs = std::filesystem;

namespace {

const char* kEpisodesHeader = "episode,total_reward,epsilon,steps,outcome";
const char* kLossesHeader = "update_index,loss";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_field(const std::string& path, int lineno, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw FormatError(path + ":" + std::to_string(lineno) + ": bad numeric field '" + v + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

Series read_metrics_csv(const std::string& path, std::string* schema_out) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metrics file: " + path);

  std::string header;
  if (!std::getline(in, header)) throw FormatError(path + ":1: empty file");
  while (!header.empty() && (header.back() == '\r' || header.back() == '\n')) header.pop_back();

  int x_col, y_col, ncols;
  std::string schema;
  if (header == kEpisodesHeader) {
    schema = "episodes";
    x_col = 0;
    y_col = 1;
    ncols = 5;
  } else if (header == kLossesHeader) {
    schema = "losses";
    x_col = 0;
    y_col = 1;
    ncols = 2;
  } else {
    throw FormatError(path + ":1: unrecognized metrics header");
  }
  if (schema_out) *schema_out = schema;

  Series s;
  s.name = fs::path(path).stem().string();
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) != ncols) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(ncols) + " columns, got " +
                        std::to_string(fields.size()));
    }
    s.x.push_back(parse_field(path, lineno, fields[x_col]));
    s.y.push_back(parse_field(path, lineno, fields[y_col]));
  }
  if (s.x.empty()) throw FormatError(path + ": no data rows");
  return s;
}

std::string render_chart_svg(const std::string& title, const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<Series>& series, int ma_window) {
  if (series.empty()) throw FormatError("no series to plot");

  constexpr double W = 960, H = 540;
  constexpr double ML = 70, MR = 20, MT = 40, MB = 50;
  const double pw = W - ML - MR;
  const double ph = H - MT - MB;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Series& s : series) {
    for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return MT + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  static const char* palette[] = {"#6a3d9a", "#1f78b4", "#e8416c",
                                  "#33a02c", "#ff7f00", "#555555"};
  constexpr int npal = 6;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 540\">\n";
  svg << "<rect width=\"960\" height=\"540\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";
  // axes
  svg << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\""
      << MT + ph << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ML << "\" y1=\"" << MT + ph << "\" x2=\"" << ML + pw
      << "\" y2=\"" << MT + ph << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << ML << "\" y=\"" << H - 14 << "\" font-size=\"11\">" << fmt(xmin)
      << "</text>\n";
  svg << "<text x=\"" << ML + pw << "\" y=\"" << H - 14
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(xmax) << "</text>\n";
  svg << "<text x=\"" << ML - 6 << "\" y=\"" << MT + ph
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ymin) << "</text>\n";
  svg << "<text x=\"" << ML - 6 << "\" y=\"" << MT + 10
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ymax) << "</text>\n";
  svg << "<text x=\"" << ML + pw / 2 << "\" y=\"" << H - 14
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  svg << "<text x=\"16\" y=\"" << MT + ph / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
      << MT + ph / 2 << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";

  int ci = 0;
  for (const Series& s : series) {
    const char* color = palette[ci % npal];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1\" stroke-opacity=\"0.45\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
    }
    svg << "\"/>\n";

    // trailing moving average overlay, only once the window is filled
    if (ma_window > 1 && static_cast<int>(s.y.size()) >= ma_window) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      double acc = 0.0;
      for (int i = 0; i < static_cast<int>(s.y.size()); ++i) {
        acc += s.y[i];
        if (i >= ma_window) acc -= s.y[i - ma_window];
        if (i >= ma_window - 1) {
          svg << fmt(px(s.x[i])) << ',' << fmt(py(acc / ma_window)) << ' ';
        }
      }
      svg << "\"/>\n";
    }

    // legend entry
    const double ly = MT + 16 + 18.0 * ci;
    svg << "<line x1=\"" << ML + pw - 150 << "\" y1=\"" << ly << "\" x2=\""
        << ML + pw - 120 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << ML + pw - 114 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
        << s.name << "</text>\n";
    ++ci;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<ComparisonRow> comparison_table(const std::vector<Series>& episode_series,
                                            int window) {
  std::vector<ComparisonRow> rows;
  for (const Series& s : episode_series) {
    ComparisonRow r;
    r.name = s.name;
    r.points = static_cast<long>(s.y.size());
    const long w = std::min<long>(window, r.points);
    double first = 0.0, last = 0.0;
    for (long i = 0; i < w; ++i) first += s.y[i];
    for (long i = r.points - w; i < r.points; ++i) last += s.y[i];
    r.mean_first_window = first / w;
    r.mean_final_window = last / w;
    r.improvement = r.mean_final_window - r.mean_first_window;
    r.best_value = *std::max_element(s.y.begin(), s.y.end());
    rows.push_back(r);
  }
  return rows;
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write comparison table: " + path);
  out << "series,episodes,mean_first_100,mean_final_100,improvement,best_reward\n";
  char buf[256];
  for (const ComparisonRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%ld,%.17g,%.17g,%.17g,%.17g\n", r.name.c_str(),
                  r.points, r.mean_first_window, r.mean_final_window, r.improvement,
                  r.best_value);
    out << buf;
  }
}

void emit_plots(const std::vector<std::string>& metrics_files, const std::string& out_dir) {
  if (metrics_files.empty()) throw ConfigError("plot requires at least one metrics file");

  std::vector<Series> episodes, losses;
  for (const std::string& f : metrics_files) {
    std::string schema;
    Series s = read_metrics_csv(f, &schema);
    (schema == "episodes" ? episodes : losses).push_back(std::move(s));
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  auto write_file = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
  };

  if (!episodes.empty()) {
    write_file("reward.svg",
               render_chart_svg("Reward per episode", "episode", "total reward", episodes, 100));
    write_comparison_csv(comparison_table(episodes, 100),
                         (fs::path(out_dir) / "comparison.csv").string());
  }
  if (!losses.empty()) {
    write_file("loss.svg",
               render_chart_svg("Training loss", "update", "loss", losses, 100));
  }
}

}  // namespace qrocket::harness
