#pragma once

#include <string>
#include <vector>

namespace qrocket::harness {

struct Series {
  std::string name;  // file stem, used for the legend
  std::vector<double> x;
  std::vector<double> y;
};

// Reads a metrics CSV (episodes or losses schema, detected by header).
// schema_out receives "episodes" or "losses". Throws IoError if unreadable,
// FormatError (with line number) on malformed content or an empty series.
Series read_metrics_csv(const std::string& path, std::string* schema_out);

// 960x540 line chart; one polyline per series plus a trailing moving-average
// overlay for series long enough to fill the window.
std::string render_chart_svg(const std::string& title, const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<Series>& series, int ma_window);

struct ComparisonRow {
  std::string name;
  long points = 0;
  double mean_first_window = 0.0;
  double mean_final_window = 0.0;
  double improvement = 0.0;
  double best_value = 0.0;
};

std::vector<ComparisonRow> comparison_table(const std::vector<Series>& episode_series,
                                            int window);
void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path);

// Splits the inputs by schema and writes reward.svg / loss.svg plus
// comparison.csv into out_dir. Pure file transformation.
void emit_plots(const std::vector<std::string>& metrics_files, const std::string& out_dir);

}  // namespace qrocket::harness
