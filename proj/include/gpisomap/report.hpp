#pragma once

#include "gpisomap/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gpi {

// All numeric output goes through this: 9 significant digits, printf %g
// style. Keeping one formatter makes reruns byte-identical.
std::string fmt9(double value);

// Minimal streaming JSON emitter with insertion-ordered keys and fmt9
// number formatting. Only what the report files need.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(double v);
  JsonWriter& value(Index v);
  JsonWriter& value(int v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v);

  const std::string& str() const { return out_; }

 private:
  void separator();
  std::string out_;
  std::vector<bool> first_;  // per nesting level
  bool pending_key_ = false;
};

std::string json_escape(const std::string& raw);

void write_text_file(const std::string& path, const std::string& contents);

// One row per point: id, then the configured numeric columns.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

// Tiny deterministic SVG scatter/line plotting, enough for a variance
// trace with a threshold line and embedding scatters.
class SvgPlot {
 public:
  SvgPlot(double width = 800, double height = 500);
  void add_line(const std::vector<std::pair<double, double>>& points,
                const std::string& color, double stroke_width = 1.5);
  void add_scatter(const std::vector<std::pair<double, double>>& points,
                   const std::string& color, double radius = 2.0);
  void add_hline(double y, const std::string& color);
  void add_vline(double x, const std::string& color);
  void set_title(const std::string& title);
  std::string render() const;

 private:
  struct Series {
    enum class Kind { Line, Scatter, HLine, VLine } kind;
    std::vector<std::pair<double, double>> points;
    std::string color;
    double size = 1.0;
    double level = 0.0;
  };
  double width_, height_;
  std::string title_;
  std::vector<Series> series_;
};

}  // namespace gpi
