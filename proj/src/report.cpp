#include "gpisomap/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace gpi {

std::string fmt9(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

std::string json_escape(const std::string& raw) {
  std::string out;
  out.reserve(raw.size() + 2);
  for (char c : raw) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void JsonWriter::separator() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!first_.empty()) {
    if (!first_.back()) out_ += ',';
    first_.back() = false;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ += '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separator();
  out_ += '[';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
  separator();
  out_ += '"';
  out_ += json_escape(name);
  out_ += "\":";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separator();
  if (std::isfinite(v))
    out_ += fmt9(v);
  else
    out_ += "null";
  return *this;
}

JsonWriter& JsonWriter::value(Index v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(int v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separator();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  separator();
  out_ += '"';
  out_ += json_escape(v);
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::value(const char* v) { return value(std::string(v)); }

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write " + path);
  file << contents;
  if (!file) throw DataError("short write to " + path);
}

std::string CsvTable::to_string() const {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

SvgPlot::SvgPlot(double width, double height) : width_(width), height_(height) {}

void SvgPlot::add_line(const std::vector<std::pair<double, double>>& points,
                       const std::string& color, double stroke_width) {
  series_.push_back({Series::Kind::Line, points, color, stroke_width, 0.0});
}

void SvgPlot::add_scatter(const std::vector<std::pair<double, double>>& points,
                          const std::string& color, double radius) {
  series_.push_back({Series::Kind::Scatter, points, color, radius, 0.0});
}

void SvgPlot::add_hline(double y, const std::string& color) {
  series_.push_back({Series::Kind::HLine, {}, color, 1.0, y});
}

void SvgPlot::add_vline(double x, const std::string& color) {
  series_.push_back({Series::Kind::VLine, {}, color, 1.0, x});
}

void SvgPlot::set_title(const std::string& title) { title_ = title; }

std::string SvgPlot::render() const {
  // Data bounds over every series (h/v lines only pin one axis).
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series_) {
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    if (s.kind == Series::Kind::HLine) {
      ymin = std::min(ymin, s.level);
      ymax = std::max(ymax, s.level);
    }
    if (s.kind == Series::Kind::VLine) {
      xmin = std::min(xmin, s.level);
      xmax = std::max(xmax, s.level);
    }
  }
  if (!(xmin <= xmax)) {
    xmin = 0;
    xmax = 1;
  }
  if (!(ymin <= ymax)) {
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const double margin = 40.0;
  auto sx = [&](double x) {
    return margin + (x - xmin) / (xmax - xmin) * (width_ - 2 * margin);
  };
  auto sy = [&](double y) {
    return height_ - margin - (y - ymin) / (ymax - ymin) * (height_ - 2 * margin);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt9(width_) +
         "\" height=\"" + fmt9(height_) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title_.empty())
    svg += "<text x=\"" + fmt9(width_ / 2) +
           "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">" +
           json_escape(title_) + "</text>\n";

  for (const auto& s : series_) {
    switch (s.kind) {
      case Series::Kind::Line: {
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" +
               fmt9(s.size) + "\" points=\"";
        for (const auto& [x, y] : s.points)
          svg += fmt9(sx(x)) + "," + fmt9(sy(y)) + " ";
        svg += "\"/>\n";
        break;
      }
      case Series::Kind::Scatter: {
        for (const auto& [x, y] : s.points)
          svg += "<circle cx=\"" + fmt9(sx(x)) + "\" cy=\"" + fmt9(sy(y)) +
                 "\" r=\"" + fmt9(s.size) + "\" fill=\"" + s.color + "\"/>\n";
        break;
      }
      case Series::Kind::HLine:
        svg += "<line x1=\"" + fmt9(margin) + "\" x2=\"" + fmt9(width_ - margin) +
               "\" y1=\"" + fmt9(sy(s.level)) + "\" y2=\"" + fmt9(sy(s.level)) +
               "\" stroke=\"" + s.color + "\" stroke-dasharray=\"6,3\"/>\n";
        break;
      case Series::Kind::VLine:
        svg += "<line y1=\"" + fmt9(margin) + "\" y2=\"" + fmt9(height_ - margin) +
               "\" x1=\"" + fmt9(sx(s.level)) + "\" x2=\"" + fmt9(sx(s.level)) +
               "\" stroke=\"" + s.color + "\" stroke-dasharray=\"6,3\"/>\n";
        break;
    }
  }

  // Axis labels with the data ranges, so the plot is self-describing.
  svg += "<text x=\"" + fmt9(margin) + "\" y=\"" + fmt9(height_ - margin / 4) +
         "\" font-family=\"sans-serif\" font-size=\"11\">x: [" + fmt9(xmin) + ", " +
         fmt9(xmax) + "]</text>\n";
  svg += "<text x=\"" + fmt9(margin) + "\" y=\"" + fmt9(margin / 2 + 8) +
         "\" font-family=\"sans-serif\" font-size=\"11\">y: [" + fmt9(ymin) + ", " +
         fmt9(ymax) + "]</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace gpi
