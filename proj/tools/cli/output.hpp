// File emission: CSV tables, JSON documents and standalone SVG plots.
#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace rollmono::cli {

using Json = nlohmann::ordered_json;

/// `%.17g`, with non-finite values spelled nan / inf / -inf.
std::string format_number(double x);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

using CsvCell = std::variant<double, long long, std::string>;

/// Writes the header on construction. Throws IoError.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<CsvCell>& cells);
    void close();

private:
    std::filesystem::path path_;
    std::FILE* file_ = nullptr;
    std::size_t columns_ = 0;
};

/// Pretty-printed with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const Json& doc);

void write_text(const std::filesystem::path& path, const std::string& text);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Series {
    enum class Style { Line, Markers };
    std::string label;
    std::vector<Point> points;
    Style style = Style::Line;
    std::string color = "#1f77b4";
    /// Line style only: start a new polyline where |dy| exceeds this.
    double split_jump = 0.0;
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    /// Fixed axis ranges; automatic when lo >= hi.
    std::pair<double, double> x_range{0.0, 0.0};
    std::pair<double, double> y_range{0.0, 0.0};
    int width = 640;
    int height = 480;
};

/// Consecutive runs of `points` with |y_i - y_{i-1}| <= jump.
std::vector<std::vector<Point>> split_at_jumps(const std::vector<Point>& points, double jump);

/// Standalone SVG document. Throws ConfigError when there is nothing to draw.
std::string render_svg(const Plot& plot);

void emit_svg(const std::filesystem::path& path, const Plot& plot);

/// Default colour cycle.
const std::string& palette(std::size_t i);

}  // namespace rollmono::cli
