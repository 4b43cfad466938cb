#include "cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rollmono/errors.hpp"

namespace rollmono::cli {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
    file_ = std::fopen(path.c_str(), "wb");
    if (!file_) throw IoError("cannot open " + path.string() + " for writing");
    std::string line;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) line += ',';
        line += csv_field(header[i]);
    }
    line += "\r\n";
    if (std::fputs(line.c_str(), file_) < 0) throw IoError("write failed: " + path.string());
}

CsvWriter::~CsvWriter() {
    if (file_) std::fclose(file_);
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != columns_) throw IoError("CSV row width mismatch in " + path_.string());
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        if (const auto* d = std::get_if<double>(&cells[i])) line += format_number(*d);
        else if (const auto* n = std::get_if<long long>(&cells[i])) line += std::to_string(*n);
        else line += csv_field(std::get<std::string>(cells[i]));
    }
    line += "\r\n";
    if (std::fputs(line.c_str(), file_) < 0) throw IoError("write failed: " + path_.string());
}

void CsvWriter::close() {
    if (!file_) return;
    const int rc = std::fclose(file_);
    file_ = nullptr;
    if (rc != 0) throw IoError("close failed: " + path_.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.close();
    if (!out) throw IoError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

std::vector<std::vector<Point>> split_at_jumps(const std::vector<Point>& points, double jump) {
    std::vector<std::vector<Point>> runs;
    std::vector<Point> run;
    for (const Point& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            if (!run.empty()) runs.push_back(std::move(run));
            run.clear();
            continue;
        }
        if (!run.empty() && jump > 0.0 && std::abs(p.y - run.back().y) > jump) {
            runs.push_back(std::move(run));
            run.clear();
        }
        run.push_back(p);
    }
    if (!run.empty()) runs.push_back(std::move(run));
    return runs;
}

const std::string& palette(std::size_t i) {
    static const std::vector<std::string> colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[i % colors.size()];
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

// Pixel coordinates with two decimals keep the output byte-stable.
std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v, double step) {
    if (std::abs(v) < 1e-9 * step) v = 0.0;
    const int decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", std::min(decimals, 8), v);
    return buf;
}

double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
    return nice * mag;
}

std::pair<double, double> data_range(const Plot& plot, bool x_axis) {
    double lo = INFINITY, hi = -INFINITY;
    for (const Series& s : plot.series)
        for (const Point& p : s.points) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
            const double v = x_axis ? p.x : p.y;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) {
        lo -= 0.5;
        hi += 0.5;
    } else {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi};
}

}  // namespace

std::string render_svg(const Plot& plot) {
    std::size_t finite = 0;
    for (const Series& s : plot.series)
        for (const Point& p : s.points)
            if (std::isfinite(p.x) && std::isfinite(p.y)) ++finite;
    if (finite == 0) throw ConfigError("plot '" + plot.title + "' has no data to draw");

    const auto xr = plot.x_range.first < plot.x_range.second ? plot.x_range : data_range(plot, true);
    const auto yr = plot.y_range.first < plot.y_range.second ? plot.y_range : data_range(plot, false);

    const double left = 70, right = 20, top = 40, bottom = 55;
    const double w = plot.width - left - right;
    const double h = plot.height - top - bottom;
    const auto sx = [&](double x) { return left + (x - xr.first) / (xr.second - xr.first) * w; };
    const auto sy = [&](double y) { return top + (yr.second - y) / (yr.second - yr.first) * h; };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\""
      << plot.height << "\" viewBox=\"0 0 " << plot.width << ' ' << plot.height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << plot.width << "\" height=\"" << plot.height
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << px(left + w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << xml_escape(plot.title) << "</text>\n";

    // Grid, ticks and frame.
    o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    const double xs = nice_step(xr.second - xr.first, 6);
    for (long long i = std::llround(std::ceil(xr.first / xs)); i * xs <= xr.second + 1e-9 * xs; ++i) {
        const double t = i * xs;
        o << "<line x1=\"" << px(sx(t)) << "\" y1=\"" << px(top) << "\" x2=\"" << px(sx(t))
          << "\" y2=\"" << px(top + h) << "\" stroke=\"#e5e5e5\"/>\n"
          << "<text x=\"" << px(sx(t)) << "\" y=\"" << px(top + h + 16)
          << "\" text-anchor=\"middle\">" << tick_label(t, xs) << "</text>\n";
    }
    const double ys = nice_step(yr.second - yr.first, 6);
    for (long long i = std::llround(std::ceil(yr.first / ys)); i * ys <= yr.second + 1e-9 * ys; ++i) {
        const double t = i * ys;
        o << "<line x1=\"" << px(left) << "\" y1=\"" << px(sy(t)) << "\" x2=\"" << px(left + w)
          << "\" y2=\"" << px(sy(t)) << "\" stroke=\"#e5e5e5\"/>\n"
          << "<text x=\"" << px(left - 6) << "\" y=\"" << px(sy(t) + 4)
          << "\" text-anchor=\"end\">" << tick_label(t, ys) << "</text>\n";
    }
    o << "</g>\n"
      << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(w)
      << "\" height=\"" << px(h) << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<text x=\"" << px(left + w / 2) << "\" y=\"" << px(plot.height - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << xml_escape(plot.x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << px(top + h / 2) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
      << px(top + h / 2) << ")\">" << xml_escape(plot.y_label) << "</text>\n";

    o << "<defs><clipPath id=\"frame\"><rect x=\"" << px(left) << "\" y=\"" << px(top)
      << "\" width=\"" << px(w) << "\" height=\"" << px(h) << "\"/></clipPath></defs>\n"
      << "<g clip-path=\"url(#frame)\">\n";
    for (const Series& s : plot.series) {
        if (s.style == Series::Style::Line) {
            for (const auto& run : split_at_jumps(s.points, s.split_jump)) {
                if (run.size() == 1) {
                    o << "<circle cx=\"" << px(sx(run[0].x)) << "\" cy=\"" << px(sy(run[0].y))
                      << "\" r=\"1.5\" fill=\"" << s.color << "\"/>\n";
                    continue;
                }
                o << "<polyline fill=\"none\" stroke=\"" << s.color
                  << "\" stroke-width=\"1.5\" points=\"";
                for (std::size_t i = 0; i < run.size(); ++i)
                    o << (i ? " " : "") << px(sx(run[i].x)) << ',' << px(sy(run[i].y));
                o << "\"/>\n";
            }
        } else {
            for (const Point& p : s.points)
                if (std::isfinite(p.x) && std::isfinite(p.y))
                    o << "<circle cx=\"" << px(sx(p.x)) << "\" cy=\"" << px(sy(p.y))
                      << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
        }
    }
    o << "</g>\n";

    // Legend, top right inside the frame.
    int row = 0;
    for (const Series& s : plot.series) {
        if (s.label.empty()) continue;
        const double y = top + 14 + 16 * row++;
        const double x = left + w - 150;
        if (s.style == Series::Style::Line)
            o << "<line x1=\"" << px(x) << "\" y1=\"" << px(y - 4) << "\" x2=\"" << px(x + 18)
              << "\" y2=\"" << px(y - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        else
            o << "<circle cx=\"" << px(x + 9) << "\" cy=\"" << px(y - 4) << "\" r=\"3\" fill=\""
              << s.color << "\"/>\n";
        o << "<text x=\"" << px(x + 24) << "\" y=\"" << px(y)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(s.label)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void emit_svg(const std::filesystem::path& path, const Plot& plot) {
    write_text(path, render_svg(plot));
}

}  // namespace rollmono::cli
