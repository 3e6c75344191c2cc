#include "akbe/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "akbe/errors.hpp"
#include "akbe/metrics.hpp"

namespace akbe {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 420;
constexpr int kMargin = 56;

const char* kPalette[] = {"#2266cc", "#cc4422", "#22aa66",
                          "#aa22aa", "#888822", "#22aaaa"};

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series) {
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min, y_min = x_min, y_max = -x_min;
    for (const ChartSeries& s : series) {
        for (double x : s.xs) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
        }
        for (double y : s.ys) {
            if (!std::isfinite(y)) continue;
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (!std::isfinite(x_min)) x_min = 0, x_max = 1;
    if (!std::isfinite(y_min)) y_min = 0, y_max = 1;
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;

    const double plot_w = kWidth - 2 * kMargin;
    const double plot_h = kHeight - 2 * kMargin;
    auto px = [&](double x) {
        return kMargin + (x - x_min) / (x_max - x_min) * plot_w;
    };
    auto py = [&](double y) {
        return kHeight - kMargin - (y - y_min) / (y_max - y_min) * plot_h;
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title
        << "</text>\n";
    // axes
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin
        << "\" x2=\"" << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\""
        << kMargin << "\" y2=\"" << kHeight - kMargin
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"12\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"12\" transform=\"rotate(-90 16 " << kHeight / 2
        << ")\">" << y_label << "</text>\n";
    // axis extents
    out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16
        << "\" font-family=\"sans-serif\" font-size=\"10\">"
        << format_double(x_min) << "</text>\n";
    out << "<text x=\"" << kWidth - kMargin << "\" y=\""
        << kHeight - kMargin + 16
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << format_double(x_max) << "</text>\n";
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << format_double(y_min) << "</text>\n";
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << format_double(y_max) << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const ChartSeries& s = series[i];
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(*kPalette))];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < s.xs.size() && k < s.ys.size(); ++k) {
            if (!std::isfinite(s.ys[k])) continue;
            out << px(s.xs[k]) << ',' << py(s.ys[k]) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << kWidth - kMargin + 4 << "\" y=\""
            << kMargin + 16 * static_cast<int>(i)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
            << "\">" << s.name << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace akbe
