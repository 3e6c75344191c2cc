#pragma once
// Minimal static SVG line charts for the metrics CSV.

#include <string>
#include <vector>

namespace akbe {

struct ChartSeries {
    std::string name;
    std::vector<double> xs;
    std::vector<double> ys;
};

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series);

}  // namespace akbe
