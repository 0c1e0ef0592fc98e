#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace loadgen::eval {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    double opacity = 1.0;
    bool in_legend = true;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 720;
    int height = 420;
};

/// Minimal standalone SVG line chart. Output depends only on the inputs.
std::string render_line_chart(const ChartSpec& spec, std::span<const Series> series);
void write_line_chart(const ChartSpec& spec, std::span<const Series> series, const std::filesystem::path& path);

}  // namespace loadgen::eval
