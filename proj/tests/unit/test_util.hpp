#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

namespace testutil {

/// Central difference of `loss` with respect to `param`, compared with `analytic`.
/// The denominator is floored so that near-zero gradients are judged absolutely.
template <class F>
double fd_relative_error(double& param, double analytic, F&& loss, double h = 1e-5) {
    const double saved = param;
    param = saved + h;
    const double up = loss();
    param = saved - h;
    const double down = loss();
    param = saved;
    const double numeric = (up - down) / (2 * h);
    return std::abs(numeric - analytic) / std::max({std::abs(numeric), std::abs(analytic), 1e-6});
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("loadgen_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testutil
