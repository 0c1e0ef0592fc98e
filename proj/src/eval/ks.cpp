#include "loadgen/eval/ks.hpp"

#include <algorithm>
#include <cmath>

#include "loadgen/errors.hpp"
#include "loadgen/eval/sample_set.hpp"

namespace loadgen::eval {

unsigned nearest_month(const data::ConditionVector& c) noexcept {
    auto m = static_cast<long>(std::lround(c.month()));
    if (m <= 0) m += 12;
    if (m > 12) m -= 12;
    return static_cast<unsigned>(m);
}

namespace {

double ks_sorted(std::span<const double> a, std::span<const double> b) {
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

}  // namespace

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DataError("ks_statistic: both samples must be non-empty");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return ks_sorted(sa, sb);
}

KsReport ks_per_dimension(const nn::Matrix& a, const nn::Matrix& b) {
    if (a.cols() != b.cols())
        throw ShapeError("ks_per_dimension: " + a.shape_string() + " vs " + b.shape_string());
    if (a.rows() == 0 || b.rows() == 0) throw DataError("ks_per_dimension: empty sample set");
    KsReport r;
    r.statistic.resize(a.cols());
    std::vector<double> ca(a.rows()), cb(b.rows());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) ca[i] = a(i, j);
        for (std::size_t i = 0; i < b.rows(); ++i) cb[i] = b(i, j);
        std::sort(ca.begin(), ca.end());
        std::sort(cb.begin(), cb.end());
        r.statistic[j] = ks_sorted(ca, cb);
    }
    double sum = 0.0;
    for (double d : r.statistic) {
        sum += d;
        r.max = std::max(r.max, d);
    }
    r.mean = r.statistic.empty() ? 0.0 : sum / static_cast<double>(r.statistic.size());
    return r;
}

}  // namespace loadgen::eval
