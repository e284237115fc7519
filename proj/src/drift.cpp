#include "scraloha/drift.hpp"

#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace scraloha {

DriftTest detect_positive_drift(std::span<const double> series, const DriftSettings& settings) {
    DriftTest out;

    std::vector<double> y;
    double x_scale = 1.0;  // samples per regression point
    if (settings.batches >= 3 && series.size() >= 2 * settings.batches) {
        const std::size_t width = series.size() / settings.batches;
        x_scale = static_cast<double>(width);
        for (std::size_t b = 0; b < settings.batches; ++b) {
            double sum = 0.0;
            for (std::size_t i = b * width; i < (b + 1) * width; ++i) sum += series[i];
            y.push_back(sum / static_cast<double>(width));
        }
    } else {
        y.assign(series.begin(), series.end());
    }

    const std::size_t n = y.size();
    out.points = n;
    if (n < 3) return out;

    const double mean_x = 0.5 * static_cast<double>(n - 1);
    double mean_y = 0.0;
    for (double v : y) mean_y += v;
    mean_y /= static_cast<double>(n);

    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - mean_x;
        sxx += dx * dx;
        sxy += dx * (y[i] - mean_y);
    }
    const double slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - mean_y - slope * (static_cast<double>(i) - mean_x);
        sse += r * r;
    }
    out.slope = slope / x_scale;

    const double dof = static_cast<double>(n - 2);
    const double se = std::sqrt(sse / dof / sxx);
    if (se == 0.0 || !std::isfinite(se)) {
        out.t_stat = slope > 0.0 ? INFINITY : (slope < 0.0 ? -INFINITY : 0.0);
        out.p_value = slope > 0.0 ? 0.0 : 1.0;
    } else {
        out.t_stat = slope / se;
        const boost::math::students_t dist(dof);
        out.p_value = boost::math::cdf(boost::math::complement(dist, out.t_stat));
    }
    out.positive_drift = slope > 0.0 && out.p_value < settings.significance;
    return out;
}

}  // namespace scraloha
