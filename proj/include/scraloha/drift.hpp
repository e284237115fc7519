#pragma once

#include <cstddef>
#include <span>

namespace scraloha {

struct DriftTest {
    double slope = 0.0;    // per sample of the input series
    double t_stat = 0.0;
    double p_value = 1.0;  // one-sided, H1: slope > 0
    std::size_t points = 0;  // regression points after batching
    bool positive_drift = false;
};

struct DriftSettings {
    std::size_t batches = 20;
    double significance = 0.01;
};

/// One-sided OLS slope test for upward trend.
///
/// Consecutive backlog samples are strongly autocorrelated, so the series is
/// first reduced to `batches` contiguous batch means and the slope is fitted
/// to those (series shorter than 2 * batches are used point by point). The
/// p-value comes from Student's t with points - 2 degrees of freedom.
DriftTest detect_positive_drift(std::span<const double> series, const DriftSettings& settings = {});

}  // namespace scraloha
