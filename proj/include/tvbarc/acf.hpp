#pragma once

#include <cstdint>
#include <vector>

#include "tvbarc/errors.hpp"
#include "tvbarc/series.hpp"

namespace tvbarc {

/// Sample autocorrelation rho(0..max_lag) with the divisor-T covariance
/// estimator, so rho(0) = 1 and |rho(h)| <= 1.
inline std::vector<double> sample_acf(const CountSeries& series, std::int64_t max_lag) {
    const std::int64_t T = series.length();
    if (max_lag < 1 || max_lag >= T)
        throw std::invalid_argument("max_lag must satisfy 1 <= max_lag < T");
    double mean = 0.0;
    for (auto c : series.counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(T);

    double denom = 0.0;
    for (auto c : series.counts) {
        double d = static_cast<double>(c) - mean;
        denom += d * d;
    }
    if (!(denom > 0.0)) throw data_error("sample ACF undefined for a constant series");

    std::vector<double> rho(static_cast<std::size_t>(max_lag) + 1);
    rho[0] = 1.0;
    for (std::int64_t h = 1; h <= max_lag; ++h) {
        double num = 0.0;
        for (std::int64_t t = 0; t + h < T; ++t)
            num += (static_cast<double>(series.counts[static_cast<std::size_t>(t)]) - mean) *
                   (static_cast<double>(series.counts[static_cast<std::size_t>(t + h)]) - mean);
        rho[static_cast<std::size_t>(h)] = num / denom;
    }
    return rho;
}

}  // namespace tvbarc
