#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "tvbarc/errors.hpp"
#include "tvbarc/series.hpp"

namespace tvbarc {

/// At-most-one-changepoint fit: E(X_i) = base_mean for i <= tau_hat and
/// base_mean + shift afterwards.
struct ChangePointResult {
    std::int64_t tau_hat = 0;
    double base_mean = 0.0;
    double shift = 0.0;
    double sse_reduction = 0.0;  // SSE(no change) - SSE(tau_hat)
};

/// Least-squares changepoint scan: tau_hat minimizes the within-segment sum
/// of squared errors over min_seg <= tau <= T - min_seg, ties broken by the
/// smallest tau.
inline ChangePointResult detect_changepoint(const CountSeries& series,
                                            std::int64_t min_seg = 2) {
    if (min_seg < 1) throw std::invalid_argument("min_seg must be positive");
    const std::int64_t T = series.length();
    if (T < 2 * min_seg)
        throw data_error("series too short for changepoint scan (need T >= 2*min_seg)");

    std::vector<double> cum(static_cast<std::size_t>(T) + 1, 0.0);
    std::vector<double> cum_sq(static_cast<std::size_t>(T) + 1, 0.0);
    for (std::int64_t t = 0; t < T; ++t) {
        double v = static_cast<double>(series.counts[static_cast<std::size_t>(t)]);
        cum[static_cast<std::size_t>(t) + 1] = cum[static_cast<std::size_t>(t)] + v;
        cum_sq[static_cast<std::size_t>(t) + 1] = cum_sq[static_cast<std::size_t>(t)] + v * v;
    }
    auto segment_sse = [&](std::int64_t lo, std::int64_t hi) {  // observations lo+1..hi
        double s = cum[static_cast<std::size_t>(hi)] - cum[static_cast<std::size_t>(lo)];
        double q = cum_sq[static_cast<std::size_t>(hi)] - cum_sq[static_cast<std::size_t>(lo)];
        double len = static_cast<double>(hi - lo);
        return q - s * s / len;
    };

    std::int64_t best_tau = min_seg;
    double best_sse = segment_sse(0, min_seg) + segment_sse(min_seg, T);
    for (std::int64_t tau = min_seg + 1; tau <= T - min_seg; ++tau) {
        double sse = segment_sse(0, tau) + segment_sse(tau, T);
        if (sse < best_sse) {
            best_sse = sse;
            best_tau = tau;
        }
    }

    ChangePointResult result;
    result.tau_hat = best_tau;
    result.base_mean = cum[static_cast<std::size_t>(best_tau)] / static_cast<double>(best_tau);
    result.shift = (cum[static_cast<std::size_t>(T)] - cum[static_cast<std::size_t>(best_tau)]) /
                       static_cast<double>(T - best_tau) -
                   result.base_mean;
    double sse_total = segment_sse(0, T);
    result.sse_reduction = std::max(sse_total - best_sse, 0.0);
    return result;
}

}  // namespace tvbarc
