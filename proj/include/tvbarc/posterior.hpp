#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvbarc/sampler.hpp"

namespace tvbarc {

/// Which time-varying function to summarize.
struct TrendTarget {
    bool is_mu = true;
    int lag = 0;

    static TrendTarget mu() { return {true, 0}; }
    static TrendTarget ar(int i) { return {false, i}; }

    std::string name() const { return is_mu ? "mu" : "ar" + std::to_string(lag); }
};

/// Pointwise posterior summary of a curve over a grid in [0,1], with the grid
/// mapped back to calendar dates of the fitted series.
struct TrendSummary {
    std::string target;
    std::vector<double> grid;
    std::vector<Date> dates;
    std::vector<double> mean_curve;
    std::vector<double> lower_curve;
    std::vector<double> upper_curve;
    double level = 0.95;
};

inline std::vector<double> make_grid(int points = 100) {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] =
            static_cast<double>(i) / static_cast<double>(points - 1);
    return g;
}

namespace detail {

// Empirical quantile with linear interpolation between order statistics
// (R type 7); input must be sorted.
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double h = q * static_cast<double>(n - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo >= n - 1) return sorted[n - 1];
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

/// Grid point x maps to day index ceil(x*T) clamped into [1, T].
inline Date grid_date(const PosteriorChain& chain, double x) {
    auto t = static_cast<std::int64_t>(
        std::ceil(x * static_cast<double>(chain.series_length)));
    t = std::clamp<std::int64_t>(t, 1, chain.series_length);
    return chain.series_start + std::chrono::days{t - 1};
}

/// Posterior mean and equal-tailed credible band of mu(x) or a_i(x) across
/// the retained draws, evaluated pointwise on the grid.
inline TrendSummary trend_summary(const PosteriorChain& chain, TrendTarget target,
                                  const std::vector<double>& grid, double level = 0.95) {
    if (chain.draws.empty()) throw std::invalid_argument("chain has no draws");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("credible level must lie in (0,1)");
    if (!target.is_mu && (target.lag < 1 || target.lag > chain.model_spec.p))
        throw std::out_of_range("ar lag index outside 1..p");

    const ModelSpec& spec = chain.model_spec;
    const BasisSpec& basis = target.is_mu ? spec.basis_mu : spec.basis_ar;
    const std::size_t G = grid.size();
    const std::size_t K = static_cast<std::size_t>(basis.num_basis);
    const std::size_t n = chain.draws.size();

    std::vector<double> basis_at(G * K);
    for (std::size_t g = 0; g < G; ++g) {
        std::vector<double> b = eval_basis(basis, grid[g]);
        std::copy(b.begin(), b.end(), basis_at.begin() + static_cast<std::ptrdiff_t>(g * K));
    }

    // values[g*n + d] = curve of draw d at grid point g
    std::vector<double> values(G * n);
    for (std::size_t d = 0; d < n; ++d) {
        const ParameterState& state = chain.draws[d];
        std::vector<double> coef(K);
        if (target.is_mu) {
            for (std::size_t j = 0; j < K; ++j) coef[j] = std::exp(state.beta[j]);
        } else {
            double mi =
                mixture_weights(state.delta)[static_cast<std::size_t>(target.lag - 1)];
            const std::vector<double>& row =
                state.theta[static_cast<std::size_t>(target.lag - 1)];
            for (std::size_t j = 0; j < K; ++j) coef[j] = mi * row[j];
        }
        for (std::size_t g = 0; g < G; ++g) {
            const double* b = &basis_at[g * K];
            double v = 0.0;
            for (std::size_t j = 0; j < K; ++j) v += coef[j] * b[j];
            values[g * n + d] = v;
        }
    }

    TrendSummary summary;
    summary.target = target.name();
    summary.grid = grid;
    summary.level = level;
    summary.dates.reserve(G);
    summary.mean_curve.resize(G);
    summary.lower_curve.resize(G);
    summary.upper_curve.resize(G);
    const double alpha = 1.0 - level;
    std::vector<double> column(n);
    for (std::size_t g = 0; g < G; ++g) {
        summary.dates.push_back(grid_date(chain, grid[g]));
        std::copy(values.begin() + static_cast<std::ptrdiff_t>(g * n),
                  values.begin() + static_cast<std::ptrdiff_t>((g + 1) * n), column.begin());
        double mean = 0.0;
        for (double v : column) mean += v;
        summary.mean_curve[g] = mean / static_cast<double>(n);
        std::sort(column.begin(), column.end());
        summary.lower_curve[g] = detail::sorted_quantile(column, alpha / 2.0);
        summary.upper_curve[g] = detail::sorted_quantile(column, 1.0 - alpha / 2.0);
    }
    return summary;
}

inline TrendSummary trend_summary(const PosteriorChain& chain, TrendTarget target,
                                  int grid_points = 100, double level = 0.95) {
    return trend_summary(chain, target, make_grid(grid_points), level);
}

/// Fraction of grid points where the truth falls inside [lower, upper].
inline double posterior_band_coverage(const TrendSummary& summary,
                                      const std::vector<double>& truth_curve) {
    if (truth_curve.size() != summary.grid.size())
        throw std::invalid_argument("truth curve does not match the summary grid");
    std::size_t covered = 0;
    for (std::size_t g = 0; g < truth_curve.size(); ++g)
        if (summary.lower_curve[g] <= truth_curve[g] && truth_curve[g] <= summary.upper_curve[g])
            ++covered;
    return static_cast<double>(covered) / static_cast<double>(truth_curve.size());
}

}  // namespace tvbarc
