#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "tvbarc/changepoint.hpp"
#include "tvbarc/date.hpp"
#include "tvbarc/errors.hpp"
#include "tvbarc/posterior.hpp"
#include "tvbarc/sampler.hpp"

namespace tvbarc {

/// Shortest decimal string that round-trips the exact double, so repeated
/// runs produce byte-identical files.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw numerical_error("double formatting failed");
    return std::string(buf, ptr);
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write file: " + path.string());
    return out;
}

}  // namespace detail

/// Draws as CSV, one row per retained draw: beta_1..beta_K1, then theta_i_j
/// in row-major lag order, then delta_0..delta_p, then log_posterior.
inline void write_chain_csv(const PosteriorChain& chain, const std::filesystem::path& path) {
    std::ofstream out = detail::open_output(path);
    const ModelSpec& spec = chain.model_spec;
    for (int j = 1; j <= spec.k1(); ++j) out << "beta_" << j << ',';
    for (int i = 1; i <= spec.p; ++i)
        for (int j = 1; j <= spec.k2(); ++j) out << "theta_" << i << '_' << j << ',';
    for (int l = 0; l <= spec.p; ++l) out << "delta_" << l << ',';
    out << "log_posterior\n";
    for (std::size_t d = 0; d < chain.draws.size(); ++d) {
        const ParameterState& s = chain.draws[d];
        for (double b : s.beta) out << format_double(b) << ',';
        for (const auto& row : s.theta)
            for (double th : row) out << format_double(th) << ',';
        for (double de : s.delta) out << format_double(de) << ',';
        out << format_double(chain.log_posterior_trace[d]) << '\n';
    }
    if (!out) throw data_error("write failed: " + path.string());
}

inline nlohmann::ordered_json chain_metadata_json(const PosteriorChain& chain) {
    const ModelSpec& spec = chain.model_spec;
    const SamplerConfig& cfg = chain.config;
    nlohmann::ordered_json j;
    j["model"] = {{"p", spec.p},
                  {"k1", spec.k1()},
                  {"k2", spec.k2()},
                  {"degree", spec.basis_mu.degree},
                  {"c1", spec.c1},
                  {"c2", spec.c2}};
    j["sampler"] = {{"burn_in", cfg.burn_in},
                    {"retained", cfg.retained},
                    {"thin", cfg.thin},
                    {"seed", cfg.seed},
                    {"proposal", to_string(cfg.proposal)},
                    {"initial_step", cfg.initial_step},
                    {"target_accept", cfg.target_accept}};
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const BlockStats& b : chain.block_stats)
        blocks.push_back({{"name", b.name},
                          {"acceptance_rate", b.acceptance_rate},
                          {"step_at_burnin_end", b.step_at_burnin_end},
                          {"step_final", b.step_final}});
    j["blocks"] = std::move(blocks);
    j["series"] = {{"label", chain.series_label},
                   {"start_date", format_date(chain.series_start)},
                   {"length", chain.series_length}};
    j["draws"] = chain.draws.size();
    return j;
}

inline void write_chain_metadata(const PosteriorChain& chain,
                                 const std::filesystem::path& path) {
    std::ofstream out = detail::open_output(path);
    out << chain_metadata_json(chain).dump(2) << '\n';
    if (!out) throw data_error("write failed: " + path.string());
}

/// Trend curve with pointwise band: date,x,mean,lower,upper per grid point.
inline void write_trend_csv(const TrendSummary& summary, const std::filesystem::path& path) {
    std::ofstream out = detail::open_output(path);
    out << "date,x,mean,lower,upper\n";
    for (std::size_t g = 0; g < summary.grid.size(); ++g)
        out << format_date(summary.dates[g]) << ',' << format_double(summary.grid[g]) << ','
            << format_double(summary.mean_curve[g]) << ','
            << format_double(summary.lower_curve[g]) << ','
            << format_double(summary.upper_curve[g]) << '\n';
    if (!out) throw data_error("write failed: " + path.string());
}

inline nlohmann::ordered_json trend_to_json(const TrendSummary& summary) {
    nlohmann::ordered_json j;
    j["target"] = summary.target;
    j["level"] = summary.level;
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (std::size_t g = 0; g < summary.grid.size(); ++g)
        points.push_back({{"date", format_date(summary.dates[g])},
                          {"x", summary.grid[g]},
                          {"mean", summary.mean_curve[g]},
                          {"lower", summary.lower_curve[g]},
                          {"upper", summary.upper_curve[g]}});
    j["points"] = std::move(points);
    return j;
}

inline void write_trend_json(const TrendSummary& summary, const std::filesystem::path& path) {
    std::ofstream out = detail::open_output(path);
    out << trend_to_json(summary).dump(2) << '\n';
    if (!out) throw data_error("write failed: " + path.string());
}

inline void write_changepoint_json(const ChangePointResult& result, const CountSeries& series,
                                   const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["tau_hat"] = result.tau_hat;
    j["date_at_tau"] = format_date(series.date_at(result.tau_hat));
    j["base_mean"] = result.base_mean;
    j["shift"] = result.shift;
    j["sse_reduction"] = result.sse_reduction;
    std::ofstream out = detail::open_output(path);
    out << j.dump(2) << '\n';
    if (!out) throw data_error("write failed: " + path.string());
}

inline void write_acf_csv(const std::vector<double>& acf, const std::filesystem::path& path) {
    std::ofstream out = detail::open_output(path);
    out << "lag,acf\n";
    for (std::size_t h = 0; h < acf.size(); ++h)
        out << h << ',' << format_double(acf[h]) << '\n';
    if (!out) throw data_error("write failed: " + path.string());
}

}  // namespace tvbarc
