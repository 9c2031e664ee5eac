#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvbarc/errors.hpp"
#include "tvbarc/model.hpp"

namespace tvbarc {

enum class ProposalKind { random_walk, gradient_informed };

inline const char* to_string(ProposalKind kind) {
    return kind == ProposalKind::random_walk ? "random-walk" : "gradient-informed";
}

struct SamplerConfig {
    std::int64_t burn_in = 10000;
    std::int64_t retained = 20000;
    std::int64_t thin = 1;
    std::uint64_t seed = 0;
    ProposalKind proposal = ProposalKind::random_walk;
    double initial_step = 0.1;
    double target_accept = 0.44;
    // Test hook: 0 disables the likelihood so the chain samples the prior.
    double likelihood_weight = 1.0;
};

/// Per-block diagnostics. Step sizes adapt during burn-in only; the snapshot
/// taken when burn-in ends must equal the final value.
struct BlockStats {
    std::string name;
    double acceptance_rate = 0.0;        // over the retained phase
    double step_at_burnin_end = 0.0;
    double step_final = 0.0;
};

struct PosteriorChain {
    std::vector<ParameterState> draws;
    std::vector<double> log_posterior_trace;  // aligned with draws
    ModelSpec model_spec;
    SamplerConfig config;
    std::vector<BlockStats> block_stats;  // beta, theta (pooled), delta
    Date series_start{};
    std::int64_t series_length = 0;
    std::string series_label;

    double acceptance_rate(const std::string& block) const {
        for (const auto& b : block_stats)
            if (b.name == block) return b.acceptance_rate;
        throw std::invalid_argument("unknown block name: " + block);
    }
};

/// Robbins-Monro step scaling: ln(step) += k^-0.6 * (rate - target). Called
/// during burn-in only; k is the 1-based adaptation count for the block.
inline double adapt_step(double current_step, double accept_rate_window, double target,
                         std::int64_t k) {
    double gamma = std::pow(static_cast<double>(std::max<std::int64_t>(k, 1)), -0.6);
    return current_step * std::exp(gamma * (accept_rate_window - target));
}

/// Effective sample size via Geyer's initial positive sequence on the sample
/// autocorrelations. A constant trace reports full size; results are clamped
/// into (0, n].
inline double effective_sample_size(const std::vector<double>& trace) {
    const std::int64_t n = static_cast<std::int64_t>(trace.size());
    if (n < 10) throw std::invalid_argument("effective_sample_size needs length >= 10");
    double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / static_cast<double>(n);
    double c0 = 0.0;
    for (double v : trace) c0 += (v - mean) * (v - mean);
    c0 /= static_cast<double>(n);
    if (!(c0 > 0.0)) return static_cast<double>(n);

    auto rho = [&](std::int64_t k) {
        double s = 0.0;
        for (std::int64_t i = 0; i + k < n; ++i)
            s += (trace[static_cast<std::size_t>(i)] - mean) *
                 (trace[static_cast<std::size_t>(i + k)] - mean);
        return s / static_cast<double>(n) / c0;
    };

    const std::int64_t max_lag = n - 2;
    double pair_sum_total = 0.0;
    for (std::int64_t m = 0;; ++m) {
        std::int64_t k1 = 2 * m, k2 = 2 * m + 1;
        if (k1 > max_lag) break;
        double pair = rho(k1) + (k2 <= max_lag ? rho(k2) : 0.0);
        if (pair <= 0.0) break;
        pair_sum_total += pair;
        if (k2 >= max_lag) break;
    }
    double iact = std::max(2.0 * pair_sum_total - 1.0, 1e-12);
    double ess = static_cast<double>(n) / iact;
    return std::min(ess, static_cast<double>(n));
}

namespace detail {

struct Block {
    std::string group;  // beta | theta | delta
    std::size_t begin = 0;
    std::size_t end = 0;
};

inline std::vector<Block> make_blocks(const ModelSpec& spec) {
    std::vector<Block> blocks;
    const std::size_t k1 = static_cast<std::size_t>(spec.k1());
    const std::size_t k2 = static_cast<std::size_t>(spec.k2());
    blocks.push_back({"beta", 0, k1});
    for (int i = 0; i < spec.p; ++i) {
        std::size_t b = k1 + static_cast<std::size_t>(i) * k2;
        blocks.push_back({"theta", b, b + k2});
    }
    std::size_t d = k1 + static_cast<std::size_t>(spec.p) * k2;
    blocks.push_back({"delta", d, d + static_cast<std::size_t>(spec.p) + 1});
    return blocks;
}

inline std::vector<double> initial_unconstrained(const FitContext& ctx, double count_mean) {
    const ModelSpec& spec = ctx.spec();
    ParameterState state;
    state.beta.assign(static_cast<std::size_t>(spec.k1()),
                      std::log(count_mean) - std::log(static_cast<double>(spec.k1())));
    state.theta.assign(static_cast<std::size_t>(spec.p),
                       std::vector<double>(static_cast<std::size_t>(spec.k2()), 0.5));
    state.delta.assign(static_cast<std::size_t>(spec.p) + 1, 0.0);
    return to_unconstrained(state);
}

}  // namespace detail

/// Adaptive blockwise Metropolis-Hastings in the unconstrained space.
/// Blocks (beta | each theta row | delta) update in fixed order each sweep;
/// every retained draw satisfies the model constraints by construction of the
/// reparameterization. Deterministic for a given seed.
inline PosteriorChain run_chain(const CountSeries& series, const ModelSpec& spec,
                                const SamplerConfig& config) {
    if (config.burn_in < 0 || config.retained < 1 || config.thin < 1)
        throw std::invalid_argument("sampler config: need burn_in >= 0, retained >= 1, thin >= 1");
    if (!(config.initial_step > 0.0))
        throw std::invalid_argument("sampler config: initial_step must be positive");
    if (!(config.target_accept > 0.0 && config.target_accept < 1.0))
        throw std::invalid_argument("sampler config: target_accept must lie in (0,1)");

    FitContext ctx(spec, series);
    const double lw = config.likelihood_weight;

    double count_mean = 0.0;
    for (auto c : series.counts) count_mean += static_cast<double>(c);
    count_mean /= static_cast<double>(series.length());

    std::vector<double> z = detail::initial_unconstrained(ctx, count_mean);
    double lp = ctx.log_posterior_unconstrained(z, lw);
    if (!std::isfinite(lp)) {
        // Re-initialize once with the mean clamped away from zero (all-zero series).
        z = detail::initial_unconstrained(ctx, std::max(count_mean, 0.5));
        lp = ctx.log_posterior_unconstrained(z, lw);
        if (!std::isfinite(lp))
            throw numerical_error("log-posterior not finite at initialization");
    }

    std::vector<detail::Block> blocks = detail::make_blocks(spec);
    std::vector<double> steps(blocks.size(), config.initial_step);
    std::vector<std::int64_t> window_attempts(blocks.size(), 0);
    std::vector<std::int64_t> window_accepts(blocks.size(), 0);
    std::vector<std::int64_t> adapt_count(blocks.size(), 0);
    constexpr std::int64_t adapt_window = 50;

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> stdnorm(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const bool use_gradient = config.proposal == ProposalKind::gradient_informed;
    std::vector<double> grad_cur;
    bool grad_valid = false;

    std::vector<double> proposal(z.size());
    std::int64_t accepts_by_group[3] = {0, 0, 0};
    std::int64_t attempts_by_group[3] = {0, 0, 0};
    auto group_index = [](const std::string& g) { return g == "beta" ? 0 : g == "theta" ? 1 : 2; };

    PosteriorChain chain;
    chain.model_spec = spec;
    chain.config = config;
    chain.series_start = series.start_date;
    chain.series_length = series.length();
    chain.series_label = series.label;
    chain.draws.reserve(static_cast<std::size_t>(config.retained / config.thin));
    chain.log_posterior_trace.reserve(chain.draws.capacity());

    std::vector<double> steps_at_burnin_end = steps;
    const std::int64_t total = config.burn_in + config.retained;
    for (std::int64_t iter = 0; iter < total; ++iter) {
        const bool adapting = iter < config.burn_in;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const detail::Block& blk = blocks[b];
            const double step = steps[b];
            proposal = z;
            double forward_logq = 0.0;
            if (use_gradient) {
                if (!grad_valid) {
                    grad_cur = ctx.grad_log_posterior_unconstrained(z, lw);
                    grad_valid = true;
                }
                for (std::size_t idx = blk.begin; idx < blk.end; ++idx) {
                    double drift = 0.5 * step * step * grad_cur[idx];
                    double noise = step * stdnorm(rng);
                    proposal[idx] = z[idx] + drift + noise;
                    forward_logq += -noise * noise / (2.0 * step * step);
                }
            } else {
                for (std::size_t idx = blk.begin; idx < blk.end; ++idx)
                    proposal[idx] = z[idx] + step * stdnorm(rng);
            }

            double lp_prop = ctx.log_posterior_unconstrained(proposal, lw);
            double log_alpha;
            if (!std::isfinite(lp_prop)) {
                log_alpha = -std::numeric_limits<double>::infinity();
            } else if (use_gradient) {
                std::vector<double> grad_prop = ctx.grad_log_posterior_unconstrained(proposal, lw);
                double reverse_logq = 0.0;
                for (std::size_t idx = blk.begin; idx < blk.end; ++idx) {
                    double back = z[idx] - proposal[idx] - 0.5 * step * step * grad_prop[idx];
                    reverse_logq += -back * back / (2.0 * step * step);
                }
                log_alpha = lp_prop - lp + reverse_logq - forward_logq;
            } else {
                log_alpha = lp_prop - lp;
            }

            bool accept = std::log(unif(rng)) < log_alpha;
            if (accept) {
                z = proposal;
                lp = lp_prop;
                grad_valid = false;
            }

            int g = group_index(blk.group);
            if (!adapting) {
                ++attempts_by_group[g];
                accepts_by_group[g] += accept ? 1 : 0;
            }
            if (adapting) {
                ++window_attempts[b];
                window_accepts[b] += accept ? 1 : 0;
                if (window_attempts[b] == adapt_window) {
                    double rate = static_cast<double>(window_accepts[b]) /
                                  static_cast<double>(window_attempts[b]);
                    steps[b] = adapt_step(steps[b], rate, config.target_accept, ++adapt_count[b]);
                    window_attempts[b] = 0;
                    window_accepts[b] = 0;
                }
            }
        }
        if (iter + 1 == config.burn_in) steps_at_burnin_end = steps;
        if (!adapting) {
            std::int64_t post_index = iter - config.burn_in;
            if (post_index % config.thin == config.thin - 1) {
                chain.draws.push_back(from_unconstrained(z, spec));
                chain.log_posterior_trace.push_back(lp);
            }
        }
    }
    if (config.burn_in == 0) steps_at_burnin_end = steps;

    const char* names[3] = {"beta", "theta", "delta"};
    for (int g = 0; g < 3; ++g) {
        // Pool the step diagnostics over the group's blocks (theta has p rows).
        double step_end = 0.0, step_fin = 0.0;
        std::int64_t cnt = 0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            if (group_index(blocks[b].group) != g) continue;
            step_end += steps_at_burnin_end[b];
            step_fin += steps[b];
            ++cnt;
        }
        if (cnt == 0) continue;  // no theta blocks when p == 0
        BlockStats stats;
        stats.name = names[g];
        stats.acceptance_rate = attempts_by_group[g] > 0
                                    ? static_cast<double>(accepts_by_group[g]) /
                                          static_cast<double>(attempts_by_group[g])
                                    : 0.0;
        stats.step_at_burnin_end = step_end / static_cast<double>(cnt);
        stats.step_final = step_fin / static_cast<double>(cnt);
        chain.block_stats.push_back(stats);
    }
    return chain;
}

}  // namespace tvbarc
