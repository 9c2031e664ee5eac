#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tvbarc/series.hpp"
#include "tvbarc/spline.hpp"

namespace tvbarc {

/// Time-varying autoregressive Poisson count model
///
///   X_t | past ~ Poisson(lambda_t),
///   lambda_t = mu(t/T) + sum_{i=1..p} a_i(t/T) X_{t-i},
///
/// with B-spline expansions mu(x) = sum_j exp(beta_j) B_j(x) and
/// a_i(x) = sum_j theta_ij M_i B_j(x), where the softmax weights
/// M_i = exp(delta_i) / sum_{k=0..p} exp(delta_k) carry a slack index 0 so
/// that sum_i a_i(x) < 1 holds for every admissible state. Priors:
/// beta_j ~ N(0, c2), delta_l ~ N(0, c1), theta_ij ~ U(0,1).
struct ModelSpec {
    int p = 1;
    BasisSpec basis_mu;  // K1 trend basis functions
    BasisSpec basis_ar;  // K2 basis functions per lag coefficient
    double c1 = 100.0;   // prior variance of delta
    double c2 = 100.0;   // prior variance of beta

    int k1() const { return basis_mu.num_basis; }
    int k2() const { return basis_ar.num_basis; }
};

inline ModelSpec make_model_spec(int p, int k1 = 6, int k2 = 6, int degree = 3,
                                 double c1 = 100.0, double c2 = 100.0) {
    if (p < 0) throw std::invalid_argument("lag order p must be non-negative");
    if (!(c1 > 0.0) || !(c2 > 0.0))
        throw std::invalid_argument("prior variances c1, c2 must be positive");
    ModelSpec spec;
    spec.p = p;
    spec.basis_mu = make_basis(k1, degree);
    spec.basis_ar = make_basis(k2, degree);
    spec.c1 = c1;
    spec.c2 = c2;
    return spec;
}

/// One point in parameter space.
struct ParameterState {
    std::vector<double> beta;                // length K1
    std::vector<std::vector<double>> theta;  // p rows of length K2, entries in [0,1]
    std::vector<double> delta;               // length p+1, slack index 0
};

/// Softmax over all p+1 delta entries.
inline std::vector<double> softmax(const std::vector<double>& delta) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double d : delta) mx = std::max(mx, d);
    double total = 0.0;
    std::vector<double> s(delta.size());
    for (std::size_t l = 0; l < delta.size(); ++l) {
        s[l] = std::exp(delta[l] - mx);
        total += s[l];
    }
    for (double& v : s) v /= total;
    return s;
}

/// AR mass weights M_1..M_p. The slack term exp(delta_0) stays in the
/// denominator, which forces sum_i M_i < 1.
inline std::vector<double> mixture_weights(const std::vector<double>& delta) {
    if (delta.size() < 2)
        throw std::invalid_argument("mixture_weights needs p >= 1 (delta of length p+1)");
    std::vector<double> s = softmax(delta);
    return std::vector<double>(s.begin() + 1, s.end());
}

/// Trend mu(x) = sum_j exp(beta_j) B_j(x); positive by construction.
inline double mu_at(const ParameterState& state, const ModelSpec& spec, double x) {
    std::vector<double> b = eval_basis(spec.basis_mu, x);
    double v = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) v += std::exp(state.beta[j]) * b[j];
    return v;
}

/// Lag-i coefficient a_i(x) = M_i sum_j theta_ij B_j(x), for 1 <= i <= p.
inline double ar_at(const ParameterState& state, const ModelSpec& spec, int i, double x) {
    if (i < 1 || i > spec.p) throw std::out_of_range("lag index outside 1..p");
    std::vector<double> b = eval_basis(spec.basis_ar, x);
    const std::vector<double>& row = state.theta[static_cast<std::size_t>(i - 1)];
    double g = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) g += row[j] * b[j];
    return mixture_weights(state.delta)[static_cast<std::size_t>(i - 1)] * g;
}

/// Conditional mean lambda_t; defined for t with full lag history,
/// p+1 <= t <= T.
inline double lambda_at(const ParameterState& state, const ModelSpec& spec,
                        const CountSeries& series, std::int64_t t) {
    const std::int64_t T = series.length();
    if (t < spec.p + 1 || t > T)
        throw std::out_of_range("lambda_t needs p+1 <= t <= T");
    double x = static_cast<double>(t) / static_cast<double>(T);
    double lam = mu_at(state, spec, x);
    for (int i = 1; i <= spec.p; ++i)
        lam += ar_at(state, spec, i, x) *
               static_cast<double>(series.counts[static_cast<std::size_t>(t - i - 1)]);
    return lam;
}

namespace detail {

inline double poisson_log_term(double x, double lam) {
    // X ln(lambda) - lambda, guarded so lambda == 0 or overflow never yields NaN.
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (!(lam >= 0.0) || !std::isfinite(lam)) return neg_inf;
    if (lam == 0.0) return x > 0.0 ? neg_inf : 0.0;
    return (x > 0.0 ? x * std::log(lam) : 0.0) - lam;
}

inline double softplus(double z) {
    return z > 30.0 ? z : std::log1p(std::exp(z));
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double logit(double u) { return std::log(u) - std::log1p(-u); }

}  // namespace detail

/// Gaussian log-density terms for beta and delta; theta contributes zero
/// inside the unit cube and -inf outside.
inline double log_prior(const ParameterState& state, const ModelSpec& spec) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (const auto& row : state.theta)
        for (double v : row)
            if (!(v >= 0.0 && v <= 1.0)) return -std::numeric_limits<double>::infinity();
    double lp = 0.0;
    for (double b : state.beta) lp += -0.5 * b * b / spec.c2 - 0.5 * std::log(two_pi * spec.c2);
    for (double d : state.delta) lp += -0.5 * d * d / spec.c1 - 0.5 * std::log(two_pi * spec.c1);
    return lp;
}

/// Flatten to the unconstrained vector [beta | theta rows (logit) | delta].
/// Theta entries are clamped to [1e-8, 1-1e-8] before the logit.
inline std::vector<double> to_unconstrained(const ParameterState& state) {
    constexpr double eps = 1e-8;
    std::vector<double> z;
    z.reserve(state.beta.size() + state.delta.size() +
              state.theta.size() * (state.theta.empty() ? 0 : state.theta.front().size()));
    for (double b : state.beta) z.push_back(b);
    for (const auto& row : state.theta)
        for (double v : row) z.push_back(detail::logit(std::clamp(v, eps, 1.0 - eps)));
    for (double d : state.delta) z.push_back(d);
    return z;
}

inline int unconstrained_dim(const ModelSpec& spec) {
    return spec.k1() + spec.p * spec.k2() + spec.p + 1;
}

inline ParameterState from_unconstrained(const std::vector<double>& z, const ModelSpec& spec) {
    if (static_cast<int>(z.size()) != unconstrained_dim(spec))
        throw std::invalid_argument("unconstrained vector has wrong dimension");
    ParameterState state;
    const int k1 = spec.k1(), k2 = spec.k2(), p = spec.p;
    std::size_t pos = 0;
    state.beta.assign(z.begin(), z.begin() + k1);
    pos += static_cast<std::size_t>(k1);
    state.theta.resize(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        state.theta[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(k2));
        for (int j = 0; j < k2; ++j)
            state.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                detail::sigmoid(z[pos++]);
    }
    state.delta.assign(z.begin() + static_cast<std::ptrdiff_t>(pos), z.end());
    return state;
}

/// Precomputed per-series quantities: basis matrices over t = p+1..T and the
/// ln(X_t!) constants. All posterior evaluations during sampling go through
/// this one code path.
class FitContext {
public:
    FitContext(ModelSpec spec, CountSeries series)
        : spec_(std::move(spec)), series_(std::move(series)) {
        const std::int64_t T = series_.length();
        if (T <= spec_.p)
            throw std::invalid_argument("series must be longer than the lag order p");
        rows_ = T - spec_.p;
        const int k1 = spec_.k1(), k2 = spec_.k2();
        bmu_.resize(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(k1));
        bar_.resize(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(k2));
        lgamma_sum_ = 0.0;
        for (std::int64_t r = 0; r < rows_; ++r) {
            std::int64_t t = spec_.p + 1 + r;
            double x = static_cast<double>(t) / static_cast<double>(T);
            std::vector<double> vmu = eval_basis(spec_.basis_mu, x);
            std::vector<double> var = eval_basis(spec_.basis_ar, x);
            std::copy(vmu.begin(), vmu.end(),
                      bmu_.begin() + static_cast<std::ptrdiff_t>(r * k1));
            std::copy(var.begin(), var.end(),
                      bar_.begin() + static_cast<std::ptrdiff_t>(r * k2));
            lgamma_sum_ += std::lgamma(
                static_cast<double>(series_.counts[static_cast<std::size_t>(t - 1)]) + 1.0);
        }
    }

    const ModelSpec& spec() const { return spec_; }
    const CountSeries& series() const { return series_; }
    int dim() const { return unconstrained_dim(spec_); }

    /// Conditional log-likelihood over t = p+1..T.
    double log_likelihood(const ParameterState& state) const {
        const int k1 = spec_.k1(), k2 = spec_.k2(), p = spec_.p;
        std::vector<double> ebeta(static_cast<std::size_t>(k1));
        for (int j = 0; j < k1; ++j)
            ebeta[static_cast<std::size_t>(j)] = std::exp(state.beta[static_cast<std::size_t>(j)]);
        std::vector<double> weights =
            p > 0 ? mixture_weights(state.delta) : std::vector<double>{};
        double ll = 0.0;
        for (std::int64_t r = 0; r < rows_; ++r) {
            const std::int64_t t = p + 1 + r;
            const double* bm = &bmu_[static_cast<std::size_t>(r * k1)];
            const double* ba = &bar_[static_cast<std::size_t>(r * k2)];
            double lam = 0.0;
            for (int j = 0; j < k1; ++j) lam += ebeta[static_cast<std::size_t>(j)] * bm[j];
            for (int i = 1; i <= p; ++i) {
                const std::vector<double>& row = state.theta[static_cast<std::size_t>(i - 1)];
                double g = 0.0;
                for (int j = 0; j < k2; ++j) g += row[static_cast<std::size_t>(j)] * ba[j];
                lam += weights[static_cast<std::size_t>(i - 1)] * g *
                       static_cast<double>(series_.counts[static_cast<std::size_t>(t - i - 1)]);
            }
            double x = static_cast<double>(series_.counts[static_cast<std::size_t>(t - 1)]);
            double term = detail::poisson_log_term(x, lam);
            if (term == -std::numeric_limits<double>::infinity()) return term;
            ll += term;
        }
        return ll - lgamma_sum_;
    }

    /// Log posterior in the unconstrained parameterization: weighted
    /// likelihood plus prior plus the logistic Jacobian for theta.
    double log_posterior_unconstrained(const std::vector<double>& z,
                                       double likelihood_weight = 1.0) const {
        ParameterState state = from_unconstrained(z, spec_);
        double lp = log_prior(state, spec_) + theta_jacobian(z);
        if (likelihood_weight != 0.0) lp += likelihood_weight * log_likelihood(state);
        return lp;
    }

    std::vector<double> grad_log_posterior_unconstrained(const std::vector<double>& z,
                                                         double likelihood_weight = 1.0) const {
        const int k1 = spec_.k1(), k2 = spec_.k2(), p = spec_.p;
        ParameterState state = from_unconstrained(z, spec_);
        std::vector<double> grad(z.size(), 0.0);

        std::vector<double> ebeta(static_cast<std::size_t>(k1));
        for (int j = 0; j < k1; ++j)
            ebeta[static_cast<std::size_t>(j)] = std::exp(state.beta[static_cast<std::size_t>(j)]);
        std::vector<double> smax = softmax(state.delta);  // length p+1

        std::vector<double> acc_beta(static_cast<std::size_t>(k1), 0.0);
        std::vector<double> acc_theta(static_cast<std::size_t>(p) * static_cast<std::size_t>(k2),
                                      0.0);
        std::vector<double> acc_u(static_cast<std::size_t>(p) + 1, 0.0);
        double acc_w = 0.0;

        if (likelihood_weight != 0.0) {
            std::vector<double> lag_term(static_cast<std::size_t>(p));
            for (std::int64_t r = 0; r < rows_; ++r) {
                const std::int64_t t = p + 1 + r;
                const double* bm = &bmu_[static_cast<std::size_t>(r * k1)];
                const double* ba = &bar_[static_cast<std::size_t>(r * k2)];
                double lam = 0.0;
                for (int j = 0; j < k1; ++j) lam += ebeta[static_cast<std::size_t>(j)] * bm[j];
                double ar_part = 0.0;
                for (int i = 1; i <= p; ++i) {
                    const std::vector<double>& row =
                        state.theta[static_cast<std::size_t>(i - 1)];
                    double g = 0.0;
                    for (int j = 0; j < k2; ++j) g += row[static_cast<std::size_t>(j)] * ba[j];
                    double c = g * static_cast<double>(
                                       series_.counts[static_cast<std::size_t>(t - i - 1)]);
                    lag_term[static_cast<std::size_t>(i - 1)] = c;
                    ar_part += smax[static_cast<std::size_t>(i)] * c;
                }
                lam += ar_part;
                if (!(lam > 0.0) || !std::isfinite(lam)) continue;  // posterior is -inf here
                double x = static_cast<double>(series_.counts[static_cast<std::size_t>(t - 1)]);
                double resid = likelihood_weight * (x / lam - 1.0);
                for (int j = 0; j < k1; ++j) acc_beta[static_cast<std::size_t>(j)] += resid * bm[j];
                for (int i = 1; i <= p; ++i) {
                    double rx = resid * static_cast<double>(
                                            series_.counts[static_cast<std::size_t>(t - i - 1)]);
                    double* at = &acc_theta[static_cast<std::size_t>((i - 1) * k2)];
                    for (int j = 0; j < k2; ++j) at[j] += rx * ba[j];
                    acc_u[static_cast<std::size_t>(i)] +=
                        resid * lag_term[static_cast<std::size_t>(i - 1)];
                }
                acc_w += resid * ar_part;
            }
        }

        std::size_t pos = 0;
        for (int j = 0; j < k1; ++j, ++pos)
            grad[pos] = ebeta[static_cast<std::size_t>(j)] * acc_beta[static_cast<std::size_t>(j)] -
                        state.beta[static_cast<std::size_t>(j)] / spec_.c2;
        for (int i = 1; i <= p; ++i) {
            double mi = smax[static_cast<std::size_t>(i)];
            for (int j = 0; j < k2; ++j, ++pos) {
                double th =
                    state.theta[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
                double dconstr = mi * acc_theta[static_cast<std::size_t>((i - 1) * k2 + j)];
                grad[pos] = dconstr * th * (1.0 - th) + (1.0 - 2.0 * th);
            }
        }
        for (int l = 0; l <= p; ++l, ++pos)
            grad[pos] = smax[static_cast<std::size_t>(l)] * (acc_u[static_cast<std::size_t>(l)] - acc_w) -
                        state.delta[static_cast<std::size_t>(l)] / spec_.c1;
        return grad;
    }

private:
    /// sum over theta coordinates of ln sigma'(z) = -softplus(z) - softplus(-z).
    double theta_jacobian(const std::vector<double>& z) const {
        const int k1 = spec_.k1(), n = spec_.p * spec_.k2();
        double jac = 0.0;
        for (int m = 0; m < n; ++m) {
            double v = z[static_cast<std::size_t>(k1 + m)];
            jac -= detail::softplus(v) + detail::softplus(-v);
        }
        return jac;
    }

    ModelSpec spec_;
    CountSeries series_;
    std::int64_t rows_ = 0;
    std::vector<double> bmu_;
    std::vector<double> bar_;
    double lgamma_sum_ = 0.0;
};

inline double log_likelihood(const ParameterState& state, const ModelSpec& spec,
                             const CountSeries& series) {
    return FitContext(spec, series).log_likelihood(state);
}

inline double log_posterior_unconstrained(const std::vector<double>& z, const ModelSpec& spec,
                                          const CountSeries& series,
                                          double likelihood_weight = 1.0) {
    return FitContext(spec, series).log_posterior_unconstrained(z, likelihood_weight);
}

inline std::vector<double> grad_log_posterior_unconstrained(const std::vector<double>& z,
                                                            const ModelSpec& spec,
                                                            const CountSeries& series,
                                                            double likelihood_weight = 1.0) {
    return FitContext(spec, series).grad_log_posterior_unconstrained(z, likelihood_weight);
}

}  // namespace tvbarc
