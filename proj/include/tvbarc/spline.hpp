#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace tvbarc {

/// Clamped B-spline basis on [0,1].
///
/// The knot vector has length num_basis + degree + 1 with the first and last
/// degree+1 knots pinned to 0 and 1, so the basis is a partition of unity on
/// the whole interval and the first/last basis functions hit 1 at the ends.
struct BasisSpec {
    int degree = 3;
    int num_basis = 0;  // K
    std::vector<double> knots;
};

/// Clamped basis with equidistant interior knots.
inline BasisSpec make_basis(int num_basis, int degree) {
    if (degree < 0) throw std::invalid_argument("spline degree must be non-negative");
    if (num_basis < degree + 1)
        throw std::invalid_argument("need num_basis >= degree + 1 basis functions");
    BasisSpec spec;
    spec.degree = degree;
    spec.num_basis = num_basis;
    spec.knots.resize(static_cast<std::size_t>(num_basis + degree + 1));
    int interior = num_basis - degree - 1;
    for (int i = 0; i <= degree; ++i) spec.knots[static_cast<std::size_t>(i)] = 0.0;
    for (int m = 1; m <= interior; ++m)
        spec.knots[static_cast<std::size_t>(degree + m)] =
            static_cast<double>(m) / static_cast<double>(interior + 1);
    for (int i = 0; i <= degree; ++i)
        spec.knots[static_cast<std::size_t>(num_basis + i)] = 1.0;
    return spec;
}

/// All K basis values at x via the de Boor triangular recursion. At most
/// degree+1 entries are nonzero; x = 1 evaluates in the last non-empty span
/// so the final basis function equals 1 there.
inline std::vector<double> eval_basis(const BasisSpec& spec, double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("spline evaluation point outside [0,1]");
    const int d = spec.degree;
    const int K = spec.num_basis;
    const std::vector<double>& t = spec.knots;

    // Knot span i with t[i] <= x < t[i+1], restricted to the non-degenerate
    // range [d, K-1]; x == 1 lands in the last span.
    int span;
    if (x >= 1.0) {
        span = K - 1;
    } else {
        auto it = std::upper_bound(t.begin() + d, t.begin() + K + 1, x);
        span = static_cast<int>(it - t.begin()) - 1;
        span = std::clamp(span, d, K - 1);
    }

    std::vector<double> local(static_cast<std::size_t>(d) + 1, 0.0);
    std::vector<double> left(static_cast<std::size_t>(d) + 1);
    std::vector<double> right(static_cast<std::size_t>(d) + 1);
    local[0] = 1.0;
    for (int j = 1; j <= d; ++j) {
        left[static_cast<std::size_t>(j)] = x - t[static_cast<std::size_t>(span + 1 - j)];
        right[static_cast<std::size_t>(j)] = t[static_cast<std::size_t>(span + j)] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            double denom = right[static_cast<std::size_t>(r + 1)] +
                           left[static_cast<std::size_t>(j - r)];
            double tmp = local[static_cast<std::size_t>(r)] / denom;
            local[static_cast<std::size_t>(r)] =
                saved + right[static_cast<std::size_t>(r + 1)] * tmp;
            saved = left[static_cast<std::size_t>(j - r)] * tmp;
        }
        local[static_cast<std::size_t>(j)] = saved;
    }

    std::vector<double> values(static_cast<std::size_t>(K), 0.0);
    for (int r = 0; r <= d; ++r)
        values[static_cast<std::size_t>(span - d + r)] = local[static_cast<std::size_t>(r)];
    return values;
}

}  // namespace tvbarc
