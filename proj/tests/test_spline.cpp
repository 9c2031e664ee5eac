#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "tvbarc/spline.hpp"

using namespace tvbarc;

namespace {

// Textbook Cox-de Boor recursion, written independently of the library's
// triangular evaluation. The right endpoint is folded into the last
// non-degenerate span.
double oracle_basis(const std::vector<double>& knots, int i, int k, double x) {
    double last = knots.back();
    if (k == 0) {
        bool in_span = knots[i] <= x && x < knots[i + 1];
        bool at_end = x == last && knots[i] < knots[i + 1] && knots[i + 1] == last;
        return (in_span || at_end) ? 1.0 : 0.0;
    }
    double left = 0.0, right = 0.0;
    double dl = knots[i + k] - knots[i];
    if (dl > 0.0) left = (x - knots[i]) / dl * oracle_basis(knots, i, k - 1, x);
    double dr = knots[i + k + 1] - knots[i + 1];
    if (dr > 0.0) right = (knots[i + k + 1] - x) / dr * oracle_basis(knots, i + 1, k - 1, x);
    return left + right;
}

std::vector<double> oracle_eval(const BasisSpec& spec, double x) {
    std::vector<double> out(static_cast<std::size_t>(spec.num_basis));
    for (int j = 0; j < spec.num_basis; ++j)
        out[static_cast<std::size_t>(j)] = oracle_basis(spec.knots, j, spec.degree, x);
    return out;
}

}  // namespace

TEST_CASE("make_basis places equidistant clamped knots") {
    BasisSpec spec = make_basis(6, 3);
    std::vector<double> expected{0, 0, 0, 0, 1.0 / 3.0, 2.0 / 3.0, 1, 1, 1, 1};
    REQUIRE(spec.knots.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        REQUIRE(spec.knots[i] == Catch::Approx(expected[i]).margin(1e-15));

    BasisSpec lin = make_basis(4, 1);
    std::vector<double> expected_lin{0, 0, 1.0 / 3.0, 2.0 / 3.0, 1, 1};
    REQUIRE(lin.knots.size() == expected_lin.size());
    for (std::size_t i = 0; i < expected_lin.size(); ++i)
        REQUIRE(lin.knots[i] == Catch::Approx(expected_lin[i]).margin(1e-15));
}

TEST_CASE("make_basis rejects too few basis functions") {
    REQUIRE_THROWS_AS(make_basis(3, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(make_basis(0, 0), std::invalid_argument);
    REQUIRE_NOTHROW(make_basis(4, 3));
}

TEST_CASE("eval_basis rejects points outside the unit interval") {
    BasisSpec spec = make_basis(5, 2);
    REQUIRE_THROWS_AS(eval_basis(spec, -0.01), std::domain_error);
    REQUIRE_THROWS_AS(eval_basis(spec, 1.01), std::domain_error);
}

TEST_CASE("degree-1 basis hand values") {
    // K=3, degree 1: knots [0,0,1/2,1,1]; tent functions.
    BasisSpec spec = make_basis(3, 1);
    std::vector<double> b = eval_basis(spec, 0.25);
    REQUIRE(b[0] == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(b[1] == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(b[2] == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("cubic Bernstein case matches binomial closed form") {
    // K=4, degree 3 has no interior knots, so the basis is Bernstein.
    BasisSpec spec = make_basis(4, 3);
    for (double x : {0.0, 0.1, 0.3, 0.5, 0.77, 1.0}) {
        std::vector<double> b = eval_basis(spec, x);
        double u = 1.0 - x;
        REQUIRE(b[0] == Catch::Approx(u * u * u).margin(1e-14));
        REQUIRE(b[1] == Catch::Approx(3 * x * u * u).margin(1e-14));
        REQUIRE(b[2] == Catch::Approx(3 * x * x * u).margin(1e-14));
        REQUIRE(b[3] == Catch::Approx(x * x * x).margin(1e-14));
    }
}

TEST_CASE("basis matches the recursive oracle on random configurations") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        int degree = static_cast<int>(rng() % 4);           // 0..3
        int k = degree + 1 + static_cast<int>(rng() % 8);   // valid sizes
        BasisSpec spec = make_basis(k, degree);
        for (int pt = 0; pt < 20; ++pt) {
            double x = (pt == 0) ? 0.0 : (pt == 1) ? 1.0 : ux(rng);
            std::vector<double> got = eval_basis(spec, x);
            std::vector<double> want = oracle_eval(spec, x);
            REQUIRE(got.size() == want.size());
            for (std::size_t j = 0; j < got.size(); ++j)
                REQUIRE(got[j] == Catch::Approx(want[j]).margin(1e-12));
        }
    }
}

TEST_CASE("basis is a non-negative partition of unity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        int degree = static_cast<int>(rng() % 5);
        int k = degree + 1 + static_cast<int>(rng() % 10);
        BasisSpec spec = make_basis(k, degree);
        for (int pt = 0; pt < 25; ++pt) {
            double x = (pt == 0) ? 0.0 : (pt == 1) ? 1.0 : ux(rng);
            std::vector<double> b = eval_basis(spec, x);
            double sum = 0.0;
            int nonzero = 0;
            for (double v : b) {
                REQUIRE(v >= 0.0);
                sum += v;
                if (v > 0.0) ++nonzero;
            }
            REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
            REQUIRE(nonzero <= spec.degree + 1);  // local support
        }
    }
}

TEST_CASE("endpoint bases are interpolatory") {
    for (int degree : {1, 2, 3}) {
        BasisSpec spec = make_basis(degree + 3, degree);
        std::vector<double> at0 = eval_basis(spec, 0.0);
        std::vector<double> at1 = eval_basis(spec, 1.0);
        REQUIRE(at0.front() == Catch::Approx(1.0).margin(1e-15));
        REQUIRE(at1.back() == Catch::Approx(1.0).margin(1e-15));
        for (std::size_t j = 1; j < at0.size(); ++j)
            REQUIRE(at0[j] == Catch::Approx(0.0).margin(1e-15));
        for (std::size_t j = 0; j + 1 < at1.size(); ++j)
            REQUIRE(at1[j] == Catch::Approx(0.0).margin(1e-15));
    }
}
