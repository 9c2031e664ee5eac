#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvbarc/date.hpp"
#include "tvbarc/errors.hpp"
#include "tvbarc/series.hpp"

namespace tvbarc {

/// Curve over [0,1]: piecewise-linear through (x, y) pairs, or a sinusoid
/// offset + amplitude * sin(2*pi*frequency*x + phase).
struct CurveSpec {
    enum class Kind { piecewise_linear, sinusoid };
    Kind kind = Kind::piecewise_linear;
    std::vector<double> xs;  // piecewise-linear only; strictly increasing, 0..1
    std::vector<double> ys;
    double offset = 0.0;  // sinusoid only
    double amplitude = 0.0;
    double frequency = 1.0;
    double phase = 0.0;

    static CurveSpec piecewise_linear(std::vector<double> x, std::vector<double> y) {
        if (x.size() != y.size() || x.size() < 2)
            throw std::invalid_argument("piecewise-linear curve needs >= 2 matched points");
        if (x.front() != 0.0 || x.back() != 1.0)
            throw std::invalid_argument("piecewise-linear knots must start at 0 and end at 1");
        for (std::size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1]))
                throw std::invalid_argument("piecewise-linear knots must be strictly increasing");
        CurveSpec c;
        c.kind = Kind::piecewise_linear;
        c.xs = std::move(x);
        c.ys = std::move(y);
        return c;
    }

    static CurveSpec constant(double value) { return piecewise_linear({0.0, 1.0}, {value, value}); }

    static CurveSpec sinusoid(double offset, double amplitude, double frequency, double phase) {
        CurveSpec c;
        c.kind = Kind::sinusoid;
        c.offset = offset;
        c.amplitude = amplitude;
        c.frequency = frequency;
        c.phase = phase;
        return c;
    }

    double eval(double x) const {
        if (kind == Kind::sinusoid)
            return offset + amplitude * std::sin(2.0 * 3.14159265358979323846 * frequency * x + phase);
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t hi = std::min<std::size_t>(
            static_cast<std::size_t>(it - xs.begin()), xs.size() - 1);
        if (hi == 0) hi = 1;
        std::size_t lo = hi - 1;
        double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
        return ys[lo] + w * (ys[hi] - ys[lo]);
    }
};

/// Fully specified generating process for synthetic series.
struct GeneratorSpec {
    std::int64_t length = 0;  // T
    int p = 0;
    CurveSpec mu;
    std::vector<CurveSpec> ar;
    std::uint64_t seed = 0;
    int warmup = 50;
    Date start_date = make_date(2020, 1, 1);
    std::string label = "synthetic";
};

/// Admissibility on a 1000-point grid: mu > 0 everywhere, each a_i in [0,1),
/// and sum_i a_i < 1.
inline void validate_generator(const GeneratorSpec& spec) {
    if (spec.length < 1) throw std::invalid_argument("generator length must be >= 1");
    if (spec.p < 0) throw std::invalid_argument("generator lag order must be >= 0");
    if (static_cast<int>(spec.ar.size()) != spec.p)
        throw std::invalid_argument("generator needs exactly p AR curves");
    if (spec.warmup < 0) throw std::invalid_argument("generator warmup must be >= 0");
    constexpr int grid = 1000;
    for (int g = 0; g < grid; ++g) {
        double x = static_cast<double>(g) / static_cast<double>(grid - 1);
        if (!(spec.mu.eval(x) > 0.0))
            throw std::invalid_argument("inadmissible generator: mu must be positive on [0,1]");
        double total = 0.0;
        for (const CurveSpec& a : spec.ar) {
            double v = a.eval(x);
            if (!(v >= 0.0 && v < 1.0))
                throw std::invalid_argument("inadmissible generator: AR curves must lie in [0,1)");
            total += v;
        }
        if (!(total < 1.0))
            throw std::invalid_argument("inadmissible generator: sum of AR curves must stay below 1");
    }
}

/// Forward-simulate the count process. Warmup steps run with the curves
/// frozen at x = 0 and are discarded; the retained path uses x_t = t/T.
/// Deterministic for a given seed.
inline CountSeries simulate(const GeneratorSpec& spec) {
    validate_generator(spec);
    std::mt19937_64 rng(spec.seed);
    std::poisson_distribution<std::int64_t> poisson;
    using pois_param = std::poisson_distribution<std::int64_t>::param_type;

    std::vector<std::int64_t> history(static_cast<std::size_t>(spec.p), 0);
    auto draw = [&](double x) {
        double lam = spec.mu.eval(x);
        for (int i = 1; i <= spec.p; ++i)
            lam += spec.ar[static_cast<std::size_t>(i - 1)].eval(x) *
                   static_cast<double>(history[static_cast<std::size_t>(i - 1)]);
        std::int64_t value = lam > 0.0 ? poisson(rng, pois_param(lam)) : 0;
        for (std::size_t i = history.size(); i-- > 1;) history[i] = history[i - 1];
        if (!history.empty()) history[0] = value;
        return value;
    };

    for (int w = 0; w < spec.warmup; ++w) draw(0.0);
    std::vector<std::int64_t> counts;
    counts.reserve(static_cast<std::size_t>(spec.length));
    for (std::int64_t t = 1; t <= spec.length; ++t)
        counts.push_back(draw(static_cast<double>(t) / static_cast<double>(spec.length)));
    return CountSeries(spec.start_date, std::move(counts), spec.label);
}

// --- JSON form ------------------------------------------------------------

inline nlohmann::ordered_json curve_to_json(const CurveSpec& curve) {
    nlohmann::ordered_json j;
    if (curve.kind == CurveSpec::Kind::piecewise_linear) {
        j["type"] = "piecewise_linear";
        j["x"] = curve.xs;
        j["y"] = curve.ys;
    } else {
        j["type"] = "sinusoid";
        j["offset"] = curve.offset;
        j["amplitude"] = curve.amplitude;
        j["frequency"] = curve.frequency;
        j["phase"] = curve.phase;
    }
    return j;
}

inline CurveSpec curve_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw data_error("curve spec must be an object with a \"type\" field");
    std::string type = j.at("type").get<std::string>();
    if (type == "piecewise_linear") {
        return CurveSpec::piecewise_linear(j.at("x").get<std::vector<double>>(),
                                           j.at("y").get<std::vector<double>>());
    }
    if (type == "sinusoid") {
        return CurveSpec::sinusoid(j.at("offset").get<double>(), j.at("amplitude").get<double>(),
                                   j.at("frequency").get<double>(), j.value("phase", 0.0));
    }
    throw data_error("unknown curve type: " + type);
}

inline nlohmann::ordered_json generator_to_json(const GeneratorSpec& spec) {
    nlohmann::ordered_json j;
    j["T"] = spec.length;
    j["p"] = spec.p;
    j["mu"] = curve_to_json(spec.mu);
    nlohmann::ordered_json ar = nlohmann::ordered_json::array();
    for (const CurveSpec& a : spec.ar) ar.push_back(curve_to_json(a));
    j["ar"] = ar;
    j["seed"] = spec.seed;
    j["warmup"] = spec.warmup;
    j["start_date"] = format_date(spec.start_date);
    j["label"] = spec.label;
    return j;
}

inline GeneratorSpec generator_from_json(const nlohmann::json& j) {
    GeneratorSpec spec;
    try {
        spec.length = j.at("T").get<std::int64_t>();
        spec.p = j.at("p").get<int>();
        spec.mu = curve_from_json(j.at("mu"));
        for (const auto& a : j.at("ar")) spec.ar.push_back(curve_from_json(a));
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.warmup = j.value("warmup", 50);
        spec.label = j.value("label", std::string{"synthetic"});
        std::string date = j.value("start_date", std::string{"2020-01-01"});
        auto parsed = parse_date(date);
        if (!parsed) throw data_error("generator start_date is not a valid ISO date: " + date);
        spec.start_date = *parsed;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string{"malformed generator spec: "} + e.what());
    }
    try {
        validate_generator(spec);
    } catch (const std::invalid_argument& e) {
        throw data_error(e.what());
    }
    return spec;
}

}  // namespace tvbarc
