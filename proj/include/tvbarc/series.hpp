#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tvbarc/date.hpp"
#include "tvbarc/errors.hpp"

namespace tvbarc {

/// A dated sequence of daily counts X_1..X_T. Time index t (1-based) maps to
/// normalized time x_t = t/T.
struct CountSeries {
    Date start_date{};
    std::vector<std::int64_t> counts;
    std::string label;

    CountSeries() = default;
    CountSeries(Date start, std::vector<std::int64_t> values, std::string tag)
        : start_date(start), counts(std::move(values)), label(std::move(tag)) {
        if (counts.empty()) throw data_error("count series must be non-empty");
        for (auto c : counts)
            if (c < 0) throw data_error("count series entries must be non-negative");
    }

    std::int64_t length() const { return static_cast<std::int64_t>(counts.size()); }

    /// Calendar date of observation t (1-based).
    Date date_at(std::int64_t t) const {
        return start_date + std::chrono::days{t - 1};
    }

    double normalized_time(std::int64_t t) const {
        return static_cast<double>(t) / static_cast<double>(counts.size());
    }
};

}  // namespace tvbarc
