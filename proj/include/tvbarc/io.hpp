#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "tvbarc/date.hpp"
#include "tvbarc/errors.hpp"
#include "tvbarc/series.hpp"

namespace tvbarc {

namespace detail {

inline std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

/// Split one CSV line, honoring double quotes with "" escapes.
inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
    s = strip(s);
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file: " + path.string());
    return in;
}

}  // namespace detail

// --- daily counts -----------------------------------------------------------

/// Two-column date,count CSV with a header row; days must be consecutive.
inline void write_counts_csv(const CountSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write file: " + path.string());
    out << "date,count\n";
    for (std::int64_t t = 1; t <= series.length(); ++t)
        out << format_date(series.date_at(t)) << ','
            << series.counts[static_cast<std::size_t>(t - 1)] << '\n';
    if (!out) throw data_error("write failed: " + path.string());
}

/// Strict reader for the same format: rejects gaps, duplicate or unordered
/// dates, negative or non-integer counts, naming the offending line. The
/// series label is the file stem.
inline CountSeries read_counts_csv(const std::filesystem::path& path) {
    std::ifstream in = detail::open_input(path);
    std::string line;
    std::vector<std::int64_t> counts;
    Date start{};
    std::int64_t line_no = 0;
    bool have_start = false;
    auto fail = [&](const std::string& msg) {
        throw data_error(path.string() + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = detail::strip(line);
        if (sv.empty()) continue;
        if (line_no == 1 && detail::lowercase(sv).rfind("date", 0) == 0) continue;  // header
        std::vector<std::string> fields = detail::split_csv_line(sv);
        if (fields.size() != 2) fail("expected two fields date,count");
        auto date = parse_date(detail::strip(fields[0]));
        if (!date) fail("malformed date '" + fields[0] + "'");
        auto count = detail::parse_int(fields[1]);
        if (!count) fail("count '" + fields[1] + "' is not an integer");
        if (*count < 0) fail("negative count");
        if (!have_start) {
            start = *date;
            have_start = true;
        } else {
            Date expected = start + std::chrono::days{static_cast<std::int64_t>(counts.size())};
            if (*date != expected)
                fail("expected consecutive date " + format_date(expected) + ", got " +
                     format_date(*date));
        }
        counts.push_back(*count);
    }
    if (counts.empty()) throw data_error(path.string() + ": no count rows");
    return CountSeries(start, std::move(counts), path.stem().string());
}

// --- raw keyword records ------------------------------------------------------

/// One timestamped keyword hit; the timestamp has already been normalized to
/// a UTC calendar date.
struct RawRecord {
    std::string id;
    Date day{};
    std::string keyword;
};

struct RecordReadResult {
    std::vector<RawRecord> records;
    std::int64_t malformed = 0;
};

/// Records come as CSV with header id,timestamp,keyword or as JSON lines with
/// the same fields. Rows with malformed timestamps (or missing fields) are
/// dropped and counted, not fatal.
inline RecordReadResult read_records(const std::filesystem::path& path) {
    std::ifstream in = detail::open_input(path);
    std::string line;
    RecordReadResult result;

    // Peek the first non-empty line to pick the format.
    std::string first;
    while (std::getline(in, first))
        if (!detail::strip(first).empty()) break;
    if (detail::strip(first).empty()) return result;

    bool jsonl = detail::strip(first).front() == '{';
    auto consume_json = [&](std::string_view sv) {
        try {
            nlohmann::json j = nlohmann::json::parse(sv);
            std::string ts = j.at("timestamp").get<std::string>();
            auto day = parse_timestamp_utc(ts);
            if (!day) {
                ++result.malformed;
                return;
            }
            result.records.push_back({j.at("id").get<std::string>(), *day,
                                      j.at("keyword").get<std::string>()});
        } catch (const nlohmann::json::exception&) {
            ++result.malformed;
        }
    };
    auto consume_csv = [&](std::string_view sv) {
        std::vector<std::string> fields = detail::split_csv_line(sv);
        if (fields.size() != 3) {
            ++result.malformed;
            return;
        }
        auto day = parse_timestamp_utc(fields[1]);
        if (!day) {
            ++result.malformed;
            return;
        }
        result.records.push_back({std::string(detail::strip(fields[0])), *day,
                                  std::string(detail::strip(fields[2]))});
    };

    if (jsonl) {
        consume_json(detail::strip(first));
    } else {
        std::vector<std::string> header = detail::split_csv_line(detail::strip(first));
        if (header.size() != 3 || detail::lowercase(detail::strip(header[0])) != "id" ||
            detail::lowercase(detail::strip(header[1])) != "timestamp" ||
            detail::lowercase(detail::strip(header[2])) != "keyword")
            throw data_error(path.string() + ": expected CSV header id,timestamp,keyword");
    }
    while (std::getline(in, line)) {
        std::string_view sv = detail::strip(line);
        if (sv.empty()) continue;
        jsonl ? consume_json(sv) : consume_csv(sv);
    }
    return result;
}

// --- keyword classes ----------------------------------------------------------

/// Class label -> keyword patterns. A record belongs to a class when any
/// pattern is a case-insensitive substring of its keyword field.
struct KeywordClassMap {
    std::map<std::string, std::vector<std::string>> classes;  // patterns stored lowercased
};

inline KeywordClassMap parse_class_map(const nlohmann::json& j) {
    if (!j.is_object() || j.empty())
        throw data_error("class map must be a non-empty JSON object {label: [keywords...]}");
    KeywordClassMap map;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "TOTAL") throw data_error("class label TOTAL is reserved");
        if (!it.value().is_array() || it.value().empty())
            throw data_error("class '" + it.key() + "' needs a non-empty keyword list");
        std::vector<std::string> patterns;
        for (const auto& kw : it.value()) {
            if (!kw.is_string()) throw data_error("keywords must be strings");
            patterns.push_back(detail::lowercase(kw.get<std::string>()));
            if (patterns.back().empty()) throw data_error("empty keyword pattern");
        }
        map.classes[it.key()] = std::move(patterns);
    }
    return map;
}

inline KeywordClassMap read_class_map(const std::filesystem::path& path) {
    std::ifstream in = detail::open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(path.string() + ": invalid JSON: " + e.what());
    }
    return parse_class_map(j);
}

/// Built-in partition of bullying-related keyword patterns into CY (cyber),
/// ON (online/internet) and TW (twitter) classes. Ambiguous patterns that
/// would fall into several classes are deliberately left out and only count
/// toward TOTAL.
inline KeywordClassMap default_class_map() {
    nlohmann::json j = {
        {"CY",
         {"cyberbullying", "stop cyberbullying", "cyberbully", "cyberbullies",
          "fb cyberbullying", "facebook cyberbullying", "insta cyberbullying"}},
        {"ON",
         {"online abuse", "online harassment", "online shaming", "online stalking",
          "internet bully", "internet bullies"}},
        {"TW", {"twitter bullying", "twitter harassment", "twitter victim"}},
    };
    return parse_class_map(j);
}

// --- aggregation ----------------------------------------------------------------

struct AggregateResult {
    std::map<std::string, CountSeries> series;  // per class, plus "TOTAL"
    std::int64_t duplicate_ids = 0;
    std::int64_t out_of_range = 0;
};

/// Daily counts per class over [start, end] inclusive. Duplicate ids are
/// dropped (first occurrence wins), records outside the range are dropped,
/// empty days count as zero. A record matching several classes counts once
/// per class and once in TOTAL.
inline AggregateResult aggregate_daily(const std::vector<RawRecord>& records, Date start,
                                       Date end, const KeywordClassMap& classes) {
    if (end < start) throw std::invalid_argument("aggregate range end precedes start");
    const std::int64_t days = (end - start).count() + 1;

    std::map<std::string, std::vector<std::int64_t>> buckets;
    for (const auto& cls : classes.classes)
        buckets[cls.first].assign(static_cast<std::size_t>(days), 0);
    buckets["TOTAL"].assign(static_cast<std::size_t>(days), 0);

    AggregateResult result;
    std::unordered_set<std::string> seen;
    seen.reserve(records.size());
    for (const RawRecord& rec : records) {
        if (!seen.insert(rec.id).second) {
            ++result.duplicate_ids;
            continue;
        }
        if (rec.day < start || rec.day > end) {
            ++result.out_of_range;
            continue;
        }
        auto offset = static_cast<std::size_t>((rec.day - start).count());
        std::string keyword = detail::lowercase(rec.keyword);
        ++buckets["TOTAL"][offset];
        for (const auto& cls : classes.classes) {
            for (const std::string& pattern : cls.second) {
                if (keyword.find(pattern) != std::string::npos) {
                    ++buckets[cls.first][offset];
                    break;
                }
            }
        }
    }
    for (auto& [label, counts] : buckets)
        result.series.emplace(label, CountSeries(start, std::move(counts), label));
    return result;
}

}  // namespace tvbarc
