#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "tvbarc/io.hpp"

using namespace tvbarc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() /
               ("tvbarc-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

fs::path write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
    return p;
}

}  // namespace

TEST_CASE("dates parse strictly and format back") {
    REQUIRE(parse_date("2020-02-29").has_value());       // leap day
    REQUIRE_FALSE(parse_date("2021-02-29").has_value()); // not a leap year
    REQUIRE_FALSE(parse_date("2020-02-30").has_value());
    REQUIRE_FALSE(parse_date("2020-1-01").has_value());
    REQUIRE_FALSE(parse_date("2020/01/01").has_value());
    REQUIRE_FALSE(parse_date("").has_value());
    REQUIRE(format_date(*parse_date("2020-06-07")) == "2020-06-07");
    REQUIRE(make_date(2020, 1, 1) == *parse_date("2020-01-01"));
    REQUIRE_THROWS_AS(make_date(2020, 13, 1), data_error);
}

TEST_CASE("timestamps normalize to UTC days") {
    REQUIRE(*parse_timestamp_utc("2020-03-05") == make_date(2020, 3, 5));
    REQUIRE(*parse_timestamp_utc("2020-03-05T14:30:00Z") == make_date(2020, 3, 5));
    REQUIRE(*parse_timestamp_utc("2020-03-05 23:59") == make_date(2020, 3, 5));
    REQUIRE(*parse_timestamp_utc("2020-03-05T12:00:00.25Z") == make_date(2020, 3, 5));
    // zone offsets can move the UTC day in either direction
    REQUIRE(*parse_timestamp_utc("2020-01-01T23:30:00-02:00") == make_date(2020, 1, 2));
    REQUIRE(*parse_timestamp_utc("2020-01-01T01:00+02:00") == make_date(2019, 12, 31));
    REQUIRE(*parse_timestamp_utc("2020-01-01T01:00+0200") == make_date(2019, 12, 31));
    REQUIRE_FALSE(parse_timestamp_utc("2020-03-05T25:00:00Z").has_value());
    REQUIRE_FALSE(parse_timestamp_utc("2020-03-05Tnoon").has_value());
    REQUIRE_FALSE(parse_timestamp_utc("yesterday").has_value());
}

TEST_CASE("count series validates its content") {
    REQUIRE_THROWS_AS(CountSeries(make_date(2020, 1, 1), {}, "x"), data_error);
    REQUIRE_THROWS_AS(CountSeries(make_date(2020, 1, 1), {1, -2}, "x"), data_error);
    CountSeries s(make_date(2020, 1, 1), {5, 6, 7}, "x");
    REQUIRE(s.length() == 3);
    REQUIRE(s.date_at(3) == make_date(2020, 1, 3));
    REQUIRE(s.normalized_time(3) == Catch::Approx(1.0));
}

TEST_CASE("counts CSV round-trips exactly") {
    TempDir dir;
    CountSeries s(make_date(2020, 2, 27), {3, 0, 14, 7}, "CY");
    fs::path p = dir.path / "CY.csv";
    write_counts_csv(s, p);
    CountSeries back = read_counts_csv(p);
    REQUIRE(back.start_date == s.start_date);
    REQUIRE(back.counts == s.counts);
    REQUIRE(back.label == "CY");  // label comes from the file stem
}

TEST_CASE("counts CSV errors name the offending line") {
    TempDir dir;
    fs::path gap = write_file(dir.path / "gap.csv",
                              "date,count\n2020-01-01,3\n2020-01-02,4\n2020-01-04,5\n");
    REQUIRE_THROWS_WITH(read_counts_csv(gap),
                        Catch::Matchers::ContainsSubstring(":4:") &&
                            Catch::Matchers::ContainsSubstring("2020-01-03"));

    fs::path neg = write_file(dir.path / "neg.csv", "date,count\n2020-01-01,-3\n");
    REQUIRE_THROWS_WITH(read_counts_csv(neg), Catch::Matchers::ContainsSubstring(":2:"));

    fs::path frac = write_file(dir.path / "frac.csv", "date,count\n2020-01-01,3.5\n");
    REQUIRE_THROWS_AS(read_counts_csv(frac), data_error);

    fs::path baddate = write_file(dir.path / "bad.csv", "date,count\n01/02/2020,3\n");
    REQUIRE_THROWS_AS(read_counts_csv(baddate), data_error);

    fs::path empty = write_file(dir.path / "empty.csv", "date,count\n");
    REQUIRE_THROWS_AS(read_counts_csv(empty), data_error);

    REQUIRE_THROWS_AS(read_counts_csv(dir.path / "missing.csv"), data_error);
}

TEST_CASE("record readers accept CSV and JSON lines") {
    TempDir dir;
    fs::path csv = write_file(dir.path / "r.csv",
                              "id,timestamp,keyword\n"
                              "a1,2020-01-01T10:00:00Z,cyberbullying\n"
                              "a2,2020-01-01T23:30:00-02:00,\"online abuse, severe\"\n"
                              "a3,not-a-time,cyberbullying\n"
                              "a4,2020-01-02\n");
    RecordReadResult r = read_records(csv);
    REQUIRE(r.records.size() == 2);
    REQUIRE(r.malformed == 2);  // bad timestamp and missing field
    REQUIRE(r.records[0].id == "a1");
    REQUIRE(r.records[1].day == make_date(2020, 1, 2));  // offset crossed midnight
    REQUIRE(r.records[1].keyword == "online abuse, severe");

    fs::path jsonl = write_file(
        dir.path / "r.jsonl",
        R"({"id":"b1","timestamp":"2020-01-03T08:00:00Z","keyword":"twitter bullying"})"
        "\n"
        R"({"id":"b2","timestamp":"junk","keyword":"x"})"
        "\n"
        R"({"id":"b3","keyword":"missing timestamp"})"
        "\n");
    RecordReadResult rj = read_records(jsonl);
    REQUIRE(rj.records.size() == 1);
    REQUIRE(rj.malformed == 2);
    REQUIRE(rj.records[0].day == make_date(2020, 1, 3));

    fs::path badhdr = write_file(dir.path / "bad.csv", "who,when,what\na,2020-01-01,b\n");
    REQUIRE_THROWS_AS(read_records(badhdr), data_error);
}

TEST_CASE("class maps validate labels and keyword lists") {
    KeywordClassMap def = default_class_map();
    REQUIRE(def.classes.at("CY").size() == 7);
    REQUIRE(def.classes.at("ON").size() == 6);
    REQUIRE(def.classes.at("TW").size() == 3);

    REQUIRE_THROWS_AS(parse_class_map(nlohmann::json::object()), data_error);
    REQUIRE_THROWS_AS(parse_class_map({{"TOTAL", {"x"}}}), data_error);
    REQUIRE_THROWS_AS(parse_class_map({{"A", nlohmann::json::array()}}), data_error);
    REQUIRE_THROWS_AS(parse_class_map({{"A", {""}}}), data_error);

    TempDir dir;
    fs::path good = write_file(dir.path / "map.json", R"({"A":["Foo"],"B":["bar","baz"]})");
    KeywordClassMap m = read_class_map(good);
    REQUIRE(m.classes.at("A") == std::vector<std::string>{"foo"});  // lowercased
    fs::path bad = write_file(dir.path / "bad.json", "{not json");
    REQUIRE_THROWS_AS(read_class_map(bad), data_error);
}

TEST_CASE("aggregation zero-fills, de-duplicates and classifies") {
    KeywordClassMap classes = parse_class_map(
        {{"CY", {"cyber"}}, {"TW", {"twitter"}}});
    Date start = make_date(2020, 1, 1);
    Date end = make_date(2020, 1, 5);
    std::vector<RawRecord> records{
        {"r1", make_date(2020, 1, 1), "Stop Cyberbullying"},
        {"r2", make_date(2020, 1, 1), "twitter cyberbullying"},  // both classes
        {"r3", make_date(2020, 1, 3), "unrelated keyword"},      // TOTAL only
        {"r1", make_date(2020, 1, 1), "Stop Cyberbullying"},     // duplicate id
        {"r4", make_date(2019, 12, 31), "cyber"},                // out of range
        {"r5", make_date(2020, 1, 6), "cyber"},                  // out of range
    };
    AggregateResult agg = aggregate_daily(records, start, end, classes);
    REQUIRE(agg.duplicate_ids == 1);
    REQUIRE(agg.out_of_range == 2);
    REQUIRE(agg.series.size() == 3);  // CY, TW, TOTAL
    const CountSeries& total = agg.series.at("TOTAL");
    REQUIRE(total.length() == 5);
    REQUIRE(total.counts == std::vector<std::int64_t>{2, 0, 1, 0, 0});
    REQUIRE(agg.series.at("CY").counts == std::vector<std::int64_t>{2, 0, 0, 0, 0});
    REQUIRE(agg.series.at("TW").counts == std::vector<std::int64_t>{1, 0, 0, 0, 0});

    // aggregate is permutation-invariant and idempotent under duplication
    std::vector<RawRecord> shuffled = records;
    std::reverse(shuffled.begin(), shuffled.end());
    AggregateResult agg2 = aggregate_daily(shuffled, start, end, classes);
    REQUIRE(agg2.series.at("TOTAL").counts == total.counts);

    std::vector<RawRecord> doubled = records;
    doubled.insert(doubled.end(), records.begin(), records.end());
    AggregateResult agg3 = aggregate_daily(doubled, start, end, classes);
    for (const auto& [label, series] : agg.series)
        REQUIRE(agg3.series.at(label).counts == series.counts);

    REQUIRE_THROWS_AS(aggregate_daily(records, end, start, classes), std::invalid_argument);
}

TEST_CASE("first-half-2020 range produces 159-day series") {
    Date start = make_date(2020, 1, 1);
    Date end = make_date(2020, 6, 7);
    AggregateResult agg = aggregate_daily({}, start, end, default_class_map());
    for (const auto& [label, series] : agg.series) {
        REQUIRE(series.length() == 159);
        for (auto c : series.counts) REQUIRE(c == 0);
    }
}
