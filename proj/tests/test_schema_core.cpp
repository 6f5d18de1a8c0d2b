#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "taskgen/csv.hpp"
#include "taskgen/dataset.hpp"
#include "taskgen/errors.hpp"
#include "taskgen/schema.hpp"
#include "taskgen/stats.hpp"

using namespace taskgen;

namespace {

Schema toy3() {
    return Schema("toy",
                  {{"DATE", AttributeKind::Time}, {"AIRLINE", AttributeKind::Entity},
                   {"ARRIVAL_DELAY", AttributeKind::Numerical}},
                  "%Y-%m-%d");
}

const char* kToy3 = "DATE,AIRLINE,ARRIVAL_DELAY\n"
                    "2015-01-01,AA,10\n"
                    "2015-01-02,UA,5\n"
                    "2015-01-03,AA,30\n";

} // namespace

TEST_SUITE("schema_core") {

TEST_CASE("csv reader handles quotes, CRLF and embedded newlines") {
    const auto rows = csv::parse("a,b\r\n\"x,1\",\"he said \"\"hi\"\"\"\n\"multi\nline\",z\n\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].fields == std::vector<std::string>{"x,1", "he said \"hi\""});
    CHECK(rows[2].fields[0] == "multi\nline");
    CHECK(rows[2].line == 3);
    CHECK(csv::escape_field("a,b") == "\"a,b\"");
    CHECK(csv::escape_field("plain") == "plain");
    CHECK_THROWS_AS(csv::parse("a,\"open\n"), CsvError);
}

TEST_CASE("schema canonicalises names and requires one time attribute") {
    Schema s("x", {{"date", AttributeKind::Time}, {"Airline", AttributeKind::Entity}}, "%Y-%m-%d");
    CHECK(s.index_of("AIRLINE") == 1u);
    CHECK(s.index_of("airline") == 1u);
    CHECK(s.kind_of("DATE") == AttributeKind::Time);
    CHECK_THROWS_AS(Schema("x", {{"A", AttributeKind::Entity}}, "%Y"), NoTimeColumn);
    CHECK_THROWS_AS(Schema("x", {{"T", AttributeKind::Time}, {"t", AttributeKind::Entity}}, "%Y"), SchemaError);
    CHECK_THROWS_AS(Schema("x", {{"T", AttributeKind::Time}, {"U", AttributeKind::Time}}, "%Y"), SchemaError);
}

TEST_CASE("schema sidecar round trip") {
    const auto doc = nlohmann::json::parse(R"({"name":"f","time":{"column":"DATE","format":"%Y-%m-%d"},
        "entities":["AIRLINE"],"categorical":["C"],"numerical":["X","Y"]})");
    const Schema s = schema_from_json(doc);
    CHECK(s.attributes().size() == 5);
    CHECK(s.time_attribute().name == "DATE");
    CHECK(schema_from_json(schema_to_json(s)) == s);
    const Schema flights = load_schema(std::string(TASKGEN_DATA_DIR) + "/flight_delay.schema.json");
    CHECK(flights.names_of_kind(AttributeKind::Entity).size() == 5);
    CHECK(flights.kind_of("ELAPSED_TIME") == AttributeKind::Numerical);
}

TEST_CASE("time parsing is strict") {
    CHECK(parse_time("2015-01-01", "%Y-%m-%d") == 1420070400);
    CHECK(parse_time("2015-02-29", "%Y-%m-%d") == std::nullopt);
    CHECK(parse_time("2015-01-01x", "%Y-%m-%d") == std::nullopt);
    CHECK(parse_time("2015-01-01 06:30:00", "%Y-%m-%d %H:%M:%S") == 1420070400 + 6 * 3600 + 1800);
    CHECK(format_time(1420070400, "%Y-%m-%d") == "2015-01-01");
}

TEST_CASE("load: sorted rows, dropped rows, missing column") {
    auto r = load_dataset_from_string(kToy3, toy3());
    CHECK(r.dataset.rows() == 3);
    CHECK(r.report.dropped == 0);
    CHECK(r.dataset.column("AIRLINE").text[0] == "AA");

    auto bad = load_dataset_from_string("DATE,AIRLINE,ARRIVAL_DELAY\n2015-01-01,AA,10\n2015-13-40,UA,5\n"
                                        "2015-01-03,AA,30\n",
                                        toy3());
    CHECK(bad.dataset.rows() == 2);
    CHECK(bad.report.dropped == 1);
    CHECK(bad.report.dropped_lines == std::vector<std::size_t>{3});

    try {
        load_dataset_from_string("DATE,ARRIVAL_DELAY\n2015-01-01,1\n", toy3());
        FAIL("expected MissingColumn");
    } catch (const MissingColumn& e) {
        CHECK(e.column() == "AIRLINE");
    }
    CHECK_THROWS_AS(load_dataset_from_string("DATE,AIRLINE,ARRIVAL_DELAY\nnope,AA,1\n", toy3()), EmptyDataset);
}

TEST_CASE("load sorts by time and keeps file order on ties") {
    auto r = load_dataset_from_string("DATE,AIRLINE,ARRIVAL_DELAY\n2015-01-03,AA,1\n2015-01-01,UA,2\n"
                                      "2015-01-01,DL,3\n2015-01-02,AA,4\n",
                                      toy3());
    const auto& c = r.dataset.column("AIRLINE");
    CHECK(c.text == std::vector<std::string>{"UA", "DL", "AA", "AA"});
}

TEST_CASE("numeric failure is stored as missing") {
    auto r = load_dataset_from_string("DATE,AIRLINE,ARRIVAL_DELAY\n2015-01-01,AA,ten\n2015-01-02,AA,\n", toy3());
    CHECK(r.report.numeric_failures == 1);
    CHECK_FALSE(r.dataset.column("ARRIVAL_DELAY").has(0));
    CHECK_FALSE(r.dataset.column("ARRIVAL_DELAY").has(1));
}

TEST_CASE("loading twice serialises identically") {
    const std::string path = std::string(TASKGEN_DATA_DIR) + "/toy_flights.csv";
    const Schema s = load_schema(std::string(TASKGEN_DATA_DIR) + "/toy_flights.schema.json");
    CHECK(serialize_dataset(load_dataset(path, s).dataset) == serialize_dataset(load_dataset(path, s).dataset));
}

TEST_CASE("infer_schema heuristic") {
    const Schema s = infer_schema_from_string("DATE,AIRLINE,ARRIVAL_DELAY\n2015-01-01,AA,1\n2015-01-02,AA,2\n"
                                              "2015-01-03,UA,3\n2015-01-04,AA,4\n");
    CHECK(s.kind_of("DATE") == AttributeKind::Time);
    CHECK(s.kind_of("AIRLINE") == AttributeKind::Categorical); // 2 distinct of 4
    CHECK(s.kind_of("ARRIVAL_DELAY") == AttributeKind::Numerical);

    std::string ids = "DATE,ID\n";
    for (int i = 0; i < 10; ++i) ids += "2015-01-0" + std::to_string(i % 9 + 1) + ",id" + std::to_string(i) + "\n";
    CHECK(infer_schema_from_string(ids).kind_of("ID") == AttributeKind::Entity);

    const Schema two = infer_schema_from_string("D,X\n2015-01-01,1.5\n2015-01-02,2\n");
    CHECK(two.attributes().size() == 2);
    CHECK(two.kind_of("X") == AttributeKind::Numerical);
    CHECK_THROWS_AS(infer_schema_from_string("A,B\n"), EmptyDataset);
    CHECK_THROWS_AS(infer_schema_from_string("A,B\nx,1\n"), NoTimeColumn);
}

TEST_CASE("stats: nearest-rank quantiles and frequencies") {
    auto r = load_dataset_from_string("DATE,AIRLINE,ARRIVAL_DELAY\n2015-01-01,AA,10\n2015-01-01,AA,30\n"
                                      "2015-01-02,UA,5\n2015-01-03,AA,0\n",
                                      toy3());
    const auto st = compute_stats(r.dataset, "ARRIVAL_DELAY");
    REQUIRE(st.numeric);
    CHECK(st.numeric->min == 0);
    CHECK(st.numeric->max == 30);
    CHECK(st.numeric->q50 == 10);
    CHECK(st.count_present + st.count_missing == 4);

    const auto fr = compute_stats(r.dataset, "AIRLINE");
    REQUIRE(fr.frequencies.size() == 2);
    CHECK(fr.frequencies[0] == std::pair<std::string, std::size_t>{"AA", 3});
    CHECK(fr.frequencies[1] == std::pair<std::string, std::size_t>{"UA", 1});

    auto empty = load_dataset_from_string("DATE,AIRLINE,ARRIVAL_DELAY\n2015-01-01,AA,\n", toy3());
    const auto none = compute_stats(empty.dataset, "ARRIVAL_DELAY");
    CHECK(none.count_present == 0);
    CHECK_FALSE(none.numeric);
    CHECK_THROWS_AS(compute_stats(empty.dataset, "NOPE"), UnknownAttribute);
}

TEST_CASE("stats quantiles agree with the full-sort oracle") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Dataset ds = oracle::synthetic_dataset(50 * seed, 10, seed);
        for (const char* attr : {"X", "Y"}) {
            const auto st = compute_stats(ds, attr);
            std::vector<double> vals;
            const auto& col = ds.column(attr);
            for (std::size_t r = 0; r < ds.rows(); ++r)
                if (col.has(r)) vals.push_back(col.numbers[r]);
            REQUIRE(st.numeric);
            CHECK(st.numeric->q25 == oracle::sorted_quantile(vals, 0.25));
            CHECK(st.numeric->q50 == oracle::sorted_quantile(vals, 0.5));
            CHECK(st.numeric->q75 == oracle::sorted_quantile(vals, 0.75));
            CHECK(st.numeric->q25 <= st.numeric->q50);
            CHECK(st.numeric->q50 <= st.numeric->q75);
        }
    }
}

TEST_CASE("validate_dataset reports span and missing rates") {
    auto r = load_dataset_from_string("DATE,AIRLINE,ARRIVAL_DELAY\n2015-01-01,AA,1\n2015-01-02,UA,\n"
                                      "2015-01-03,AA,\n2015-01-03,AA,4\n",
                                      toy3());
    const auto rep = validate_dataset(r.dataset);
    CHECK(rep.row_count == 4);
    CHECK(rep.span_seconds == 2 * 86400);
    CHECK(rep.missing_rate.at("ARRIVAL_DELAY") == 0.5);
    CHECK(rep.flagged == std::vector<std::string>{"ARRIVAL_DELAY"});
}

} // TEST_SUITE
