#include <doctest.h>

#include <string>

#include "toyaudit/errors.hpp"
#include "toyaudit/jsonl.hpp"

#include "txn_fixtures.hpp"

using namespace toyaudit;

TEST_CASE("empty log round-trips to empty list") {
    CHECK(parse_transaction_log("").empty());
    CHECK(write_transaction_log({}).empty());
}

TEST_CASE("jsonl round-trips binary bodies and counts lines") {
    std::string png = "\x89PNG\r\n";
    png.push_back('\0');
    png += "payload";
    auto a = fixtures::make_txn("img.toymaker.test", false, HttpMethod::Put, "/api/photo/u-1",
                                png, "{\"token\":\"KQ3FC0Z1MVXB\"}", 1.0);
    auto b = fixtures::make_txn("api.toymaker.test", true, HttpMethod::Get, "/health", "", "",
                                2.0);
    auto c = fixtures::make_txn("api.toymaker.test", false, HttpMethod::Post, "/api/drink",
                                "{\"ml\":250}", "", 3.0);
    const auto text = write_transaction_log({a, b, c});
    const auto parsed = parse_transaction_log(text);
    REQUIRE(parsed.size() == 3);
    CHECK(parsed[0] == a);
    CHECK(parsed[1] == b);
    CHECK(parsed[2] == c);
}

TEST_CASE("schema field order is exactly the documented one") {
    auto txn = fixtures::make_txn("h.test", false, HttpMethod::Get, "/");
    const auto line = write_transaction_log({txn});
    const char* expected =
        "{\"ts_start\":";
    CHECK(line.rfind(expected, 0) == 0);
    // spot-check relative order of a few later fields
    CHECK(line.find("\"host\"") < line.find("\"tls\""));
    CHECK(line.find("\"tls\"") < line.find("\"method\""));
    CHECK(line.find("\"req_body_b64\"") < line.find("\"resp_body_b64\""));
    CHECK(line.find("\"resp_body_b64\"") < line.find("\"req_bytes\""));
}

TEST_CASE("missing host field reports SchemaError with its line number") {
    auto good = write_transaction_log({fixtures::make_txn("h.test", false, HttpMethod::Get, "/")});
    // strip the host field from an otherwise valid line
    std::string bad = good;
    auto pos = bad.find("\"host\":\"h.test\",");
    REQUIRE(pos != std::string::npos);
    bad.erase(pos, std::string("\"host\":\"h.test\",").size());

    CHECK_THROWS_AS(parse_transaction_log(bad), SchemaError);
    try {
        parse_transaction_log(good + bad);  // malformed line is the second
    } catch (const SchemaError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("garbage line is a SchemaError, not a crash") {
    CHECK_THROWS_AS(parse_transaction_log("not json\n"), SchemaError);
    CHECK_THROWS_AS(parse_transaction_log("[1,2,3]\n"), SchemaError);
}
