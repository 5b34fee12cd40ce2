#include <doctest.h>

#include "toyaudit/detectors.hpp"

#include "txn_fixtures.hpp"

using namespace toyaudit;

namespace {

int count_id(const std::vector<Finding>& findings, DetectorId id) {
    int n = 0;
    for (const auto& f : findings) {
        if (f.detector_id == id) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("cleartext detector: one finding per plain-HTTP host, severity by party") {
    std::vector<HttpTransaction> txns;
    txns.push_back(fixtures::make_txn("api.toymaker.test", false, HttpMethod::Get, "/a"));
    txns.push_back(fixtures::make_txn("api.toymaker.test", false, HttpMethod::Get, "/b"));
    txns.push_back(fixtures::make_txn("www.analytics.test", false, HttpMethod::Post, "/c", "v=1"));
    txns.push_back(fixtures::make_txn("secure.toymaker.test", true, HttpMethod::Get, "/d"));

    const auto findings = detect_cleartext_firstparty(txns, fixtures::toy_profile());
    REQUIRE(findings.size() == 2);
    for (const auto& f : findings) {
        CHECK(f.detector_id == DetectorId::D_CLEARTEXT);
        if (f.summary.find("api.toymaker.test") != std::string::npos) {
            CHECK(f.severity == Severity::High);
            CHECK(f.evidence.size() == 2);
        } else {
            CHECK(f.summary.find("www.analytics.test") != std::string::npos);
            CHECK(f.severity == Severity::Medium);
            CHECK(f.evidence.size() == 1);
        }
    }
}

TEST_CASE("all-TLS traffic produces no cleartext findings") {
    std::vector<HttpTransaction> txns;
    txns.push_back(fixtures::make_txn("api.toymaker.test", true, HttpMethod::Get, "/a"));
    CHECK(detect_cleartext_firstparty(txns, fixtures::toy_profile()).empty());
}

TEST_CASE("pii exposure: cleartext bodies and third-party destinations") {
    const auto dict = PiiDictionary::defaults();
    std::vector<HttpTransaction> txns;
    // cleartext first-party with PII keys -> D_PII_EXPOSURE only
    txns.push_back(fixtures::make_txn("auth.toymaker.test", false, HttpMethod::Post, "/account",
                                      "{\"name\":\"Mia\",\"birthday\":\"2017-03-14\"}"));
    // TLS third-party with PII keys -> D_PII_THIRD_PARTY only
    txns.push_back(fixtures::make_txn("reports.crash.test", true, HttpMethod::Post, "/spi",
                                      "{\"gender\":\"female\",\"weight_kg\":24.5}"));
    // TLS first-party with PII -> neither
    txns.push_back(fixtures::make_txn("api.toymaker.test", true, HttpMethod::Post, "/sync",
                                      "{\"height_cm\":118.0}"));

    const auto findings = detect_pii_exposure(txns, dict, fixtures::toy_profile());
    REQUIRE(findings.size() == 2);
    CHECK(count_id(findings, DetectorId::D_PII_EXPOSURE) == 1);
    CHECK(count_id(findings, DetectorId::D_PII_THIRD_PARTY) == 1);
    for (const auto& f : findings) {
        if (f.detector_id == DetectorId::D_PII_EXPOSURE) {
            CHECK(f.severity == Severity::High);
            // dictionary order: name before birthday
            CHECK(f.matched_fields == std::vector<std::string>{"name", "birthday"});
        } else {
            CHECK(f.severity == Severity::Medium);
            CHECK(f.matched_fields == std::vector<std::string>{"gender", "weight"});
        }
    }
}

TEST_CASE("image uploads count as photo pii") {
    auto txn = fixtures::make_txn("img.toymaker.test", false, HttpMethod::Put, "/api/photo/u-1",
                                  "\x89PNGdata");
    txn.req_headers = {{"Content-Type", "image/png"}};
    finalize_transaction(txn);
    const auto findings =
        detect_pii_exposure({txn}, PiiDictionary::defaults(), fixtures::toy_profile());
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].detector_id == DetectorId::D_PII_EXPOSURE);
    CHECK(findings[0].matched_fields == std::vector<std::string>{"photo"});
}

TEST_CASE("token reuse: same header value across posts, span gated") {
    std::vector<HttpTransaction> txns;
    for (double ts : {1000.0, 1060.0, 1360.0}) {
        auto txn = fixtures::make_txn("api.toymaker.test", false, HttpMethod::Post, "/api/drink",
                                      "{\"ml\":250}", "{\"ok\":true}", ts);
        txn.req_headers.emplace_back("X-Auth-Token", "tok-abc");
        finalize_transaction(txn);
        txns.push_back(txn);
    }
    // GETs with the token never count
    auto get = fixtures::make_txn("api.toymaker.test", false, HttpMethod::Get, "/health");
    get.req_headers.emplace_back("X-Auth-Token", "tok-abc");
    finalize_transaction(get);
    txns.push_back(get);

    auto findings = detect_token_reuse(txns);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].detector_id == DetectorId::D_TOKEN_REUSE);
    CHECK(findings[0].evidence.size() == 3);
    CHECK(findings[0].matched_fields == std::vector<std::string>{"tok-abc"});

    // raising min_span beyond the observed window suppresses it
    CHECK(detect_token_reuse(txns, {"X-Auth-Token"}, 2, 600.0).empty());
    // requiring more repeats than observed suppresses it
    CHECK(detect_token_reuse(txns, {"X-Auth-Token"}, 4, 0.0).empty());
}

TEST_CASE("rotating tokens do not trigger reuse") {
    std::vector<HttpTransaction> txns;
    int i = 0;
    for (const char* tok : {"tok-1", "tok-2", "tok-3"}) {
        auto txn = fixtures::make_txn("api.toymaker.test", true, HttpMethod::Post, "/api/drink",
                                      "{\"ml\":250}", "", 1000.0 + 60.0 * i++);
        txn.req_headers.emplace_back("X-Auth-Token", tok);
        finalize_transaction(txn);
        txns.push_back(txn);
    }
    CHECK(detect_token_reuse(txns).empty());
}

TEST_CASE("unauthenticated resource: credential-free 200 with sensitive payload") {
    auto open_photo = fixtures::make_txn("img.toymaker.test", false, HttpMethod::Get,
                                         "/api/photo/KQ3/KQ3FC0Z1MVXB", "", "\x89PNGbytes");
    open_photo.resp_headers = {{"Content-Type", "image/png"}};
    finalize_transaction(open_photo);

    auto authed = open_photo;
    authed.req_headers.emplace_back("X-Auth-Token", "tok-abc");
    finalize_transaction(authed);

    auto bearer = open_photo;
    bearer.req_headers.emplace_back("Authorization", "Bearer xyz");
    finalize_transaction(bearer);

    auto missing = open_photo;
    missing.status = 404;
    missing.resp_headers.clear();
    missing.resp_body = "not found";
    finalize_transaction(missing);

    const auto dict = PiiDictionary::defaults();
    auto hit = detect_unauthenticated_resource({open_photo}, dict);
    REQUIRE(hit.size() == 1);
    CHECK(hit[0].detector_id == DetectorId::D_NO_AUTH);
    CHECK(hit[0].severity == Severity::High);
    CHECK(hit[0].matched_fields == std::vector<std::string>{"photo"});

    CHECK(detect_unauthenticated_resource({authed}, dict).empty());
    CHECK(detect_unauthenticated_resource({bearer}, dict).empty());
    CHECK(detect_unauthenticated_resource({missing}, dict).empty());
}

TEST_CASE("run_passive_detectors keeps the detector order stable") {
    std::vector<HttpTransaction> txns;
    auto photo = fixtures::make_txn("img.toymaker.test", false, HttpMethod::Get, "/p", "",
                                    "\x89PNG");
    photo.resp_headers = {{"Content-Type", "image/png"}};
    finalize_transaction(photo);
    txns.push_back(photo);
    for (double ts : {1.0, 2.0}) {
        auto post = fixtures::make_txn("api.toymaker.test", false, HttpMethod::Post, "/d",
                                       "{\"ml\":1}", "", ts);
        post.req_headers.emplace_back("X-Auth-Token", "tok");
        finalize_transaction(post);
        txns.push_back(post);
    }

    const auto findings = run_passive_detectors(txns, fixtures::toy_profile());
    REQUIRE(findings.size() == 5);
    CHECK(findings[0].detector_id == DetectorId::D_CLEARTEXT);  // api.toymaker.test
    CHECK(findings[1].detector_id == DetectorId::D_CLEARTEXT);  // img.toymaker.test
    CHECK(findings[2].detector_id == DetectorId::D_PII_EXPOSURE);
    CHECK(findings[3].detector_id == DetectorId::D_TOKEN_REUSE);
    CHECK(findings[4].detector_id == DetectorId::D_NO_AUTH);  // the open photo GET
}

TEST_CASE("run_passive_detectors emits every applicable detector") {
    std::vector<HttpTransaction> txns;
    auto photo = fixtures::make_txn("img.toymaker.test", false, HttpMethod::Get, "/p", "",
                                    "\x89PNG");
    photo.resp_headers = {{"Content-Type", "image/png"}};
    finalize_transaction(photo);
    txns.push_back(photo);

    const auto findings = run_passive_detectors(txns, fixtures::toy_profile());
    CHECK(count_id(findings, DetectorId::D_CLEARTEXT) == 1);
    CHECK(count_id(findings, DetectorId::D_PII_EXPOSURE) == 1);
    CHECK(count_id(findings, DetectorId::D_NO_AUTH) == 1);
}
