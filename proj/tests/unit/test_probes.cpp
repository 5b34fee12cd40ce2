#include <doctest.h>

#include "toyaudit/errors.hpp"
#include "toyaudit/probes.hpp"
#include "toyaudit/testbed.hpp"
#include "toyaudit/testbed_server.hpp"

using namespace toyaudit;

namespace {

TestbedConfig oracle_testbed(bool leaky) {
    TestbedConfig config;
    config.listen_address = "127.0.0.1:0";
    config.toggles.prefix_oracle = leaky;
    config.toggles.retain_old_photos = leaky;
    config.toggles.no_auth_photos = true;  // stale probe refetches without creds

    UserRecord user;
    user.user_id = "kid-1";
    user.name = "Planted Kid";
    user.gender = "female";
    user.birthday = "2016-11-02";
    user.weight_kg = 22.0;
    user.height_cm = 112.0;
    user.age_years = 9;
    user.photo_token = "KQ3FC0Z1MVXB";
    user.auth_token = "tb-planted-0001";
    user.photo_bytes = make_photo_bytes("kid-1");
    config.planted_users = {user};
    return config;
}

OracleProbeOptions fast_options() {
    OracleProbeOptions options;
    options.known_valid_prefix = "KQ3";
    options.delay_ms = 0;
    return options;
}

}  // namespace

TEST_CASE("oracle probe flags split status classes on the leaky server") {
    TestbedServer server(oracle_testbed(true));
    server.start();
    const auto findings =
        probe_response_oracle(server.base_url(), "/api/photo/{}", 30, 7, fast_options());
    server.stop();

    REQUIRE(findings.size() == 1);
    const auto& f = findings[0];
    CHECK(f.detector_id == DetectorId::D_ORACLE);
    CHECK(f.severity == Severity::Medium);
    // one exemplar probe per status class (301 and 404)
    REQUIRE(f.evidence.size() == 2);
    CHECK(f.evidence[0].kind == Evidence::Kind::Probe);
    CHECK(f.matched_fields == std::vector<std::string>{"301", "404"});
    CHECK(f.summary.find("status classes") != std::string::npos);
}

TEST_CASE("hardened server yields OracleInconclusive, not a finding") {
    TestbedServer server(oracle_testbed(false));
    server.start();
    CHECK_THROWS_AS(
        probe_response_oracle(server.base_url(), "/api/photo/{}", 20, 7, fast_options()),
        OracleInconclusive);
    server.stop();
}

TEST_CASE("oracle probe validates arguments and transport") {
    OracleProbeOptions fast;
    fast.delay_ms = 0;
    fast.timeout_s = 1;
    CHECK_THROWS_AS(probe_response_oracle("http://127.0.0.1:1", "/api/photo/{}", 0, 7),
                    InvalidParameter);
    CHECK_THROWS_AS(probe_response_oracle("http://127.0.0.1:1", "/no-placeholder", 1, 7, fast),
                    InvalidParameter);
    CHECK_THROWS_AS(probe_response_oracle("http://127.0.0.1:1", "/api/photo/{}", 1, 7, fast),
                    TargetUnreachable);
}

TEST_CASE("stale probe sees retained photos on the sloppy server") {
    TestbedServer server(oracle_testbed(true));  // retain_old_photos on
    server.start();
    const std::string old_url = server.photo_url("kid-1");
    const auto findings = probe_stale_resource(server.base_url(), [&]() {
        server.overwrite_photo("kid-1", "fresh-bytes");
        return old_url;
    });
    server.stop();

    REQUIRE(findings.size() == 1);
    CHECK(findings[0].detector_id == DetectorId::D_STALE_RESOURCE);
    CHECK(findings[0].severity == Severity::High);
    REQUIRE(findings[0].evidence.size() == 1);
    CHECK(findings[0].evidence[0].note.find(old_url) != std::string::npos);
}

TEST_CASE("stale probe stays quiet when old URLs are retired") {
    TestbedServer server(oracle_testbed(false));  // retain off
    server.start();
    const std::string old_url = server.photo_url("kid-1");
    const auto findings = probe_stale_resource(server.base_url(), [&]() {
        server.overwrite_photo("kid-1", "fresh-bytes");
        return old_url;
    });
    server.stop();
    CHECK(findings.empty());
}

TEST_CASE("stale probe needs some URL to check") {
    CHECK_THROWS_AS(probe_stale_resource("http://127.0.0.1:1", nullptr, ""), InvalidParameter);
}
