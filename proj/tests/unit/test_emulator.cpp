#include <doctest.h>

#include <filesystem>
#include <set>

#include "toyaudit/detectors.hpp"
#include "toyaudit/emulator.hpp"
#include "toyaudit/errors.hpp"
#include "toyaudit/jsonl.hpp"
#include "toyaudit/pcap.hpp"
#include "toyaudit/testbed_server.hpp"

using namespace toyaudit;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int n = 0;
        path = std::filesystem::temp_directory_path() /
               ("toyaudit_emu_" + std::to_string(++n));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

std::set<std::string> hosts_of(const std::vector<HttpTransaction>& txns) {
    std::set<std::string> hosts;
    for (const auto& t : txns) hosts.insert(t.host);
    return hosts;
}

}  // namespace

TEST_CASE("scenario names round-trip") {
    for (Scenario s : {Scenario::Hydration, Scenario::Smartpet, Scenario::Fitness,
                       Scenario::Hardened}) {
        CHECK(scenario_from_name(scenario_name(s)) == s);
    }
    CHECK(scenario_name(Scenario::Hydration) == "hydration");
    CHECK_THROWS_AS(scenario_from_name("teddy"), InvalidParameter);
}

TEST_CASE("scenario profiles separate first and third party") {
    const auto hydration = scenario_profile(Scenario::Hydration);
    CHECK(hydration.device_name == "hydration-bottle");
    CHECK(classify_party("api.toymaker.test", hydration) == Party::FirstParty);
    CHECK(classify_party("www.google-analytics.test", hydration) == Party::ThirdParty);

    const auto fitness = scenario_profile(Scenario::Fitness);
    CHECK(fitness.device_name == "fitness-band");
    CHECK(classify_party("api.fitband.test", fitness) == Party::FirstParty);
}

TEST_CASE("smartpet emulation is self-contained and labeled") {
    TempDir dir;
    const auto result =
        emulate_toy_session(Scenario::Smartpet, scenario_testbed_config(Scenario::Smartpet),
                            dir.path);

    CHECK(hosts_of(result.txns).size() == 6);
    CHECK(std::filesystem::exists(result.jsonl_path));
    CHECK(std::filesystem::exists(result.pcap_path));
    CHECK(std::filesystem::exists(result.labels_path));
    CHECK(std::filesystem::exists(result.profile_path));
    REQUIRE_FALSE(result.source_fixture.empty());
    CHECK(std::filesystem::exists(result.source_fixture / "PurchaseConstants.java"));

    // what lands on disk is what came back
    const auto reread = load_transaction_log(result.jsonl_path.string());
    CHECK(transaction_multisets_equal(reread, result.txns, 1e-6));

    // pcap agrees with jsonl up to write/parse round-tripping
    const auto from_pcap = load_pcap(result.pcap_path.string());
    CHECK(transaction_multisets_equal(from_pcap.transactions, result.txns, 1e-3));
    CHECK(from_pcap.warnings.empty());
}

TEST_CASE("fitness emulation is the all-TLS negative control") {
    TempDir dir;
    const auto result =
        emulate_toy_session(Scenario::Fitness, scenario_testbed_config(Scenario::Fitness),
                            dir.path);
    CHECK(hosts_of(result.txns).size() == 3);
    for (const auto& txn : result.txns) CHECK(txn.tls);
    CHECK(run_passive_detectors(result.txns, result.profile).empty());
    CHECK(result.source_fixture.empty());
}

TEST_CASE("hydration emulation needs its testbed") {
    TempDir dir;
    CHECK_THROWS_AS(
        emulate_toy_session(Scenario::Hydration, scenario_testbed_config(Scenario::Hydration),
                            dir.path),
        ScenarioServerUnavailable);
    // and a live but wrong server is also rejected via the health check
    CHECK_THROWS_AS(
        emulate_toy_session(Scenario::Hydration, scenario_testbed_config(Scenario::Hydration),
                            dir.path, "http://127.0.0.1:1"),
        ScenarioServerUnavailable);
}

TEST_CASE("hydration emulation against a live testbed covers 12 hosts") {
    TestbedServer server(scenario_testbed_config(Scenario::Hydration));
    server.start();
    TempDir dir;
    const auto result =
        emulate_toy_session(Scenario::Hydration, server.config(), dir.path, server.base_url());
    server.stop();

    CHECK(hosts_of(result.txns).size() == 12);
    // the recorded capture replays the planted vulnerabilities
    const auto findings = run_passive_detectors(result.txns, result.profile);
    std::set<DetectorId> ids;
    for (const auto& f : findings) ids.insert(f.detector_id);
    CHECK(ids.count(DetectorId::D_CLEARTEXT) == 1);
    CHECK(ids.count(DetectorId::D_PII_EXPOSURE) == 1);
    CHECK(ids.count(DetectorId::D_TOKEN_REUSE) == 1);
    CHECK(ids.count(DetectorId::D_NO_AUTH) == 1);
    CHECK(ids.count(DetectorId::D_PII_THIRD_PARTY) == 1);
}

TEST_CASE("hardened emulation is finding-free end to end") {
    TestbedServer server(scenario_testbed_config(Scenario::Hardened));
    server.start();
    TempDir dir;
    const auto result =
        emulate_toy_session(Scenario::Hardened, server.config(), dir.path, server.base_url());
    server.stop();

    CHECK(run_passive_detectors(result.txns, result.profile).empty());
    for (const auto& txn : result.txns) CHECK(txn.tls);
}
