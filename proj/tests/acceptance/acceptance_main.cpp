// Acceptance harness: one pass/fail line per criterion, exit code = #failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include <httplib.h>

#include "toyaudit/compliance.hpp"
#include "toyaudit/detectors.hpp"
#include "toyaudit/emulator.hpp"
#include "toyaudit/endpoint_stats.hpp"
#include "toyaudit/errors.hpp"
#include "toyaudit/jsonl.hpp"
#include "toyaudit/miner.hpp"
#include "toyaudit/pcap.hpp"
#include "toyaudit/probes.hpp"
#include "toyaudit/secret_scan.hpp"
#include "toyaudit/testbed.hpp"
#include "toyaudit/testbed_server.hpp"
#include "toyaudit/token_space.hpp"

using namespace toyaudit;

namespace {

struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw CheckFailed(msg);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// -- reduced mining geometry shared by criteria 3 and 7 ----------------------

const std::set<std::string> kPlantedTokens{"ABCD", "CDEF", "GHIJ", "KLMN", "OPAB"};
const std::set<std::string> kPlantedPrefixes{"AB", "CD", "GH", "KL", "OP"};

TestbedConfig reduced_testbed_config() {
    TestbedConfig config;
    config.listen_address = "127.0.0.1:0";
    config.alphabet = "ABCDEFGHIJKLMNOP";
    config.prefix_len = 2;
    config.suffix_len = 2;
    config.toggles.prefix_oracle = true;
    config.toggles.no_auth_photos = true;

    int n = 0;
    for (const auto& token : kPlantedTokens) {
        UserRecord user;
        user.user_id = "mined-kid-" + std::to_string(n);
        user.name = "Mined Kid " + std::to_string(n);
        user.gender = n % 2 == 0 ? "female" : "male";
        user.birthday = "2016-0" + std::to_string(1 + n) + "-15";
        user.weight_kg = 20.0 + n;
        user.height_cm = 110.0 + n;
        user.age_years = 8;
        user.photo_token = token;
        user.auth_token = "mt-" + std::to_string(n);
        user.photo_bytes = make_photo_bytes(user.user_id);
        config.planted_users.push_back(std::move(user));
        ++n;
    }
    return config;
}

// -- shared scenario captures -------------------------------------------------

struct ScenarioData {
    EmulationResult hydration;
    EmulationResult smartpet;
    EmulationResult fitness;
    EmulationResult hardened;
    std::vector<Finding> hydration_active;   // oracle + stale probe findings
    bool hardened_oracle_inconclusive{false};
    std::size_t hardened_stale_findings{999};
    std::filesystem::path dir;
};

std::optional<ScenarioData> g_shared;

OracleProbeOptions probe_options() {
    OracleProbeOptions options;
    options.known_valid_prefix = "KQ3";
    options.delay_ms = 0;
    return options;
}

const ScenarioData& shared() {
    if (g_shared) return *g_shared;

    ScenarioData data;
    data.dir = std::filesystem::temp_directory_path() /
               ("toyaudit_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(data.dir);

    {
        TestbedServer server(scenario_testbed_config(Scenario::Hydration));
        server.start();
        data.hydration = emulate_toy_session(Scenario::Hydration, server.config(),
                                             data.dir / "hydration", server.base_url());
        auto oracle = probe_response_oracle(server.base_url(), "/api/photo/{}", 50, 7,
                                            probe_options());
        for (auto& f : oracle) data.hydration_active.push_back(std::move(f));
        auto stale = probe_stale_resource(server.base_url(), [&server]() {
            const std::string old_url = server.photo_url("hydra-kid-1");
            server.overwrite_photo("hydra-kid-1", "replacement-photo-bytes");
            return old_url;
        });
        for (auto& f : stale) data.hydration_active.push_back(std::move(f));
        server.stop();
    }
    {
        TestbedServer server(scenario_testbed_config(Scenario::Hardened));
        server.start();
        data.hardened = emulate_toy_session(Scenario::Hardened, server.config(),
                                            data.dir / "hardened", server.base_url());
        try {
            probe_response_oracle(server.base_url(), "/api/photo/{}", 30, 7, probe_options());
        } catch (const OracleInconclusive&) {
            data.hardened_oracle_inconclusive = true;
        }
        data.hardened_stale_findings =
            probe_stale_resource(server.base_url(), [&server]() {
                const std::string old_url = server.photo_url("hydra-kid-1");
                server.overwrite_photo("hydra-kid-1", "replacement-photo-bytes");
                return old_url;
            }).size();
        server.stop();
    }
    data.smartpet = emulate_toy_session(Scenario::Smartpet,
                                        scenario_testbed_config(Scenario::Smartpet),
                                        data.dir / "smartpet");
    data.fitness = emulate_toy_session(Scenario::Fitness,
                                       scenario_testbed_config(Scenario::Fitness),
                                       data.dir / "fitness");

    g_shared = std::move(data);
    return *g_shared;
}

std::set<std::string> hosts_of(const std::vector<HttpTransaction>& txns) {
    std::set<std::string> hosts;
    for (const auto& t : txns) hosts.insert(t.host);
    return hosts;
}

std::map<DetectorId, int> count_by_id(const std::vector<Finding>& findings) {
    std::map<DetectorId, int> counts;
    for (const auto& f : findings) counts[f.detector_id] += 1;
    return counts;
}

// -- criteria -----------------------------------------------------------------

void criterion_1_prefix_sweep_count() {
    const auto t0 = std::chrono::steady_clock::now();
    MinerConfig config;  // default geometry: 36-character alphabet, 3-char prefix
    const std::uint64_t planned = planned_prefix_probes(config);
    require(planned == 46656,
            "planned " + std::to_string(planned) + " prefix probes, wanted 46656");
    require(seconds_since(t0) < 1.0, "dry-run planning took >= 1 s");
}

void criterion_2_estimator() {
    const auto full = estimate_runtime(101559956668416ULL, 0.2, 1, 1.0);  // 36^9 suffixes
    const double years = full.seconds / (365.25 * 86400.0);
    require(years > 1e5, "full-space estimate is only " + std::to_string(years) + " years");
    require(full.human.find("years") != std::string::npos,
            "full-space estimate not reported in years: " + full.human);

    const auto sweep = estimate_runtime(46656, 0.2, 1, 1.0);
    require(std::fabs(sweep.seconds - 9331.2) <= 0.1,
            "prefix sweep estimate " + std::to_string(sweep.seconds) + " s, wanted 9331.2 +- 0.1");

    const auto half = estimate_runtime(46656, 0.2, 1, 0.5);
    require(std::fabs(half.seconds * 2.0 - sweep.seconds) < 1e-6,
            "fraction 0.5 does not halve the estimate");
}

void criterion_3_mining_completeness() {
    const auto t0 = std::chrono::steady_clock::now();
    TestbedServer server(reduced_testbed_config());
    server.start();

    MinerConfig config;
    config.target = server.base_url();
    config.space = TokenSpace{"ABCDEFGHIJKLMNOP", 2, 2};
    config.workers = 3;
    config.seed = 5;
    const auto result = run_miner(config);
    server.stop();

    require(result.recovered_tokens == kPlantedTokens,
            "recovered " + std::to_string(result.recovered_tokens.size()) +
                " tokens, wanted exactly the 5 planted ones");
    require(result.valid_prefixes == kPlantedPrefixes, "prefix sweep found the wrong prefixes");
    const std::uint64_t bound = 256 + 5 * 256;  // 16^2 + 5 * 16^2
    require(result.probes_sent <= bound,
            std::to_string(result.probes_sent) + " probes exceed the bound " +
                std::to_string(bound));
    require(result.completion == "complete", "completion was " + result.completion);
    require(seconds_since(t0) < 60.0, "mining took >= 60 s");
}

void criterion_4_partition_property() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Geometry {
        std::string alphabet;
        int suffix_len;
    };
    const std::vector<Geometry> geometries = {
        {"ABCD", 2},                                      // 16
        {"ABCDEFGHIJKLMNOP", 2},                          // 256
        {"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789", 3},      // 46656
        {"AB", 16},                                       // 65536
    };
    for (const auto& geo : geometries) {
        TokenSpace space{geo.alphabet, 1, geo.suffix_len};
        const std::uint64_t universe = suffix_universe(space);
        require(universe <= 65536, "geometry exceeds the 65536 cap");
        const std::string prefix(1, geo.alphabet[0]);

        for (int workers : {1, 2, 3, 8}) {
            auto streams = partition_tokenspace(space, prefix, workers, 99);
            std::set<std::string> all;
            std::uint64_t total = 0;
            std::vector<std::vector<std::string>> shares;
            for (auto& stream : streams) {
                shares.push_back(stream.collect());
                total += shares.back().size();
                for (const auto& suffix : shares.back())
                    require(all.insert(suffix).second,
                            "duplicate suffix across workers: " + suffix);
            }
            require(total == universe && all.size() == universe,
                    "workers cover " + std::to_string(all.size()) + " of " +
                        std::to_string(universe) + " suffixes");

            auto again = partition_tokenspace(space, prefix, workers, 99);
            for (int w = 0; w < workers; ++w)
                require(again[static_cast<std::size_t>(w)].collect() ==
                            shares[static_cast<std::size_t>(w)],
                        "partition is not deterministic under a fixed seed");
        }
    }
    require(seconds_since(t0) < 10.0, "partition checks took >= 10 s");
}

void criterion_5_detector_soundness() {
    const auto& data = shared();

    const auto passive = run_passive_detectors(data.hydration.txns, data.hydration.profile);
    const auto counts = count_by_id(passive);
    for (DetectorId id : {DetectorId::D_CLEARTEXT, DetectorId::D_PII_EXPOSURE,
                          DetectorId::D_TOKEN_REUSE, DetectorId::D_NO_AUTH,
                          DetectorId::D_PII_THIRD_PARTY}) {
        require(counts.count(id) && counts.at(id) >= 1,
                "hydration passive suite missing " + detector_name(id));
    }
    const auto active = count_by_id(data.hydration_active);
    require(active.count(DetectorId::D_ORACLE) == 1, "active probes missing D_ORACLE");
    require(active.count(DetectorId::D_STALE_RESOURCE) == 1,
            "active probes missing D_STALE_RESOURCE");

    const auto hardened = run_passive_detectors(data.hardened.txns, data.hardened.profile);
    require(hardened.empty(),
            "hardened scenario produced " + std::to_string(hardened.size()) + " findings");
    require(data.hardened_oracle_inconclusive, "hardened oracle probe was not inconclusive");
    require(data.hardened_stale_findings == 0, "hardened stale probe produced findings");

    const auto fitness = run_passive_detectors(data.fitness.txns, data.fitness.profile);
    require(fitness.empty(),
            "fitness scenario produced " + std::to_string(fitness.size()) + " findings");
}

void criterion_6_scenario_fidelity() {
    const auto& data = shared();
    const struct {
        const EmulationResult* result;
        std::size_t hosts;
    } expectations[] = {{&data.hydration, 12}, {&data.smartpet, 6}, {&data.fitness, 3}};

    for (const auto& expect : expectations) {
        const auto hosts = hosts_of(expect.result->txns);
        require(hosts.size() == expect.hosts,
                expect.result->profile.device_name + " contacted " +
                    std::to_string(hosts.size()) + " hosts, wanted " +
                    std::to_string(expect.hosts));

        const auto stats = endpoint_stats(expect.result->txns, expect.result->profile);
        double sum = 0.0;
        for (const auto& st : stats) sum += st.byte_fraction;
        require(std::fabs(sum - 1.0) <= 1e-9,
                expect.result->profile.device_name + " byte fractions sum to " +
                    std::to_string(sum));
    }
}

void criterion_7_oracle_behavior() {
    TestbedServer server(reduced_testbed_config());
    server.start();
    httplib::Client client(server.base_url());
    const TokenSpace space{"ABCDEFGHIJKLMNOP", 2, 2};

    for (std::uint64_t i = 0; i < prefix_universe(space); ++i) {
        const std::string prefix = prefix_at(space, i);
        auto res = client.Get("/api/photo/" + prefix);
        require(static_cast<bool>(res), "no response probing prefix " + prefix);
        const int expected = kPlantedPrefixes.count(prefix) ? 301 : 404;
        require(res->status == expected,
                "prefix " + prefix + " answered " + std::to_string(res->status) + ", wanted " +
                    std::to_string(expected));
    }
    server.stop();
}

void criterion_8_compliance_mapping() {
    const auto& data = shared();
    auto findings = run_passive_detectors(data.hydration.txns, data.hydration.profile);
    for (const auto& f : data.hydration_active) findings.push_back(f);

    const auto catalog = default_clause_catalog();
    const auto violations = map_findings(findings, catalog);

    for (const std::string clause_id : {"COPPA-312.8", "COPPA-312.10", "PP-SSL"}) {
        const Violation* violation = nullptr;
        for (const auto& v : violations) {
            if (v.clause_id == clause_id) violation = &v;
        }
        require(violation != nullptr, "no violation recorded for " + clause_id);

        const ComplianceClause* clause = nullptr;
        for (const auto& c : catalog) {
            if (c.clause_id == clause_id) clause = &c;
        }
        require(clause != nullptr, "clause missing from catalog: " + clause_id);

        // supporting findings are exactly the ones whose detector triggers the clause
        std::vector<std::size_t> expected;
        for (std::size_t i = 0; i < findings.size(); ++i) {
            for (DetectorId id : clause->triggering_detectors) {
                if (findings[i].detector_id == id) {
                    expected.push_back(i);
                    break;
                }
            }
        }
        require(violation->finding_indices == expected,
                clause_id + " cites the wrong supporting findings");
    }

    // a lone stale-resource finding implicates the retention clause and nothing else
    Finding stale;
    stale.detector_id = DetectorId::D_STALE_RESOURCE;
    stale.severity = Severity::High;
    stale.summary = "synthetic";
    const auto retention = map_findings({stale}, catalog);
    require(retention.size() == 1 && retention[0].clause_id == "COPPA-312.10" &&
                retention[0].finding_indices == std::vector<std::size_t>{0},
            "D_STALE_RESOURCE does not map to exactly {COPPA-312.10}");
}

void criterion_9_static_scan() {
    const auto& data = shared();
    require(!data.smartpet.source_fixture.empty(), "smartpet emitted no source fixture");

    const auto findings = scan_secrets(data.smartpet.source_fixture);
    require(findings.size() == 2,
            "scan found " + std::to_string(findings.size()) + " secrets, wanted 2");
    const int lines[] = {5, 6};
    for (int i = 0; i < 2; ++i) {
        const auto& f = findings[static_cast<std::size_t>(i)];
        require(f.detector_id == DetectorId::D_SECRET_CONSTANT, "wrong detector id");
        require(f.evidence.size() == 1 && f.evidence[0].kind == Evidence::Kind::FileRef,
                "secret finding lacks file evidence");
        require(f.evidence[0].file.find("PurchaseConstants.java") != std::string::npos,
                "evidence points at the wrong file: " + f.evidence[0].file);
        require(f.evidence[0].line == lines[i],
                "evidence line " + std::to_string(f.evidence[0].line) + ", wanted " +
                    std::to_string(lines[i]));
        require(f.matched_fields.size() == 1 &&
                    f.matched_fields[0].find("_INAPP_SECRET") != std::string::npos,
                "finding does not name an INAPP_SECRET constant");
    }
}

void criterion_10_pcap_jsonl_parity() {
    const auto& data = shared();
    for (const EmulationResult* result :
         {&data.hydration, &data.smartpet, &data.fitness, &data.hardened}) {
        const auto from_jsonl = load_transaction_log(result->jsonl_path.string());
        const auto from_pcap = load_pcap(result->pcap_path.string());
        require(transaction_multisets_equal(from_jsonl, from_pcap.transactions, 1e-3),
                result->profile.device_name + ": pcap and jsonl disagree");
    }
}

void criterion_11_cross_device_overlap() {
    const auto& data = shared();
    const std::vector<DeviceCapture> captures = {
        {data.hydration.profile.device_name, data.hydration.txns},
        {data.smartpet.profile.device_name, data.smartpet.txns},
        {data.fitness.profile.device_name, data.fitness.txns},
    };
    const std::vector<DeviceProfile> profiles = {data.hydration.profile, data.smartpet.profile,
                                                 data.fitness.profile};
    const auto overlaps = cross_device_overlap(captures, profiles);

    bool analytics_on_all_three = false;
    for (const auto& overlap : overlaps) {
        if (overlap.devices.size() == 3 &&
            (overlap.service.find("analytics") != std::string::npos ||
             overlap.service == "crashlytics")) {
            analytics_on_all_three = true;
        }
    }
    require(analytics_on_all_three, "no analytics service is contacted by all 3 devices");
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        const char* title;
        std::function<void()> body;
    };
    const std::vector<Criterion> criteria = {
        {1, "prefix-sweep dry run plans exactly 46656 probes", criterion_1_prefix_sweep_count},
        {2, "runtime estimator matches the analytic figures", criterion_2_estimator},
        {3, "miner recovers all planted tokens at reduced geometry",
         criterion_3_mining_completeness},
        {4, "worker partitions are disjoint, complete, deterministic",
         criterion_4_partition_property},
        {5, "detectors fire on hydration, stay silent on hardened and fitness",
         criterion_5_detector_soundness},
        {6, "scenario captures show 12/6/3 hosts with unit byte fractions",
         criterion_6_scenario_fidelity},
        {7, "oracle answers 301 on planted prefixes, 404 elsewhere, exhaustively",
         criterion_7_oracle_behavior},
        {8, "hydration violations cover COPPA-312.8, COPPA-312.10, PP-SSL",
         criterion_8_compliance_mapping},
        {9, "static scan flags exactly the two planted secret constants",
         criterion_9_static_scan},
        {10, "pcap and jsonl captures parse to equal transaction multisets",
         criterion_10_pcap_jsonl_parity},
        {11, "a shared analytics service appears across all three devices",
         criterion_11_cross_device_overlap},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        try {
            criterion.body();
            std::printf("PASS %2d: %s\n", criterion.number, criterion.title);
        } catch (const std::exception& e) {
            ++failures;
            std::printf("FAIL %2d: %s (%s)\n", criterion.number, criterion.title, e.what());
        }
        std::fflush(stdout);
    }

    if (g_shared) {
        std::error_code ec;
        std::filesystem::remove_all(g_shared->dir, ec);
    }
    std::printf("%zu/11 criteria passed\n", criteria.size() - static_cast<std::size_t>(failures));
    return failures;
}
