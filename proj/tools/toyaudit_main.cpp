// toyaudit: one binary for the testbed, the emulator, the passive analyzers,
// the miner, the estimator, the secret scanner, and the overlap report.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "toyaudit/atomic_file.hpp"
#include "toyaudit/compliance.hpp"
#include "toyaudit/detectors.hpp"
#include "toyaudit/device_profile.hpp"
#include "toyaudit/emulator.hpp"
#include "toyaudit/endpoint_stats.hpp"
#include "toyaudit/errors.hpp"
#include "toyaudit/jsonl.hpp"
#include "toyaudit/miner.hpp"
#include "toyaudit/pcap.hpp"
#include "toyaudit/secret_scan.hpp"
#include "toyaudit/testbed.hpp"
#include "toyaudit/testbed_server.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("TOYAUDIT_LOG");
    if (!env) return LogLevel::Info;
    const std::string v(env);
    if (v == "quiet") return LogLevel::Quiet;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::Info) std::cerr << "[toyaudit] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::Debug) std::cerr << "[toyaudit] " << msg << "\n";
}

bool looks_like_pcap(const std::string& bytes) {
    if (bytes.size() < 4) return false;
    const unsigned char* b = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t le = static_cast<std::uint32_t>(b[0]) |
                             (static_cast<std::uint32_t>(b[1]) << 8) |
                             (static_cast<std::uint32_t>(b[2]) << 16) |
                             (static_cast<std::uint32_t>(b[3]) << 24);
    return le == 0xa1b2c3d4u || le == 0xd4c3b2a1u || le == 0xa1b23c4du || le == 0x4d3cb2a1u;
}

// Captures come in as either .pcap or .jsonl; the magic decides, not the name.
std::vector<toyaudit::HttpTransaction> load_capture_any(const std::string& path) {
    const std::string bytes = toyaudit::read_file(path);
    if (looks_like_pcap(bytes)) {
        auto parsed = toyaudit::parse_pcap(bytes);
        for (const auto& w : parsed.warnings) log_debug("pcap: " + w);
        return std::move(parsed.transactions);
    }
    return toyaudit::parse_transaction_log(bytes);
}

std::atomic<bool> g_interrupted{false};

extern "C" void handle_signal(int) { g_interrupted.store(true); }

int cmd_serve(const std::string& config_path) {
    toyaudit::TestbedConfig config;
    if (!config_path.empty()) config = toyaudit::load_testbed_config(config_path);
    toyaudit::validate_testbed_config(config);
    toyaudit::TestbedServer server(std::move(config));
    server.start();
    std::cout << "listening on " << server.base_url() << std::endl;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_interrupted.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    log_info("shutting down after " + std::to_string(server.request_count()) + " requests");
    server.stop();
    return kExitOk;
}

int cmd_emulate(const std::string& scenario_name, const std::string& out_dir,
                const std::string& config_path, const std::string& target) {
    const auto scenario = toyaudit::scenario_from_name(scenario_name);
    toyaudit::TestbedConfig config = config_path.empty()
                                         ? toyaudit::scenario_testbed_config(scenario)
                                         : toyaudit::load_testbed_config(config_path);
    std::string url = target;
    std::optional<toyaudit::TestbedServer> server;
    const bool needs_server = scenario == toyaudit::Scenario::Hydration ||
                              scenario == toyaudit::Scenario::Hardened;
    if (needs_server && url.empty()) {
        server.emplace(config);
        server->start();
        url = server->base_url();
        log_debug("embedded testbed on " + url);
    }
    const auto result = toyaudit::emulate_toy_session(scenario, config, out_dir, url);
    if (server) server->stop();
    std::cout << "jsonl: " << result.jsonl_path.string() << "\n"
              << "pcap: " << result.pcap_path.string() << "\n"
              << "labels: " << result.labels_path.string() << "\n"
              << "profile: " << result.profile_path.string() << "\n";
    if (!result.source_fixture.empty())
        std::cout << "source fixture: " << result.source_fixture.string() << "\n";
    log_info(std::to_string(result.txns.size()) + " transactions emulated");
    return kExitOk;
}

int cmd_analyze(const std::string& capture_path, const std::string& profile_path,
                const std::string& catalog_path, const std::string& out_path,
                const std::string& format) {
    const auto txns = load_capture_any(capture_path);
    const auto profile = toyaudit::load_device_profile(profile_path);
    const auto catalog = catalog_path.empty() ? toyaudit::default_clause_catalog()
                                              : toyaudit::load_clause_catalog(catalog_path);
    toyaudit::AuditReport report;
    report.device_name = profile.device_name;
    report.capture_summary = toyaudit::endpoint_stats(txns, profile);
    report.findings = toyaudit::run_passive_detectors(txns, profile);
    report.violations = toyaudit::map_findings(report.findings, catalog);
    report.generated_at = toyaudit::current_timestamp_utc();
    const auto fmt = format == "markdown" ? toyaudit::ReportFormat::Markdown
                                          : toyaudit::ReportFormat::Json;
    toyaudit::write_file_atomic(out_path, toyaudit::render_report(report, fmt, catalog));
    std::cout << report.findings.size() << " finding(s), " << report.violations.size()
              << " clause violation(s); report written to " << out_path << "\n";
    return report.findings.empty() ? kExitOk : kExitFindings;
}

int cmd_mine(toyaudit::MinerConfig config, bool dry_run) {
    if (dry_run) {
        std::cout << "planned prefix probes: " << toyaudit::planned_prefix_probes(config)
                  << "\n";
        return kExitOk;
    }
    const auto result = toyaudit::run_miner(config);
    std::cout << toyaudit::mining_result_to_json(result) << "\n";
    return kExitOk;
}

int cmd_estimate(std::uint64_t probes, double rtt_ms, int workers, double fraction) {
    const auto est = toyaudit::estimate_runtime(probes, rtt_ms / 1000.0, workers, fraction);
    char seconds[64];
    std::snprintf(seconds, sizeof(seconds), "%.1f s", est.seconds);
    if (est.human == seconds)
        std::cout << est.human << "\n";
    else
        std::cout << seconds << " (" << est.human << ")\n";
    return kExitOk;
}

int cmd_scan(const std::string& source_dir, const std::string& rules_path) {
    const auto rules = rules_path.empty() ? toyaudit::default_secret_rules()
                                          : toyaudit::load_secret_rules(rules_path);
    std::vector<std::string> warnings;
    const auto findings = toyaudit::scan_secrets(source_dir, rules, &warnings);
    for (const auto& w : warnings) log_info("scan: " + w);
    std::cout << toyaudit::findings_to_json(findings) << "\n";
    return findings.empty() ? kExitOk : kExitFindings;
}

int cmd_overlap(const std::vector<std::string>& capture_paths,
                const std::vector<std::string>& profile_paths) {
    if (capture_paths.size() != profile_paths.size()) {
        std::cerr << "overlap: need one profile per capture ("
                  << capture_paths.size() << " captures, " << profile_paths.size()
                  << " profiles)\n";
        return kExitUsage;
    }
    std::vector<toyaudit::DeviceCapture> captures;
    std::vector<toyaudit::DeviceProfile> profiles;
    for (std::size_t i = 0; i < capture_paths.size(); ++i) {
        auto profile = toyaudit::load_device_profile(profile_paths[i]);
        captures.push_back({profile.device_name, load_capture_any(capture_paths[i])});
        profiles.push_back(std::move(profile));
    }
    const auto overlaps = toyaudit::cross_device_overlap(captures, profiles);
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& o : overlaps)
        out.push_back({{"service", o.service}, {"devices", o.devices}, {"hosts", o.hosts}});
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"smart-toy traffic security audit toolkit"};
    app.set_version_flag("--version", "toyaudit 0.1.0");
    app.require_subcommand(1);

    // testbed serve
    auto* testbed = app.add_subcommand("testbed", "mock toy-vendor server");
    testbed->require_subcommand(1);
    auto* serve = testbed->add_subcommand("serve", "run the server until interrupted");
    std::string serve_config;
    serve->add_option("--config", serve_config, "flat key=value config file")
        ->check(CLI::ExistingFile);

    // emulate
    auto* emulate = app.add_subcommand("emulate", "record one scripted toy session");
    std::string scenario;
    std::string emulate_out;
    std::string emulate_config;
    std::string emulate_target;
    emulate->add_option("--scenario", scenario, "hydration|smartpet|fitness|hardened")
        ->required()
        ->check(CLI::IsMember({"hydration", "smartpet", "fitness", "hardened"}));
    emulate->add_option("--out", emulate_out, "output directory")->required();
    emulate->add_option("--config", emulate_config, "testbed config override")
        ->check(CLI::ExistingFile);
    emulate->add_option("--target", emulate_target,
                        "existing testbed url (default: embedded server)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "passive detectors + compliance report");
    std::string capture_path, profile_path, catalog_path, report_out;
    std::string format = "json";
    analyze->add_option("--capture", capture_path, "pcap or jsonl capture")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--profile", profile_path, "device profile json")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--catalog", catalog_path, "clause catalog json (default: built-in)")
        ->check(CLI::ExistingFile);
    analyze->add_option("--out", report_out, "report output path")->required();
    analyze->add_option("--format", format, "json|markdown")
        ->check(CLI::IsMember({"json", "markdown"}));

    // mine
    auto* mine = app.add_subcommand("mine", "two-phase token mining against a testbed");
    toyaudit::MinerConfig miner;
    bool dry_run = false;
    std::uint64_t budget = 0;
    int delay_ms = 0;
    mine->add_option("--target", miner.target, "base url of the oracle server");
    mine->add_option("--alphabet", miner.space.alphabet, "token alphabet (default A-Z0-9)");
    mine->add_option("--prefix-len", miner.space.prefix_len, "token prefix length");
    mine->add_option("--suffix-len", miner.space.suffix_len, "token suffix length");
    mine->add_option("--workers", miner.workers, "parallel suffix workers")
        ->check(CLI::PositiveNumber);
    mine->add_option("--seed", miner.seed, "permutation seed");
    mine->add_option("--budget", budget, "suffix probes per prefix (default: unlimited)");
    mine->add_option("--fraction", miner.target_fraction, "stop after this share of tokens")
        ->check(CLI::Range(0.0, 1.0));
    mine->add_option("--known-planted", miner.known_planted_count,
                     "planted-token count for fraction mode");
    mine->add_option("--delay", delay_ms, "inter-request delay, ms");
    mine->add_flag("--i-own-this-target", miner.allow_non_loopback,
                   "required for anything that is not loopback");
    mine->add_flag("--dry-run", dry_run, "print the planned prefix-probe count and exit");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "analytic mining-runtime estimate");
    std::uint64_t probes = 0;
    double rtt_ms = 0.0;
    int workers = 1;
    double fraction = 1.0;
    estimate->add_option("--probes", probes, "total probes")->required();
    estimate->add_option("--rtt", rtt_ms, "round-trip time per probe, ms")->required();
    estimate->add_option("--workers", workers, "parallel workers")->check(CLI::PositiveNumber);
    estimate->add_option("--fraction", fraction, "target fraction of the space")
        ->check(CLI::Range(0.0, 1.0));

    // scan
    auto* scan = app.add_subcommand("scan", "static secret-constant scan");
    std::string source_dir, rules_path;
    scan->add_option("--source", source_dir, "source tree root")
        ->required()
        ->check(CLI::ExistingDirectory);
    scan->add_option("--rules", rules_path, "rule config (default: built-in)")
        ->check(CLI::ExistingFile);

    // overlap
    auto* overlap = app.add_subcommand("overlap", "third-party services shared across devices");
    std::vector<std::string> capture_list, profile_list;
    overlap->add_option("--captures", capture_list, "comma-separated capture files")
        ->required()
        ->delimiter(',');
    overlap->add_option("--profiles", profile_list, "comma-separated profile files")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return kExitUsage;
    }

    try {
        if (serve->parsed()) return cmd_serve(serve_config);
        if (emulate->parsed())
            return cmd_emulate(scenario, emulate_out, emulate_config, emulate_target);
        if (analyze->parsed())
            return cmd_analyze(capture_path, profile_path, catalog_path, report_out, format);
        if (mine->parsed()) {
            if (budget > 0) {
                miner.unlimited_budget = false;
                miner.suffix_budget = budget;
            }
            miner.request_delay_ms = delay_ms;
            if (!dry_run && miner.target.empty()) {
                std::cerr << "mine: --target is required unless --dry-run\n";
                return kExitUsage;
            }
            return cmd_mine(miner, dry_run);
        }
        if (estimate->parsed()) return cmd_estimate(probes, rtt_ms, workers, fraction);
        if (scan->parsed()) return cmd_scan(source_dir, rules_path);
        if (overlap->parsed()) return cmd_overlap(capture_list, profile_list);
    } catch (const toyaudit::NonLoopbackTarget& e) {
        std::cerr << "refusing: " << e.what() << " (pass --i-own-this-target if you do)\n";
        return kExitUsage;
    } catch (const toyaudit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
