#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "toyaudit/device_profile.hpp"
#include "toyaudit/http_transaction.hpp"
#include "toyaudit/testbed.hpp"

namespace toyaudit {

// Hardened is the hydration topology with every vulnerability toggle off —
// the zero-findings negative control.
enum class Scenario { Hydration, Smartpet, Fitness, Hardened };

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario scenario);

// The testbed config each scenario assumes on its first-party server.
// Smartpet/fitness synthesize all traffic and never contact a server.
TestbedConfig scenario_testbed_config(Scenario scenario);

DeviceProfile scenario_profile(Scenario scenario);

struct EmulationResult {
    std::vector<HttpTransaction> txns;
    DeviceProfile profile;
    std::filesystem::path jsonl_path;
    std::filesystem::path pcap_path;
    std::filesystem::path labels_path;
    std::filesystem::path profile_path;
    std::filesystem::path source_fixture;  // smartpet decompiled-source tree, else empty
};

// Drives one recorded toy session and writes capture.jsonl / capture.pcap /
// labels.json / profile.json under out_dir. Hydration and hardened need a
// running testbed at target_url (configured per scenario_testbed_config);
// ScenarioServerUnavailable otherwise.
EmulationResult emulate_toy_session(Scenario scenario, const TestbedConfig& config,
                                    const std::filesystem::path& out_dir,
                                    const std::string& target_url = "");

}  // namespace toyaudit
