#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace toyaudit {

enum class Party { FirstParty, ThirdParty, Unknown };

std::string party_name(Party p);

struct ThirdPartyService {
    std::string pattern;  // exact host or suffix wildcard ("*.flurry.test")
    std::string service;  // label, e.g. "flurry-analytics"

    bool operator==(const ThirdPartyService&) const = default;
};

// Which hosts belong to the toy maker and which to known third parties.
// Patterns are exact hostnames or "*.suffix" wildcards.
struct DeviceProfile {
    std::string device_name;
    std::vector<std::string> first_party_hosts;
    std::vector<ThirdPartyService> third_party_hosts;
};

// Suffix-wildcard match: "*.example.com" matches "a.example.com" and
// "a.b.example.com" but not "example.com" itself.
bool host_matches_pattern(const std::string& host, const std::string& pattern);

Party classify_party(const std::string& host, const DeviceProfile& profile);

// Returns the service label for a third-party host, or "" if none matches.
std::string third_party_service(const std::string& host, const DeviceProfile& profile);

DeviceProfile parse_device_profile(const std::string& json_text);
std::string serialize_device_profile(const DeviceProfile& profile);
DeviceProfile load_device_profile(const std::filesystem::path& path);
void save_device_profile(const std::filesystem::path& path, const DeviceProfile& profile);

}  // namespace toyaudit
