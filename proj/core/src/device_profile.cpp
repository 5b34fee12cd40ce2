#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "toyaudit/device_profile.hpp"
#include "toyaudit/errors.hpp"

namespace toyaudit {

std::string party_name(Party p) {
    switch (p) {
        case Party::FirstParty: return "first_party";
        case Party::ThirdParty: return "third_party";
        case Party::Unknown: return "unknown";
    }
    return "unknown";
}

bool host_matches_pattern(const std::string& host, const std::string& pattern) {
    if (pattern.size() > 1 && pattern[0] == '*' && pattern[1] == '.') {
        const std::string suffix = pattern.substr(1);  // keep the dot
        return host.size() > suffix.size() &&
               host.compare(host.size() - suffix.size(), suffix.size(), suffix) == 0;
    }
    return host == pattern;
}

Party classify_party(const std::string& host, const DeviceProfile& profile) {
    for (const auto& pat : profile.first_party_hosts) {
        if (host_matches_pattern(host, pat)) return Party::FirstParty;
    }
    for (const auto& svc : profile.third_party_hosts) {
        if (host_matches_pattern(host, svc.pattern)) return Party::ThirdParty;
    }
    return Party::Unknown;
}

std::string third_party_service(const std::string& host, const DeviceProfile& profile) {
    for (const auto& svc : profile.third_party_hosts) {
        if (host_matches_pattern(host, svc.pattern)) return svc.service;
    }
    return "";
}

DeviceProfile parse_device_profile(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("device profile is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InvalidConfig("device profile must be a JSON object");

    DeviceProfile profile;
    if (!doc.contains("device_name") || !doc["device_name"].is_string())
        throw InvalidConfig("device profile needs a string device_name");
    profile.device_name = doc["device_name"].get<std::string>();

    if (doc.contains("first_party_hosts")) {
        for (const auto& item : doc["first_party_hosts"]) {
            if (!item.is_string()) throw InvalidConfig("first_party_hosts entries must be strings");
            profile.first_party_hosts.push_back(item.get<std::string>());
        }
    }
    if (doc.contains("third_party_hosts")) {
        for (const auto& item : doc["third_party_hosts"]) {
            if (!item.is_object() || !item.contains("pattern") || !item.contains("service"))
                throw InvalidConfig("third_party_hosts entries need pattern and service");
            profile.third_party_hosts.push_back(ThirdPartyService{
                item["pattern"].get<std::string>(), item["service"].get<std::string>()});
        }
    }

    // the same pattern must not appear on both sides
    for (const auto& fp : profile.first_party_hosts) {
        for (const auto& tp : profile.third_party_hosts) {
            if (fp == tp.pattern)
                throw InvalidConfig("pattern listed as both first and third party: " + fp);
        }
    }
    return profile;
}

std::string serialize_device_profile(const DeviceProfile& profile) {
    nlohmann::ordered_json doc;
    doc["device_name"] = profile.device_name;
    doc["first_party_hosts"] = profile.first_party_hosts;
    auto& third = doc["third_party_hosts"] = nlohmann::ordered_json::array();
    for (const auto& svc : profile.third_party_hosts) {
        third.push_back({{"pattern", svc.pattern}, {"service", svc.service}});
    }
    return doc.dump(2) + "\n";
}

DeviceProfile load_device_profile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfig("cannot open device profile: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_device_profile(buf.str());
}

void save_device_profile(const std::filesystem::path& path, const DeviceProfile& profile) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidConfig("cannot write device profile: " + path.string());
    out << serialize_device_profile(profile);
}

}  // namespace toyaudit
