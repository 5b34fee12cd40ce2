#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace toyaudit {

struct UserRecord {
    std::string user_id;
    std::string name;
    std::string gender;
    std::string birthday;  // ISO-8601 date
    double weight_kg{0.0};
    double height_cm{0.0};
    int age_years{0};
    std::string photo_token;  // length prefix_len + suffix_len
    std::string photo_bytes;
    std::string auth_token;
};

struct TestbedToggles {
    bool cleartext_first_party{false};
    bool token_reuse{false};
    bool no_auth_photos{false};
    bool prefix_oracle{false};
    bool retain_old_photos{false};
    bool pii_crash_reports{false};
};

TestbedToggles all_toggles_on();

struct TestbedConfig {
    std::string listen_address{"127.0.0.1:8473"};
    std::string alphabet{"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"};
    int prefix_len{3};
    int suffix_len{9};
    std::vector<UserRecord> planted_users;
    TestbedToggles toggles;
    int oracle_valid_status{301};
    int oracle_invalid_status{404};
    int token_ttl_seconds{300};
    std::uint64_t rng_seed{1234};
};

// Throws InvalidConfig when invariants are broken (alphabet too small,
// duplicate or malformed planted tokens, non-positive user vitals...).
void validate_testbed_config(const TestbedConfig& config);

// Flat key=value file; users appear as user.N.field keys. Missing
// photo_token/auth_token/photo_bytes entries are filled deterministically.
TestbedConfig load_testbed_config(const std::filesystem::path& path);
TestbedConfig parse_testbed_config(const std::string& text);

// Small deterministic PNG-ish blob so planted users always have a photo.
std::string make_photo_bytes(const std::string& tag);

// ml/day: clamp(weight_kg * 35, 400, 4000), rounded to the nearest 10.
// The vendor never published a formula; this one is ours.
int compute_hydration_goal(int age_years, double weight_kg, double height_cm);

}  // namespace toyaudit
