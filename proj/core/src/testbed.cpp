#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "toyaudit/errors.hpp"
#include "toyaudit/flat_config.hpp"
#include "toyaudit/testbed.hpp"

namespace toyaudit {

TestbedToggles all_toggles_on() {
    return TestbedToggles{true, true, true, true, true, true};
}

void validate_testbed_config(const TestbedConfig& config) {
    if (config.alphabet.size() < 2) throw InvalidConfig("alphabet needs at least 2 characters");
    {
        std::set<char> uniq(config.alphabet.begin(), config.alphabet.end());
        if (uniq.size() != config.alphabet.size())
            throw InvalidConfig("alphabet contains repeated characters");
    }
    if (config.prefix_len < 1) throw InvalidConfig("prefix_len must be >= 1");
    if (config.suffix_len < 1) throw InvalidConfig("suffix_len must be >= 1");
    if (config.token_ttl_seconds < 1) throw InvalidConfig("token_ttl_seconds must be >= 1");
    if (config.oracle_valid_status == config.oracle_invalid_status)
        throw InvalidConfig("oracle statuses must differ");

    const std::size_t token_len =
        static_cast<std::size_t>(config.prefix_len) + static_cast<std::size_t>(config.suffix_len);
    std::set<std::string> tokens;
    std::set<std::string> ids;
    for (const auto& user : config.planted_users) {
        if (user.user_id.empty()) throw InvalidConfig("planted user without user_id");
        if (!ids.insert(user.user_id).second)
            throw InvalidConfig("duplicate user_id: " + user.user_id);
        if (user.weight_kg <= 0 || user.height_cm <= 0 || user.age_years <= 0)
            throw InvalidConfig("non-positive vitals for user " + user.user_id);
        if (user.photo_token.size() != token_len)
            throw InvalidConfig("photo_token for " + user.user_id + " must have length " +
                                std::to_string(token_len));
        for (char c : user.photo_token) {
            if (config.alphabet.find(c) == std::string::npos)
                throw InvalidConfig("photo_token for " + user.user_id +
                                    " uses characters outside the alphabet");
        }
        if (!tokens.insert(user.photo_token).second)
            throw InvalidConfig("duplicate planted token: " + user.photo_token);
        if (user.photo_bytes.empty())
            throw InvalidConfig("empty photo_bytes for user " + user.user_id);
        if (user.auth_token.empty())
            throw InvalidConfig("empty auth_token for user " + user.user_id);
    }
}

std::string make_photo_bytes(const std::string& tag) {
    std::string bytes("\x89PNG\r\n\x1a\n", 8);
    std::seed_seq seq(tag.begin(), tag.end());
    std::mt19937 rng(seq);
    for (int i = 0; i < 160; ++i) bytes.push_back(static_cast<char>(rng() & 0xFF));
    return bytes;
}

namespace {

std::string generated_token(const TestbedConfig& config, const std::string& user_id,
                            const char* salt) {
    std::string material = user_id;
    material += ':';
    material += salt;
    std::seed_seq seq(material.begin(), material.end());
    std::mt19937_64 rng(seq);
    rng.discard(config.rng_seed % 16);
    std::string token;
    const int len = config.prefix_len + config.suffix_len;
    std::uniform_int_distribution<std::size_t> pick(0, config.alphabet.size() - 1);
    for (int i = 0; i < len; ++i) token.push_back(config.alphabet[pick(rng)]);
    return token;
}

}  // namespace

namespace {

TestbedConfig config_from_flat(const FlatConfig& flat) {
    TestbedConfig config;
    if (auto v = flat.get("listen_address")) config.listen_address = *v;
    if (auto v = flat.get("alphabet")) config.alphabet = *v;
    config.prefix_len = flat.get_int_or("prefix_len", config.prefix_len);
    config.suffix_len = flat.get_int_or("suffix_len", config.suffix_len);
    config.oracle_valid_status = flat.get_int_or("oracle_valid_status", config.oracle_valid_status);
    config.oracle_invalid_status =
        flat.get_int_or("oracle_invalid_status", config.oracle_invalid_status);
    config.token_ttl_seconds = flat.get_int_or("token_ttl_seconds", config.token_ttl_seconds);
    config.rng_seed = static_cast<std::uint64_t>(
        flat.get_int_or("rng_seed", static_cast<long long>(config.rng_seed)));

    config.toggles.cleartext_first_party = flat.get_bool_or("toggle.cleartext_first_party", false);
    config.toggles.token_reuse = flat.get_bool_or("toggle.token_reuse", false);
    config.toggles.no_auth_photos = flat.get_bool_or("toggle.no_auth_photos", false);
    config.toggles.prefix_oracle = flat.get_bool_or("toggle.prefix_oracle", false);
    config.toggles.retain_old_photos = flat.get_bool_or("toggle.retain_old_photos", false);
    config.toggles.pii_crash_reports = flat.get_bool_or("toggle.pii_crash_reports", false);

    // user.N.field entries, in index order
    std::set<int> indices;
    for (const auto& key : flat.keys_with_prefix("user.")) {
        const std::size_t dot = key.find('.', 5);
        if (dot == std::string::npos) throw InvalidConfig("malformed user key: " + key);
        try {
            indices.insert(std::stoi(key.substr(5, dot - 5)));
        } catch (const std::exception&) {
            throw InvalidConfig("malformed user key: " + key);
        }
    }
    for (int n : indices) {
        const std::string base = "user." + std::to_string(n) + ".";
        UserRecord user;
        user.user_id = flat.get_or(base + "user_id", "user-" + std::to_string(n));
        user.name = flat.get_or(base + "name", "Child " + std::to_string(n));
        user.gender = flat.get_or(base + "gender", "unspecified");
        user.birthday = flat.get_or(base + "birthday", "2016-01-01");
        user.weight_kg = flat.get_double_or(base + "weight_kg", 30.0);
        user.height_cm = flat.get_double_or(base + "height_cm", 130.0);
        user.age_years = flat.get_int_or(base + "age_years", 9);
        user.photo_token = flat.get_or(base + "photo_token", "");
        user.auth_token = flat.get_or(base + "auth_token", "");
        if (user.photo_token.empty()) user.photo_token = generated_token(config, user.user_id, "photo");
        if (user.auth_token.empty())
            user.auth_token = "tok-" + generated_token(config, user.user_id, "auth");
        user.photo_bytes = make_photo_bytes(user.user_id);
        config.planted_users.push_back(std::move(user));
    }

    validate_testbed_config(config);
    return config;
}

}  // namespace

TestbedConfig parse_testbed_config(const std::string& text) {
    return config_from_flat(FlatConfig::parse(text));
}

TestbedConfig load_testbed_config(const std::filesystem::path& path) {
    return config_from_flat(FlatConfig::load(path.string()));
}

int compute_hydration_goal(int age_years, double weight_kg, double height_cm) {
    if (age_years <= 0 || weight_kg <= 0.0 || height_cm <= 0.0)
        throw NonPositiveInput("hydration goal inputs must all be positive");
    double goal = weight_kg * 35.0;
    goal = std::clamp(goal, 400.0, 4000.0);
    return static_cast<int>(std::llround(goal / 10.0) * 10);
}

}  // namespace toyaudit
