#include <chrono>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "toyaudit/errors.hpp"
#include "toyaudit/probes.hpp"

namespace toyaudit {

namespace {

std::string fill_template(const std::string& tpl, const std::string& value) {
    const std::size_t pos = tpl.find("{}");
    if (pos == std::string::npos) throw InvalidParameter("path template needs a {} placeholder");
    return tpl.substr(0, pos) + value + tpl.substr(pos + 2);
}

}  // namespace

std::vector<Finding> probe_response_oracle(const std::string& target,
                                           const std::string& path_template, int probe_count,
                                           std::uint64_t seed, const OracleProbeOptions& options) {
    if (probe_count < 1) throw InvalidParameter("probe_count must be >= 1");
    if (options.alphabet.size() < 2) throw InvalidParameter("alphabet needs >= 2 characters");
    if (options.prefix_len < 1) throw InvalidParameter("prefix_len must be >= 1");

    httplib::Client client(target);
    client.set_connection_timeout(options.timeout_s, 0);
    client.set_read_timeout(options.timeout_s, 0);

    std::vector<std::string> prefixes;
    prefixes.reserve(static_cast<std::size_t>(probe_count) + 1);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, options.alphabet.size() - 1);
    for (int i = 0; i < probe_count; ++i) {
        std::string prefix;
        for (int j = 0; j < options.prefix_len; ++j) prefix.push_back(options.alphabet[pick(rng)]);
        prefixes.push_back(std::move(prefix));
    }
    if (!options.known_valid_prefix.empty()) prefixes.push_back(options.known_valid_prefix);

    std::map<int, int> status_counts;
    std::map<int, std::string> exemplars;  // first probe observed per status
    bool first = true;
    for (const auto& prefix : prefixes) {
        if (!first && options.delay_ms > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(options.delay_ms));
        first = false;
        const std::string path = fill_template(path_template, prefix);
        auto res = client.Get(path);
        if (!res) throw TargetUnreachable("no response from " + target + path);
        status_counts[res->status] += 1;
        exemplars.try_emplace(res->status,
                              "GET " + path + " -> " + std::to_string(res->status));
    }

    if (status_counts.size() < 2) {
        std::ostringstream msg;
        msg << "all " << prefixes.size() << " probes returned status "
            << status_counts.begin()->first << "; no oracle signal";
        throw OracleInconclusive(msg.str());
    }

    Finding f;
    f.detector_id = DetectorId::D_ORACLE;
    f.severity = Severity::Medium;
    std::ostringstream msg;
    msg << "truncated-token responses split into status classes";
    for (const auto& [status, count] : status_counts)
        msg << " " << status << " (x" << count << ")";
    f.summary = msg.str();
    for (const auto& [status, note] : exemplars) f.evidence.push_back(Evidence::probe(note));
    for (const auto& [status, count] : status_counts)
        f.matched_fields.push_back(std::to_string(status));
    return {f};
}

std::vector<Finding> probe_stale_resource(const std::string& target,
                                          const std::function<std::string()>& overwrite_action,
                                          const std::string& old_url, int timeout_s) {
    std::string url = old_url;
    if (overwrite_action) {
        const std::string returned = overwrite_action();
        if (!returned.empty()) url = returned;
    }
    if (url.empty()) throw InvalidParameter("no pre-overwrite URL to check");

    httplib::Client client(target);
    client.set_connection_timeout(timeout_s, 0);
    client.set_read_timeout(timeout_s, 0);
    auto res = client.Get(url);
    if (!res) throw TargetUnreachable("no response from " + target + url);
    if (res->status != 200 || res->body.empty()) return {};

    Finding f;
    f.detector_id = DetectorId::D_STALE_RESOURCE;
    f.severity = Severity::High;
    f.summary = "overwritten resource still served at its old URL";
    f.evidence.push_back(Evidence::probe("GET " + url + " -> 200 (" +
                                         std::to_string(res->body.size()) + " bytes)"));
    return {f};
}

}  // namespace toyaudit
