#pragma once

#include <string>
#include <vector>

#include "toyaudit/device_profile.hpp"
#include "toyaudit/finding.hpp"
#include "toyaudit/http_transaction.hpp"
#include "toyaudit/pii.hpp"

namespace toyaudit {

// One finding per host seen over plain HTTP: High when the host is
// first-party, Medium otherwise (smart-pet-style cleartext RSS/XML pulls).
std::vector<Finding> detect_cleartext_firstparty(const std::vector<HttpTransaction>& txns,
                                                 const DeviceProfile& profile);

// D_PII_EXPOSURE: PII keys (or image payloads) in cleartext traffic, any
// party. D_PII_THIRD_PARTY: PII sent to third-party hosts, TLS included.
// Aggregated per host; matched_fields collects the pii kinds seen.
std::vector<Finding> detect_pii_exposure(const std::vector<HttpTransaction>& txns,
                                         const PiiDictionary& dict,
                                         const DeviceProfile& profile);

// Same value in an auth header across >= min_repeats POSTs spanning
// >= min_span seconds.
std::vector<Finding> detect_token_reuse(const std::vector<HttpTransaction>& txns,
                                        const std::vector<std::string>& header_names = {
                                            "X-Auth-Token"},
                                        int min_repeats = 2, double min_span = 0.0);

// Credential-free GETs answered 200 with PII-bearing bodies (dict keys or
// image content types).
std::vector<Finding> detect_unauthenticated_resource(
    const std::vector<HttpTransaction>& txns, const PiiDictionary& dict,
    const std::vector<std::string>& custom_auth_headers = {"X-Auth-Token"});

struct PassiveOptions {
    PiiDictionary dict = PiiDictionary::defaults();
    std::vector<std::string> auth_headers{"X-Auth-Token"};
    int min_repeats{2};
    double min_span{0.0};
};

// All four passive detectors in a fixed order.
std::vector<Finding> run_passive_detectors(const std::vector<HttpTransaction>& txns,
                                           const DeviceProfile& profile,
                                           const PassiveOptions& options = {});

}  // namespace toyaudit
