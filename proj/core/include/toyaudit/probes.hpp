#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "toyaudit/finding.hpp"

namespace toyaudit {

struct OracleProbeOptions {
    std::string alphabet{"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"};
    int prefix_len{3};
    std::string known_valid_prefix;  // probed in addition to the random ones
    int delay_ms{50};                // pause between requests
    int timeout_s{5};
};

// Fires probe_count random truncated-token GETs (path_template holds one "{}"
// placeholder) and reports D_ORACLE when the responses split into at least two
// status classes. Throws OracleInconclusive when every probe gets the same
// status, TargetUnreachable on transport failure.
std::vector<Finding> probe_response_oracle(const std::string& target,
                                           const std::string& path_template, int probe_count,
                                           std::uint64_t seed,
                                           const OracleProbeOptions& options = {});

// Runs the scripted overwrite, then re-fetches the pre-overwrite URL. A 200
// with a non-empty body means the old resource was never retired.
// overwrite_action returns the URL path of the resource it replaced; when it
// returns an empty string, old_url is used instead.
std::vector<Finding> probe_stale_resource(const std::string& target,
                                          const std::function<std::string()>& overwrite_action,
                                          const std::string& old_url = "", int timeout_s = 5);

}  // namespace toyaudit
