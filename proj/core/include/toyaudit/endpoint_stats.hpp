#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toyaudit/device_profile.hpp"
#include "toyaudit/http_transaction.hpp"

namespace toyaudit {

struct EndpointStats {
    std::string host;
    Party party{Party::Unknown};
    std::uint64_t total_bytes{0};
    double byte_fraction{0.0};
    std::uint64_t transaction_count{0};
    bool all_tls{false};
};

// One entry per distinct host, sorted by total_bytes descending (host name
// breaks ties). Fractions are total_bytes / sum and add up to 1.
std::vector<EndpointStats> endpoint_stats(const std::vector<HttpTransaction>& txns,
                                          const DeviceProfile& profile);

struct ServiceOverlap {
    std::string service;
    std::vector<std::string> devices;  // sorted device names that contacted it
    std::vector<std::string> hosts;    // distinct hosts seen for this service
};

struct DeviceCapture {
    std::string device_name;
    std::vector<HttpTransaction> txns;
};

// Which third-party services show up across devices. Sorted by device count
// descending, then service name. Throws FewerThanTwoDevices below 2 captures.
std::vector<ServiceOverlap> cross_device_overlap(const std::vector<DeviceCapture>& captures,
                                                 const std::vector<DeviceProfile>& profiles);

}  // namespace toyaudit
