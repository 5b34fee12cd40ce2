#include <algorithm>
#include <map>
#include <set>

#include "toyaudit/endpoint_stats.hpp"
#include "toyaudit/errors.hpp"

namespace toyaudit {

std::vector<EndpointStats> endpoint_stats(const std::vector<HttpTransaction>& txns,
                                          const DeviceProfile& profile) {
    struct Acc {
        std::uint64_t bytes = 0;
        std::uint64_t count = 0;
        bool all_tls = true;
    };
    std::map<std::string, Acc> by_host;
    std::uint64_t grand_total = 0;
    for (const auto& txn : txns) {
        auto& acc = by_host[txn.host];
        acc.bytes += static_cast<std::uint64_t>(txn.req_bytes) +
                     static_cast<std::uint64_t>(txn.resp_bytes);
        acc.count += 1;
        acc.all_tls = acc.all_tls && txn.tls;
        grand_total += static_cast<std::uint64_t>(txn.req_bytes) +
                       static_cast<std::uint64_t>(txn.resp_bytes);
    }

    std::vector<EndpointStats> out;
    out.reserve(by_host.size());
    for (const auto& [host, acc] : by_host) {
        EndpointStats st;
        st.host = host;
        st.party = classify_party(host, profile);
        st.total_bytes = acc.bytes;
        st.byte_fraction = grand_total > 0
                               ? static_cast<double>(acc.bytes) / static_cast<double>(grand_total)
                               : 0.0;
        st.transaction_count = acc.count;
        st.all_tls = acc.all_tls;
        out.push_back(std::move(st));
    }
    std::sort(out.begin(), out.end(), [](const EndpointStats& a, const EndpointStats& b) {
        if (a.total_bytes != b.total_bytes) return a.total_bytes > b.total_bytes;
        return a.host < b.host;
    });
    return out;
}

std::vector<ServiceOverlap> cross_device_overlap(const std::vector<DeviceCapture>& captures,
                                                 const std::vector<DeviceProfile>& profiles) {
    if (captures.size() < 2)
        throw FewerThanTwoDevices("overlap analysis needs at least 2 device captures, got " +
                                  std::to_string(captures.size()));

    auto profile_for = [&](const std::string& device) -> const DeviceProfile* {
        for (const auto& p : profiles) {
            if (p.device_name == device) return &p;
        }
        return nullptr;
    };

    std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>> services;
    for (const auto& cap : captures) {
        const DeviceProfile* profile = profile_for(cap.device_name);
        if (profile == nullptr)
            throw InvalidConfig("no profile provided for device: " + cap.device_name);
        for (const auto& txn : cap.txns) {
            const std::string svc = third_party_service(txn.host, *profile);
            if (svc.empty()) continue;
            auto& [devices, hosts] = services[svc];
            devices.insert(cap.device_name);
            hosts.insert(txn.host);
        }
    }

    std::vector<ServiceOverlap> out;
    out.reserve(services.size());
    for (const auto& [svc, sets] : services) {
        ServiceOverlap ov;
        ov.service = svc;
        ov.devices.assign(sets.first.begin(), sets.first.end());
        ov.hosts.assign(sets.second.begin(), sets.second.end());
        out.push_back(std::move(ov));
    }
    std::sort(out.begin(), out.end(), [](const ServiceOverlap& a, const ServiceOverlap& b) {
        if (a.devices.size() != b.devices.size()) return a.devices.size() > b.devices.size();
        return a.service < b.service;
    });
    return out;
}

}  // namespace toyaudit
