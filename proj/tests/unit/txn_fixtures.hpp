#pragma once

// shared builders for detector/capture tests

#include <string>

#include "toyaudit/device_profile.hpp"
#include "toyaudit/http_transaction.hpp"

namespace fixtures {

inline toyaudit::HttpTransaction make_txn(const std::string& host, bool tls,
                                          toyaudit::HttpMethod method, const std::string& path,
                                          const std::string& req_body = "",
                                          const std::string& resp_body = "",
                                          double ts = 1000.0) {
    toyaudit::HttpTransaction txn;
    txn.ts_start = ts;
    txn.ts_end = ts + 0.05;
    txn.src_ip = "192.168.1.50";
    txn.src_port = 50000;
    txn.dst_ip = "203.0.113.9";
    txn.dst_port = tls ? 443 : 80;
    txn.host = host;
    txn.tls = tls;
    txn.method = method;
    txn.path = path;
    txn.req_body = req_body;
    txn.resp_body = resp_body;
    txn.status = 200;
    if (!req_body.empty()) txn.req_headers.emplace_back("Content-Type", "application/json");
    if (!resp_body.empty()) txn.resp_headers.emplace_back("Content-Type", "application/json");
    toyaudit::finalize_transaction(txn);
    return txn;
}

inline toyaudit::DeviceProfile toy_profile() {
    toyaudit::DeviceProfile profile;
    profile.device_name = "toy";
    profile.first_party_hosts = {"*.toymaker.test"};
    profile.third_party_hosts = {{"*.analytics.test", "analytics"},
                                 {"*.crash.test", "crash-reports"}};
    return profile;
}

}  // namespace fixtures
