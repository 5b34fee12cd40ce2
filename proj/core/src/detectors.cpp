#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "toyaudit/detectors.hpp"

namespace toyaudit {

namespace {

bool is_image(const std::string& content_type) {
    return content_type.rfind("image/", 0) == 0;
}

// keep matched_fields in dictionary order
std::vector<std::string> ordered_kinds(const std::set<std::string>& kinds,
                                       const PiiDictionary& dict) {
    std::vector<std::string> out;
    for (const auto& pat : dict.field_patterns) {
        if (kinds.count(pat.kind)) out.push_back(pat.kind);
    }
    for (const auto& k : kinds) {
        if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
    return out;
}

std::vector<std::string> txn_pii_kinds(const HttpTransaction& txn, const PiiDictionary& dict) {
    std::set<std::string> kinds;
    for (const auto& k : pii_kinds_in_body(txn.req_body, dict)) kinds.insert(k);
    for (const auto& k : pii_kinds_in_body(txn.resp_body, dict)) kinds.insert(k);
    const auto req_ct = header_get(txn.req_headers, "Content-Type");
    const auto resp_ct = header_get(txn.resp_headers, "Content-Type");
    if ((req_ct && is_image(*req_ct)) || (resp_ct && is_image(*resp_ct))) kinds.insert("photo");
    return {kinds.begin(), kinds.end()};
}

}  // namespace

std::vector<Finding> detect_cleartext_firstparty(const std::vector<HttpTransaction>& txns,
                                                 const DeviceProfile& profile) {
    std::map<std::string, std::vector<std::size_t>> hosts;
    for (std::size_t i = 0; i < txns.size(); ++i) {
        if (!txns[i].tls) hosts[txns[i].host].push_back(i);
    }
    std::vector<Finding> findings;
    for (const auto& [host, indices] : hosts) {
        const Party party = classify_party(host, profile);
        Finding f;
        f.detector_id = DetectorId::D_CLEARTEXT;
        f.severity = party == Party::FirstParty ? Severity::High : Severity::Medium;
        std::ostringstream msg;
        msg << "cleartext HTTP to " << party_name(party) << " host " << host << " ("
            << indices.size() << (indices.size() == 1 ? " transaction)" : " transactions)");
        f.summary = msg.str();
        for (std::size_t i : indices) f.evidence.push_back(Evidence::txn(i));
        findings.push_back(std::move(f));
    }
    return findings;
}

std::vector<Finding> detect_pii_exposure(const std::vector<HttpTransaction>& txns,
                                         const PiiDictionary& dict,
                                         const DeviceProfile& profile) {
    struct Acc {
        std::vector<std::size_t> indices;
        std::set<std::string> kinds;
    };
    std::map<std::string, Acc> cleartext;
    std::map<std::string, Acc> third_party;

    for (std::size_t i = 0; i < txns.size(); ++i) {
        const auto kinds = txn_pii_kinds(txns[i], dict);
        if (kinds.empty()) continue;
        if (!txns[i].tls) {
            auto& acc = cleartext[txns[i].host];
            acc.indices.push_back(i);
            acc.kinds.insert(kinds.begin(), kinds.end());
        }
        if (classify_party(txns[i].host, profile) == Party::ThirdParty) {
            auto& acc = third_party[txns[i].host];
            acc.indices.push_back(i);
            acc.kinds.insert(kinds.begin(), kinds.end());
        }
    }

    std::vector<Finding> findings;
    for (const auto& [host, acc] : cleartext) {
        Finding f;
        f.detector_id = DetectorId::D_PII_EXPOSURE;
        f.severity = Severity::High;
        std::ostringstream msg;
        msg << "personal data visible in cleartext traffic with " << host << " ("
            << acc.indices.size() << (acc.indices.size() == 1 ? " transaction)" : " transactions)");
        f.summary = msg.str();
        for (std::size_t i : acc.indices) f.evidence.push_back(Evidence::txn(i));
        f.matched_fields = ordered_kinds(acc.kinds, dict);
        findings.push_back(std::move(f));
    }
    for (const auto& [host, acc] : third_party) {
        Finding f;
        f.detector_id = DetectorId::D_PII_THIRD_PARTY;
        f.severity = Severity::Medium;
        std::ostringstream msg;
        msg << "personal data shared with third party " << host << " (" << acc.indices.size()
            << (acc.indices.size() == 1 ? " transaction)" : " transactions)");
        f.summary = msg.str();
        for (std::size_t i : acc.indices) f.evidence.push_back(Evidence::txn(i));
        f.matched_fields = ordered_kinds(acc.kinds, dict);
        findings.push_back(std::move(f));
    }
    return findings;
}

std::vector<Finding> detect_token_reuse(const std::vector<HttpTransaction>& txns,
                                        const std::vector<std::string>& header_names,
                                        int min_repeats, double min_span) {
    std::vector<Finding> findings;
    for (const auto& header : header_names) {
        std::map<std::string, std::vector<std::size_t>> by_value;
        for (std::size_t i = 0; i < txns.size(); ++i) {
            if (txns[i].method != HttpMethod::Post) continue;
            const auto value = header_get(txns[i].req_headers, header);
            if (value && !value->empty()) by_value[*value].push_back(i);
        }
        for (const auto& [value, indices] : by_value) {
            if (indices.size() < static_cast<std::size_t>(min_repeats)) continue;
            double lo = txns[indices.front()].ts_start;
            double hi = lo;
            for (std::size_t i : indices) {
                lo = std::min(lo, txns[i].ts_start);
                hi = std::max(hi, txns[i].ts_start);
            }
            if (hi - lo < min_span) continue;
            Finding f;
            f.detector_id = DetectorId::D_TOKEN_REUSE;
            f.severity = Severity::Medium;
            std::ostringstream msg;
            msg << "same " << header << " value accepted on " << indices.size()
                << " POST requests spanning " << static_cast<long long>(hi - lo) << " s";
            f.summary = msg.str();
            for (std::size_t i : indices) f.evidence.push_back(Evidence::txn(i));
            f.matched_fields.push_back(value);
            findings.push_back(std::move(f));
        }
    }
    return findings;
}

std::vector<Finding> detect_unauthenticated_resource(
    const std::vector<HttpTransaction>& txns, const PiiDictionary& dict,
    const std::vector<std::string>& custom_auth_headers) {
    struct Acc {
        std::vector<std::size_t> indices;
        std::set<std::string> kinds;
    };
    std::map<std::string, Acc> hosts;

    for (std::size_t i = 0; i < txns.size(); ++i) {
        const auto& txn = txns[i];
        if (txn.method != HttpMethod::Get || txn.status != 200) continue;
        if (header_get(txn.req_headers, "Authorization")) continue;
        if (header_get(txn.req_headers, "Cookie")) continue;
        bool has_custom = false;
        for (const auto& name : custom_auth_headers) {
            if (header_get(txn.req_headers, name)) {
                has_custom = true;
                break;
            }
        }
        if (has_custom) continue;

        std::set<std::string> kinds;
        for (const auto& k : pii_kinds_in_body(txn.resp_body, dict)) kinds.insert(k);
        const auto resp_ct = header_get(txn.resp_headers, "Content-Type");
        if (resp_ct && is_image(*resp_ct)) kinds.insert("photo");
        if (kinds.empty()) continue;

        auto& acc = hosts[txn.host];
        acc.indices.push_back(i);
        acc.kinds.insert(kinds.begin(), kinds.end());
    }

    std::vector<Finding> findings;
    for (const auto& [host, acc] : hosts) {
        Finding f;
        f.detector_id = DetectorId::D_NO_AUTH;
        f.severity = Severity::High;
        std::ostringstream msg;
        msg << "personal data served without credentials by " << host << " ("
            << acc.indices.size() << (acc.indices.size() == 1 ? " request)" : " requests)");
        f.summary = msg.str();
        for (std::size_t i : acc.indices) f.evidence.push_back(Evidence::txn(i));
        f.matched_fields = ordered_kinds(acc.kinds, dict);
        findings.push_back(std::move(f));
    }
    return findings;
}

std::vector<Finding> run_passive_detectors(const std::vector<HttpTransaction>& txns,
                                           const DeviceProfile& profile,
                                           const PassiveOptions& options) {
    std::vector<Finding> all;
    auto append = [&all](std::vector<Finding> part) {
        for (auto& f : part) all.push_back(std::move(f));
    };
    append(detect_cleartext_firstparty(txns, profile));
    append(detect_pii_exposure(txns, options.dict, profile));
    append(detect_token_reuse(txns, options.auth_headers, options.min_repeats, options.min_span));
    append(detect_unauthenticated_resource(txns, options.dict, options.auth_headers));
    return all;
}

}  // namespace toyaudit
