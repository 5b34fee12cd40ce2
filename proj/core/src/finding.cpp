#include <nlohmann/json.hpp>

#include "toyaudit/finding.hpp"

namespace toyaudit {

std::string detector_name(DetectorId id) {
    switch (id) {
        case DetectorId::D_CLEARTEXT: return "D_CLEARTEXT";
        case DetectorId::D_PII_EXPOSURE: return "D_PII_EXPOSURE";
        case DetectorId::D_TOKEN_REUSE: return "D_TOKEN_REUSE";
        case DetectorId::D_NO_AUTH: return "D_NO_AUTH";
        case DetectorId::D_ORACLE: return "D_ORACLE";
        case DetectorId::D_STALE_RESOURCE: return "D_STALE_RESOURCE";
        case DetectorId::D_PII_THIRD_PARTY: return "D_PII_THIRD_PARTY";
        case DetectorId::D_SECRET_CONSTANT: return "D_SECRET_CONSTANT";
    }
    return "D_UNKNOWN";
}

std::string severity_name(Severity s) {
    switch (s) {
        case Severity::Low: return "Low";
        case Severity::Medium: return "Medium";
        case Severity::High: return "High";
        case Severity::Critical: return "Critical";
    }
    return "Low";
}

std::string findings_to_json(const std::vector<Finding>& findings) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& f : findings) {
        nlohmann::ordered_json obj;
        obj["detector_id"] = detector_name(f.detector_id);
        obj["severity"] = severity_name(f.severity);
        obj["summary"] = f.summary;
        auto& ev = obj["evidence"] = nlohmann::ordered_json::array();
        for (const auto& e : f.evidence) {
            switch (e.kind) {
                case Evidence::Kind::Transaction:
                    ev.push_back(e.txn_index);
                    break;
                case Evidence::Kind::FileRef:
                    ev.push_back(e.file + ":" + std::to_string(e.line));
                    break;
                case Evidence::Kind::Probe:
                    ev.push_back(e.note);
                    break;
            }
        }
        obj["matched_fields"] = f.matched_fields;
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

}  // namespace toyaudit
