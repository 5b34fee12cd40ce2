#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "toyaudit/compliance.hpp"
#include "toyaudit/errors.hpp"

namespace toyaudit {

namespace {

const char* source_name(ClauseSource source) {
    return source == ClauseSource::Regulation ? "regulation" : "privacy_policy";
}

ClauseSource source_from_name(const std::string& name) {
    if (name == "regulation") return ClauseSource::Regulation;
    if (name == "privacy_policy") return ClauseSource::PrivacyPolicy;
    throw CatalogSchemaError("unknown clause source: " + name);
}

DetectorId detector_from_name(const std::string& name) {
    for (DetectorId id :
         {DetectorId::D_CLEARTEXT, DetectorId::D_PII_EXPOSURE, DetectorId::D_TOKEN_REUSE,
          DetectorId::D_NO_AUTH, DetectorId::D_ORACLE, DetectorId::D_STALE_RESOURCE,
          DetectorId::D_PII_THIRD_PARTY, DetectorId::D_SECRET_CONSTANT}) {
        if (detector_name(id) == name) return id;
    }
    throw CatalogSchemaError("unknown detector id: " + name);
}

}  // namespace

std::vector<ComplianceClause> default_clause_catalog() {
    std::vector<ComplianceClause> catalog;
    catalog.push_back(ComplianceClause{
        "COPPA-312.8", ClauseSource::Regulation,
        "reasonable procedures to protect the confidentiality, security, and integrity of "
        "personal information collected from children",
        {DetectorId::D_CLEARTEXT, DetectorId::D_PII_EXPOSURE, DetectorId::D_NO_AUTH,
         DetectorId::D_ORACLE, DetectorId::D_PII_THIRD_PARTY}});
    catalog.push_back(ComplianceClause{
        "COPPA-312.10", ClauseSource::Regulation,
        "shall retain personal information collected online from a child for only as long as is "
        "reasonably necessary to fulfill the purpose for which the information was collected",
        {DetectorId::D_STALE_RESOURCE}});
    catalog.push_back(ComplianceClause{
        "PP-SSL", ClauseSource::PrivacyPolicy,
        "encrypted via Secure Socket Layer (SSL) technology",
        {DetectorId::D_CLEARTEXT}});
    catalog.push_back(ComplianceClause{
        "PP-SECURED-NET", ClauseSource::PrivacyPolicy,
        "contained behind secured networks... accessible by a limited number of persons who have "
        "special access rights",
        {DetectorId::D_NO_AUTH, DetectorId::D_ORACLE}});
    return catalog;
}

std::vector<ComplianceClause> parse_clause_catalog(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw CatalogSchemaError(std::string("catalog is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw CatalogSchemaError("catalog must be a JSON array of clauses");
    if (doc.empty()) throw CatalogSchemaError("catalog defines no clauses");

    std::vector<ComplianceClause> catalog;
    std::set<std::string> seen;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("clause_id") || !item.contains("source") ||
            !item.contains("quoted_text") || !item.contains("triggering_detectors"))
            throw CatalogSchemaError(
                "each clause needs clause_id, source, quoted_text, triggering_detectors");
        ComplianceClause clause;
        clause.clause_id = item["clause_id"].get<std::string>();
        if (!seen.insert(clause.clause_id).second)
            throw DuplicateClauseId("clause id appears twice: " + clause.clause_id);
        clause.source = source_from_name(item["source"].get<std::string>());
        clause.quoted_text = item["quoted_text"].get<std::string>();
        if (!item["triggering_detectors"].is_array() || item["triggering_detectors"].empty())
            throw CatalogSchemaError("triggering_detectors must be a non-empty array");
        for (const auto& det : item["triggering_detectors"])
            clause.triggering_detectors.push_back(detector_from_name(det.get<std::string>()));
        catalog.push_back(std::move(clause));
    }
    return catalog;
}

std::vector<ComplianceClause> load_clause_catalog(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CatalogSchemaError("cannot open catalog: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_clause_catalog(buf.str());
}

std::string serialize_clause_catalog(const std::vector<ComplianceClause>& catalog) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& clause : catalog) {
        nlohmann::ordered_json obj;
        obj["clause_id"] = clause.clause_id;
        obj["source"] = source_name(clause.source);
        obj["quoted_text"] = clause.quoted_text;
        auto& dets = obj["triggering_detectors"] = nlohmann::ordered_json::array();
        for (DetectorId id : clause.triggering_detectors) dets.push_back(detector_name(id));
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

std::vector<Violation> map_findings(const std::vector<Finding>& findings,
                                    const std::vector<ComplianceClause>& catalog) {
    std::vector<Violation> violations;
    for (const auto& clause : catalog) {
        Violation v;
        v.clause_id = clause.clause_id;
        for (std::size_t i = 0; i < findings.size(); ++i) {
            for (DetectorId id : clause.triggering_detectors) {
                if (findings[i].detector_id == id) {
                    v.finding_indices.push_back(i);
                    break;
                }
            }
        }
        if (!v.finding_indices.empty()) violations.push_back(std::move(v));
    }
    return violations;
}

namespace {

nlohmann::json stats_to_json(const std::vector<EndpointStats>& stats) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& st : stats) {
        nlohmann::json obj;
        obj["host"] = st.host;
        obj["party"] = party_name(st.party);
        obj["total_bytes"] = st.total_bytes;
        obj["byte_fraction"] = st.byte_fraction;
        obj["transaction_count"] = st.transaction_count;
        obj["all_tls"] = st.all_tls;
        arr.push_back(std::move(obj));
    }
    return arr;
}

nlohmann::json findings_to_json_value(const std::vector<Finding>& findings) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : findings) {
        nlohmann::json obj;
        obj["detector_id"] = detector_name(f.detector_id);
        obj["severity"] = severity_name(f.severity);
        obj["summary"] = f.summary;
        nlohmann::json ev = nlohmann::json::array();
        for (const auto& e : f.evidence) {
            switch (e.kind) {
                case Evidence::Kind::Transaction: ev.push_back(e.txn_index); break;
                case Evidence::Kind::FileRef:
                    ev.push_back(e.file + ":" + std::to_string(e.line));
                    break;
                case Evidence::Kind::Probe: ev.push_back(e.note); break;
            }
        }
        obj["evidence"] = std::move(ev);
        obj["matched_fields"] = f.matched_fields;
        arr.push_back(std::move(obj));
    }
    return arr;
}

void check_report(const AuditReport& report) {
    for (const auto& v : report.violations) {
        if (v.finding_indices.empty())
            throw InvalidParameter("violation " + v.clause_id + " references no findings");
        for (std::size_t i : v.finding_indices) {
            if (i >= report.findings.size())
                throw InvalidParameter("violation " + v.clause_id +
                                       " references a missing finding");
        }
    }
}

}  // namespace

std::string render_report(const AuditReport& report, ReportFormat format,
                          const std::vector<ComplianceClause>& catalog) {
    check_report(report);

    if (format == ReportFormat::Json) {
        nlohmann::json doc;  // plain json keeps keys sorted
        doc["device_name"] = report.device_name;
        doc["generated_at"] = report.generated_at;
        doc["capture_summary"] = stats_to_json(report.capture_summary);
        doc["findings"] = findings_to_json_value(report.findings);
        nlohmann::json viols = nlohmann::json::array();
        for (const auto& v : report.violations) {
            nlohmann::json obj;
            obj["clause_id"] = v.clause_id;
            obj["finding_indices"] = v.finding_indices;
            viols.push_back(std::move(obj));
        }
        doc["violations"] = std::move(viols);
        return doc.dump(2) + "\n";
    }

    auto clause_for = [&](const std::string& id) -> const ComplianceClause* {
        for (const auto& c : catalog) {
            if (c.clause_id == id) return &c;
        }
        return nullptr;
    };

    std::ostringstream md;
    md << "# Audit Report: " << report.device_name << "\n\n";
    md << "## Summary\n\n";
    md << "- device: " << report.device_name << "\n";
    md << "- generated at: " << report.generated_at << "\n";
    md << "- endpoints observed: " << report.capture_summary.size() << "\n";
    md << "- findings: " << report.findings.size() << "\n";
    md << "- violations: " << report.violations.size() << "\n\n";

    md << "## Endpoint Statistics\n\n";
    if (report.capture_summary.empty()) {
        md << "No traffic captured.\n\n";
    } else {
        md << "| Host | Party | Bytes | Fraction | Transactions | All TLS |\n";
        md << "|------|-------|-------|----------|--------------|---------|\n";
        for (const auto& st : report.capture_summary) {
            char frac[16];
            std::snprintf(frac, sizeof(frac), "%.4f", st.byte_fraction);
            md << "| " << st.host << " | " << party_name(st.party) << " | " << st.total_bytes
               << " | " << frac << " | " << st.transaction_count << " | "
               << (st.all_tls ? "yes" : "no") << " |\n";
        }
        md << "\n";
    }

    md << "## Findings\n\n";
    if (report.findings.empty()) {
        md << "No findings.\n\n";
    } else {
        for (std::size_t i = 0; i < report.findings.size(); ++i) {
            const auto& f = report.findings[i];
            md << "### " << (i + 1) << ". " << detector_name(f.detector_id) << " ("
               << severity_name(f.severity) << ")\n\n";
            md << f.summary << "\n\n";
            if (!f.matched_fields.empty()) {
                md << "Matched fields:";
                for (const auto& m : f.matched_fields) md << " `" << m << "`";
                md << "\n\n";
            }
            md << "Evidence:";
            for (const auto& e : f.evidence) {
                switch (e.kind) {
                    case Evidence::Kind::Transaction: md << " txn#" << e.txn_index; break;
                    case Evidence::Kind::FileRef: md << " " << e.file << ":" << e.line; break;
                    case Evidence::Kind::Probe: md << " [" << e.note << "]"; break;
                }
            }
            md << "\n\n";
        }
    }

    md << "## Violations\n\n";
    if (report.violations.empty()) {
        md << "No violations.\n";
    } else {
        for (const auto& v : report.violations) {
            const ComplianceClause* clause = clause_for(v.clause_id);
            md << "### " << v.clause_id;
            if (clause != nullptr)
                md << " (" << (clause->source == ClauseSource::Regulation ? "Regulation"
                                                                          : "Privacy Policy")
                   << ")";
            md << "\n\n";
            if (clause != nullptr) md << "> " << clause->quoted_text << "\n\n";
            md << "Supported by finding";
            if (v.finding_indices.size() > 1) md << "s";
            for (std::size_t i : v.finding_indices) md << " #" << (i + 1);
            md << "\n\n";
        }
    }
    return md.str();
}

std::string current_timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace toyaudit
