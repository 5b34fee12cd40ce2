#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "toyaudit/endpoint_stats.hpp"
#include "toyaudit/finding.hpp"

namespace toyaudit {

enum class ClauseSource { Regulation, PrivacyPolicy };

struct ComplianceClause {
    std::string clause_id;  // COPPA-312.8, PP-SSL, ...
    ClauseSource source{ClauseSource::Regulation};
    std::string quoted_text;
    std::vector<DetectorId> triggering_detectors;
};

struct Violation {
    std::string clause_id;
    std::vector<std::size_t> finding_indices;  // ascending, into the findings list

    bool operator==(const Violation&) const = default;
};

struct AuditReport {
    std::string device_name;
    std::vector<EndpointStats> capture_summary;
    std::vector<Finding> findings;
    std::vector<Violation> violations;
    std::string generated_at;  // ISO-8601; pin it for byte-identical renders
};

enum class ReportFormat { Json, Markdown };

// COPPA-312.8, COPPA-312.10, PP-SSL, PP-SECURED-NET with the clause texts
// the audit relies on.
std::vector<ComplianceClause> default_clause_catalog();

std::vector<ComplianceClause> parse_clause_catalog(const std::string& json_text);
std::vector<ComplianceClause> load_clause_catalog(const std::filesystem::path& path);
std::string serialize_clause_catalog(const std::vector<ComplianceClause>& catalog);

// One violation per clause with at least one triggering finding; clause order
// follows the catalog, indices ascend.
std::vector<Violation> map_findings(const std::vector<Finding>& findings,
                                    const std::vector<ComplianceClause>& catalog);

std::string render_report(const AuditReport& report, ReportFormat format,
                          const std::vector<ComplianceClause>& catalog);

std::string current_timestamp_utc();

}  // namespace toyaudit
