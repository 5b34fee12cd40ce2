#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace toyaudit {

enum class DetectorId {
    D_CLEARTEXT,
    D_PII_EXPOSURE,
    D_TOKEN_REUSE,
    D_NO_AUTH,
    D_ORACLE,
    D_STALE_RESOURCE,
    D_PII_THIRD_PARTY,
    D_SECRET_CONSTANT,
};

enum class Severity { Low, Medium, High, Critical };

std::string detector_name(DetectorId id);
std::string severity_name(Severity s);

// A single piece of supporting evidence. Passive detectors point at capture
// transactions, the static scanner at file/line, active probes at the
// requests they issued.
struct Evidence {
    enum class Kind { Transaction, FileRef, Probe };
    Kind kind{Kind::Transaction};
    std::size_t txn_index{0};  // Kind::Transaction
    std::string file;          // Kind::FileRef
    int line{0};               // Kind::FileRef
    std::string note;          // Kind::Probe (request + status)

    static Evidence txn(std::size_t index) {
        Evidence e;
        e.kind = Kind::Transaction;
        e.txn_index = index;
        return e;
    }
    static Evidence file_ref(std::string file, int line) {
        Evidence e;
        e.kind = Kind::FileRef;
        e.file = std::move(file);
        e.line = line;
        return e;
    }
    static Evidence probe(std::string note) {
        Evidence e;
        e.kind = Kind::Probe;
        e.note = std::move(note);
        return e;
    }

    bool operator==(const Evidence&) const = default;
};

struct Finding {
    DetectorId detector_id{DetectorId::D_CLEARTEXT};
    Severity severity{Severity::Low};
    std::string summary;
    std::vector<Evidence> evidence;
    std::vector<std::string> matched_fields;

    bool operator==(const Finding&) const = default;
};

// JSON array; transaction evidence is emitted as zero-based indices,
// file evidence as "path:line" strings, probe evidence as note strings.
std::string findings_to_json(const std::vector<Finding>& findings);

}  // namespace toyaudit
