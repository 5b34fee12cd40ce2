#pragma once

#include <stdexcept>
#include <string>

namespace toyaudit {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// capture
struct MalformedCapture : Error {
    using Error::Error;
};
struct UnsupportedLinkType : Error {
    using Error::Error;
};
struct SchemaError : Error {
    SchemaError(std::size_t line_number, const std::string& what_arg)
        : Error("line " + std::to_string(line_number) + ": " + what_arg), line(line_number) {}
    std::size_t line;
};
struct FewerThanTwoDevices : Error {
    using Error::Error;
};

// detect / probes
struct TargetUnreachable : Error {
    using Error::Error;
};
struct OracleInconclusive : Error {
    using Error::Error;
};
struct OracleAmbiguous : Error {
    using Error::Error;
};

// testbed
struct InvalidConfig : Error {
    using Error::Error;
};
struct AddressInUse : Error {
    using Error::Error;
};
struct UnknownUser : Error {
    using Error::Error;
};
struct NonPositiveInput : Error {
    using Error::Error;
};
struct ScenarioServerUnavailable : Error {
    using Error::Error;
};

// mine
struct InvalidParameter : Error {
    using Error::Error;
};
struct NonLoopbackTarget : Error {
    using Error::Error;
};

// staticscan
struct UnreadableRoot : Error {
    using Error::Error;
};
struct EmptyString : Error {
    using Error::Error;
};

// compliance
struct CatalogSchemaError : Error {
    using Error::Error;
};
struct DuplicateClauseId : Error {
    using Error::Error;
};

}  // namespace toyaudit
