#pragma once

#include <string>
#include <vector>

namespace toyaudit {

struct PiiPattern {
    std::string kind;  // label, e.g. "birthday"
    std::string key;   // case-insensitive key pattern it matches
};

struct PiiDictionary {
    std::vector<PiiPattern> field_patterns;

    // name, gender, birthday, weight, height, age, photo
    static PiiDictionary defaults();
};

// True when `key` contains `pattern` as a whole word, where words are the
// underscore/dash/camelCase parts of the key. "userName" and "child_birthday"
// match "name"/"birthday"; "message" does not match "age".
bool pii_key_matches(const std::string& key, const std::string& pattern);

// PII kinds whose key pattern appears as a key in the body. Bodies are tried
// as JSON, then form-encoded, then scanned for delimited key tokens.
std::vector<std::string> pii_kinds_in_body(const std::string& body, const PiiDictionary& dict);

}  // namespace toyaudit
