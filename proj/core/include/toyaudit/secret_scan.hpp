#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "toyaudit/finding.hpp"

namespace toyaudit {

struct SecretRule {
    std::string name_pattern;  // case-insensitive regex matched against identifiers
    std::size_t min_value_length{8};
    double entropy_threshold{3.0};  // bits per character
};

// SECRET, TOKEN, API_KEY, PASSWORD, PRIVATE_KEY
std::vector<SecretRule> default_secret_rules();

// Flat config: rule.N.name_pattern plus optional per-rule thresholds.
std::vector<SecretRule> load_secret_rules(const std::filesystem::path& path);

// -sum p log2 p over character frequencies; throws EmptyString.
double shannon_entropy(const std::string& s);

// Walks the tree and flags each string-literal assignment whose identifier
// matches a rule pattern, or whose value is long and high-entropy enough.
// Purely lexical; the target is flat decompiled constant files. Unreadable
// files are recorded in *warnings and skipped.
std::vector<Finding> scan_secrets(const std::filesystem::path& root,
                                  const std::vector<SecretRule>& rules = default_secret_rules(),
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace toyaudit
