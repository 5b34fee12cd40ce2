#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "toyaudit/errors.hpp"
#include "toyaudit/flat_config.hpp"
#include "toyaudit/secret_scan.hpp"

namespace toyaudit {

std::vector<SecretRule> default_secret_rules() {
    std::vector<SecretRule> rules;
    for (const char* pattern : {"SECRET", "TOKEN", "API_KEY", "PASSWORD", "PRIVATE_KEY"})
        rules.push_back(SecretRule{pattern, 8, 3.0});
    return rules;
}

std::vector<SecretRule> load_secret_rules(const std::filesystem::path& path) {
    const FlatConfig flat = FlatConfig::load(path.string());
    std::vector<SecretRule> rules;
    std::set<int> indices;
    for (const auto& key : flat.keys_with_prefix("rule.")) {
        const std::size_t dot = key.find('.', 5);
        if (dot == std::string::npos) throw InvalidConfig("malformed rule key: " + key);
        try {
            indices.insert(std::stoi(key.substr(5, dot - 5)));
        } catch (const std::exception&) {
            throw InvalidConfig("malformed rule key: " + key);
        }
    }
    for (int n : indices) {
        const std::string base = "rule." + std::to_string(n) + ".";
        SecretRule rule;
        rule.name_pattern = flat.get_or(base + "name_pattern", "");
        if (rule.name_pattern.empty())
            throw InvalidConfig("rule " + std::to_string(n) + " has no name_pattern");
        rule.min_value_length = static_cast<std::size_t>(
            flat.get_int_or(base + "min_value_length", 8));
        rule.entropy_threshold = flat.get_double_or(base + "entropy_threshold", 3.0);
        if (rule.min_value_length < 1) throw InvalidConfig("min_value_length must be >= 1");
        if (rule.entropy_threshold < 0) throw InvalidConfig("entropy_threshold must be >= 0");
        rules.push_back(std::move(rule));
    }
    if (rules.empty()) throw InvalidConfig("rules file defines no rules");
    return rules;
}

double shannon_entropy(const std::string& s) {
    if (s.empty()) throw EmptyString("entropy of the empty string is undefined");
    std::array<std::size_t, 256> counts{};
    for (unsigned char c : s) counts[c] += 1;
    const double n = static_cast<double>(s.size());
    double h = 0.0;
    for (std::size_t count : counts) {
        if (count == 0) continue;
        const double p = static_cast<double>(count) / n;
        h -= p * std::log2(p);
    }
    return h;
}

namespace {

struct Assignment {
    std::string identifier;
    std::string value;
};

// identifier [=:] "literal" — purely lexical, one line at a time
std::vector<Assignment> assignments_on_line(const std::string& line) {
    std::vector<Assignment> found;
    std::size_t i = 0;
    while (i < line.size()) {
        const char quote = line[i];
        if (quote != '"' && quote != '\'') {
            ++i;
            continue;
        }
        // extract the literal
        std::string value;
        std::size_t j = i + 1;
        bool closed = false;
        while (j < line.size()) {
            if (line[j] == '\\' && j + 1 < line.size()) {
                value.push_back(line[j + 1]);
                j += 2;
                continue;
            }
            if (line[j] == quote) {
                closed = true;
                break;
            }
            value.push_back(line[j]);
            ++j;
        }
        if (!closed) break;

        // walk left across "= " / ": " to the identifier
        std::size_t k = i;
        while (k > 0 && std::isspace(static_cast<unsigned char>(line[k - 1]))) --k;
        if (k > 0 && (line[k - 1] == '=' || line[k - 1] == ':')) {
            --k;
            if (k > 0 && line[k - 1] == '=') --k;  // tolerate == doing nothing below
            while (k > 0 && std::isspace(static_cast<unsigned char>(line[k - 1]))) --k;
            std::size_t end = k;
            while (k > 0 && (std::isalnum(static_cast<unsigned char>(line[k - 1])) ||
                             line[k - 1] == '_'))
                --k;
            if (end > k && !std::isdigit(static_cast<unsigned char>(line[k]))) {
                found.push_back(Assignment{line.substr(k, end - k), value});
            }
        }
        i = j + 1;
    }
    return found;
}

bool looks_binary(const std::string& content) {
    const std::size_t limit = std::min<std::size_t>(content.size(), 512);
    for (std::size_t i = 0; i < limit; ++i) {
        if (content[i] == '\0') return true;
    }
    return false;
}

}  // namespace

std::vector<Finding> scan_secrets(const std::filesystem::path& root,
                                  const std::vector<SecretRule>& rules,
                                  std::vector<std::string>* warnings) {
    std::error_code ec;
    if (!std::filesystem::exists(root, ec) || ec)
        throw UnreadableRoot("cannot read scan root: " + root.string());
    if (!std::filesystem::is_directory(root, ec) || ec)
        throw UnreadableRoot("scan root is not a directory: " + root.string());

    std::vector<std::regex> patterns;
    patterns.reserve(rules.size());
    for (const auto& rule : rules) {
        try {
            patterns.emplace_back(rule.name_pattern,
                                  std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            throw InvalidConfig("bad name_pattern '" + rule.name_pattern + "': " + e.what());
        }
    }

    std::vector<std::filesystem::path> files;
    for (auto it = std::filesystem::recursive_directory_iterator(
             root, std::filesystem::directory_options::skip_permission_denied, ec);
         it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) throw UnreadableRoot("error walking " + root.string() + ": " + ec.message());
        if (it->is_regular_file(ec) && !ec) files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());

    std::vector<Finding> findings;
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            if (warnings != nullptr) warnings->push_back("unreadable file skipped: " + path.string());
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string content = buf.str();
        if (looks_binary(content)) continue;

        std::istringstream lines(content);
        std::string line;
        int line_no = 0;
        while (std::getline(lines, line)) {
            ++line_no;
            for (const auto& assign : assignments_on_line(line)) {
                std::string reason;
                for (std::size_t r = 0; r < rules.size(); ++r) {
                    if (std::regex_search(assign.identifier, patterns[r])) {
                        reason = "identifier matches '" + rules[r].name_pattern + "'";
                        break;
                    }
                    if (assign.value.size() >= rules[r].min_value_length) {
                        const double h = shannon_entropy(assign.value);
                        if (h >= rules[r].entropy_threshold) {
                            std::ostringstream why;
                            why.precision(2);
                            why << std::fixed << "value entropy " << h << " bits/char over "
                                << assign.value.size() << " characters";
                            reason = why.str();
                            break;
                        }
                    }
                }
                if (reason.empty()) continue;
                Finding f;
                f.detector_id = DetectorId::D_SECRET_CONSTANT;
                f.severity = Severity::High;
                f.summary = "plaintext secret constant " + assign.identifier + " (" + reason + ")";
                f.evidence.push_back(Evidence::file_ref(path.string(), line_no));
                f.matched_fields.push_back(assign.identifier);
                findings.push_back(std::move(f));
            }
        }
    }
    return findings;
}

}  // namespace toyaudit
