#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "toyaudit/errors.hpp"
#include "toyaudit/secret_scan.hpp"

using namespace toyaudit;

namespace {

struct TempTree {
    std::filesystem::path root;

    TempTree() {
        root = std::filesystem::temp_directory_path() /
               ("toyaudit_scan_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(root);
    }
    ~TempTree() { std::filesystem::remove_all(root); }

    static int& counter() {
        static int n = 0;
        return n;
    }

    void put(const std::string& rel, const std::string& content) const {
        const auto path = root / rel;
        std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
};

}  // namespace

TEST_CASE("shannon_entropy known values") {
    CHECK(shannon_entropy("aaaa") == doctest::Approx(0.0));
    CHECK(shannon_entropy("ab") == doctest::Approx(1.0));
    CHECK(shannon_entropy("abcd") == doctest::Approx(2.0));
    CHECK(shannon_entropy("aabb") == doctest::Approx(1.0));
    // 16 distinct characters -> 4 bits/char
    CHECK(shannon_entropy("0123456789abcdef") == doctest::Approx(4.0));
    CHECK_THROWS_AS(shannon_entropy(""), EmptyString);
}

TEST_CASE("scan flags named secrets and high-entropy values, with line numbers") {
    TempTree tree;
    tree.put("app/Constants.java",
             "package app;\n"
             "public class Constants {\n"
             "    public static final String INAPP_SECRET = \"Xq7PjW2mKd9RtC4vBn8LzF5sYh3GwA6e\";\n"
             "    public static final String LOG_TAG = \"App\";\n"
             "    public static final String OPAQUE = \"q8Zr2Lk9Xw4Vt7Bn3Mj6\";\n"
             "}\n");

    const auto findings = scan_secrets(tree.root);
    REQUIRE(findings.size() == 2);
    CHECK(findings[0].detector_id == DetectorId::D_SECRET_CONSTANT);
    CHECK(findings[0].matched_fields == std::vector<std::string>{"INAPP_SECRET"});
    REQUIRE(findings[0].evidence.size() == 1);
    CHECK(findings[0].evidence[0].kind == Evidence::Kind::FileRef);
    CHECK(findings[0].evidence[0].line == 3);
    // the second hit is the anonymous high-entropy literal
    CHECK(findings[1].matched_fields == std::vector<std::string>{"OPAQUE"});
    CHECK(findings[1].evidence[0].line == 5);
    CHECK(findings[1].summary.find("entropy") != std::string::npos);
}

TEST_CASE("short or low-entropy values stay quiet") {
    TempTree tree;
    tree.put("a.java",
             "String VERSION_NAME = \"4.0.2\";\n"          // short
             "String GREETING = \"aaaaaaaaaaaaaaaa\";\n"   // long but entropy 0
             "String PATTERN = \"abababababab\";\n");      // 1 bit/char
    CHECK(scan_secrets(tree.root).empty());
}

TEST_CASE("binary files are skipped entirely") {
    TempTree tree;
    std::string blob = "PASSWORD = \"Xq7PjW2mKd9RtC4vBn8L\"";
    blob.push_back('\0');
    blob += "junk";
    tree.put("data.bin", blob);
    CHECK(scan_secrets(tree.root).empty());
}

TEST_CASE("results are ordered by path for reproducible reports") {
    TempTree tree;
    tree.put("b/late.java", "String API_KEY = \"zzzzzzzzzz\";\n");
    tree.put("a/early.java", "String TOKEN_VALUE = \"yyyyyyyyyy\";\n");
    const auto findings = scan_secrets(tree.root);
    REQUIRE(findings.size() == 2);
    CHECK(findings[0].evidence[0].file.find("early.java") != std::string::npos);
    CHECK(findings[1].evidence[0].file.find("late.java") != std::string::npos);
}

TEST_CASE("missing root throws UnreadableRoot") {
    CHECK_THROWS_AS(scan_secrets("/nonexistent/toyaudit/root"), UnreadableRoot);
}

TEST_CASE("custom rules load from a flat file") {
    TempTree tree;
    tree.put("rules.conf",
             "# only flag credential-ish names, never entropy\n"
             "rule.0.name_pattern = CREDENTIAL\n"
             "rule.0.min_value_length = 64\n"
             "rule.0.entropy_threshold = 8\n");
    const auto rules = load_secret_rules(tree.root / "rules.conf");
    REQUIRE(rules.size() == 1);
    CHECK(rules[0].name_pattern == "CREDENTIAL");
    CHECK(rules[0].min_value_length == 64);
    CHECK(rules[0].entropy_threshold == doctest::Approx(8.0));

    TempTree src;
    src.put("x.java",
            "String USER_CREDENTIAL = \"abc\";\n"
            "String INAPP_SECRET = \"Xq7PjW2mKd9RtC4vBn8LzF5sYh3GwA6e\";\n");
    const auto findings = scan_secrets(src.root, rules);
    REQUIRE(findings.size() == 1);  // SECRET no longer matches, entropy bar unreachable
    CHECK(findings[0].matched_fields == std::vector<std::string>{"USER_CREDENTIAL"});
}

TEST_CASE("rules files without rules are rejected") {
    TempTree tree;
    tree.put("empty.conf", "# nothing here\n");
    CHECK_THROWS_AS(load_secret_rules(tree.root / "empty.conf"), InvalidConfig);
    tree.put("broken.conf", "rule.0.min_value_length = 4\n");
    CHECK_THROWS_AS(load_secret_rules(tree.root / "broken.conf"), InvalidConfig);
}
