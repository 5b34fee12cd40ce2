#include <doctest.h>

#include <string>

#include "toyaudit/base64.hpp"
#include "toyaudit/errors.hpp"

using namespace toyaudit;

TEST_CASE("base64 round-trips arbitrary bytes") {
    std::string bytes;
    for (int i = 0; i < 256; ++i) bytes.push_back(static_cast<char>(i));
    CHECK(base64_decode(base64_encode(bytes)) == bytes);
}

TEST_CASE("base64 known vectors") {
    CHECK(base64_encode("") == "");
    CHECK(base64_encode("f") == "Zg==");
    CHECK(base64_encode("fo") == "Zm8=");
    CHECK(base64_encode("foo") == "Zm9v");
    CHECK(base64_decode("Zm9vYmFy") == "foobar");
}

TEST_CASE("base64 rejects malformed input") {
    CHECK_THROWS_AS(base64_decode("Zg"), Error);    // missing padding
    CHECK_THROWS_AS(base64_decode("Z!=="), Error);  // bad character
}
