#pragma once

#include <string>
#include <string_view>

namespace toyaudit {

std::string base64_encode(std::string_view bytes);

/// Decodes standard base64 (padding required). Throws Error on bad input.
std::string base64_decode(std::string_view text);

}  // namespace toyaudit
