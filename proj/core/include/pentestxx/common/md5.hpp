#pragma once

#include <string>
#include <string_view>

namespace pentestxx {

/// Lowercase hex MD5 digest.
std::string md5_hex(std::string_view data);

}  // namespace pentestxx
