#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pentestxx {

/// Splits on '\n'; a trailing newline does not produce an empty last line.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);
std::vector<std::string> split_ws(std::string_view text);

std::string_view trim(std::string_view s);
std::string_view rtrim(std::string_view s);
std::string lower(std::string_view s);
bool icontains(std::string_view haystack, std::string_view needle);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

}  // namespace pentestxx
