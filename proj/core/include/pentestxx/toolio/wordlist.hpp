#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pentestxx::toolio {

/// Non-empty lines; throws Error(io_error) when the file cannot be read.
long long count_wordlist_entries(const std::filesystem::path& path);
std::vector<std::string> read_wordlist(const std::filesystem::path& path);

}  // namespace pentestxx::toolio
