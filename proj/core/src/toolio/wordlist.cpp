#include "pentestxx/toolio/wordlist.hpp"

#include <fstream>

#include "pentestxx/common/error.hpp"

namespace pentestxx::toolio {

namespace {

template <typename Fn>
void for_each_entry(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) {
    throw Error(ErrorCode::io_error, "cannot read wordlist " + path.string());
  }
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) fn(line);
  }
}

}  // namespace

long long count_wordlist_entries(const std::filesystem::path& path) {
  long long n = 0;
  for_each_entry(path, [&](const std::string&) { ++n; });
  return n;
}

std::vector<std::string> read_wordlist(const std::filesystem::path& path) {
  std::vector<std::string> words;
  for_each_entry(path, [&](const std::string& w) { words.push_back(w); });
  return words;
}

}  // namespace pentestxx::toolio
