#include "pentestxx/common/ipv4.hpp"

#include <charconv>

#include "pentestxx/common/error.hpp"

namespace pentestxx {

std::optional<Ipv4> Ipv4::try_parse(std::string_view text) {
  std::uint32_t value = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    if (octet > 0) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
    if (p == end || *p < '0' || *p > '9') return std::nullopt;
    unsigned part = 0;
    auto [next, ec] = std::from_chars(p, end, part);
    if (ec != std::errc{} || part > 255 || next - p > 3) return std::nullopt;
    value = (value << 8) | part;
    p = next;
  }
  if (p != end) return std::nullopt;
  return Ipv4{value};
}

Ipv4 Ipv4::parse(std::string_view text) {
  if (auto ip = try_parse(text)) return *ip;
  throw Error(ErrorCode::invalid_argument, "invalid IPv4 address: '" + std::string(text) + "'");
}

std::string Ipv4::to_string() const {
  return std::to_string((value_ >> 24) & 0xff) + "." + std::to_string((value_ >> 16) & 0xff) + "." +
         std::to_string((value_ >> 8) & 0xff) + "." + std::to_string(value_ & 0xff);
}

}  // namespace pentestxx
