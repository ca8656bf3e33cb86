#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pentestxx {

/// Dotted-quad IPv4 address stored in host byte order.
class Ipv4 {
 public:
  constexpr Ipv4() = default;
  constexpr explicit Ipv4(std::uint32_t value) : value_(value) {}

  /// Strict parse: four decimal octets, no leading/trailing junk.
  static std::optional<Ipv4> try_parse(std::string_view text);
  /// Throws Error(invalid_argument) on malformed input.
  static Ipv4 parse(std::string_view text);

  constexpr std::uint32_t value() const { return value_; }
  std::string to_string() const;

  friend constexpr auto operator<=>(Ipv4, Ipv4) = default;

 private:
  std::uint32_t value_ = 0;
};

}  // namespace pentestxx
