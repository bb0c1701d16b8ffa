#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fgis {

// 48-bit IEEE MAC address (Wi-Fi BSSID or Bluetooth device address).
class MacAddress {
 public:
  using Octets = std::array<std::uint8_t, 6>;

  constexpr MacAddress() = default;
  constexpr explicit MacAddress(const Octets& octets) : octets_(octets) {}

  // Accepts "aa:bb:cc:dd:ee:ff", "AA-BB-CC-DD-EE-FF" and "aabbccddeeff"
  // (any case, surrounding whitespace ignored).
  static std::optional<MacAddress> parse(std::string_view text);

  // Canonical form "AA:BB:CC:DD:EE:FF".
  std::string to_string() const;

  const Octets& octets() const noexcept { return octets_; }

  friend constexpr auto operator<=>(const MacAddress&, const MacAddress&) = default;

 private:
  Octets octets_{};
};

// Organizationally unique identifier: the first three octets.
struct OuiPrefix {
  std::array<std::uint8_t, 3> octets{};

  // Accepts "AA:BB:CC", "aa-bb-cc" and "aabbcc".
  static std::optional<OuiPrefix> parse(std::string_view text);
  std::string to_string() const;
  bool matches(const MacAddress& mac) const noexcept;
};

// Canonical text of whatever MAC form the input uses; nullopt if unparsable.
std::optional<std::string> canonical_mac(std::string_view text);

}  // namespace fgis
