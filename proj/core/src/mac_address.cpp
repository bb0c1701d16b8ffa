#include "fgis/mac_address.hpp"

#include <cstdio>
#include <vector>

namespace fgis {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Decodes `count` octets written as bare hex or with a uniform ':'/'-'
// separator between octets.
std::optional<std::vector<std::uint8_t>> parse_octets(std::string_view text, std::size_t count) {
  text = trim(text);
  std::size_t stride = 0;
  if (text.size() == count * 2) {
    stride = 2;
  } else if (text.size() == count * 3 - 1) {
    stride = 3;
  } else {
    return std::nullopt;
  }
  const char sep = stride == 3 ? text[2] : '\0';
  if (stride == 3 && sep != ':' && sep != '-') return std::nullopt;

  std::vector<std::uint8_t> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = i * stride;
    const int hi = hex_value(text[at]);
    const int lo = hex_value(text[at + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    if (stride == 3 && i + 1 < count && text[at + 2] != sep) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return out;
}

std::string join_hex(const std::uint8_t* octets, std::size_t count) {
  std::string out;
  out.reserve(count * 3);
  char buf[4];
  for (std::size_t i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof buf, "%02X", octets[i]);
    if (i) out.push_back(':');
    out += buf;
  }
  return out;
}

}  // namespace

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
  auto octets = parse_octets(text, 6);
  if (!octets) return std::nullopt;
  Octets arr{};
  std::copy(octets->begin(), octets->end(), arr.begin());
  return MacAddress(arr);
}

std::string MacAddress::to_string() const { return join_hex(octets_.data(), octets_.size()); }

std::optional<OuiPrefix> OuiPrefix::parse(std::string_view text) {
  auto octets = parse_octets(text, 3);
  if (!octets) return std::nullopt;
  OuiPrefix p;
  std::copy(octets->begin(), octets->end(), p.octets.begin());
  return p;
}

std::string OuiPrefix::to_string() const { return join_hex(octets.data(), octets.size()); }

bool OuiPrefix::matches(const MacAddress& mac) const noexcept {
  const auto& o = mac.octets();
  return o[0] == octets[0] && o[1] == octets[1] && o[2] == octets[2];
}

std::optional<std::string> canonical_mac(std::string_view text) {
  auto mac = MacAddress::parse(text);
  if (!mac) return std::nullopt;
  return mac->to_string();
}

}  // namespace fgis
