#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fgis::ingest::detail {

// Minimal in-memory element tree built from expat events. Names are stored
// without namespace prefixes ("gml:pos" -> "pos"); the geodata formats we
// read are unambiguous on local names.
struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // concatenated character data directly inside
  std::vector<std::unique_ptr<XmlNode>> children;
  XmlNode* parent = nullptr;
  long line = 0;

  const std::string* attribute(std::string_view local_name) const;
  const XmlNode* child(std::string_view local_name) const;
  std::vector<const XmlNode*> children_named(std::string_view local_name) const;
  // Text of the named child, whitespace-trimmed; empty if absent.
  std::string child_text(std::string_view local_name) const;
};

// Throws Error(MalformedDocument) with the expat message and line number.
std::unique_ptr<XmlNode> parse_xml(std::string_view bytes);

std::string_view trim(std::string_view s);

// Splits on XML whitespace, dropping empty tokens.
std::vector<std::string_view> split_ws(std::string_view s);

}  // namespace fgis::ingest::detail
