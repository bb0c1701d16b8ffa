#include "ingest/xml_tree.hpp"

#include <expat.h>

#include <exception>

#include "fgis/error.hpp"

namespace fgis::ingest::detail {
namespace {

constexpr std::size_t kMaxDepth = 512;
constexpr std::size_t kMaxDocumentBytes = std::size_t{1} << 30;

std::string local_name(const char* qname) {
  std::string_view q(qname);
  const auto colon = q.rfind(':');
  return std::string(colon == std::string_view::npos ? q : q.substr(colon + 1));
}

struct Builder {
  XML_Parser parser = nullptr;
  std::unique_ptr<XmlNode> root;
  XmlNode* current = nullptr;
  std::size_t depth = 0;
  std::string failure;

  void fail(std::string message) {
    if (failure.empty()) failure = std::move(message);
    XML_StopParser(parser, XML_FALSE);
  }

  static void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
    auto* self = static_cast<Builder*>(user);
    try {
      if (++self->depth > kMaxDepth) {
        self->fail("element nesting deeper than 512 levels");
        return;
      }
      auto node = std::make_unique<XmlNode>();
      node->name = local_name(name);
      node->line = static_cast<long>(XML_GetCurrentLineNumber(self->parser));
      for (int i = 0; attrs[i] != nullptr; i += 2) {
        node->attributes.emplace_back(local_name(attrs[i]), attrs[i + 1]);
      }
      XmlNode* raw = node.get();
      if (self->current == nullptr) {
        self->root = std::move(node);
      } else {
        raw->parent = self->current;
        self->current->children.push_back(std::move(node));
      }
      self->current = raw;
    } catch (const std::exception&) {
      self->fail("out of memory while building element tree");
    }
  }

  static void on_end(void* user, const XML_Char*) {
    auto* self = static_cast<Builder*>(user);
    --self->depth;
    if (self->current != nullptr) self->current = self->current->parent;
  }

  static void on_text(void* user, const XML_Char* s, int len) {
    auto* self = static_cast<Builder*>(user);
    if (self->current == nullptr) return;
    try {
      self->current->text.append(s, static_cast<std::size_t>(len));
    } catch (const std::exception&) {
      self->fail("out of memory while reading text");
    }
  }
};

}  // namespace

const std::string* XmlNode::attribute(std::string_view local) const {
  for (const auto& [k, v] : attributes) {
    if (k == local) return &v;
  }
  return nullptr;
}

const XmlNode* XmlNode::child(std::string_view local) const {
  for (const auto& c : children) {
    if (c->name == local) return c.get();
  }
  return nullptr;
}

std::vector<const XmlNode*> XmlNode::children_named(std::string_view local) const {
  std::vector<const XmlNode*> out;
  for (const auto& c : children) {
    if (c->name == local) out.push_back(c.get());
  }
  return out;
}

std::string XmlNode::child_text(std::string_view local) const {
  const XmlNode* c = child(local);
  return c ? std::string(trim(c->text)) : std::string();
}

std::unique_ptr<XmlNode> parse_xml(std::string_view bytes) {
  if (bytes.size() > kMaxDocumentBytes) {
    throw Error(ErrorCode::MalformedDocument, "document larger than 1 GiB");
  }
  Builder b;
  b.parser = XML_ParserCreate(nullptr);
  if (b.parser == nullptr) throw Error(ErrorCode::IoError, "cannot allocate XML parser");
  struct ParserGuard {
    XML_Parser p;
    ~ParserGuard() { XML_ParserFree(p); }
  } guard{b.parser};

  XML_SetUserData(b.parser, &b);
  XML_SetElementHandler(b.parser, &Builder::on_start, &Builder::on_end);
  XML_SetCharacterDataHandler(b.parser, &Builder::on_text);

  const auto status = XML_Parse(b.parser, bytes.data(), static_cast<int>(bytes.size()), XML_TRUE);
  if (status != XML_STATUS_OK || !b.failure.empty()) {
    const long line = static_cast<long>(XML_GetCurrentLineNumber(b.parser));
    const std::string reason =
        b.failure.empty() ? std::string(XML_ErrorString(XML_GetErrorCode(b.parser))) : b.failure;
    throw Error(ErrorCode::MalformedDocument,
                "XML error at line " + std::to_string(line) + ": " + reason);
  }
  if (!b.root) throw Error(ErrorCode::MalformedDocument, "document has no root element");
  return std::move(b.root);
}

std::string_view trim(std::string_view s) {
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (i < s.size()) {
    while (i < s.size() && ws(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !ws(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace fgis::ingest::detail
