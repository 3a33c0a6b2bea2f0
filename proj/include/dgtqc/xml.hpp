// Copyright 2026 the dgtqc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small recursive-descent XML reader covering the element/text subset that
// annotation tools emit: declarations, comments, CDATA, attributes (parsed
// and discarded), the five standard entities and numeric character
// references. Parse failures report the 1-based line they occurred on.

#ifndef DGTQC_XML_HPP_
#define DGTQC_XML_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dgtqc/error.hpp"

namespace dgtqc {

struct XmlNode {
  std::string name;
  std::string text;  // concatenated character data directly inside this element
  std::vector<XmlNode> children;
  std::size_t line = 0;

  const XmlNode* child(std::string_view child_name) const {
    for (const XmlNode& c : children) {
      if (c.name == child_name) return &c;
    }
    return nullptr;
  }

  std::vector<const XmlNode*> children_named(std::string_view child_name) const {
    std::vector<const XmlNode*> out;
    for (const XmlNode& c : children) {
      if (c.name == child_name) out.push_back(&c);
    }
    return out;
  }
};

namespace detail {

class XmlParser {
 public:
  explicit XmlParser(std::string_view text) : text_(text) {}

  XmlNode parse_document() {
    skip_prolog();
    if (at_end()) fail("document contains no root element");
    XmlNode root = parse_element();
    skip_misc();
    if (!at_end()) fail("content after root element");
    return root;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::kParse, "line " + std::to_string(line_) + ": " + what);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  bool starts_with(std::string_view prefix) const {
    return text_.substr(pos_, prefix.size()) == prefix;
  }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) {
      advance();
    }
  }

  void expect(char c, const char* what) {
    if (at_end() || peek() != c) fail(std::string("expected ") + what);
    advance();
  }

  void skip_until(std::string_view terminator, const char* what) {
    while (!at_end()) {
      if (starts_with(terminator)) {
        for (std::size_t i = 0; i < terminator.size(); ++i) advance();
        return;
      }
      advance();
    }
    fail(std::string("unterminated ") + what);
  }

  // <? ... ?>, <!-- ... -->, <!DOCTYPE ...> before or after the root.
  void skip_prolog() {
    skip_ws();
    // UTF-8 BOM
    if (starts_with("\xEF\xBB\xBF")) { pos_ += 3; }
    skip_misc();
  }

  void skip_misc() {
    while (true) {
      skip_ws();
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<!")) {
        skip_until(">", "declaration");
      } else {
        return;
      }
    }
  }

  std::string parse_name() {
    std::string name;
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '>' || c == '/' || c == '=') break;
      name.push_back(advance());
    }
    if (name.empty()) fail("expected element name");
    return name;
  }

  void skip_attributes() {
    while (true) {
      skip_ws();
      if (at_end()) fail("unterminated start tag");
      if (peek() == '>' || peek() == '/') return;
      parse_name();
      skip_ws();
      if (!at_end() && peek() == '=') {
        advance();
        skip_ws();
        if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
        const char quote = advance();
        while (!at_end() && peek() != quote) advance();
        expect(quote, "closing attribute quote");
      }
    }
  }

  void append_entity(std::string& out) {
    advance();  // '&'
    std::string entity;
    while (!at_end() && peek() != ';') {
      entity.push_back(advance());
      if (entity.size() > 10) fail("malformed entity reference");
    }
    expect(';', "';' after entity");
    if (entity == "lt") out.push_back('<');
    else if (entity == "gt") out.push_back('>');
    else if (entity == "amp") out.push_back('&');
    else if (entity == "quot") out.push_back('"');
    else if (entity == "apos") out.push_back('\'');
    else if (!entity.empty() && entity[0] == '#') {
      const bool hex = entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X');
      long code = 0;
      try {
        code = std::stol(entity.substr(hex ? 2 : 1), nullptr, hex ? 16 : 10);
      } catch (const std::exception&) {
        fail("malformed character reference &" + entity + ";");
      }
      if (code <= 0 || code > 0x10FFFF) fail("character reference out of range");
      // Encode as UTF-8.
      const auto cp = static_cast<unsigned long>(code);
      if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
      } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      }
    } else {
      fail("unknown entity &" + entity + ";");
    }
  }

  XmlNode parse_element() {
    expect('<', "'<'");
    XmlNode node;
    node.line = line_;
    node.name = parse_name();
    skip_attributes();
    if (peek() == '/') {
      advance();
      expect('>', "'>' after '/'");
      return node;
    }
    expect('>', "'>' closing start tag");
    // Content loop.
    while (true) {
      if (at_end()) fail("unterminated element <" + node.name + ">");
      if (starts_with("</")) {
        advance();
        advance();
        const std::string closing = parse_name();
        if (closing != node.name) {
          fail("mismatched closing tag </" + closing + "> for <" + node.name + ">");
        }
        skip_ws();
        expect('>', "'>' closing end tag");
        return node;
      }
      if (starts_with("<!--")) {
        skip_until("-->", "comment");
        continue;
      }
      if (starts_with("<![CDATA[")) {
        for (int i = 0; i < 9; ++i) advance();
        while (!at_end() && !starts_with("]]>")) node.text.push_back(advance());
        skip_until("]]>", "CDATA section");
        continue;
      }
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
        continue;
      }
      if (peek() == '<') {
        node.children.push_back(parse_element());
        continue;
      }
      if (peek() == '&') {
        append_entity(node.text);
        continue;
      }
      node.text.push_back(advance());
    }
  }
};

}  // namespace detail

inline XmlNode parse_xml(std::string_view text) {
  return detail::XmlParser(text).parse_document();
}

inline std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && (s[begin] == ' ' || s[begin] == '\t' || s[begin] == '\n' || s[begin] == '\r')) ++begin;
  while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\n' || s[end - 1] == '\r')) --end;
  return std::string(s.substr(begin, end - begin));
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace dgtqc

#endif  // DGTQC_XML_HPP_
