#pragma once

#include <string>
#include <string_view>

#include "jnify/classfile/descriptor.hpp"
#include "jnify/error.hpp"
#include "jnify/rewriter/rewriter.hpp"

namespace jnify::pipeline {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline rewriter::ExplicitMethod parse_method_line(std::string_view value, std::size_t line) {
  const auto where = "line " + std::to_string(line) + ": ";
  const auto hash = value.find('#');
  const auto paren = value.find('(', hash == std::string_view::npos ? 0 : hash);
  if (hash == std::string_view::npos || hash == 0 || paren == std::string_view::npos || paren == hash + 1) {
    fail(ErrorCode::bad_config, where + "expected method=<class>#<name><descriptor>");
  }
  rewriter::ExplicitMethod m;
  m.class_name = std::string(value.substr(0, hash));
  for (auto& c : m.class_name) c = c == '.' ? '/' : c;
  m.name = std::string(value.substr(hash + 1, paren - hash - 1));
  m.descriptor = std::string(value.substr(paren));
  try {
    (void)classfile::parse_descriptor(m.descriptor);
  } catch (const Error& e) {
    fail(ErrorCode::bad_config, where + e.what());
  }
  return m;
}

}  // namespace detail

/// Parses the line-oriented config: `annotation=`, `library=` and repeatable
/// `method=<class>#<name><descriptor>`. Blank lines and `#` comments are ignored.
inline rewriter::SelectionConfig parse_config(std::string_view text) {
  rewriter::SelectionConfig cfg;
  bool have_library = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::bad_config, "line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key == "annotation") {
      if (value.empty()) fail(ErrorCode::bad_config, "line " + std::to_string(line_no) + ": empty annotation");
      cfg.annotation_name = std::string(value);
    } else if (key == "library") {
      if (value.empty() || value.find_first_of("/\\ \t") != std::string_view::npos) {
        fail(ErrorCode::bad_config, "line " + std::to_string(line_no) + ": library must be a bare name");
      }
      cfg.library_name = std::string(value);
      have_library = true;
    } else if (key == "method") {
      cfg.explicit_methods.push_back(detail::parse_method_line(value, line_no));
    } else {
      fail(ErrorCode::bad_config, "line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_library) fail(ErrorCode::bad_config, "missing library=");
  return cfg;
}

}  // namespace jnify::pipeline
