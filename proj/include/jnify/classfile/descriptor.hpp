#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jnify/error.hpp"

namespace jnify::classfile {

enum class TypeKind { boolean, byte, char_, short_, int_, long_, float_, double_, object, array };

/// A JVM field type. Arrays hold their element type by value.
class JType {
 public:
  static JType primitive(TypeKind kind) { return JType(kind); }

  static JType object(std::string internal_name) {
    JType t(TypeKind::object);
    t.name_ = std::move(internal_name);
    return t;
  }

  static JType array_of(JType element) {
    JType t(TypeKind::array);
    t.element_ = std::make_shared<const JType>(std::move(element));
    return t;
  }

  [[nodiscard]] TypeKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& class_name() const noexcept { return name_; }
  [[nodiscard]] const JType& element() const { return *element_; }

  [[nodiscard]] bool is_reference() const noexcept {
    return kind_ == TypeKind::object || kind_ == TypeKind::array;
  }
  [[nodiscard]] bool is_wide() const noexcept { return kind_ == TypeKind::long_ || kind_ == TypeKind::double_; }
  [[nodiscard]] std::size_t slot_count() const noexcept { return is_wide() ? 2 : 1; }

  /// Leading character of the descriptor form (`I`, `L`, `[` ...).
  [[nodiscard]] char code() const noexcept {
    switch (kind_) {
      case TypeKind::boolean: return 'Z';
      case TypeKind::byte: return 'B';
      case TypeKind::char_: return 'C';
      case TypeKind::short_: return 'S';
      case TypeKind::int_: return 'I';
      case TypeKind::long_: return 'J';
      case TypeKind::float_: return 'F';
      case TypeKind::double_: return 'D';
      case TypeKind::object: return 'L';
      case TypeKind::array: return '[';
    }
    return '?';
  }

  [[nodiscard]] std::string descriptor() const {
    switch (kind_) {
      case TypeKind::object: return "L" + name_ + ";";
      case TypeKind::array: return "[" + element_->descriptor();
      default: return std::string(1, code());
    }
  }

  [[nodiscard]] std::size_t array_depth() const noexcept {
    return kind_ == TypeKind::array ? 1 + element_->array_depth() : 0;
  }

  friend bool operator==(const JType& a, const JType& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == TypeKind::object) return a.name_ == b.name_;
    if (a.kind_ == TypeKind::array) return *a.element_ == *b.element_;
    return true;
  }

 private:
  explicit JType(TypeKind kind) : kind_(kind) {}

  TypeKind kind_;
  std::string name_;
  std::shared_ptr<const JType> element_;
};

struct MethodSignature {
  std::vector<JType> param_types;
  std::optional<JType> return_type;  // nullopt is void

  [[nodiscard]] std::string descriptor() const {
    std::string out = "(";
    for (const auto& p : param_types) out += p.descriptor();
    out += ")";
    out += return_type ? return_type->descriptor() : "V";
    return out;
  }

  [[nodiscard]] std::size_t param_slots() const noexcept {
    std::size_t n = 0;
    for (const auto& p : param_types) n += p.slot_count();
    return n;
  }

  friend bool operator==(const MethodSignature&, const MethodSignature&) = default;
};

namespace detail {

inline JType parse_field_type_at(std::string_view text, std::size_t& pos) {
  auto malformed = [&](const char* why) -> JType {
    fail(ErrorCode::malformed_descriptor, std::string(why) + " in '" + std::string(text) + "' at " +
                                              std::to_string(pos));
  };
  if (pos >= text.size()) return malformed("unexpected end");
  const char c = text[pos++];
  switch (c) {
    case 'Z': return JType::primitive(TypeKind::boolean);
    case 'B': return JType::primitive(TypeKind::byte);
    case 'C': return JType::primitive(TypeKind::char_);
    case 'S': return JType::primitive(TypeKind::short_);
    case 'I': return JType::primitive(TypeKind::int_);
    case 'J': return JType::primitive(TypeKind::long_);
    case 'F': return JType::primitive(TypeKind::float_);
    case 'D': return JType::primitive(TypeKind::double_);
    case 'L': {
      const auto end = text.find(';', pos);
      if (end == std::string_view::npos) return malformed("unterminated class name");
      if (end == pos) return malformed("empty class name");
      auto name = text.substr(pos, end - pos);
      if (name.find_first_of(".[") != std::string_view::npos) return malformed("illegal class-name character");
      pos = end + 1;
      return JType::object(std::string(name));
    }
    case '[': {
      std::size_t depth = 1;
      while (pos < text.size() && text[pos] == '[') {
        ++depth;
        ++pos;
      }
      if (depth > 255) return malformed("more than 255 array dimensions");
      JType t = parse_field_type_at(text, pos);
      for (std::size_t i = 0; i < depth; ++i) t = JType::array_of(std::move(t));
      return t;
    }
    default: --pos; return malformed("unexpected character");
  }
}

}  // namespace detail

inline JType parse_field_type(std::string_view text) {
  std::size_t pos = 0;
  JType t = detail::parse_field_type_at(text, pos);
  if (pos != text.size()) {
    fail(ErrorCode::malformed_descriptor, "trailing characters in '" + std::string(text) + "'");
  }
  return t;
}

inline MethodSignature parse_descriptor(std::string_view text) {
  if (text.empty() || text.front() != '(') {
    fail(ErrorCode::malformed_descriptor, "method descriptor must start with '(': '" + std::string(text) + "'");
  }
  MethodSignature sig;
  std::size_t pos = 1;
  while (pos < text.size() && text[pos] != ')') sig.param_types.push_back(detail::parse_field_type_at(text, pos));
  if (pos >= text.size()) fail(ErrorCode::malformed_descriptor, "missing ')' in '" + std::string(text) + "'");
  ++pos;
  if (pos < text.size() && text[pos] == 'V') {
    ++pos;
  } else {
    sig.return_type = detail::parse_field_type_at(text, pos);
  }
  if (pos != text.size()) {
    fail(ErrorCode::malformed_descriptor, "trailing characters in '" + std::string(text) + "'");
  }
  if (sig.param_slots() > 255) {
    fail(ErrorCode::malformed_descriptor, "more than 255 parameter slots in '" + std::string(text) + "'");
  }
  return sig;
}

}  // namespace jnify::classfile
