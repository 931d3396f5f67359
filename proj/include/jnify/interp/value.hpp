#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>

#include "jnify/bytecode/stack_effect.hpp"

namespace jnify::interp {

/// One operand-stack or local-variable value. References index the heap,
/// starting at 1; null has its own kind.
struct Value {
  enum class Kind : std::uint8_t { i32, i64, f32, f64, ref, null };

  Kind kind = Kind::null;
  std::uint64_t bits = 0;  // payload; floats keep their IEEE bit patterns

  static Value i32(std::int32_t v) { return {Kind::i32, static_cast<std::uint32_t>(v)}; }
  static Value i64(std::int64_t v) { return {Kind::i64, static_cast<std::uint64_t>(v)}; }
  static Value f32(float v) { return {Kind::f32, std::bit_cast<std::uint32_t>(v)}; }
  static Value f64(double v) { return {Kind::f64, std::bit_cast<std::uint64_t>(v)}; }
  static Value ref(std::uint32_t id) { return {Kind::ref, id}; }
  static Value null() { return {Kind::null, 0}; }

  [[nodiscard]] std::int32_t as_i32() const { return static_cast<std::int32_t>(static_cast<std::uint32_t>(bits)); }
  [[nodiscard]] std::int64_t as_i64() const { return static_cast<std::int64_t>(bits); }
  [[nodiscard]] float as_f32() const { return std::bit_cast<float>(static_cast<std::uint32_t>(bits)); }
  [[nodiscard]] double as_f64() const { return std::bit_cast<double>(bits); }
  [[nodiscard]] std::uint32_t as_ref() const { return static_cast<std::uint32_t>(bits); }

  [[nodiscard]] bool is_reference() const noexcept { return kind == Kind::ref || kind == Kind::null; }
  [[nodiscard]] bool is_null() const noexcept { return kind == Kind::null; }

  /// Bitwise equality, so NaN payloads compare equal to themselves.
  bool operator==(const Value&) const = default;
};

inline bytecode::SlotKind slot_kind(const Value& v) {
  using K = bytecode::SlotKind;
  switch (v.kind) {
    case Value::Kind::i32: return K::int_;
    case Value::Kind::i64: return K::long_;
    case Value::Kind::f32: return K::float_;
    case Value::Kind::f64: return K::double_;
    default: return K::ref;
  }
}

inline std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::i32: return "I32 " + std::to_string(v.as_i32());
    case Value::Kind::i64: return "I64 " + std::to_string(v.as_i64());
    case Value::Kind::f32: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "F32 %a", static_cast<double>(v.as_f32()));
      return buf;
    }
    case Value::Kind::f64: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "F64 %a", v.as_f64());
      return buf;
    }
    case Value::Kind::ref: return "REF #" + std::to_string(v.as_ref());
    case Value::Kind::null: return "NULL";
  }
  return "?";
}

/// Default value of a field or array element with descriptor `desc`.
inline Value default_value(std::string_view desc) {
  switch (desc.empty() ? 'V' : desc.front()) {
    case 'J': return Value::i64(0);
    case 'F': return Value::f32(0.0f);
    case 'D': return Value::f64(0.0);
    case 'L': case '[': return Value::null();
    default: return Value::i32(0);
  }
}

/// Narrowing the JVM applies when storing an int into a field or array
/// element of sub-int type.
inline Value narrow_to(std::string_view desc, Value v) {
  if (v.kind != Value::Kind::i32 || desc.empty()) return v;
  const auto i = v.as_i32();
  switch (desc.front()) {
    case 'Z': return Value::i32(i & 1);
    case 'B': return Value::i32(static_cast<std::int8_t>(i));
    case 'C': return Value::i32(static_cast<std::uint16_t>(i));
    case 'S': return Value::i32(static_cast<std::int16_t>(i));
    default: return v;
  }
}

}  // namespace jnify::interp
