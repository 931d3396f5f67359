#pragma once

#include <cstdint>
#include <span>

#include "jnify/classfile/byte_io.hpp"
#include "jnify/classfile/class_model.hpp"

namespace jnify::rewriter {

namespace detail {

inline void copy_verification_type(classfile::ByteReader& in, classfile::ByteWriter& out, std::uint16_t delta) {
  const auto tag = in.u1();
  out.u1(tag);
  if (tag == 7) {
    out.u2(in.u2());
  } else if (tag == 8) {
    out.u2(static_cast<std::uint16_t>(in.u2() + delta));  // Uninitialized(offset of NEW)
  } else if (tag > 8) {
    fail(ErrorCode::malformed_class, "bad verification type tag " + std::to_string(tag));
  }
}

/// StackMapTable with `delta` bytes inserted at pc 0: only the first frame's
/// offset_delta is absolute, plus any Uninitialized(offset) entries.
inline classfile::Bytes shift_stack_map(std::span<const std::uint8_t> info, std::uint16_t delta) {
  classfile::ByteReader in(info);
  classfile::ByteWriter out;
  const auto count = in.u2();
  out.u2(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    const auto type = in.u1();
    const std::uint16_t add = i == 0 ? delta : 0;
    if (type <= 63) {
      const unsigned off = type + add;
      if (off <= 63) {
        out.u1(static_cast<std::uint8_t>(off));
      } else {
        out.u1(251);
        out.u2(static_cast<std::uint16_t>(off));
      }
    } else if (type <= 127) {
      const unsigned off = type - 64 + add;
      if (off <= 63) {
        out.u1(static_cast<std::uint8_t>(64 + off));
      } else {
        out.u1(247);
        out.u2(static_cast<std::uint16_t>(off));
      }
      copy_verification_type(in, out, delta);
    } else if (type < 247) {
      fail(ErrorCode::malformed_class, "reserved stack map frame type " + std::to_string(type));
    } else {
      out.u1(type);
      out.u2(static_cast<std::uint16_t>(in.u2() + add));
      if (type == 247) {
        copy_verification_type(in, out, delta);
      } else if (type >= 252 && type <= 254) {
        for (int k = 0; k < type - 251; ++k) copy_verification_type(in, out, delta);
      } else if (type == 255) {
        for (int part = 0; part < 2; ++part) {
          const auto n = in.u2();
          out.u2(n);
          for (std::uint16_t k = 0; k < n; ++k) copy_verification_type(in, out, delta);
        }
      }
    }
  }
  if (!in.at_end()) fail(ErrorCode::malformed_class, "trailing bytes in StackMapTable");
  return out.take();
}

/// Tables of fixed-size records whose first u2 is a start pc.
inline classfile::Bytes shift_pc_table(std::span<const std::uint8_t> info, std::size_t record_size,
                                       std::uint16_t delta) {
  classfile::ByteReader in(info);
  classfile::ByteWriter out;
  const auto count = in.u2();
  out.u2(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    out.u2(static_cast<std::uint16_t>(in.u2() + delta));
    out.bytes(in.take(record_size - 2));
  }
  if (!in.at_end()) fail(ErrorCode::malformed_class, "trailing bytes in pc table");
  return out.take();
}

}  // namespace detail

/// Inserts `prefix` before the existing bytecode, fixing up every pc the
/// Code attribute records. Relative branch offsets need no change.
inline void prepend_bytecode(classfile::CodeAttribute& code, std::span<const std::uint8_t> prefix) {
  const auto delta = static_cast<std::uint16_t>(prefix.size());
  if (code.bytecode.size() + delta >= 65536) fail(ErrorCode::malformed_class, "code too long after prologue");
  code.bytecode.insert(code.bytecode.begin(), prefix.begin(), prefix.end());
  for (auto& e : code.exception_table) {
    e.start_pc = static_cast<std::uint16_t>(e.start_pc + delta);
    e.end_pc = static_cast<std::uint16_t>(e.end_pc + delta);
    e.handler_pc = static_cast<std::uint16_t>(e.handler_pc + delta);
  }
  for (auto& a : code.attributes) {
    if (a.name == "StackMapTable") {
      a.info = detail::shift_stack_map(a.info, delta);
    } else if (a.name == "LineNumberTable") {
      a.info = detail::shift_pc_table(a.info, 4, delta);
    } else if (a.name == "LocalVariableTable" || a.name == "LocalVariableTypeTable") {
      a.info = detail::shift_pc_table(a.info, 10, delta);
    }
  }
}

}  // namespace jnify::rewriter
