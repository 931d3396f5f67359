#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jnify/classfile/byte_io.hpp"
#include "jnify/classfile/constant_pool.hpp"

namespace jnify::classfile {

/// Location of one annotation inside a Runtime{Visible,Invisible}Annotations
/// attribute body.
struct AnnotationSpan {
  std::string type_name;  // internal name, e.g. com/acme/Obfuscate
  std::size_t begin = 0;
  std::size_t end = 0;
};

namespace detail {

inline void skip_annotation(ByteReader& in);

inline void skip_element_value(ByteReader& in) {
  const char tag = static_cast<char>(in.u1());
  switch (tag) {
    case 'B': case 'C': case 'D': case 'F': case 'I': case 'J': case 'S': case 'Z': case 's': case 'c':
      in.u2();
      break;
    case 'e':
      in.u2();
      in.u2();
      break;
    case '@': skip_annotation(in); break;
    case '[': {
      const auto n = in.u2();
      for (std::uint16_t i = 0; i < n; ++i) skip_element_value(in);
      break;
    }
    default: fail(ErrorCode::malformed_class, std::string("unknown annotation element tag '") + tag + "'");
  }
}

inline void skip_annotation(ByteReader& in) {
  in.u2();
  const auto pairs = in.u2();
  for (std::uint16_t i = 0; i < pairs; ++i) {
    in.u2();
    skip_element_value(in);
  }
}

inline std::string type_name_from_descriptor(const std::string& desc) {
  if (desc.size() >= 3 && desc.front() == 'L' && desc.back() == ';') return desc.substr(1, desc.size() - 2);
  return desc;
}

}  // namespace detail

inline std::vector<AnnotationSpan> parse_annotations(std::span<const std::uint8_t> info, const ConstantPool& pool) {
  ByteReader in(info);
  const auto count = in.u2();
  std::vector<AnnotationSpan> out;
  out.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    AnnotationSpan span;
    span.begin = in.position();
    const auto type_index = in.u2();
    span.type_name = detail::type_name_from_descriptor(pool.utf8(type_index));
    const auto pairs = in.u2();
    for (std::uint16_t p = 0; p < pairs; ++p) {
      (void)pool.utf8(in.u2());
      detail::skip_element_value(in);
    }
    span.end = in.position();
    out.push_back(std::move(span));
  }
  if (!in.at_end()) fail(ErrorCode::malformed_class, "trailing bytes in annotations attribute");
  return out;
}

/// Rebuilds an annotations attribute body without the annotations whose type
/// satisfies `drop`. Returns nullopt when nothing is left.
template <class Pred>
std::optional<Bytes> remove_annotations(std::span<const std::uint8_t> info, const ConstantPool& pool, Pred drop) {
  const auto spans = parse_annotations(info, pool);
  ByteWriter out;
  std::uint16_t kept = 0;
  for (const auto& s : spans) kept += drop(s.type_name) ? 0 : 1;
  if (kept == 0) return std::nullopt;
  out.u2(kept);
  for (const auto& s : spans) {
    if (!drop(s.type_name)) out.bytes(info.subspan(s.begin, s.end - s.begin));
  }
  return out.take();
}

}  // namespace jnify::classfile
