#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jnify/bytecode/decoder.hpp"
#include "jnify/classfile/annotations.hpp"
#include "jnify/classfile/byte_io.hpp"
#include "jnify/classfile/constant_pool.hpp"
#include "jnify/classfile/descriptor.hpp"

namespace jnify::classfile {

namespace access {
inline constexpr std::uint16_t public_ = 0x0001;
inline constexpr std::uint16_t private_ = 0x0002;
inline constexpr std::uint16_t protected_ = 0x0004;
inline constexpr std::uint16_t static_ = 0x0008;
inline constexpr std::uint16_t final_ = 0x0010;
inline constexpr std::uint16_t synchronized_ = 0x0020;
inline constexpr std::uint16_t bridge = 0x0040;
inline constexpr std::uint16_t varargs = 0x0080;
inline constexpr std::uint16_t native = 0x0100;
inline constexpr std::uint16_t interface_ = 0x0200;
inline constexpr std::uint16_t abstract_ = 0x0400;
inline constexpr std::uint16_t strict = 0x0800;
inline constexpr std::uint16_t synthetic = 0x1000;
}  // namespace access

inline constexpr std::uint32_t class_magic = 0xCAFEBABE;

/// An attribute kept as its raw body. `name` is resolved for convenience;
/// `name_index` is what gets written back.
struct Attribute {
  std::uint16_t name_index = 0;
  std::string name;
  Bytes info;
  bool operator==(const Attribute&) const = default;
};

struct CodeAttribute {
  std::uint16_t max_stack = 0;
  std::uint16_t max_locals = 0;
  Bytes bytecode;
  std::vector<bytecode::RawExceptionEntry> exception_table;
  std::vector<Attribute> attributes;
  bool operator==(const CodeAttribute&) const = default;
};

struct FieldModel {
  std::uint16_t access_flags = 0;
  std::uint16_t name_index = 0;
  std::uint16_t descriptor_index = 0;
  std::string name;
  std::string descriptor;
  std::vector<Attribute> attributes;
  bool operator==(const FieldModel&) const = default;
};

/// A method. `attributes` is the serialized truth (Code included, in file
/// order); `code`, `instructions`, `try_regions` and `annotations` are views
/// derived from it by refresh_views().
struct MethodModel {
  std::uint16_t access_flags = 0;
  std::uint16_t name_index = 0;
  std::uint16_t descriptor_index = 0;
  std::string name;
  std::string descriptor;
  std::vector<Attribute> attributes;

  std::optional<CodeAttribute> code;
  std::vector<bytecode::Instr> instructions;
  std::vector<bytecode::TryRegion> try_regions;
  std::vector<std::string> annotations;

  [[nodiscard]] bool is_static() const noexcept { return access_flags & access::static_; }
  [[nodiscard]] bool is_native() const noexcept { return access_flags & access::native; }
  [[nodiscard]] bool is_abstract() const noexcept { return access_flags & access::abstract_; }
  [[nodiscard]] std::uint16_t max_stack() const noexcept { return code ? code->max_stack : 0; }
  [[nodiscard]] std::uint16_t max_locals() const noexcept { return code ? code->max_locals : 0; }
  [[nodiscard]] MethodSignature signature() const { return parse_descriptor(descriptor); }

  [[nodiscard]] const Attribute* find_attribute(std::string_view attr_name) const {
    for (const auto& a : attributes) {
      if (a.name == attr_name) return &a;
    }
    return nullptr;
  }

  bool operator==(const MethodModel&) const = default;
};

struct ClassModel {
  std::uint16_t minor_version = 0;
  std::uint16_t major_version = 0;
  ConstantPool pool;
  std::uint16_t access_flags = 0;
  std::uint16_t this_class = 0;
  std::uint16_t super_class = 0;
  std::vector<std::uint16_t> interfaces;
  std::vector<FieldModel> fields;
  std::vector<MethodModel> methods;
  std::vector<Attribute> attributes;

  std::string class_name;
  std::string super_name;  // empty only for java/lang/Object

  [[nodiscard]] MethodModel* find_method(std::string_view name, std::string_view descriptor) {
    for (auto& m : methods) {
      if (m.name == name && m.descriptor == descriptor) return &m;
    }
    return nullptr;
  }

  [[nodiscard]] const MethodModel* find_method(std::string_view name, std::string_view descriptor) const {
    return const_cast<ClassModel*>(this)->find_method(name, descriptor);
  }

  [[nodiscard]] std::vector<std::string> interface_names() const {
    std::vector<std::string> out;
    for (auto idx : interfaces) out.push_back(pool.class_name(idx));
    return out;
  }

  bool operator==(const ClassModel&) const = default;
};

// ---------------------------------------------------------------------------
// Attribute helpers

inline std::vector<Attribute> read_attributes(ByteReader& in, const ConstantPool& pool) {
  const auto count = in.u2();
  std::vector<Attribute> out;
  out.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    Attribute a;
    a.name_index = in.u2();
    a.name = pool.utf8(a.name_index);
    const auto len = in.u4();
    auto raw = in.take(len);
    a.info.assign(raw.begin(), raw.end());
    out.push_back(std::move(a));
  }
  return out;
}

inline void write_attributes(ByteWriter& out, const std::vector<Attribute>& attrs) {
  out.u2(static_cast<std::uint16_t>(attrs.size()));
  for (const auto& a : attrs) {
    out.u2(a.name_index);
    out.u4(static_cast<std::uint32_t>(a.info.size()));
    out.bytes(a.info);
  }
}

inline CodeAttribute parse_code_attribute(std::span<const std::uint8_t> info, const ConstantPool& pool) {
  ByteReader in(info);
  CodeAttribute code;
  code.max_stack = in.u2();
  code.max_locals = in.u2();
  const auto len = in.u4();
  if (len == 0 || len >= 65536) fail(ErrorCode::malformed_class, "code_length " + std::to_string(len));
  auto raw = in.take(len);
  code.bytecode.assign(raw.begin(), raw.end());
  const auto handlers = in.u2();
  for (std::uint16_t i = 0; i < handlers; ++i) {
    bytecode::RawExceptionEntry e;
    e.start_pc = in.u2();
    e.end_pc = in.u2();
    e.handler_pc = in.u2();
    e.catch_type = in.u2();
    if (e.catch_type != 0) (void)pool.at(e.catch_type, PoolTag::class_);
    code.exception_table.push_back(e);
  }
  code.attributes = read_attributes(in, pool);
  if (!in.at_end()) fail(ErrorCode::malformed_class, "trailing bytes in Code attribute");
  return code;
}

inline Bytes encode_code_attribute(const CodeAttribute& code) {
  ByteWriter out;
  out.u2(code.max_stack);
  out.u2(code.max_locals);
  out.u4(static_cast<std::uint32_t>(code.bytecode.size()));
  out.bytes(code.bytecode);
  out.u2(static_cast<std::uint16_t>(code.exception_table.size()));
  for (const auto& e : code.exception_table) {
    out.u2(e.start_pc);
    out.u2(e.end_pc);
    out.u2(e.handler_pc);
    out.u2(e.catch_type);
  }
  write_attributes(out, code.attributes);
  return out.take();
}

/// Recomputes a method's derived views from its raw attributes.
inline void refresh_views(MethodModel& m, const ConstantPool& pool) {
  m.code.reset();
  m.instructions.clear();
  m.try_regions.clear();
  m.annotations.clear();
  for (const auto& a : m.attributes) {
    if (a.name == "Code") {
      if (m.code) fail(ErrorCode::malformed_class, "duplicate Code attribute in " + m.name);
      m.code = parse_code_attribute(a.info, pool);
    } else if (a.name == "RuntimeVisibleAnnotations" || a.name == "RuntimeInvisibleAnnotations") {
      for (auto& span : parse_annotations(a.info, pool)) m.annotations.push_back(std::move(span.type_name));
    }
  }
  if (m.code) {
    if (m.is_native() || m.is_abstract()) {
      fail(ErrorCode::malformed_class, "native or abstract method " + m.name + " has a Code attribute");
    }
    auto decoded = bytecode::decode_code(m.code->bytecode, m.code->exception_table, pool);
    m.instructions = std::move(decoded.instructions);
    m.try_regions = std::move(decoded.try_regions);
  }
}

/// Replaces (or removes, when `code` is nullopt) the Code attribute in place,
/// keeping attribute order, then refreshes the views.
inline void set_code(MethodModel& m, ConstantPool& pool, const std::optional<CodeAttribute>& code) {
  auto it = std::find_if(m.attributes.begin(), m.attributes.end(), [](const Attribute& a) { return a.name == "Code"; });
  if (!code) {
    if (it != m.attributes.end()) m.attributes.erase(it);
  } else if (it != m.attributes.end()) {
    it->info = encode_code_attribute(*code);
  } else {
    m.attributes.insert(m.attributes.begin(), Attribute{pool.intern_utf8("Code"), "Code", encode_code_attribute(*code)});
  }
  refresh_views(m, pool);
}

// ---------------------------------------------------------------------------
// parse / emit

inline ClassModel parse_class(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  if (bytes.size() < 4 || in.u4() != class_magic) fail(ErrorCode::bad_magic, "not a class file");
  ClassModel m;
  m.minor_version = in.u2();
  m.major_version = in.u2();
  m.pool.read(in);
  m.access_flags = in.u2();
  m.this_class = in.u2();
  m.class_name = m.pool.class_name(m.this_class);
  m.super_class = in.u2();
  if (m.super_class != 0) {
    m.super_name = m.pool.class_name(m.super_class);
  } else if (m.class_name != "java/lang/Object") {
    fail(ErrorCode::unresolvable_pool_index, "super_class is 0 for " + m.class_name);
  }
  const auto n_interfaces = in.u2();
  for (std::uint16_t i = 0; i < n_interfaces; ++i) {
    const auto idx = in.u2();
    (void)m.pool.at(idx, PoolTag::class_);
    m.interfaces.push_back(idx);
  }
  const auto n_fields = in.u2();
  for (std::uint16_t i = 0; i < n_fields; ++i) {
    FieldModel f;
    f.access_flags = in.u2();
    f.name_index = in.u2();
    f.descriptor_index = in.u2();
    f.name = m.pool.utf8(f.name_index);
    f.descriptor = m.pool.utf8(f.descriptor_index);
    f.attributes = read_attributes(in, m.pool);
    m.fields.push_back(std::move(f));
  }
  const auto n_methods = in.u2();
  std::set<std::pair<std::string, std::string>> seen;
  for (std::uint16_t i = 0; i < n_methods; ++i) {
    MethodModel meth;
    meth.access_flags = in.u2();
    meth.name_index = in.u2();
    meth.descriptor_index = in.u2();
    meth.name = m.pool.utf8(meth.name_index);
    meth.descriptor = m.pool.utf8(meth.descriptor_index);
    parse_descriptor(meth.descriptor);
    if (!seen.emplace(meth.name, meth.descriptor).second) {
      fail(ErrorCode::malformed_class, "duplicate method " + meth.name + meth.descriptor);
    }
    meth.attributes = read_attributes(in, m.pool);
    refresh_views(meth, m.pool);
    m.methods.push_back(std::move(meth));
  }
  m.attributes = read_attributes(in, m.pool);
  if (!in.at_end()) fail(ErrorCode::malformed_class, std::to_string(in.remaining()) + " trailing bytes");
  return m;
}

inline Bytes emit_class(const ClassModel& m) {
  ByteWriter out;
  out.u4(class_magic);
  out.u2(m.minor_version);
  out.u2(m.major_version);
  m.pool.write(out);
  out.u2(m.access_flags);
  out.u2(m.this_class);
  out.u2(m.super_class);
  out.u2(static_cast<std::uint16_t>(m.interfaces.size()));
  for (auto idx : m.interfaces) out.u2(idx);
  out.u2(static_cast<std::uint16_t>(m.fields.size()));
  for (const auto& f : m.fields) {
    out.u2(f.access_flags);
    out.u2(f.name_index);
    out.u2(f.descriptor_index);
    write_attributes(out, f.attributes);
  }
  out.u2(static_cast<std::uint16_t>(m.methods.size()));
  for (const auto& meth : m.methods) {
    out.u2(meth.access_flags);
    out.u2(meth.name_index);
    out.u2(meth.descriptor_index);
    write_attributes(out, meth.attributes);
  }
  write_attributes(out, m.attributes);
  return out.take();
}

}  // namespace jnify::classfile
