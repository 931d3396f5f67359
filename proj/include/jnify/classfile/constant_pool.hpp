#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jnify/classfile/byte_io.hpp"
#include "jnify/error.hpp"

namespace jnify::classfile {

enum class PoolTag : std::uint8_t {
  unusable = 0,  // index 0 and the upper half of a Long/Double
  utf8 = 1,
  integer = 3,
  float_ = 4,
  long_ = 5,
  double_ = 6,
  class_ = 7,
  string = 8,
  fieldref = 9,
  methodref = 10,
  interface_methodref = 11,
  name_and_type = 12,
  method_handle = 15,
  method_type = 16,
  dynamic = 17,
  invoke_dynamic = 18,
  module = 19,
  package = 20,
};

constexpr std::string_view to_string(PoolTag tag) {
  switch (tag) {
    case PoolTag::unusable: return "Unusable";
    case PoolTag::utf8: return "Utf8";
    case PoolTag::integer: return "Integer";
    case PoolTag::float_: return "Float";
    case PoolTag::long_: return "Long";
    case PoolTag::double_: return "Double";
    case PoolTag::class_: return "Class";
    case PoolTag::string: return "String";
    case PoolTag::fieldref: return "Fieldref";
    case PoolTag::methodref: return "Methodref";
    case PoolTag::interface_methodref: return "InterfaceMethodref";
    case PoolTag::name_and_type: return "NameAndType";
    case PoolTag::method_handle: return "MethodHandle";
    case PoolTag::method_type: return "MethodType";
    case PoolTag::dynamic: return "Dynamic";
    case PoolTag::invoke_dynamic: return "InvokeDynamic";
    case PoolTag::module: return "Module";
    case PoolTag::package: return "Package";
  }
  return "?";
}

/// One constant-pool slot. Numeric payloads keep their raw bits so that NaN
/// payloads survive a round trip.
struct PoolEntry {
  PoolTag tag = PoolTag::unusable;
  std::string utf8;          // raw modified-UTF-8 bytes
  std::uint64_t bits = 0;    // Integer/Float: low 32 bits; Long/Double: all 64
  std::uint16_t ref1 = 0;    // Class/String/MethodType/Module/Package name; member class; NaT name; MH reference
  std::uint16_t ref2 = 0;    // member NaT; NaT descriptor; indy bootstrap attr index
  std::uint8_t ref_kind = 0; // MethodHandle reference kind

  bool operator==(const PoolEntry&) const = default;

  [[nodiscard]] bool wide() const noexcept { return tag == PoolTag::long_ || tag == PoolTag::double_; }
};

struct MemberRefView {
  PoolTag tag;
  std::string owner;
  std::string name;
  std::string descriptor;
};

class ConstantPool {
 public:
  ConstantPool() : entries_(1) {}

  bool operator==(const ConstantPool&) const = default;

  [[nodiscard]] std::size_t count() const noexcept { return entries_.size(); }
  [[nodiscard]] const std::vector<PoolEntry>& entries() const noexcept { return entries_; }

  [[nodiscard]] bool valid_index(std::size_t index) const noexcept {
    return index > 0 && index < entries_.size() && entries_[index].tag != PoolTag::unusable;
  }

  [[nodiscard]] const PoolEntry& at(std::size_t index) const {
    if (!valid_index(index)) {
      fail(ErrorCode::unresolvable_pool_index, "index " + std::to_string(index) + " of " +
                                                   std::to_string(entries_.size()));
    }
    return entries_[index];
  }

  [[nodiscard]] const PoolEntry& at(std::size_t index, PoolTag expected) const {
    const auto& e = at(index);
    if (e.tag != expected) {
      fail(ErrorCode::unresolvable_pool_index, "index " + std::to_string(index) + " is " +
                                                   std::string(to_string(e.tag)) + ", expected " +
                                                   std::string(to_string(expected)));
    }
    return e;
  }

  [[nodiscard]] const std::string& utf8(std::size_t index) const { return at(index, PoolTag::utf8).utf8; }

  [[nodiscard]] const std::string& class_name(std::size_t index) const {
    return utf8(at(index, PoolTag::class_).ref1);
  }

  [[nodiscard]] std::pair<std::string, std::string> name_and_type(std::size_t index) const {
    const auto& nat = at(index, PoolTag::name_and_type);
    return {utf8(nat.ref1), utf8(nat.ref2)};
  }

  [[nodiscard]] MemberRefView member_ref(std::size_t index) const {
    const auto& e = at(index);
    if (e.tag != PoolTag::fieldref && e.tag != PoolTag::methodref && e.tag != PoolTag::interface_methodref) {
      fail(ErrorCode::unresolvable_pool_index,
           "index " + std::to_string(index) + " is not a member reference");
    }
    auto [name, desc] = name_and_type(e.ref2);
    return {e.tag, class_name(e.ref1), std::move(name), std::move(desc)};
  }

  // Appending lookups: an identical existing entry is reused, otherwise a new
  // one is added at the end. Existing indices never move.
  std::uint16_t intern_utf8(const std::string& text) {
    PoolEntry e;
    e.tag = PoolTag::utf8;
    e.utf8 = text;
    return intern(e);
  }

  std::uint16_t intern_class(const std::string& internal_name) {
    PoolEntry e;
    e.tag = PoolTag::class_;
    e.ref1 = intern_utf8(internal_name);
    return intern(e);
  }

  std::uint16_t intern_string(const std::string& text) {
    PoolEntry e;
    e.tag = PoolTag::string;
    e.ref1 = intern_utf8(text);
    return intern(e);
  }

  std::uint16_t intern_name_and_type(const std::string& name, const std::string& descriptor) {
    PoolEntry e;
    e.tag = PoolTag::name_and_type;
    e.ref1 = intern_utf8(name);
    e.ref2 = intern_utf8(descriptor);
    return intern(e);
  }

  std::uint16_t intern_member(PoolTag tag, const std::string& owner, const std::string& name,
                              const std::string& descriptor) {
    PoolEntry e;
    e.tag = tag;
    e.ref1 = intern_class(owner);
    e.ref2 = intern_name_and_type(name, descriptor);
    return intern(e);
  }

  [[nodiscard]] std::optional<std::uint16_t> find(const PoolEntry& entry) const {
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (entries_[i] == entry) return static_cast<std::uint16_t>(i);
    }
    return std::nullopt;
  }

  /// Appends without deduplication or a size check; emission still enforces
  /// the 16-bit limit.
  std::size_t append(const PoolEntry& entry) {
    entries_.push_back(entry);
    if (entry.wide()) entries_.emplace_back();
    return entries_.size() - (entry.wide() ? 2 : 1);
  }

  void read(ByteReader& in) {
    const std::uint16_t count = in.u2();
    if (count == 0) fail(ErrorCode::malformed_class, "constant_pool_count is zero");
    entries_.assign(1, PoolEntry{});
    entries_.reserve(count);
    while (entries_.size() < count) {
      PoolEntry e;
      e.tag = static_cast<PoolTag>(in.u1());
      switch (e.tag) {
        case PoolTag::utf8: {
          auto len = in.u2();
          auto raw = in.take(len);
          e.utf8.assign(raw.begin(), raw.end());
          break;
        }
        case PoolTag::integer:
        case PoolTag::float_: e.bits = in.u4(); break;
        case PoolTag::long_:
        case PoolTag::double_: {
          std::uint64_t hi = in.u4();
          e.bits = (hi << 32) | in.u4();
          break;
        }
        case PoolTag::class_:
        case PoolTag::string:
        case PoolTag::method_type:
        case PoolTag::module:
        case PoolTag::package: e.ref1 = in.u2(); break;
        case PoolTag::fieldref:
        case PoolTag::methodref:
        case PoolTag::interface_methodref:
        case PoolTag::name_and_type:
        case PoolTag::dynamic:
        case PoolTag::invoke_dynamic:
          e.ref1 = in.u2();
          e.ref2 = in.u2();
          break;
        case PoolTag::method_handle:
          e.ref_kind = in.u1();
          e.ref1 = in.u2();
          break;
        default:
          fail(ErrorCode::malformed_class, "unknown constant-pool tag " +
                                               std::to_string(static_cast<int>(e.tag)) + " at index " +
                                               std::to_string(entries_.size()));
      }
      const bool wide = e.wide();
      entries_.push_back(std::move(e));
      if (wide) entries_.emplace_back();
    }
    if (entries_.size() != count) {
      fail(ErrorCode::malformed_class, "Long/Double entry overruns constant_pool_count");
    }
    validate();
  }

  void write(ByteWriter& out) const {
    if (entries_.size() > 0xFFFF) {
      fail(ErrorCode::pool_overflow, std::to_string(entries_.size()) + " entries");
    }
    out.u2(static_cast<std::uint16_t>(entries_.size()));
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.tag == PoolTag::unusable) continue;
      out.u1(static_cast<std::uint8_t>(e.tag));
      switch (e.tag) {
        case PoolTag::utf8:
          out.u2(static_cast<std::uint16_t>(e.utf8.size()));
          out.bytes(e.utf8);
          break;
        case PoolTag::integer:
        case PoolTag::float_: out.u4(static_cast<std::uint32_t>(e.bits)); break;
        case PoolTag::long_:
        case PoolTag::double_:
          out.u4(static_cast<std::uint32_t>(e.bits >> 32));
          out.u4(static_cast<std::uint32_t>(e.bits));
          break;
        case PoolTag::class_:
        case PoolTag::string:
        case PoolTag::method_type:
        case PoolTag::module:
        case PoolTag::package: out.u2(e.ref1); break;
        case PoolTag::method_handle:
          out.u1(e.ref_kind);
          out.u2(e.ref1);
          break;
        default:
          out.u2(e.ref1);
          out.u2(e.ref2);
          break;
      }
    }
  }

  /// Checks that every cross-reference inside the pool lands on an entry of
  /// the tag the class-file format requires, and that wide entries are
  /// followed by their unusable shadow slot.
  void validate() const {
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.wide() && (i + 1 >= entries_.size() || entries_[i + 1].tag != PoolTag::unusable)) {
        fail(ErrorCode::malformed_class, "wide entry at " + std::to_string(i) + " lacks its second slot");
      }
      switch (e.tag) {
        case PoolTag::class_:
        case PoolTag::string:
        case PoolTag::method_type:
        case PoolTag::module:
        case PoolTag::package: (void)at(e.ref1, PoolTag::utf8); break;
        case PoolTag::fieldref:
        case PoolTag::methodref:
        case PoolTag::interface_methodref:
          (void)at(e.ref1, PoolTag::class_);
          (void)at(e.ref2, PoolTag::name_and_type);
          break;
        case PoolTag::name_and_type:
          (void)at(e.ref1, PoolTag::utf8);
          (void)at(e.ref2, PoolTag::utf8);
          break;
        case PoolTag::dynamic:
        case PoolTag::invoke_dynamic: (void)at(e.ref2, PoolTag::name_and_type); break;
        case PoolTag::method_handle: {
          const auto tag = at(e.ref1).tag;
          if (tag != PoolTag::fieldref && tag != PoolTag::methodref && tag != PoolTag::interface_methodref) {
            fail(ErrorCode::unresolvable_pool_index,
                 "MethodHandle at " + std::to_string(i) + " does not reference a member");
          }
          break;
        }
        default: break;
      }
    }
  }

  static float float_from_bits(std::uint64_t bits) { return std::bit_cast<float>(static_cast<std::uint32_t>(bits)); }
  static double double_from_bits(std::uint64_t bits) { return std::bit_cast<double>(bits); }

 private:
  std::uint16_t intern(const PoolEntry& entry) {
    if (auto hit = find(entry)) return *hit;
    if (entries_.size() + (entry.wide() ? 2 : 1) > 0xFFFF) {
      fail(ErrorCode::pool_overflow, "cannot add entry; pool is full");
    }
    return static_cast<std::uint16_t>(append(entry));
  }

  std::vector<PoolEntry> entries_;
};

}  // namespace jnify::classfile
