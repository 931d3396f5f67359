#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jnify/bytecode/opcode.hpp"

namespace jnify::bytecode {

/// Code position named after its byte offset, rendered `L<offset>`.
struct Label {
  std::uint32_t offset = 0;

  [[nodiscard]] std::string name() const { return "L" + std::to_string(offset); }
  auto operator<=>(const Label&) const = default;
};

struct NoOperand {
  bool operator==(const NoOperand&) const = default;
};

struct LocalOperand {
  std::uint16_t index = 0;
  bool operator==(const LocalOperand&) const = default;
};

struct IincOperand {
  std::uint16_t index = 0;
  std::int16_t delta = 0;
  bool operator==(const IincOperand&) const = default;
};

/// BIPUSH / SIPUSH immediate.
struct IntOperand {
  std::int32_t value = 0;
  bool operator==(const IntOperand&) const = default;
};

struct StringConst {
  std::string utf8;  // modified UTF-8 as stored in the pool
  bool operator==(const StringConst&) const = default;
};

struct ClassConst {
  std::string name;
  bool operator==(const ClassConst&) const = default;
};

/// MethodType / MethodHandle / dynamic constants: decodable, never translated.
struct OtherConst {
  std::uint8_t tag = 0;
  bool operator==(const OtherConst&) const = default;
};

/// LDC payload. Floating values keep their pool bit patterns.
struct ConstOperand {
  enum class Kind : std::uint8_t { int_, float_, long_, double_, string, class_, other };
  Kind kind = Kind::int_;
  std::uint64_t bits = 0;
  std::string text;  // string contents or class name
  std::uint8_t other_tag = 0;

  bool operator==(const ConstOperand&) const = default;
};

struct MemberOperand {
  std::string owner;
  std::string name;
  std::string descriptor;
  bool interface_ref = false;
  bool operator==(const MemberOperand&) const = default;
};

struct TypeOperand {
  std::string name;          // internal name or array descriptor
  std::uint8_t dimensions = 0;  // MULTIANEWARRAY only
  bool operator==(const TypeOperand&) const = default;
};

/// NEWARRAY element type code (4=boolean ... 11=long).
struct ArrayTypeOperand {
  std::uint8_t atype = 0;
  bool operator==(const ArrayTypeOperand&) const = default;
};

struct JumpOperand {
  Label target;
  bool operator==(const JumpOperand&) const = default;
};

struct SwitchOperand {
  Label default_target;
  std::vector<std::pair<std::int32_t, Label>> cases;  // ascending keys
  std::int32_t low = 0;                               // TABLESWITCH bounds
  std::int32_t high = -1;
  bool operator==(const SwitchOperand&) const = default;
};

struct DynamicOperand {
  std::string name;
  std::string descriptor;
  bool operator==(const DynamicOperand&) const = default;
};

using Operand = std::variant<NoOperand, LocalOperand, IincOperand, IntOperand, ConstOperand, MemberOperand,
                             TypeOperand, ArrayTypeOperand, JumpOperand, SwitchOperand, DynamicOperand, Label>;

/// One decoded instruction, or a label marker (`Opcode::label` carrying a
/// `Label`). Short forms such as ILOAD_1 and LDC_W are folded into their
/// canonical opcode with an explicit operand.
struct Instr {
  Opcode opcode = Opcode::nop;
  Operand operand;
  std::uint32_t offset = 0;

  [[nodiscard]] bool is_label() const noexcept { return opcode == Opcode::label; }

  template <class T>
  [[nodiscard]] const T& as() const {
    return std::get<T>(operand);
  }

  bool operator==(const Instr&) const = default;
};

inline const char* newarray_descriptor(std::uint8_t atype) {
  switch (atype) {
    case 4: return "[Z";
    case 5: return "[C";
    case 6: return "[F";
    case 7: return "[D";
    case 8: return "[B";
    case 9: return "[S";
    case 10: return "[I";
    case 11: return "[J";
    default: return nullptr;
  }
}

/// Human-readable listing line, e.g. `INVOKEVIRTUAL B.sum (II)I`.
inline std::string to_string(const Instr& in) {
  if (in.is_label()) return in.as<Label>().name() + ":";
  std::string out(mnemonic(in.opcode));
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, LocalOperand>) {
          out += " " + std::to_string(op.index);
        } else if constexpr (std::is_same_v<T, IincOperand>) {
          out += " " + std::to_string(op.index) + " " + std::to_string(op.delta);
        } else if constexpr (std::is_same_v<T, IntOperand>) {
          out += " " + std::to_string(op.value);
        } else if constexpr (std::is_same_v<T, ConstOperand>) {
          switch (op.kind) {
            case ConstOperand::Kind::string: out += " \"" + op.text + "\""; break;
            case ConstOperand::Kind::class_: out += " " + op.text + ".class"; break;
            case ConstOperand::Kind::int_: out += " " + std::to_string(static_cast<std::int32_t>(op.bits)); break;
            case ConstOperand::Kind::long_: out += " " + std::to_string(static_cast<std::int64_t>(op.bits)) + "L"; break;
            default: out += " <bits " + std::to_string(op.bits) + ">"; break;
          }
        } else if constexpr (std::is_same_v<T, MemberOperand>) {
          out += " " + op.owner + "." + op.name + " " + op.descriptor;
        } else if constexpr (std::is_same_v<T, TypeOperand>) {
          out += " " + op.name;
          if (op.dimensions) out += " " + std::to_string(op.dimensions);
        } else if constexpr (std::is_same_v<T, ArrayTypeOperand>) {
          out += " " + std::to_string(op.atype);
        } else if constexpr (std::is_same_v<T, JumpOperand>) {
          out += " " + op.target.name();
        } else if constexpr (std::is_same_v<T, SwitchOperand>) {
          for (const auto& [key, label] : op.cases) out += " " + std::to_string(key) + ":" + label.name();
          out += " default:" + op.default_target.name();
        } else if constexpr (std::is_same_v<T, DynamicOperand>) {
          out += " " + op.name + " " + op.descriptor;
        }
      },
      in.operand);
  return out;
}

}  // namespace jnify::bytecode
