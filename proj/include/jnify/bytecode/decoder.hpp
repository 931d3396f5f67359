#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "jnify/bytecode/instr.hpp"
#include "jnify/classfile/byte_io.hpp"
#include "jnify/classfile/constant_pool.hpp"

namespace jnify::bytecode {

/// One exception-table entry in label form. An empty catch type is a
/// catch-all handler (how `finally` is compiled).
struct TryRegion {
  Label start;
  Label end;
  Label handler;
  std::optional<std::string> catch_type;

  [[nodiscard]] bool catch_all() const noexcept { return !catch_type.has_value(); }
  [[nodiscard]] bool covers(std::uint32_t offset) const noexcept {
    return offset >= start.offset && offset < end.offset;
  }
  bool operator==(const TryRegion&) const = default;
};

struct RawExceptionEntry {
  std::uint16_t start_pc = 0;
  std::uint16_t end_pc = 0;
  std::uint16_t handler_pc = 0;
  std::uint16_t catch_type = 0;
  bool operator==(const RawExceptionEntry&) const = default;
};

struct DecodedCode {
  std::vector<Instr> instructions;  // with label markers
  std::vector<TryRegion> try_regions;
};

namespace detail {

inline ConstOperand const_from_pool(const classfile::ConstantPool& pool, std::uint16_t index, bool wide) {
  using classfile::PoolTag;
  const auto& e = pool.at(index);
  ConstOperand c;
  switch (e.tag) {
    case PoolTag::integer: c.kind = ConstOperand::Kind::int_; c.bits = e.bits; break;
    case PoolTag::float_: c.kind = ConstOperand::Kind::float_; c.bits = e.bits; break;
    case PoolTag::long_: c.kind = ConstOperand::Kind::long_; c.bits = e.bits; break;
    case PoolTag::double_: c.kind = ConstOperand::Kind::double_; c.bits = e.bits; break;
    case PoolTag::string: c.kind = ConstOperand::Kind::string; c.text = pool.utf8(e.ref1); break;
    case PoolTag::class_: c.kind = ConstOperand::Kind::class_; c.text = pool.utf8(e.ref1); break;
    case PoolTag::method_type:
    case PoolTag::method_handle:
    case PoolTag::dynamic:
      c.kind = ConstOperand::Kind::other;
      c.other_tag = static_cast<std::uint8_t>(e.tag);
      break;
    default:
      fail(ErrorCode::unresolvable_pool_index,
           "LDC operand " + std::to_string(index) + " has tag " + std::string(classfile::to_string(e.tag)));
  }
  const bool is_wide = c.kind == ConstOperand::Kind::long_ || c.kind == ConstOperand::Kind::double_;
  if (c.kind != ConstOperand::Kind::other && is_wide != wide) {
    fail(ErrorCode::unresolvable_pool_index, "LDC width does not match constant at " + std::to_string(index));
  }
  return c;
}

inline MemberOperand member_from_pool(const classfile::ConstantPool& pool, std::uint16_t index, Opcode op) {
  using classfile::PoolTag;
  auto ref = pool.member_ref(index);
  const bool field_op = in_range(op, Opcode::getstatic, Opcode::putfield);
  if (field_op != (ref.tag == PoolTag::fieldref)) {
    fail(ErrorCode::unresolvable_pool_index, std::string(mnemonic(op)) + " operand " + std::to_string(index) +
                                                 " has tag " + std::string(classfile::to_string(ref.tag)));
  }
  if (op == Opcode::invokevirtual && ref.tag != PoolTag::methodref) {
    fail(ErrorCode::unresolvable_pool_index, "INVOKEVIRTUAL needs a Methodref at " + std::to_string(index));
  }
  if (op == Opcode::invokeinterface && ref.tag != PoolTag::interface_methodref) {
    fail(ErrorCode::unresolvable_pool_index, "INVOKEINTERFACE needs an InterfaceMethodref at " + std::to_string(index));
  }
  return {ref.owner, ref.name, ref.descriptor, ref.tag == PoolTag::interface_methodref};
}

inline Opcode canonical_short_form(std::uint8_t byte, std::uint16_t& index) {
  if (byte >= 0x1a && byte <= 0x2d) {
    index = static_cast<std::uint16_t>((byte - 0x1a) % 4);
    return offset(Opcode::iload, (byte - 0x1a) / 4);
  }
  index = static_cast<std::uint16_t>((byte - 0x3b) % 4);
  return offset(Opcode::istore, (byte - 0x3b) / 4);
}

}  // namespace detail

/// Decodes a Code attribute's bytecode into canonical instructions with label
/// markers at every branch target, switch target and try-region boundary.
inline DecodedCode decode_code(std::span<const std::uint8_t> code,
                               std::span<const RawExceptionEntry> exception_table,
                               const classfile::ConstantPool& pool) {
  using classfile::ByteReader;
  DecodedCode out;
  std::vector<Instr> body;
  std::set<std::uint32_t> boundaries;
  std::set<std::uint32_t> targets;
  ByteReader in(code);

  while (!in.at_end()) {
    const auto pc = static_cast<std::uint32_t>(in.position());
    boundaries.insert(pc);
    const std::uint8_t byte = in.u1();
    const auto& info = opcode_info(byte);
    if (info.format == OperandFormat::invalid) {
      fail(ErrorCode::unknown_opcode, "opcode byte " + std::to_string(byte) + " at " + std::to_string(pc));
    }
    Instr ins;
    ins.offset = pc;
    ins.opcode = static_cast<Opcode>(byte);
    auto jump = [&](std::int64_t rel) {
      const std::int64_t target = static_cast<std::int64_t>(pc) + rel;
      if (target < 0 || target >= static_cast<std::int64_t>(code.size())) {
        fail(ErrorCode::malformed_class, "branch target " + std::to_string(target) + " out of code at " +
                                             std::to_string(pc));
      }
      targets.insert(static_cast<std::uint32_t>(target));
      return Label{static_cast<std::uint32_t>(target)};
    };

    switch (info.format) {
      case OperandFormat::none:
        if ((byte >= 0x1a && byte <= 0x2d) || (byte >= 0x3b && byte <= 0x4e)) {
          std::uint16_t idx = 0;
          ins.opcode = detail::canonical_short_form(byte, idx);
          ins.operand = LocalOperand{idx};
        }
        break;
      case OperandFormat::local_u1: ins.operand = LocalOperand{in.u1()}; break;
      case OperandFormat::byte_s1: ins.operand = IntOperand{in.s1()}; break;
      case OperandFormat::short_s2: ins.operand = IntOperand{in.s2()}; break;
      case OperandFormat::pool_u1:
        ins.operand = detail::const_from_pool(pool, in.u1(), false);
        break;
      case OperandFormat::pool_u2: {
        const std::uint16_t idx = in.u2();
        const auto op = ins.opcode;
        if (op == Opcode::ldc_w || op == Opcode::ldc2_w) {
          ins.operand = detail::const_from_pool(pool, idx, op == Opcode::ldc2_w);
          ins.opcode = Opcode::ldc;
        } else if (op == Opcode::new_ || op == Opcode::anewarray || op == Opcode::checkcast ||
                   op == Opcode::instanceof) {
          ins.operand = TypeOperand{pool.class_name(idx), 0};
        } else {
          ins.operand = detail::member_from_pool(pool, idx, op);
        }
        break;
      }
      case OperandFormat::branch_s2: ins.operand = JumpOperand{jump(in.s2())}; break;
      case OperandFormat::branch_s4:
        ins.operand = JumpOperand{jump(in.s4())};
        ins.opcode = ins.opcode == Opcode::goto_w ? Opcode::goto_ : Opcode::jsr;
        break;
      case OperandFormat::iinc: {
        const std::uint16_t idx = in.u1();
        ins.operand = IincOperand{idx, in.s1()};
        break;
      }
      case OperandFormat::tableswitch: {
        while (in.position() % 4 != 0) in.u1();
        SwitchOperand sw;
        sw.default_target = jump(in.s4());
        sw.low = in.s4();
        sw.high = in.s4();
        if (sw.high < sw.low) fail(ErrorCode::malformed_class, "TABLESWITCH high < low at " + std::to_string(pc));
        for (std::int64_t key = sw.low; key <= sw.high; ++key) {
          sw.cases.emplace_back(static_cast<std::int32_t>(key), jump(in.s4()));
        }
        ins.operand = std::move(sw);
        break;
      }
      case OperandFormat::lookupswitch: {
        while (in.position() % 4 != 0) in.u1();
        SwitchOperand sw;
        sw.default_target = jump(in.s4());
        const std::int32_t npairs = in.s4();
        if (npairs < 0) fail(ErrorCode::malformed_class, "negative LOOKUPSWITCH npairs at " + std::to_string(pc));
        for (std::int32_t i = 0; i < npairs; ++i) {
          const std::int32_t key = in.s4();
          sw.cases.emplace_back(key, jump(in.s4()));
        }
        ins.operand = std::move(sw);
        break;
      }
      case OperandFormat::invokeinterface: {
        const std::uint16_t idx = in.u2();
        in.u1();  // count, derivable from the descriptor
        in.u1();
        ins.operand = detail::member_from_pool(pool, idx, ins.opcode);
        break;
      }
      case OperandFormat::invokedynamic: {
        const std::uint16_t idx = in.u2();
        in.u2();
        const auto& e = pool.at(idx, classfile::PoolTag::invoke_dynamic);
        auto [name, desc] = pool.name_and_type(e.ref2);
        ins.operand = DynamicOperand{std::move(name), std::move(desc)};
        break;
      }
      case OperandFormat::newarray: {
        const auto atype = in.u1();
        if (!newarray_descriptor(atype)) {
          fail(ErrorCode::malformed_class, "bad NEWARRAY type " + std::to_string(atype));
        }
        ins.operand = ArrayTypeOperand{atype};
        break;
      }
      case OperandFormat::multianewarray: {
        const std::uint16_t idx = in.u2();
        const std::uint8_t dims = in.u1();
        if (dims == 0) fail(ErrorCode::malformed_class, "MULTIANEWARRAY with zero dimensions");
        ins.operand = TypeOperand{pool.class_name(idx), dims};
        break;
      }
      case OperandFormat::wide: {
        const std::uint8_t inner = in.u1();
        const std::uint16_t idx = in.u2();
        ins.opcode = static_cast<Opcode>(inner);
        if (ins.opcode == Opcode::iinc) {
          ins.operand = IincOperand{idx, in.s2()};
        } else if (in_range(ins.opcode, Opcode::iload, Opcode::aload) ||
                   in_range(ins.opcode, Opcode::istore, Opcode::astore) || ins.opcode == Opcode::ret) {
          ins.operand = LocalOperand{idx};
        } else {
          fail(ErrorCode::malformed_class, "WIDE applied to opcode " + std::to_string(inner));
        }
        break;
      }
      case OperandFormat::invalid: break;
    }
    body.push_back(std::move(ins));
  }

  const auto code_length = static_cast<std::uint32_t>(code.size());
  auto check_boundary = [&](std::uint32_t off, bool allow_end) {
    if (boundaries.count(off) == 0 && !(allow_end && off == code_length)) {
      fail(ErrorCode::malformed_class, "offset " + std::to_string(off) + " is not an instruction boundary");
    }
  };
  for (auto t : targets) check_boundary(t, false);

  for (const auto& raw : exception_table) {
    check_boundary(raw.start_pc, false);
    check_boundary(raw.end_pc, true);
    check_boundary(raw.handler_pc, false);
    if (raw.start_pc >= raw.end_pc) {
      fail(ErrorCode::malformed_class, "exception range start " + std::to_string(raw.start_pc) +
                                           " not before end " + std::to_string(raw.end_pc));
    }
    TryRegion region{Label{raw.start_pc}, Label{raw.end_pc}, Label{raw.handler_pc}, std::nullopt};
    if (raw.catch_type != 0) region.catch_type = pool.class_name(raw.catch_type);
    targets.insert(raw.start_pc);
    targets.insert(raw.end_pc);
    targets.insert(raw.handler_pc);
    out.try_regions.push_back(std::move(region));
  }

  out.instructions.reserve(body.size() + targets.size());
  for (auto& ins : body) {
    if (targets.count(ins.offset)) out.instructions.push_back({Opcode::label, Label{ins.offset}, ins.offset});
    out.instructions.push_back(std::move(ins));
  }
  if (targets.count(code_length)) out.instructions.push_back({Opcode::label, Label{code_length}, code_length});
  return out;
}

}  // namespace jnify::bytecode
