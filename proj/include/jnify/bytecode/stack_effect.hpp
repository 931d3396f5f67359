#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "jnify/bytecode/instr.hpp"
#include "jnify/classfile/descriptor.hpp"
#include "jnify/error.hpp"

namespace jnify::bytecode {

/// Kind of one operand-stack value. Long and double are single values here;
/// their two-slot JVM width is accounted for by slot_width().
enum class SlotKind : std::uint8_t { int_, long_, float_, double_, ref };

constexpr char to_char(SlotKind k) {
  switch (k) {
    case SlotKind::int_: return 'I';
    case SlotKind::long_: return 'J';
    case SlotKind::float_: return 'F';
    case SlotKind::double_: return 'D';
    case SlotKind::ref: return 'A';
  }
  return '?';
}

constexpr std::size_t slot_width(SlotKind k) { return k == SlotKind::long_ || k == SlotKind::double_ ? 2 : 1; }
constexpr bool is_category2(SlotKind k) { return slot_width(k) == 2; }

inline SlotKind slot_kind_of(const classfile::JType& t) {
  using classfile::TypeKind;
  switch (t.kind()) {
    case TypeKind::long_: return SlotKind::long_;
    case TypeKind::float_: return SlotKind::float_;
    case TypeKind::double_: return SlotKind::double_;
    case TypeKind::object:
    case TypeKind::array: return SlotKind::ref;
    default: return SlotKind::int_;
  }
}

inline SlotKind slot_kind_of_descriptor(std::string_view field_desc) {
  return slot_kind_of(classfile::parse_field_type(field_desc));
}

/// Values consumed and produced by one instruction, listed bottom to top.
struct StackEffect {
  std::vector<SlotKind> pops;
  std::vector<SlotKind> pushes;

  [[nodiscard]] std::string to_string() const {
    std::string out = "[";
    for (auto k : pops) out += to_char(k);
    out += "] -> [";
    for (auto k : pushes) out += to_char(k);
    return out + "]";
  }
  bool operator==(const StackEffect&) const = default;
};

/// Shape of a DUP/POP/SWAP family instruction once the kinds on top of the
/// stack are known: `pop_count` values are removed and `push_order` lists,
/// bottom to top, which of them (0 = deepest removed) are pushed back.
struct Shuffle {
  std::size_t pop_count = 0;
  std::vector<std::size_t> push_order;
};

constexpr bool is_shuffle(Opcode op) { return in_range(op, Opcode::pop, Opcode::swap); }

/// `stack` lists current value kinds bottom to top.
inline Shuffle shuffle_for(Opcode op, std::span<const SlotKind> stack) {
  auto top = [&](std::size_t i) -> SlotKind {
    if (i >= stack.size()) {
      fail(ErrorCode::inconsistent_stack_depth, std::string(mnemonic(op)) + " underflows the operand stack");
    }
    return stack[stack.size() - 1 - i];
  };
  auto require_c1 = [&](std::size_t i) {
    if (is_category2(top(i))) {
      fail(ErrorCode::inconsistent_stack_depth, std::string(mnemonic(op)) + " applied to a category-2 value");
    }
  };
  switch (op) {
    case Opcode::pop: require_c1(0); return {1, {}};
    case Opcode::pop2:
      if (is_category2(top(0))) return {1, {}};
      require_c1(1);
      return {2, {}};
    case Opcode::dup: require_c1(0); return {1, {0, 0}};
    case Opcode::dup_x1: require_c1(0); require_c1(1); return {2, {1, 0, 1}};
    case Opcode::dup_x2:
      require_c1(0);
      if (is_category2(top(1))) return {2, {1, 0, 1}};
      require_c1(2);
      return {3, {2, 0, 1, 2}};
    case Opcode::dup2:
      if (is_category2(top(0))) return {1, {0, 0}};
      require_c1(1);
      return {2, {0, 1, 0, 1}};
    case Opcode::dup2_x1:
      if (is_category2(top(0))) {
        require_c1(1);
        return {2, {1, 0, 1}};
      }
      require_c1(1);
      require_c1(2);
      return {3, {1, 2, 0, 1, 2}};
    case Opcode::dup2_x2:
      if (is_category2(top(0))) {
        if (is_category2(top(1))) return {2, {1, 0, 1}};
        require_c1(2);
        return {3, {2, 0, 1, 2}};
      }
      require_c1(1);
      if (is_category2(top(2))) return {3, {1, 2, 0, 1, 2}};
      require_c1(3);
      return {4, {2, 3, 0, 1, 2, 3}};
    case Opcode::swap: require_c1(0); require_c1(1); return {2, {1, 0}};
    default: fail(ErrorCode::unknown_opcode, std::string(mnemonic(op)) + " is not a stack shuffle");
  }
}

namespace detail {

inline StackEffect invoke_effect(const std::string& descriptor, bool has_receiver) {
  const auto sig = classfile::parse_descriptor(descriptor);
  StackEffect e;
  if (has_receiver) e.pops.push_back(SlotKind::ref);
  for (const auto& p : sig.param_types) e.pops.push_back(slot_kind_of(p));
  if (sig.return_type) e.pushes.push_back(slot_kind_of(*sig.return_type));
  return e;
}

}  // namespace detail

/// Exact stack movement of `in`. Shuffle instructions need the current
/// stack kinds to resolve their form; every other opcode ignores `stack`.
inline StackEffect stack_effect(const Instr& in, std::span<const SlotKind> stack = {}) {
  using K = SlotKind;
  using O = Opcode;
  const K I = K::int_, J = K::long_, F = K::float_, D = K::double_, A = K::ref;
  auto fx = [](std::vector<K> pops, std::vector<K> pushes) { return StackEffect{std::move(pops), std::move(pushes)}; };
  const O op = in.opcode;

  if (is_shuffle(op)) {
    const auto sh = shuffle_for(op, stack);
    StackEffect e;
    e.pops.assign(stack.end() - static_cast<std::ptrdiff_t>(sh.pop_count), stack.end());
    for (auto idx : sh.push_order) e.pushes.push_back(e.pops[idx]);
    return e;
  }

  switch (op) {
    case O::nop: return {};
    case O::aconst_null: return fx({}, {A});
    case O::iconst_m1: case O::iconst_0: case O::iconst_1: case O::iconst_2:
    case O::iconst_3: case O::iconst_4: case O::iconst_5: case O::bipush: case O::sipush:
      return fx({}, {I});
    case O::lconst_0: case O::lconst_1: return fx({}, {J});
    case O::fconst_0: case O::fconst_1: case O::fconst_2: return fx({}, {F});
    case O::dconst_0: case O::dconst_1: return fx({}, {D});
    case O::ldc: {
      const auto& c = in.as<ConstOperand>();
      switch (c.kind) {
        case ConstOperand::Kind::int_: return fx({}, {I});
        case ConstOperand::Kind::float_: return fx({}, {F});
        case ConstOperand::Kind::long_: return fx({}, {J});
        case ConstOperand::Kind::double_: return fx({}, {D});
        default: return fx({}, {A});
      }
    }
    case O::iload: return fx({}, {I});
    case O::lload: return fx({}, {J});
    case O::fload: return fx({}, {F});
    case O::dload: return fx({}, {D});
    case O::aload: return fx({}, {A});
    case O::istore: return fx({I}, {});
    case O::lstore: return fx({J}, {});
    case O::fstore: return fx({F}, {});
    case O::dstore: return fx({D}, {});
    case O::astore: return fx({A}, {});
    case O::iaload: case O::baload: case O::caload: case O::saload: return fx({A, I}, {I});
    case O::laload: return fx({A, I}, {J});
    case O::faload: return fx({A, I}, {F});
    case O::daload: return fx({A, I}, {D});
    case O::aaload: return fx({A, I}, {A});
    case O::iastore: case O::bastore: case O::castore: case O::sastore: return fx({A, I, I}, {});
    case O::lastore: return fx({A, I, J}, {});
    case O::fastore: return fx({A, I, F}, {});
    case O::dastore: return fx({A, I, D}, {});
    case O::aastore: return fx({A, I, A}, {});
    case O::iadd: case O::isub: case O::imul: case O::idiv: case O::irem: case O::iand: case O::ior:
    case O::ixor: case O::ishl: case O::ishr: case O::iushr:
      return fx({I, I}, {I});
    case O::ladd: case O::lsub: case O::lmul: case O::ldiv: case O::lrem: case O::land: case O::lor:
    case O::lxor:
      return fx({J, J}, {J});
    case O::lshl: case O::lshr: case O::lushr: return fx({J, I}, {J});
    case O::fadd: case O::fsub: case O::fmul: case O::fdiv: case O::frem: return fx({F, F}, {F});
    case O::dadd: case O::dsub: case O::dmul: case O::ddiv: case O::drem: return fx({D, D}, {D});
    case O::ineg: return fx({I}, {I});
    case O::lneg: return fx({J}, {J});
    case O::fneg: return fx({F}, {F});
    case O::dneg: return fx({D}, {D});
    case O::iinc: return {};
    case O::i2l: return fx({I}, {J});
    case O::i2f: return fx({I}, {F});
    case O::i2d: return fx({I}, {D});
    case O::l2i: return fx({J}, {I});
    case O::l2f: return fx({J}, {F});
    case O::l2d: return fx({J}, {D});
    case O::f2i: return fx({F}, {I});
    case O::f2l: return fx({F}, {J});
    case O::f2d: return fx({F}, {D});
    case O::d2i: return fx({D}, {I});
    case O::d2l: return fx({D}, {J});
    case O::d2f: return fx({D}, {F});
    case O::i2b: case O::i2c: case O::i2s: return fx({I}, {I});
    case O::lcmp: return fx({J, J}, {I});
    case O::fcmpl: case O::fcmpg: return fx({F, F}, {I});
    case O::dcmpl: case O::dcmpg: return fx({D, D}, {I});
    case O::ifeq: case O::ifne: case O::iflt: case O::ifge: case O::ifgt: case O::ifle: return fx({I}, {});
    case O::if_icmpeq: case O::if_icmpne: case O::if_icmplt: case O::if_icmpge: case O::if_icmpgt:
    case O::if_icmple:
      return fx({I, I}, {});
    case O::if_acmpeq: case O::if_acmpne: return fx({A, A}, {});
    case O::ifnull: case O::ifnonnull: return fx({A}, {});
    case O::goto_: return {};
    case O::tableswitch: case O::lookupswitch: return fx({I}, {});
    case O::ireturn: return fx({I}, {});
    case O::lreturn: return fx({J}, {});
    case O::freturn: return fx({F}, {});
    case O::dreturn: return fx({D}, {});
    case O::areturn: return fx({A}, {});
    case O::return_: return {};
    case O::getstatic: return fx({}, {slot_kind_of_descriptor(in.as<MemberOperand>().descriptor)});
    case O::putstatic: return fx({slot_kind_of_descriptor(in.as<MemberOperand>().descriptor)}, {});
    case O::getfield: return fx({A}, {slot_kind_of_descriptor(in.as<MemberOperand>().descriptor)});
    case O::putfield: return fx({A, slot_kind_of_descriptor(in.as<MemberOperand>().descriptor)}, {});
    case O::invokevirtual: case O::invokespecial: case O::invokeinterface:
      return detail::invoke_effect(in.as<MemberOperand>().descriptor, true);
    case O::invokestatic: return detail::invoke_effect(in.as<MemberOperand>().descriptor, false);
    case O::invokedynamic: return detail::invoke_effect(in.as<DynamicOperand>().descriptor, false);
    case O::new_: return fx({}, {A});
    case O::newarray: case O::anewarray: return fx({I}, {A});
    case O::arraylength: return fx({A}, {I});
    case O::athrow: return fx({A}, {});
    case O::checkcast: return fx({A}, {A});
    case O::instanceof: return fx({A}, {I});
    case O::monitorenter: case O::monitorexit: return fx({A}, {});
    case O::multianewarray: {
      StackEffect e;
      e.pops.assign(in.as<TypeOperand>().dimensions, I);
      e.pushes.push_back(A);
      return e;
    }
    default:
      fail(ErrorCode::unknown_opcode, std::string(mnemonic(op)) + " at offset " + std::to_string(in.offset));
  }
}

}  // namespace jnify::bytecode
