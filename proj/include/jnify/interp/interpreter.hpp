#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "jnify/bytecode/method_checker.hpp"
#include "jnify/bytecode/stack_effect.hpp"
#include "jnify/classfile/class_model.hpp"
#include "jnify/classfile/mutf8.hpp"
#include "jnify/interp/heap.hpp"
#include "jnify/interp/value.hpp"

namespace jnify::interp {

using bytecode::Instr;
using bytecode::Opcode;

struct InterpOptions {
  std::uint64_t fuel = 10'000'000;  // instructions per top-level invocation
  bool check_stack_effects = true;  // compare every step against stack_effect()
  std::size_t max_call_depth = 512;
};

/// JVM semantics in the small: one frame per bytecode method, shared heap and
/// class table, first-match exception dispatch over each method's regions.
class Interpreter {
 public:
  Interpreter(ClassTable& classes, Heap& heap, InterpOptions options = {})
      : classes_(classes), heap_(heap), options_(options) {}

  ClassTable& classes() { return classes_; }
  Heap& heap() { return heap_; }
  [[nodiscard]] std::uint64_t steps() const noexcept { return steps_; }
  [[nodiscard]] std::uint64_t checked_steps() const noexcept { return checked_steps_; }

  /// Runs `cls.name desc` with `args` (receiver first for instance methods),
  /// resolving statically in `cls` and its supertypes.
  Outcome invoke(const std::string& cls, const std::string& name, const std::string& desc, std::vector<Value> args) {
    fuel_ = options_.fuel;
    depth_ = 0;
    return call_static_resolved(cls, name + desc, args);
  }

  /// Allocates an exception of class `cls` with no message.
  Value new_exception(const std::string& cls, const std::string& message = {}) {
    classes_.require(cls);
    HeapObject obj{cls, {}, {}, {}};
    if (!message.empty()) obj.fields["detailMessage"] = Value::ref(heap_.intern_string(message));
    return Value::ref(heap_.allocate(std::move(obj)));
  }

  Outcome throw_new(const std::string& cls, const std::string& message = {}) {
    return Outcome::thrown(new_exception(cls, message), cls);
  }

  /// Runtime class of a non-null reference.
  const std::string& class_of(const Value& v) { return heap_.at(v).class_name; }

 private:
  struct Frame {
    const classfile::MethodModel* method = nullptr;
    const std::string* owner = nullptr;
    std::vector<Value> locals;
    std::vector<Value> stack;
  };

  struct Thrown {
    Value ref;
  };

  Outcome call_static_resolved(const std::string& cls, const std::string& key, std::vector<Value>& args) {
    std::string declaring;
    const auto* impl = classes_.find_method(cls, key, &declaring);
    if (!impl) fail(ErrorCode::linkage_error, "no method " + cls + "." + key);
    return run_impl(*impl, declaring, args);
  }

  Outcome run_impl(const MethodImpl& impl, const std::string& declaring, std::vector<Value>& args) {
    ensure_initialized(declaring);
    if (impl.native) return impl.native(*this, args);
    if (++depth_ > options_.max_call_depth) {
      --depth_;
      return throw_new("java/lang/StackOverflowError");
    }
    auto out = execute(*impl.bytecode, classes_.require(declaring).name, args);
    --depth_;
    return out;
  }

  void ensure_initialized(const std::string& cls) {
    auto& info = classes_.require(cls);
    if (info.initialized) return;
    info.initialized = true;
    for (const auto& [name, desc] : info.static_field_types) {
      if (!info.statics.count(name)) info.statics[name] = default_value(desc);
    }
    if (!info.super_name.empty()) ensure_initialized(info.super_name);
    auto it = info.methods.find("<clinit>()V");
    if (it != info.methods.end() && (it->second.bytecode || it->second.native)) {
      std::vector<Value> none;
      auto out = run_impl(it->second, cls, none);
      if (out.is_exception()) {
        fail(ErrorCode::linkage_error, "static initializer of " + cls + " threw " + out.exception_class);
      }
    }
  }

  static std::size_t arg_slots(const classfile::MethodSignature& sig, bool has_receiver) {
    return sig.param_slots() + (has_receiver ? 1 : 0);
  }

  Outcome execute(const classfile::MethodModel& m, const std::string& owner, std::vector<Value>& args);

  ClassTable& classes_;
  Heap& heap_;
  InterpOptions options_;
  std::uint64_t fuel_ = 0;
  std::uint64_t steps_ = 0;
  std::uint64_t checked_steps_ = 0;
  std::size_t depth_ = 0;
};

namespace detail {

inline std::int32_t f2i(double v) {
  if (std::isnan(v)) return 0;
  if (v >= 2147483648.0) return std::numeric_limits<std::int32_t>::max();
  if (v <= -2147483648.0) return std::numeric_limits<std::int32_t>::min();
  return static_cast<std::int32_t>(v);
}

inline std::int64_t f2l(double v) {
  if (std::isnan(v)) return 0;
  if (v >= 9223372036854775808.0) return std::numeric_limits<std::int64_t>::max();
  if (v <= -9223372036854775808.0) return std::numeric_limits<std::int64_t>::min();
  return static_cast<std::int64_t>(v);
}

template <class T>
std::int32_t fcmp(T a, T b, std::int32_t nan_result) {
  if (std::isnan(a) || std::isnan(b)) return nan_result;
  return a > b ? 1 : (a < b ? -1 : 0);
}

inline std::int32_t wrap32(std::int64_t v) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(v)); }

inline std::int32_t int_op(Opcode op, std::int32_t a, std::int32_t b) {
  const auto ua = static_cast<std::uint32_t>(a), ub = static_cast<std::uint32_t>(b);
  switch (op) {
    case Opcode::iadd: return static_cast<std::int32_t>(ua + ub);
    case Opcode::isub: return static_cast<std::int32_t>(ua - ub);
    case Opcode::imul: return static_cast<std::int32_t>(ua * ub);
    case Opcode::iand: return a & b;
    case Opcode::ior: return a | b;
    case Opcode::ixor: return a ^ b;
    case Opcode::ishl: return static_cast<std::int32_t>(ua << (b & 0x1F));
    case Opcode::ishr: return a >> (b & 0x1F);
    case Opcode::iushr: return static_cast<std::int32_t>(ua >> (b & 0x1F));
    case Opcode::idiv: return b == -1 ? static_cast<std::int32_t>(0u - ua) : a / b;
    case Opcode::irem: return b == -1 ? 0 : a % b;
    default: fail(ErrorCode::oracle_unsupported, std::string(mnemonic(op)));
  }
}

inline std::int64_t long_op(Opcode op, std::int64_t a, std::int64_t b) {
  const auto ua = static_cast<std::uint64_t>(a), ub = static_cast<std::uint64_t>(b);
  switch (op) {
    case Opcode::ladd: return static_cast<std::int64_t>(ua + ub);
    case Opcode::lsub: return static_cast<std::int64_t>(ua - ub);
    case Opcode::lmul: return static_cast<std::int64_t>(ua * ub);
    case Opcode::land: return a & b;
    case Opcode::lor: return a | b;
    case Opcode::lxor: return a ^ b;
    case Opcode::lshl: return static_cast<std::int64_t>(ua << (b & 0x3F));
    case Opcode::lshr: return a >> (b & 0x3F);
    case Opcode::lushr: return static_cast<std::int64_t>(ua >> (b & 0x3F));
    case Opcode::ldiv: return b == -1 ? static_cast<std::int64_t>(0u - ua) : a / b;
    case Opcode::lrem: return b == -1 ? 0 : a % b;
    default: fail(ErrorCode::oracle_unsupported, std::string(mnemonic(op)));
  }
}

template <class T>
T float_op(Opcode op, T a, T b) {
  switch (op) {
    case Opcode::fadd: case Opcode::dadd: return a + b;
    case Opcode::fsub: case Opcode::dsub: return a - b;
    case Opcode::fmul: case Opcode::dmul: return a * b;
    case Opcode::fdiv: case Opcode::ddiv: return a / b;
    default: return std::fmod(a, b);
  }
}

inline bool int_compare(Opcode op, std::int32_t a, std::int32_t b) {
  switch (op) {
    case Opcode::ifeq: case Opcode::if_icmpeq: return a == b;
    case Opcode::ifne: case Opcode::if_icmpne: return a != b;
    case Opcode::iflt: case Opcode::if_icmplt: return a < b;
    case Opcode::ifge: case Opcode::if_icmpge: return a >= b;
    case Opcode::ifgt: case Opcode::if_icmpgt: return a > b;
    default: return a <= b;
  }
}

/// Element descriptor for an array-typed class name ("[I" -> "I").
inline std::string element_desc(const std::string& array_desc) { return array_desc.substr(1); }

inline std::string class_name_for_desc(const std::string& desc) {
  if (desc.size() >= 2 && desc.front() == 'L') return desc.substr(1, desc.size() - 2);
  return desc;
}

}  // namespace detail

inline Outcome Interpreter::execute(const classfile::MethodModel& m, const std::string& owner,
                                    std::vector<Value>& args) {
  using O = Opcode;
  using K = Value::Kind;
  const auto sig = m.signature();
  if (args.size() != sig.param_types.size() + (m.is_static() ? 0 : 1)) {
    fail(ErrorCode::linkage_error, owner + "." + m.name + m.descriptor + ": wrong argument count");
  }
  Frame f;
  f.method = &m;
  f.owner = &owner;
  f.locals.assign(std::max<std::size_t>(m.max_locals(), arg_slots(sig, !m.is_static())), Value::null());
  {
    std::size_t slot = 0, a = 0;
    if (!m.is_static()) f.locals[slot++] = args[a++];
    for (const auto& p : sig.param_types) {
      f.locals[slot] = args[a++];
      slot += p.slot_count();
    }
  }

  const auto& code = m.instructions;
  std::map<std::uint32_t, std::size_t> label_index;
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (code[i].is_label()) label_index[code[i].as<bytecode::Label>().offset] = i;
  }
  auto jump = [&](const bytecode::Label& l) -> std::size_t {
    auto it = label_index.find(l.offset);
    if (it == label_index.end()) fail(ErrorCode::linkage_error, "jump to missing label " + l.name());
    return it->second;
  };

  auto& st = f.stack;
  auto pop = [&]() {
    if (st.empty()) fail(ErrorCode::stack_effect_mismatch, "operand stack underflow in " + m.name);
    Value v = st.back();
    st.pop_back();
    return v;
  };
  auto push = [&](Value v) { st.push_back(v); };

  std::size_t pc = 0;
  while (pc < code.size()) {
    const Instr& in = code[pc];
    if (in.is_label()) {
      ++pc;
      continue;
    }
    if (fuel_ == 0) fail(ErrorCode::step_limit_exceeded, "step limit reached in " + owner + "." + m.name);
    --fuel_;
    ++steps_;
    if (bytecode::is_unsupported(in)) fail(ErrorCode::oracle_unsupported, bytecode::to_string(in));

    // Stack-effect self-check: snapshot the kinds before the step.
    std::vector<bytecode::SlotKind> kinds_before;
    if (options_.check_stack_effects) {
      kinds_before.reserve(st.size());
      for (const auto& v : st) kinds_before.push_back(slot_kind(v));
    }

    std::optional<Value> thrown;
    auto raise = [&](const std::string& cls, const std::string& msg = {}) { thrown = new_exception(cls, msg); };
    auto null_check = [&](const Value& v) {
      if (v.is_null()) raise("java/lang/NullPointerException");
      return !v.is_null();
    };
    std::size_t next = pc + 1;
    bool returned = false;
    Outcome result;

    const O op = in.opcode;
    switch (op) {
      case O::nop: break;
      case O::aconst_null: push(Value::null()); break;
      case O::iconst_m1: case O::iconst_0: case O::iconst_1: case O::iconst_2: case O::iconst_3:
      case O::iconst_4: case O::iconst_5:
        push(Value::i32(static_cast<int>(op) - static_cast<int>(O::iconst_0)));
        break;
      case O::lconst_0: case O::lconst_1: push(Value::i64(static_cast<int>(op) - static_cast<int>(O::lconst_0))); break;
      case O::fconst_0: case O::fconst_1: case O::fconst_2:
        push(Value::f32(static_cast<float>(static_cast<int>(op) - static_cast<int>(O::fconst_0))));
        break;
      case O::dconst_0: case O::dconst_1:
        push(Value::f64(static_cast<double>(static_cast<int>(op) - static_cast<int>(O::dconst_0))));
        break;
      case O::bipush: case O::sipush: push(Value::i32(in.as<bytecode::IntOperand>().value)); break;
      case O::ldc: {
        const auto& c = in.as<bytecode::ConstOperand>();
        using CK = bytecode::ConstOperand::Kind;
        switch (c.kind) {
          case CK::int_: push(Value::i32(static_cast<std::int32_t>(c.bits))); break;
          case CK::float_: push({K::f32, c.bits}); break;
          case CK::long_: push(Value::i64(static_cast<std::int64_t>(c.bits))); break;
          case CK::double_: push({K::f64, c.bits}); break;
          case CK::string: push(Value::ref(heap_.intern_string(c.text))); break;
          case CK::class_: push(Value::ref(heap_.class_object(c.text))); break;
          default: fail(ErrorCode::oracle_unsupported, bytecode::to_string(in));
        }
        break;
      }
      case O::iload: case O::lload: case O::fload: case O::dload: case O::aload:
        push(f.locals.at(in.as<bytecode::LocalOperand>().index));
        break;
      case O::istore: case O::lstore: case O::fstore: case O::dstore: case O::astore:
        f.locals.at(in.as<bytecode::LocalOperand>().index) = pop();
        break;
      case O::iinc: {
        const auto& inc = in.as<bytecode::IincOperand>();
        auto& v = f.locals.at(inc.index);
        v = Value::i32(detail::int_op(O::iadd, v.as_i32(), inc.delta));
        break;
      }

      case O::iaload: case O::laload: case O::faload: case O::daload: case O::aaload: case O::baload:
      case O::caload: case O::saload: {
        const auto index = pop().as_i32();
        const auto arr = pop();
        if (!null_check(arr)) break;
        auto& obj = heap_.at(arr);
        if (index < 0 || static_cast<std::size_t>(index) >= obj.elements.size()) {
          raise("java/lang/ArrayIndexOutOfBoundsException",
                "Index " + std::to_string(index) + " out of bounds for length " + std::to_string(obj.elements.size()));
          break;
        }
        push(obj.elements[static_cast<std::size_t>(index)]);
        break;
      }
      case O::iastore: case O::lastore: case O::fastore: case O::dastore: case O::aastore: case O::bastore:
      case O::castore: case O::sastore: {
        const auto value = pop();
        const auto index = pop().as_i32();
        const auto arr = pop();
        if (!null_check(arr)) break;
        auto& obj = heap_.at(arr);
        if (index < 0 || static_cast<std::size_t>(index) >= obj.elements.size()) {
          raise("java/lang/ArrayIndexOutOfBoundsException",
                "Index " + std::to_string(index) + " out of bounds for length " + std::to_string(obj.elements.size()));
          break;
        }
        const auto elem = detail::element_desc(obj.class_name);
        if (op == O::aastore && !value.is_null() &&
            !classes_.is_assignable(class_of(value), detail::class_name_for_desc(elem))) {
          raise("java/lang/ArrayStoreException", class_of(value));
          break;
        }
        heap_.at(arr).elements[static_cast<std::size_t>(index)] = narrow_to(elem, value);
        break;
      }

      case O::pop: case O::pop2: case O::dup: case O::dup_x1: case O::dup_x2: case O::dup2: case O::dup2_x1:
      case O::dup2_x2: case O::swap: {
        std::vector<bytecode::SlotKind> kinds;
        for (const auto& v : st) kinds.push_back(slot_kind(v));
        const auto sh = bytecode::shuffle_for(op, kinds);
        std::vector<Value> taken(st.end() - static_cast<std::ptrdiff_t>(sh.pop_count), st.end());
        st.resize(st.size() - sh.pop_count);
        for (auto k : sh.push_order) push(taken[k]);
        break;
      }

      case O::iadd: case O::isub: case O::imul: case O::iand: case O::ior: case O::ixor: case O::ishl:
      case O::ishr: case O::iushr: case O::idiv: case O::irem: {
        const auto b = pop().as_i32();
        const auto a = pop().as_i32();
        if ((op == O::idiv || op == O::irem) && b == 0) {
          raise("java/lang/ArithmeticException", "/ by zero");
          break;
        }
        push(Value::i32(detail::int_op(op, a, b)));
        break;
      }
      case O::ladd: case O::lsub: case O::lmul: case O::land: case O::lor: case O::lxor: case O::ldiv:
      case O::lrem: {
        const auto b = pop().as_i64();
        const auto a = pop().as_i64();
        if ((op == O::ldiv || op == O::lrem) && b == 0) {
          raise("java/lang/ArithmeticException", "/ by zero");
          break;
        }
        push(Value::i64(detail::long_op(op, a, b)));
        break;
      }
      case O::lshl: case O::lshr: case O::lushr: {
        const auto b = pop().as_i32();
        const auto a = pop().as_i64();
        push(Value::i64(detail::long_op(op, a, b)));
        break;
      }
      case O::fadd: case O::fsub: case O::fmul: case O::fdiv: case O::frem: {
        const auto b = pop().as_f32();
        const auto a = pop().as_f32();
        push(Value::f32(detail::float_op(op, a, b)));
        break;
      }
      case O::dadd: case O::dsub: case O::dmul: case O::ddiv: case O::drem: {
        const auto b = pop().as_f64();
        const auto a = pop().as_f64();
        push(Value::f64(detail::float_op(op, a, b)));
        break;
      }
      case O::ineg: push(Value::i32(detail::int_op(O::isub, 0, pop().as_i32()))); break;
      case O::lneg: push(Value::i64(detail::long_op(O::lsub, 0, pop().as_i64()))); break;
      case O::fneg: push(Value::f32(-pop().as_f32())); break;
      case O::dneg: push(Value::f64(-pop().as_f64())); break;

      case O::i2l: push(Value::i64(pop().as_i32())); break;
      case O::i2f: push(Value::f32(static_cast<float>(pop().as_i32()))); break;
      case O::i2d: push(Value::f64(static_cast<double>(pop().as_i32()))); break;
      case O::l2i: push(Value::i32(detail::wrap32(pop().as_i64()))); break;
      case O::l2f: push(Value::f32(static_cast<float>(pop().as_i64()))); break;
      case O::l2d: push(Value::f64(static_cast<double>(pop().as_i64()))); break;
      case O::f2i: push(Value::i32(detail::f2i(pop().as_f32()))); break;
      case O::f2l: push(Value::i64(detail::f2l(pop().as_f32()))); break;
      case O::f2d: push(Value::f64(static_cast<double>(pop().as_f32()))); break;
      case O::d2i: push(Value::i32(detail::f2i(pop().as_f64()))); break;
      case O::d2l: push(Value::i64(detail::f2l(pop().as_f64()))); break;
      case O::d2f: push(Value::f32(static_cast<float>(pop().as_f64()))); break;
      case O::i2b: push(narrow_to("B", pop())); break;
      case O::i2c: push(narrow_to("C", pop())); break;
      case O::i2s: push(narrow_to("S", pop())); break;

      case O::lcmp: {
        const auto b = pop().as_i64();
        const auto a = pop().as_i64();
        push(Value::i32(a > b ? 1 : (a < b ? -1 : 0)));
        break;
      }
      case O::fcmpl: case O::fcmpg: {
        const auto b = pop().as_f32();
        const auto a = pop().as_f32();
        push(Value::i32(detail::fcmp(a, b, op == O::fcmpl ? -1 : 1)));
        break;
      }
      case O::dcmpl: case O::dcmpg: {
        const auto b = pop().as_f64();
        const auto a = pop().as_f64();
        push(Value::i32(detail::fcmp(a, b, op == O::dcmpl ? -1 : 1)));
        break;
      }

      case O::ifeq: case O::ifne: case O::iflt: case O::ifge: case O::ifgt: case O::ifle:
        if (detail::int_compare(op, pop().as_i32(), 0)) next = jump(in.as<bytecode::JumpOperand>().target);
        break;
      case O::if_icmpeq: case O::if_icmpne: case O::if_icmplt: case O::if_icmpge: case O::if_icmpgt:
      case O::if_icmple: {
        const auto b = pop().as_i32();
        const auto a = pop().as_i32();
        if (detail::int_compare(op, a, b)) next = jump(in.as<bytecode::JumpOperand>().target);
        break;
      }
      case O::if_acmpeq: case O::if_acmpne: {
        const auto b = pop();
        const auto a = pop();
        if ((a == b) == (op == O::if_acmpeq)) next = jump(in.as<bytecode::JumpOperand>().target);
        break;
      }
      case O::ifnull: case O::ifnonnull:
        if (pop().is_null() == (op == O::ifnull)) next = jump(in.as<bytecode::JumpOperand>().target);
        break;
      case O::goto_: next = jump(in.as<bytecode::JumpOperand>().target); break;
      case O::tableswitch: case O::lookupswitch: {
        const auto key = pop().as_i32();
        const auto& sw = in.as<bytecode::SwitchOperand>();
        auto target = sw.default_target;
        for (const auto& [k, l] : sw.cases) {
          if (k == key) {
            target = l;
            break;
          }
        }
        next = jump(target);
        break;
      }

      case O::ireturn: case O::lreturn: case O::freturn: case O::dreturn: case O::areturn: {
        auto v = pop();
        if (sig.return_type && op == O::ireturn) v = narrow_to(sig.return_type->descriptor(), v);
        result = Outcome::returned(v);
        returned = true;
        break;
      }
      case O::return_:
        result = Outcome::returned_void();
        returned = true;
        break;

      case O::getstatic: case O::putstatic: {
        const auto& mo = in.as<bytecode::MemberOperand>();
        std::string holder = mo.owner;
        for (std::string c = mo.owner; !c.empty(); c = classes_.require(c).super_name) {
          if (classes_.require(c).static_field_types.count(mo.name)) {
            holder = c;
            break;
          }
        }
        ensure_initialized(holder);
        auto& info = classes_.require(holder);
        if (op == O::getstatic) {
          auto it = info.statics.find(mo.name);
          push(it == info.statics.end() ? default_value(mo.descriptor) : it->second);
        } else {
          info.statics[mo.name] = narrow_to(mo.descriptor, pop());
        }
        break;
      }
      case O::getfield: {
        const auto& mo = in.as<bytecode::MemberOperand>();
        const auto obj = pop();
        if (!null_check(obj)) break;
        auto& fields = heap_.at(obj).fields;
        auto it = fields.find(mo.name);
        push(it == fields.end() ? default_value(mo.descriptor) : it->second);
        break;
      }
      case O::putfield: {
        const auto& mo = in.as<bytecode::MemberOperand>();
        const auto v = pop();
        const auto obj = pop();
        if (!null_check(obj)) break;
        heap_.at(obj).fields[mo.name] = narrow_to(mo.descriptor, v);
        break;
      }

      case O::invokevirtual: case O::invokespecial: case O::invokestatic: case O::invokeinterface: {
        const auto& mo = in.as<bytecode::MemberOperand>();
        const auto csig = classfile::parse_descriptor(mo.descriptor);
        const bool has_receiver = op != O::invokestatic;
        const std::size_t n = csig.param_types.size() + (has_receiver ? 1 : 0);
        if (st.size() < n) fail(ErrorCode::stack_effect_mismatch, "call underflows the stack");
        std::vector<Value> call_args(st.end() - static_cast<std::ptrdiff_t>(n), st.end());
        st.resize(st.size() - n);
        if (has_receiver && !null_check(call_args.front())) break;
        const std::string key = mo.name + mo.descriptor;
        Outcome out;
        if (op == O::invokevirtual || op == O::invokeinterface) {
          std::string declaring;
          const auto* impl = classes_.find_method(class_of(call_args.front()), key, &declaring);
          if (!impl) fail(ErrorCode::linkage_error, "no method " + class_of(call_args.front()) + "." + key);
          out = run_impl(*impl, declaring, call_args);
        } else {
          out = call_static_resolved(mo.owner, key, call_args);
        }
        if (out.is_exception()) {
          thrown = out.value;
          break;
        }
        if (csig.return_type) push(out.value);
        break;
      }

      case O::new_: {
        const auto& name = in.as<bytecode::TypeOperand>().name;
        ensure_initialized(name);
        push(Value::ref(heap_.allocate({name, {}, {}, {}})));
        break;
      }
      case O::newarray: case O::anewarray: {
        const auto n = pop().as_i32();
        if (n < 0) {
          raise("java/lang/NegativeArraySizeException", std::to_string(n));
          break;
        }
        std::string desc;
        if (op == O::newarray) {
          const auto* d = bytecode::newarray_descriptor(in.as<bytecode::ArrayTypeOperand>().atype);
          if (!d) fail(ErrorCode::oracle_unsupported, "bad NEWARRAY type");
          desc = d;
        } else {
          const auto& t = in.as<bytecode::TypeOperand>().name;
          desc = "[" + (t.front() == '[' ? t : "L" + t + ";");
        }
        HeapObject arr{desc, {}, std::vector<Value>(static_cast<std::size_t>(n), default_value(desc.substr(1))), {}};
        push(Value::ref(heap_.allocate(std::move(arr))));
        break;
      }
      case O::multianewarray: {
        const auto& t = in.as<bytecode::TypeOperand>();
        std::vector<std::int32_t> counts(t.dimensions);
        for (std::size_t k = t.dimensions; k-- > 0;) counts[k] = pop().as_i32();
        bool negative = false;
        for (auto c : counts) negative = negative || c < 0;
        if (negative) {
          raise("java/lang/NegativeArraySizeException");
          break;
        }
        std::function<Value(const std::string&, std::size_t)> build = [&](const std::string& desc, std::size_t level) {
          const auto n = static_cast<std::size_t>(counts[level]);
          HeapObject arr{desc, {}, std::vector<Value>(n, default_value(desc.substr(1))), {}};
          const auto id = heap_.allocate(std::move(arr));
          if (level + 1 < counts.size()) {
            for (std::size_t k = 0; k < n; ++k) {
              auto inner = build(desc.substr(1), level + 1);
              heap_.at(id).elements[k] = inner;
            }
          }
          return Value::ref(id);
        };
        push(build(t.name, 0));
        break;
      }
      case O::arraylength: {
        const auto arr = pop();
        if (!null_check(arr)) break;
        push(Value::i32(static_cast<std::int32_t>(heap_.at(arr).elements.size())));
        break;
      }
      case O::athrow: {
        const auto ex = pop();
        if (!null_check(ex)) break;
        thrown = ex;
        break;
      }
      case O::checkcast: {
        const auto v = pop();
        const auto& target = in.as<bytecode::TypeOperand>().name;
        if (!v.is_null() && !classes_.is_assignable(class_of(v), target)) {
          raise("java/lang/ClassCastException", class_of(v) + " cannot be cast to " + target);
          break;
        }
        push(v);
        break;
      }
      case O::instanceof: {
        const auto v = pop();
        push(Value::i32(!v.is_null() && classes_.is_assignable(class_of(v), in.as<bytecode::TypeOperand>().name)));
        break;
      }
      default: fail(ErrorCode::oracle_unsupported, bytecode::to_string(in));
    }

    if (thrown) {
      // First covering region whose catch type matches, in table order.
      const auto& cls = class_of(*thrown);
      const bytecode::TryRegion* handler = nullptr;
      for (const auto& r : m.try_regions) {
        if (r.covers(in.offset) && (r.catch_all() || classes_.is_assignable(cls, *r.catch_type))) {
          handler = &r;
          break;
        }
      }
      if (!handler) return Outcome::thrown(*thrown, cls);
      st.clear();
      st.push_back(*thrown);
      pc = jump(handler->handler);
      continue;
    }

    if (options_.check_stack_effects) {
      const auto eff = bytecode::stack_effect(in, kinds_before);
      const auto base = kinds_before.size() - eff.pops.size();
      bool ok = kinds_before.size() >= eff.pops.size() &&
                std::equal(eff.pops.begin(), eff.pops.end(), kinds_before.begin() + static_cast<std::ptrdiff_t>(base));
      if (!returned) {
        ok = ok && st.size() == base + eff.pushes.size();
        for (std::size_t k = 0; ok && k < eff.pushes.size(); ++k) ok = slot_kind(st[base + k]) == eff.pushes[k];
      }
      if (!ok) {
        fail(ErrorCode::stack_effect_mismatch,
             bytecode::to_string(in) + " in " + owner + "." + m.name + " declared " + eff.to_string());
      }
      ++checked_steps_;
    }
    if (returned) return result;
    pc = next;
  }
  fail(ErrorCode::linkage_error, "fell off the end of " + owner + "." + m.name);
}

// ---------------------------------------------------------------------------
// Built-in classes

inline void ClassTable::install_builtins() {
  define(builtin::object, "");
  define("java/lang/Cloneable", "", {}, true);
  define("java/io/Serializable", "", {}, true);
  define("java/lang/CharSequence", builtin::object, {}, true);
  define("java/lang/String", builtin::object, {"java/lang/CharSequence", "java/io/Serializable"});
  define("java/lang/Class", builtin::object);
  define("java/lang/System", builtin::object);
  define("java/lang/StringBuilder", builtin::object, {"java/lang/CharSequence"});
  const std::vector<std::pair<const char*, const char*>> throwables = {
      {"java/lang/Throwable", builtin::object},
      {"java/lang/Exception", "java/lang/Throwable"},
      {"java/lang/Error", "java/lang/Throwable"},
      {"java/lang/StackOverflowError", "java/lang/Error"},
      {"java/lang/RuntimeException", "java/lang/Exception"},
      {"java/lang/ArithmeticException", "java/lang/RuntimeException"},
      {"java/lang/NullPointerException", "java/lang/RuntimeException"},
      {"java/lang/IndexOutOfBoundsException", "java/lang/RuntimeException"},
      {"java/lang/ArrayIndexOutOfBoundsException", "java/lang/IndexOutOfBoundsException"},
      {"java/lang/NegativeArraySizeException", "java/lang/RuntimeException"},
      {"java/lang/ClassCastException", "java/lang/RuntimeException"},
      {"java/lang/ArrayStoreException", "java/lang/RuntimeException"},
      {"java/lang/IllegalStateException", "java/lang/RuntimeException"},
      {"java/lang/IllegalArgumentException", "java/lang/RuntimeException"},
  };
  for (const auto& [name, super] : throwables) define(name, super);

  auto noop = [](Interpreter&, std::vector<Value>&) { return Outcome::returned_void(); };
  define_native(builtin::object, "<init>()V", false, noop);
  define_native("java/lang/Throwable", "<init>(Ljava/lang/String;)V", false,
                [](Interpreter& in, std::vector<Value>& a) {
                  in.heap().at(a[0]).fields["detailMessage"] = a[1];
                  return Outcome::returned_void();
                });
  define_native("java/lang/Throwable", "getMessage()Ljava/lang/String;", false,
                [](Interpreter& in, std::vector<Value>& a) {
                  auto& f = in.heap().at(a[0]).fields;
                  auto it = f.find("detailMessage");
                  return Outcome::returned(it == f.end() ? Value::null() : it->second);
                });
  define_native("java/lang/System", "loadLibrary(Ljava/lang/String;)V", true, noop);
  define_native("java/lang/String", "length()I", false, [](Interpreter& in, std::vector<Value>& a) {
    const auto u16 = classfile::decode_mutf8(in.heap().at(a[0]).text);
    return Outcome::returned(Value::i32(static_cast<std::int32_t>(u16.size())));
  });
  define_native("java/lang/StringBuilder", "<init>()V", false, noop);
  define_native("java/lang/StringBuilder", "<init>(Ljava/lang/String;)V", false,
                [](Interpreter& in, std::vector<Value>& a) {
                  if (a[1].is_null()) return in.throw_new("java/lang/NullPointerException");
                  in.heap().at(a[0]).text = in.heap().at(a[1]).text;
                  return Outcome::returned_void();
                });
  define_native("java/lang/StringBuilder", "toString()Ljava/lang/String;", false,
                [](Interpreter& in, std::vector<Value>& a) {
                  const auto text = in.heap().at(a[0]).text;
                  return Outcome::returned(Value::ref(in.heap().allocate({"java/lang/String", {}, {}, text})));
                });
}

}  // namespace jnify::interp
