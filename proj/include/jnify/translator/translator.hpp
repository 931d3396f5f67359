#pragma once

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "jnify/bytecode/method_checker.hpp"
#include "jnify/bytecode/stack_effect.hpp"
#include "jnify/classfile/class_model.hpp"
#include "jnify/translator/c_ast.hpp"
#include "jnify/translator/exceptions.hpp"

namespace jnify::translator {

using bytecode::Instr;
using bytecode::Opcode;
using classfile::JType;
using classfile::TypeKind;

// ---------------------------------------------------------------------------
// JNI type vocabulary

inline std::string jni_type(const JType& t) {
  switch (t.kind()) {
    case TypeKind::boolean: return "jboolean";
    case TypeKind::byte: return "jbyte";
    case TypeKind::char_: return "jchar";
    case TypeKind::short_: return "jshort";
    case TypeKind::int_: return "jint";
    case TypeKind::long_: return "jlong";
    case TypeKind::float_: return "jfloat";
    case TypeKind::double_: return "jdouble";
    default: return "jobject";
  }
}

/// Infix of the Call<T>MethodA / Get<T>Field families.
inline std::string jni_call_kind(const std::optional<JType>& t) {
  if (!t) return "Void";
  switch (t->kind()) {
    case TypeKind::boolean: return "Boolean";
    case TypeKind::byte: return "Byte";
    case TypeKind::char_: return "Char";
    case TypeKind::short_: return "Short";
    case TypeKind::int_: return "Int";
    case TypeKind::long_: return "Long";
    case TypeKind::float_: return "Float";
    case TypeKind::double_: return "Double";
    default: return "Object";
  }
}

/// jvalue member holding a value of type `t`.
inline char jvalue_member(const JType& t) {
  switch (t.kind()) {
    case TypeKind::boolean: return 'z';
    case TypeKind::byte: return 'b';
    case TypeKind::char_: return 'c';
    case TypeKind::short_: return 's';
    case TypeKind::int_: return 'i';
    case TypeKind::long_: return 'j';
    case TypeKind::float_: return 'f';
    case TypeKind::double_: return 'd';
    default: return 'l';
  }
}

/// Suffix of the typed stack macros (PushI, PopA, ...).
inline char slot_char(bytecode::SlotKind k) { return bytecode::to_char(k); }
inline char slot_char(const JType& t) { return slot_char(bytecode::slot_kind_of(t)); }

inline bool is_sub_int(const JType& t) {
  return t.kind() == TypeKind::boolean || t.kind() == TypeKind::byte || t.kind() == TypeKind::char_ ||
         t.kind() == TypeKind::short_;
}

/// Field-helper suffix: Z B C S I J F D L.
inline char field_kind(const JType& t) { return t.is_reference() ? 'L' : t.code(); }

// ---------------------------------------------------------------------------
// C literals

inline std::string int_literal(std::int32_t v) {
  if (v == std::numeric_limits<std::int32_t>::min()) return "(-2147483647 - 1)";
  return std::to_string(v);
}

inline std::string long_literal(std::int64_t v) {
  if (v == std::numeric_limits<std::int64_t>::min()) return "(-INT64_C(9223372036854775807) - 1)";
  return "INT64_C(" + std::to_string(v) + ")";
}

inline std::string float_literal(std::uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, sizeof f);
  char buf[64];
  if (!std::isfinite(f)) {
    std::snprintf(buf, sizeof buf, "FloatFromBits(0x%08xu)", static_cast<unsigned>(bits));
  } else {
    std::snprintf(buf, sizeof buf, "%af", static_cast<double>(f));
  }
  return buf;
}

inline std::string double_literal(std::uint64_t bits) {
  double d;
  std::memcpy(&d, &bits, sizeof d);
  char buf[64];
  if (!std::isfinite(d)) {
    std::snprintf(buf, sizeof buf, "DoubleFromBits(UINT64_C(0x%016llx))", static_cast<unsigned long long>(bits));
  } else {
    std::snprintf(buf, sizeof buf, "%a", d);
  }
  return buf;
}

/// C string literal for raw bytes (modified UTF-8 passes through as octal
/// escapes, which is what NewStringUTF expects).
inline std::string c_string_literal(std::string_view bytes) {
  std::string out = "\"";
  for (unsigned char c : bytes) {
    if (c == '"' || c == '\\') {
      out.push_back('\\');
      out.push_back(static_cast<char>(c));
    } else if (c >= 0x20 && c < 0x7F && c != '?') {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[5];
      std::snprintf(buf, sizeof buf, "\\%03o", c);
      out += buf;
    }
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------
// Translation context

struct TranslationCtx {
  classfile::MethodSignature signature;
  bool is_static = false;
  std::size_t max_stack = 0;
  std::size_t max_locals = 0;
  bytecode::DepthMap depth_map;
  std::vector<TryRegion> try_regions;
  std::string class_name;
  std::string mangled_name;

  // Interned JNI handles, looked up once at function entry.
  std::vector<std::string> const_classes;  // clsN
  struct Member {
    bool is_static = false;
    bool field = false;
    std::size_t cls = 0;
    std::string name;
    std::string descriptor;
    auto operator<=>(const Member&) const = default;
  };
  std::vector<Member> methods;  // midN
  std::vector<Member> fields;   // fidN
  bool uses_exception = false;

  std::string class_ref(const std::string& name) {
    for (std::size_t i = 0; i < const_classes.size(); ++i) {
      if (const_classes[i] == name) return "cls" + std::to_string(i);
    }
    const_classes.push_back(name);
    return "cls" + std::to_string(const_classes.size() - 1);
  }

  std::string member_ref(bool field, bool is_static, const std::string& owner, const std::string& name,
                         const std::string& descriptor) {
    class_ref(owner);
    std::size_t cls = 0;
    while (const_classes[cls] != owner) ++cls;
    Member m{is_static, field, cls, name, descriptor};
    auto& table = field ? fields : methods;
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i] == m) return (field ? "fid" : "mid") + std::to_string(i);
    }
    table.push_back(m);
    return (field ? "fid" : "mid") + std::to_string(table.size() - 1);
  }

  [[nodiscard]] std::string return_type() const {
    return signature.return_type ? jni_type(*signature.return_type) : "void";
  }

  /// Statement leaving the function with an exception pending.
  [[nodiscard]] CStmt error_return() const {
    if (!signature.return_type) return return_(std::nullopt);
    if (signature.return_type->is_reference()) return return_("NULL");
    return return_("(" + jni_type(*signature.return_type) + ")0");
  }

  [[nodiscard]] const bytecode::StackState& stack_before(std::size_t index) const {
    return *depth_map.before.at(index);
  }
};

// ---------------------------------------------------------------------------
// Exception dispatch

namespace detail {

inline std::vector<std::string> env_stack() { return {"env", "stack", "&sp"}; }

inline CStmt align_with_jvm() {
  auto s = call("", "AlignWithJVM", env_stack());
  s.set_depth = 1;
  return s;
}

inline std::vector<CStmt> catch_and_jump(const Label& handler) {
  return {call("", "ClearException", {"env"}), goto_(handler.name())};
}

}  // namespace detail

/// After a call: if the callee left an exception pending, test each covering
/// handler's type in table order; on a match clear it and jump, otherwise
/// return with it still pending.
inline std::vector<CStmt> translate_forwarded_exception_check(std::uint32_t site, TranslationCtx& ctx) {
  ctx.uses_exception = true;
  const auto regions = enclosing_regions(site, ctx.try_regions);
  if (regions.empty()) return {if_block("exception", {ctx.error_return()})};
  std::vector<CStmt> body{detail::align_with_jvm()};
  bool closed = false;
  for (const auto& r : regions) {
    if (r.catch_all()) {
      for (auto& s : detail::catch_and_jump(r.handler)) body.push_back(std::move(s));
      closed = true;
      break;
    }
    body.push_back(if_block("InstanceOf(env, stack, " + ctx.class_ref(*r.catch_type) + ")",
                            detail::catch_and_jump(r.handler)));
  }
  if (!closed) body.push_back(ctx.error_return());
  auto s = if_block("exception", std::move(body));
  s.set_depth = std::nullopt;
  return {s};
}

/// After a helper-backed operation: handler targets are known statically.
inline std::vector<CStmt> translate_system_exception_check(const CheckSite& site, TranslationCtx& ctx) {
  ctx.uses_exception = true;
  std::vector<std::pair<std::string, HandlerTarget>> targets;
  for (const auto& e : site.exceptions) {
    targets.emplace_back(system_exception_code(e), resolve_system_exception_target(site.offset, e, ctx.try_regions));
  }
  auto jump_body = [](const Label& l) {
    std::vector<CStmt> b{detail::align_with_jvm()};
    for (auto& s : detail::catch_and_jump(l)) b.push_back(std::move(s));
    return b;
  };
  bool uniform = !site.allocates;
  for (const auto& t : targets) uniform = uniform && t.second == targets.front().second;
  if (uniform) {
    if (const auto* j = std::get_if<JumpTarget>(&targets.front().second)) return {if_block("exception", jump_body(j->handler))};
    return {if_block("exception", {ctx.error_return()})};
  }
  // Group codes by handler label, keeping first-appearance order.
  std::vector<std::pair<Label, std::vector<std::string>>> groups;
  for (const auto& [code, target] : targets) {
    const auto* j = std::get_if<JumpTarget>(&target);
    if (!j) continue;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == j->handler; });
    if (it == groups.end()) {
      groups.push_back({j->handler, {code}});
    } else {
      it->second.push_back(code);
    }
  }
  std::vector<CStmt> body;
  for (const auto& [lbl, codes] : groups) {
    std::string cond;
    for (const auto& c : codes) cond += (cond.empty() ? "" : " || ") + std::string("exception == ") + c;
    body.push_back(if_block(cond, jump_body(lbl)));
  }
  if (site.allocates) {
    // Anything else came from the JVM (JBCRT_EXC_PENDING): dispatch on its
    // type like an exception forwarded from a call.
    auto forwarded = translate_forwarded_exception_check(site.offset, ctx).front().body;
    for (auto& s : forwarded) body.push_back(std::move(s));
  } else {
    body.push_back(ctx.error_return());
  }
  return {if_block("exception", std::move(body))};
}

/// ATHROW: the thrown object (a NullPointerException when null) becomes the
/// only stack value, is matched against the covering handlers in order, and
/// is thrown to the caller when none matches.
inline std::vector<CStmt> translate_athrow(std::uint32_t site, TranslationCtx& ctx) {
  auto align = call("", "AlignThrown", detail::env_stack(), 1);
  align.set_depth = 1;
  std::vector<CStmt> body{align};
  for (const auto& r : enclosing_regions(site, ctx.try_regions)) {
    if (r.catch_all()) {
      body.push_back(goto_(r.handler.name()));
      return {block(std::move(body))};
    }
    body.push_back(if_goto("InstanceOf(env, stack, " + ctx.class_ref(*r.catch_type) + ")", r.handler.name()));
  }
  body.push_back(raw("(*env)->Throw(env, (jthrowable)stack[0].l);"));
  body.push_back(ctx.error_return());
  return {block(std::move(body))};
}

// ---------------------------------------------------------------------------
// Per-instruction translation

namespace detail {

inline CStmt binary(char slot, const std::string& ctype, const std::string& expr, char result_slot = 0,
                    const std::string& rhs_type = {}, char rhs_slot = 0) {
  return block({pop("t2", rhs_slot ? rhs_slot : slot, rhs_type.empty() ? ctype : rhs_type),
                pop("t1", slot, ctype), push(expr, result_slot ? result_slot : slot)});
}

inline CStmt unary(char slot, const std::string& ctype, const std::string& expr, char result_slot) {
  return block({pop("t1", slot, ctype), push(expr, result_slot)});
}

inline const char* ctype_of(char slot) {
  switch (slot) {
    case 'I': return "jint";
    case 'J': return "jlong";
    case 'F': return "jfloat";
    case 'D': return "jdouble";
    default: return "jobject";
  }
}

inline std::string compare_op(Opcode op) {
  switch (op) {
    case Opcode::ifeq: case Opcode::if_icmpeq: return "==";
    case Opcode::ifne: case Opcode::if_icmpne: return "!=";
    case Opcode::iflt: case Opcode::if_icmplt: return "<";
    case Opcode::ifge: case Opcode::if_icmpge: return ">=";
    case Opcode::ifgt: case Opcode::if_icmpgt: return ">";
    default: return "<=";
  }
}

inline const char* array_helper(Opcode op) {
  switch (op) {
    case Opcode::iaload: return "IALoad";
    case Opcode::laload: return "LALoad";
    case Opcode::faload: return "FALoad";
    case Opcode::daload: return "DALoad";
    case Opcode::aaload: return "AALoad";
    case Opcode::baload: return "BALoad";
    case Opcode::caload: return "CALoad";
    case Opcode::saload: return "SALoad";
    case Opcode::iastore: return "IAStore";
    case Opcode::lastore: return "LAStore";
    case Opcode::fastore: return "FAStore";
    case Opcode::dastore: return "DAStore";
    case Opcode::aastore: return "AAStore";
    case Opcode::bastore: return "BAStore";
    case Opcode::castore: return "CAStore";
    default: return "SAStore";
  }
}

/// Converts a JNI call/field result to the stack's int-like representation.
inline std::string widen(const JType& t, const std::string& expr) {
  return is_sub_int(t) ? "(jint)" + expr : expr;
}

/// Converts a popped stack value to a JNI argument of type `t`.
inline std::string narrow(const JType& t, const std::string& popped) {
  switch (t.kind()) {
    case TypeKind::boolean: return "(jboolean)(" + popped + " & 1)";
    case TypeKind::byte: return "(jbyte)" + popped;
    case TypeKind::char_: return "(jchar)" + popped;
    case TypeKind::short_: return "(jshort)" + popped;
    default: return popped;
  }
}

/// Fills `jvalue par[n]` from the stack, last parameter first.
inline void fill_params(const classfile::MethodSignature& sig, std::vector<CStmt>& out) {
  const auto n = sig.param_types.size();
  if (n == 0) return;
  out.push_back(decl("jvalue par[" + std::to_string(n) + "];"));
  for (std::size_t k = n; k-- > 0;) {
    const auto& t = sig.param_types[k];
    const std::string slot = "par[" + std::to_string(k) + "]";
    if (is_sub_int(t)) {
      out.push_back(raw(slot + "." + jvalue_member(t) + " = " + narrow(t, "PopI()") + ";", 1));
    } else {
      out.push_back(pop(slot));
    }
  }
}

}  // namespace detail

inline std::vector<CStmt> translate_invoke(const Instr& in, std::size_t index, TranslationCtx& ctx) {
  const auto& m = in.as<bytecode::MemberOperand>();
  const auto sig = classfile::parse_descriptor(m.descriptor);
  const bool is_static = in.opcode == Opcode::invokestatic;
  const std::string args = sig.param_types.empty() ? "NULL" : "par";
  std::vector<CStmt> body;
  detail::fill_params(sig, body);

  if (in.opcode == Opcode::invokespecial && m.name == "<init>") {
    const auto& before = ctx.stack_before(index);
    const auto base = before.size() - sig.param_types.size() - 1;
    const auto site = before[base].new_site;
    const auto cls = ctx.class_ref(m.owner);
    const auto mid = ctx.member_ref(false, false, m.owner, m.name, m.descriptor);
    body.push_back(raw("(void)Pop();", 1));
    body.push_back(decl("jobject obj = (*env)->NewObjectA(env, " + cls + ", " + mid + ", " + args + ");"));
    for (std::size_t k = 0; k < base; ++k) {
      if (before[k].new_site == site) body.push_back(raw("stack[" + std::to_string(k) + "].l = obj;"));
    }
    body.push_back(raw("exception = (*env)->ExceptionCheck(env);"));
    std::vector<CStmt> out{block(std::move(body))};
    for (auto& s : translate_forwarded_exception_check(in.offset, ctx)) out.push_back(std::move(s));
    return out;
  }

  const auto kind = jni_call_kind(sig.return_type);
  const auto mid = ctx.member_ref(false, is_static, m.owner, m.name, m.descriptor);
  std::string expr;
  if (is_static) {
    expr = "(*env)->CallStatic" + kind + "MethodA(env, " + ctx.class_ref(m.owner) + ", " + mid + ", " + args + ")";
  } else {
    body.push_back(pop("target", 0, "jvalue"));
    if (in.opcode == Opcode::invokespecial) {
      expr = "(*env)->CallNonvirtual" + kind + "MethodA(env, target.l, " + ctx.class_ref(m.owner) + ", " + mid +
             ", " + args + ")";
    } else {
      expr = "(*env)->Call" + kind + "MethodA(env, target.l, " + mid + ", " + args + ")";
    }
  }
  CStmt invoke;
  if (sig.return_type) {
    invoke = push(detail::widen(*sig.return_type, expr), slot_char(*sig.return_type));
  } else {
    invoke = raw(expr + ";");
  }
  if (!is_static) {
    // A null receiver raises NullPointerException instead of calling.
    std::string text;
    if (invoke.kind == StmtKind::push) {
      text = std::string("Push") + invoke.slot + "(" + invoke.text + ");";
    } else {
      text = invoke.text;
    }
    invoke = raw("if (ReceiverOk(env, target.l)) " + text, 0, invoke.pushes);
  }
  body.push_back(std::move(invoke));
  body.push_back(raw("exception = (*env)->ExceptionCheck(env);"));
  std::vector<CStmt> out{block(std::move(body))};
  for (auto& s : translate_forwarded_exception_check(in.offset, ctx)) out.push_back(std::move(s));
  return out;
}

/// C statements for one instruction. `index` locates the instruction in the
/// method's instruction list (needed for stack-shape dependent opcodes).
inline std::vector<CStmt> translate_instruction(const Instr& in, std::size_t index, TranslationCtx& ctx) {
  using detail::binary;
  using detail::unary;
  using O = Opcode;
  const O op = in.opcode;
  std::vector<CStmt> out;
  auto system_check = [&](std::vector<CStmt> stmts) {
    const CheckSite site{index, in.offset, CheckKind::system, bytecode::system_exceptions_of(op), allocates(op)};
    for (auto& s : translate_system_exception_check(site, ctx)) stmts.push_back(std::move(s));
    return stmts;
  };
  auto helper = [&](const std::string& name, std::vector<std::string> extra, int pops, int pushes) {
    auto args = detail::env_stack();
    for (auto& e : extra) args.push_back(std::move(e));
    ctx.uses_exception = true;
    return system_check({call("exception", name, std::move(args), pops, pushes)});
  };
  auto local = [&]() { return "vars[" + std::to_string(in.as<bytecode::LocalOperand>().index) + "]"; };

  if (in.is_label()) return {label(in.as<Label>().name())};
  if (bytecode::is_unsupported(in)) {
    fail(ErrorCode::unsupported_opcode, to_string(in) + " @" + std::to_string(in.offset));
  }
  if (bytecode::is_shuffle(op)) {
    const auto kinds = bytecode::kinds_of(ctx.stack_before(index));
    const auto sh = bytecode::shuffle_for(op, kinds);
    if (sh.push_order.empty()) {
      for (std::size_t k = 0; k < sh.pop_count; ++k) out.push_back(raw("(void)Pop();", 1));
      return out;
    }
    std::vector<CStmt> body;
    for (std::size_t k = sh.pop_count; k-- > 0;) body.push_back(pop("v" + std::to_string(k), 0, "jvalue"));
    for (auto k : sh.push_order) body.push_back(push("v" + std::to_string(k)));
    return {block(std::move(body))};
  }

  switch (op) {
    case O::nop: return {};
    case O::aconst_null: return {push("NULL", 'A')};
    case O::iconst_m1: case O::iconst_0: case O::iconst_1: case O::iconst_2: case O::iconst_3: case O::iconst_4:
    case O::iconst_5:
      return {push(std::to_string(static_cast<int>(op) - static_cast<int>(O::iconst_0)), 'I')};
    case O::lconst_0: case O::lconst_1: return {push(long_literal(static_cast<int>(op) - static_cast<int>(O::lconst_0)), 'J')};
    case O::fconst_0: case O::fconst_1: case O::fconst_2: {
      const float f = static_cast<float>(static_cast<int>(op) - static_cast<int>(O::fconst_0));
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      return {push(float_literal(bits), 'F')};
    }
    case O::dconst_0: case O::dconst_1: {
      const double d = static_cast<double>(static_cast<int>(op) - static_cast<int>(O::dconst_0));
      std::uint64_t bits;
      std::memcpy(&bits, &d, 8);
      return {push(double_literal(bits), 'D')};
    }
    case O::bipush: case O::sipush: return {push(int_literal(in.as<bytecode::IntOperand>().value), 'I')};
    case O::ldc: {
      const auto& c = in.as<bytecode::ConstOperand>();
      switch (c.kind) {
        case bytecode::ConstOperand::Kind::int_: return {push(int_literal(static_cast<std::int32_t>(c.bits)), 'I')};
        case bytecode::ConstOperand::Kind::float_: return {push(float_literal(static_cast<std::uint32_t>(c.bits)), 'F')};
        case bytecode::ConstOperand::Kind::long_: return {push(long_literal(static_cast<std::int64_t>(c.bits)), 'J')};
        case bytecode::ConstOperand::Kind::double_: return {push(double_literal(c.bits), 'D')};
        case bytecode::ConstOperand::Kind::string:
          return {push("(*env)->NewStringUTF(env, " + c_string_literal(c.text) + ")", 'A')};
        case bytecode::ConstOperand::Kind::class_: return {push(ctx.class_ref(c.text), 'A')};
        default: fail(ErrorCode::unsupported_opcode, to_string(in));
      }
    }
    case O::iload: case O::lload: case O::fload: case O::dload: case O::aload: return {push(local())};
    case O::istore: case O::lstore: case O::fstore: case O::dstore: case O::astore: return {pop(local())};

    case O::iaload: case O::laload: case O::faload: case O::daload: case O::aaload: case O::baload: case O::caload:
    case O::saload:
      return helper(detail::array_helper(op), {}, 2, 1);
    case O::iastore: case O::lastore: case O::fastore: case O::dastore: case O::aastore: case O::bastore:
    case O::castore: case O::sastore:
      return helper(detail::array_helper(op), {}, 3, 0);

    case O::iadd: return {binary('I', "jint", "(jint)((uint32_t)t1 + (uint32_t)t2)")};
    case O::isub: return {binary('I', "jint", "(jint)((uint32_t)t1 - (uint32_t)t2)")};
    case O::imul: return {binary('I', "jint", "(jint)((uint32_t)t1 * (uint32_t)t2)")};
    case O::iand: return {binary('I', "jint", "t1 & t2")};
    case O::ior: return {binary('I', "jint", "t1 | t2")};
    case O::ixor: return {binary('I', "jint", "t1 ^ t2")};
    case O::ishl: return {binary('I', "jint", "(jint)((uint32_t)t1 << (t2 & 0x1F))")};
    case O::ishr: return {binary('I', "jint", "t1 >> (t2 & 0x1F)")};
    case O::iushr: return {binary('I', "jint", "(jint)((uint32_t)t1 >> (t2 & 0x1F))")};
    case O::ineg: return {unary('I', "jint", "(jint)(0u - (uint32_t)t1)", 'I')};
    case O::idiv: return helper("IDiv", {}, 2, 1);
    case O::irem: return helper("IRem", {}, 2, 1);

    case O::ladd: return {binary('J', "jlong", "(jlong)((uint64_t)t1 + (uint64_t)t2)")};
    case O::lsub: return {binary('J', "jlong", "(jlong)((uint64_t)t1 - (uint64_t)t2)")};
    case O::lmul: return {binary('J', "jlong", "(jlong)((uint64_t)t1 * (uint64_t)t2)")};
    case O::land: return {binary('J', "jlong", "t1 & t2")};
    case O::lor: return {binary('J', "jlong", "t1 | t2")};
    case O::lxor: return {binary('J', "jlong", "t1 ^ t2")};
    case O::lshl: return {binary('J', "jlong", "(jlong)((uint64_t)t1 << (t2 & 0x3F))", 'J', "jint", 'I')};
    case O::lshr: return {binary('J', "jlong", "t1 >> (t2 & 0x3F)", 'J', "jint", 'I')};
    case O::lushr: return {binary('J', "jlong", "(jlong)((uint64_t)t1 >> (t2 & 0x3F))", 'J', "jint", 'I')};
    case O::lneg: return {unary('J', "jlong", "(jlong)(0u - (uint64_t)t1)", 'J')};
    case O::ldiv: return helper("LDiv", {}, 2, 1);
    case O::lrem: return helper("LRem", {}, 2, 1);

    case O::fadd: return {binary('F', "jfloat", "t1 + t2")};
    case O::fsub: return {binary('F', "jfloat", "t1 - t2")};
    case O::fmul: return {binary('F', "jfloat", "t1 * t2")};
    case O::fdiv: return {binary('F', "jfloat", "t1 / t2")};
    case O::frem: return {binary('F', "jfloat", "(jfloat)fmod(t1, t2)")};
    case O::fneg: return {unary('F', "jfloat", "-t1", 'F')};
    case O::dadd: return {binary('D', "jdouble", "t1 + t2")};
    case O::dsub: return {binary('D', "jdouble", "t1 - t2")};
    case O::dmul: return {binary('D', "jdouble", "t1 * t2")};
    case O::ddiv: return {binary('D', "jdouble", "t1 / t2")};
    case O::drem: return {binary('D', "jdouble", "fmod(t1, t2)")};
    case O::dneg: return {unary('D', "jdouble", "-t1", 'D')};

    case O::iinc: {
      const auto& inc = in.as<bytecode::IincOperand>();
      const auto v = "vars[" + std::to_string(inc.index) + "].i";
      return {raw(v + " = (jint)((uint32_t)" + v + " + (uint32_t)" + int_literal(inc.delta) + ");")};
    }

    case O::i2l: return {unary('I', "jint", "(jlong)t1", 'J')};
    case O::i2f: return {unary('I', "jint", "(jfloat)t1", 'F')};
    case O::i2d: return {unary('I', "jint", "(jdouble)t1", 'D')};
    case O::l2i: return {unary('J', "jlong", "(jint)(uint32_t)t1", 'I')};
    case O::l2f: return {unary('J', "jlong", "(jfloat)t1", 'F')};
    case O::l2d: return {unary('J', "jlong", "(jdouble)t1", 'D')};
    case O::f2i: return {unary('F', "jfloat", "F2I(t1)", 'I')};
    case O::f2l: return {unary('F', "jfloat", "F2L(t1)", 'J')};
    case O::f2d: return {unary('F', "jfloat", "(jdouble)t1", 'D')};
    case O::d2i: return {unary('D', "jdouble", "D2I(t1)", 'I')};
    case O::d2l: return {unary('D', "jdouble", "D2L(t1)", 'J')};
    case O::d2f: return {unary('D', "jdouble", "(jfloat)t1", 'F')};
    case O::i2b: return {unary('I', "jint", "(jint)(jbyte)t1", 'I')};
    case O::i2c: return {unary('I', "jint", "(jint)(jchar)t1", 'I')};
    case O::i2s: return {unary('I', "jint", "(jint)(jshort)t1", 'I')};

    case O::lcmp: return {binary('J', "jlong", "(t1 > t2) - (t1 < t2)", 'I')};
    case O::fcmpl: return {binary('F', "jfloat", "(t1 != t1 || t2 != t2) ? -1 : (t1 > t2) - (t1 < t2)", 'I')};
    case O::fcmpg: return {binary('F', "jfloat", "(t1 != t1 || t2 != t2) ? 1 : (t1 > t2) - (t1 < t2)", 'I')};
    case O::dcmpl: return {binary('D', "jdouble", "(t1 != t1 || t2 != t2) ? -1 : (t1 > t2) - (t1 < t2)", 'I')};
    case O::dcmpg: return {binary('D', "jdouble", "(t1 != t1 || t2 != t2) ? 1 : (t1 > t2) - (t1 < t2)", 'I')};

    case O::ifeq: case O::ifne: case O::iflt: case O::ifge: case O::ifgt: case O::ifle:
      return {if_goto("PopI() " + detail::compare_op(op) + " 0", in.as<bytecode::JumpOperand>().target.name(), 1)};
    case O::if_icmpeq: case O::if_icmpne: case O::if_icmplt: case O::if_icmpge: case O::if_icmpgt:
    case O::if_icmple:
      return {block({pop("t2", 'I', "jint"), pop("t1", 'I', "jint"),
                     if_goto("t1 " + detail::compare_op(op) + " t2", in.as<bytecode::JumpOperand>().target.name())})};
    case O::if_acmpeq: case O::if_acmpne:
      return {block({pop("t2", 'A', "jobject"), pop("t1", 'A', "jobject"),
                     if_goto(std::string(op == O::if_acmpeq ? "" : "!") + "(*env)->IsSameObject(env, t1, t2)",
                             in.as<bytecode::JumpOperand>().target.name())})};
    case O::ifnull: return {if_goto("PopA() == NULL", in.as<bytecode::JumpOperand>().target.name(), 1)};
    case O::ifnonnull: return {if_goto("PopA() != NULL", in.as<bytecode::JumpOperand>().target.name(), 1)};
    case O::goto_: return {goto_(in.as<bytecode::JumpOperand>().target.name())};
    case O::tableswitch:
    case O::lookupswitch: {
      const auto& sw = in.as<bytecode::SwitchOperand>();
      CStmt s = stmt(StmtKind::switch_, "PopI()", sw.default_target.name());
      for (const auto& [key, lbl] : sw.cases) s.cases.emplace_back(int_literal(key), lbl.name());
      s.pops = 1;
      s.terminal = true;
      return {s};
    }

    case O::ireturn: case O::lreturn: case O::freturn: case O::dreturn: case O::areturn: {
      const auto& rt = ctx.signature.return_type;
      if (!rt) fail(ErrorCode::inconsistent_depth, "value return in a void method");
      const std::string popped = std::string("Pop") + slot_char(*rt) + "()";
      return {return_(is_sub_int(*rt) ? "(" + jni_type(*rt) + ")" + popped : popped, 1)};
    }
    case O::return_: return {return_(std::nullopt)};

    case O::getstatic: case O::putstatic: {
      const auto& m = in.as<bytecode::MemberOperand>();
      const auto t = classfile::parse_field_type(m.descriptor);
      const auto cls = ctx.class_ref(m.owner);
      const auto fid = ctx.member_ref(true, true, m.owner, m.name, m.descriptor);
      const auto kind = jni_call_kind(t);
      if (op == O::getstatic) {
        return {push(detail::widen(t, "(*env)->GetStatic" + kind + "Field(env, " + cls + ", " + fid + ")"), slot_char(t))};
      }
      return {raw("(*env)->SetStatic" + kind + "Field(env, " + cls + ", " + fid + ", " +
                      detail::narrow(t, std::string("Pop") + slot_char(t) + "()") + ");",
                  1)};
    }
    case O::getfield: case O::putfield: {
      const auto& m = in.as<bytecode::MemberOperand>();
      const auto t = classfile::parse_field_type(m.descriptor);
      const auto fid = ctx.member_ref(true, false, m.owner, m.name, m.descriptor);
      if (op == O::getfield) return helper(std::string("GetField") + field_kind(t), {fid}, 1, 1);
      return helper(std::string("PutField") + field_kind(t), {fid}, 2, 0);
    }

    case O::invokevirtual: case O::invokespecial: case O::invokestatic: case O::invokeinterface:
      return translate_invoke(in, index, ctx);

    case O::new_: return {push("NULL", 'A')};  // placeholder until the fused constructor call
    case O::newarray: return helper("NewArray", {std::to_string(in.as<bytecode::ArrayTypeOperand>().atype)}, 1, 1);
    case O::anewarray: return helper("ANewArray", {ctx.class_ref(in.as<bytecode::TypeOperand>().name)}, 1, 1);
    case O::multianewarray: {
      const auto& t = in.as<bytecode::TypeOperand>();
      return helper("MultiANewArray", {c_string_literal(t.name), std::to_string(t.dimensions)}, t.dimensions, 1);
    }
    case O::arraylength: return helper("ArrayLength", {}, 1, 1);
    case O::athrow: return translate_athrow(in.offset, ctx);
    case O::checkcast: return helper("CheckCast", {ctx.class_ref(in.as<bytecode::TypeOperand>().name)}, 1, 1);
    case O::instanceof:
      return {block({pop("o", 'A', "jobject"),
                     push("o != NULL && (*env)->IsInstanceOf(env, o, " +
                              ctx.class_ref(in.as<bytecode::TypeOperand>().name) + ")",
                          'I')})};
    default: fail(ErrorCode::unsupported_opcode, to_string(in) + " @" + std::to_string(in.offset));
  }
}

// ---------------------------------------------------------------------------
// Whole methods

struct TranslateOptions {
  std::string function_name;  // mangled JNI name
};

/// Builds the translation context (running the stack checker) without
/// translating any instruction.
inline TranslationCtx make_context(const classfile::MethodModel& method, const classfile::ClassModel& model,
                                   const TranslateOptions& opts) {
  if (opts.function_name.empty()) fail(ErrorCode::bad_config, "empty C function name");
  if (!method.code) fail(ErrorCode::unsupported_opcode, method.name + method.descriptor + " has no code");
  if (auto bad = bytecode::unsupported_instructions(method); !bad.empty()) {
    fail(ErrorCode::unsupported_opcode, method.name + method.descriptor + ": " + bad.front());
  }
  TranslationCtx ctx;
  ctx.signature = method.signature();
  ctx.is_static = method.is_static();
  ctx.max_stack = method.code->max_stack;
  ctx.max_locals = method.code->max_locals;
  ctx.depth_map = bytecode::check_method(method);
  ctx.try_regions = method.try_regions;
  ctx.class_name = model.class_name;
  ctx.mangled_name = opts.function_name;
  return ctx;
}

inline CFunction translate_method(const classfile::MethodModel& method, const classfile::ClassModel& model,
                                  const TranslateOptions& opts) {
  auto ctx = make_context(method, model, opts);

  std::vector<CStmt> body;
  for (std::size_t i = 0; i < method.instructions.size(); ++i) {
    if (!ctx.depth_map.reachable(i)) continue;
    for (auto& s : translate_instruction(method.instructions[i], i, ctx)) body.push_back(std::move(s));
  }
  prune_unreachable(body);

  CFunction fn;
  fn.name = opts.function_name;
  fn.return_type = ctx.return_type();
  fn.params.push_back({"JNIEnv *", "env"});
  fn.params.push_back(ctx.is_static ? CParam{"jclass", "clazz"} : CParam{"jobject", "thisObj"});
  for (std::size_t k = 0; k < ctx.signature.param_types.size(); ++k) {
    fn.params.push_back({jni_type(ctx.signature.param_types[k]), "arg" + std::to_string(k)});
  }

  auto& pro = fn.body;
  pro.push_back(decl("jvalue stack[" + std::to_string(std::max<std::size_t>(ctx.max_stack, 1)) + "];"));
  pro.push_back(decl("int sp = 0;"));
  pro.push_back(decl("jvalue vars[" + std::to_string(std::max<std::size_t>(ctx.max_locals, 1)) + "];"));
  if (ctx.uses_exception) pro.push_back(decl("int exception = 0;"));
  const auto err = ctx.error_return().text;
  const std::string bail = err.empty() ? "return;" : "return " + err + ";";
  for (std::size_t i = 0; i < ctx.const_classes.size(); ++i) {
    const auto n = "cls" + std::to_string(i);
    pro.push_back(decl("jclass " + n + " = (*env)->FindClass(env, " + c_string_literal(ctx.const_classes[i]) + ");"));
    pro.push_back(raw("if (" + n + " == NULL) " + bail));
  }
  auto lookups = [&](const std::vector<TranslationCtx::Member>& table, bool field) {
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto& m = table[i];
      const auto n = (field ? "fid" : "mid") + std::to_string(i);
      const std::string fn_name = std::string("Get") + (m.is_static ? "Static" : "") + (field ? "FieldID" : "MethodID");
      pro.push_back(decl(std::string(field ? "jfieldID " : "jmethodID ") + n + " = (*env)->" + fn_name + "(env, cls" +
                         std::to_string(m.cls) + ", " + c_string_literal(m.name) + ", " +
                         c_string_literal(m.descriptor) + ");"));
      pro.push_back(raw("if (" + n + " == NULL) " + bail));
    }
  };
  lookups(ctx.methods, false);
  lookups(ctx.fields, true);

  std::size_t slot = 0;
  if (!ctx.is_static) pro.push_back(raw("vars[" + std::to_string(slot++) + "].l = thisObj;"));
  for (std::size_t k = 0; k < ctx.signature.param_types.size(); ++k) {
    const auto& t = ctx.signature.param_types[k];
    const char member = is_sub_int(t) ? 'i' : jvalue_member(t);
    pro.push_back(raw("vars[" + std::to_string(slot) + "]." + member + " = arg" + std::to_string(k) + ";"));
    slot += t.slot_count();
  }
  for (auto& s : body) pro.push_back(std::move(s));
  return fn;
}

/// One C translation unit: the JNI and runtime includes followed by the
/// functions in the given order.
inline CSourceUnit render_c_unit(const std::vector<CFunction>& functions, std::string file_name = {}) {
  std::set<std::string> names;
  for (const auto& f : functions) {
    if (!names.insert(f.name).second) fail(ErrorCode::duplicate_function_name, f.name);
  }
  std::string text = "#include <jni.h>\n#include \"jbcrt.h\"\n";
  for (const auto& f : functions) text += "\n" + render_function(f);
  return {std::move(file_name), std::move(text)};
}

}  // namespace jnify::translator
