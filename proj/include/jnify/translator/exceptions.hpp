#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "jnify/bytecode/decoder.hpp"
#include "jnify/bytecode/method_checker.hpp"
#include "jnify/classfile/class_model.hpp"

namespace jnify::translator {

using bytecode::Label;
using bytecode::TryRegion;

// ---------------------------------------------------------------------------
// Built-in hierarchy of the exceptions the runtime helpers can raise

inline const std::map<std::string, std::string>& system_exception_parents() {
  static const std::map<std::string, std::string> table = {
      {"java/lang/Throwable", ""},
      {"java/lang/Exception", "java/lang/Throwable"},
      {"java/lang/RuntimeException", "java/lang/Exception"},
      {"java/lang/ArithmeticException", "java/lang/RuntimeException"},
      {"java/lang/NullPointerException", "java/lang/RuntimeException"},
      {"java/lang/IndexOutOfBoundsException", "java/lang/RuntimeException"},
      {"java/lang/ArrayIndexOutOfBoundsException", "java/lang/IndexOutOfBoundsException"},
      {"java/lang/NegativeArraySizeException", "java/lang/RuntimeException"},
      {"java/lang/ClassCastException", "java/lang/RuntimeException"},
      {"java/lang/ArrayStoreException", "java/lang/RuntimeException"},
  };
  return table;
}

/// `type` itself followed by its superclasses up to Throwable.
inline std::vector<std::string> system_supertypes(const std::string& type) {
  const auto& table = system_exception_parents();
  if (!table.count(type)) fail(ErrorCode::unknown_system_exception, type);
  std::vector<std::string> chain;
  for (std::string t = type; !t.empty(); t = table.at(t)) chain.push_back(t);
  return chain;
}

/// Helper return code for each system exception, as defined in jbcrt.h.
inline const char* system_exception_code(const std::string& type) {
  using namespace bytecode::sysexc;
  if (type == arithmetic) return "JBCRT_EXC_ARITHMETIC";
  if (type == null_pointer) return "JBCRT_EXC_NULL_POINTER";
  if (type == array_index) return "JBCRT_EXC_ARRAY_INDEX";
  if (type == negative_array_size) return "JBCRT_EXC_NEGATIVE_ARRAY_SIZE";
  if (type == class_cast) return "JBCRT_EXC_CLASS_CAST";
  if (type == array_store) return "JBCRT_EXC_ARRAY_STORE";
  fail(ErrorCode::unknown_system_exception, type);
}

// ---------------------------------------------------------------------------
// Where an exception raised at a site goes

struct JumpTarget {
  Label handler;
  bool operator==(const JumpTarget&) const = default;
};
struct Propagate {
  bool operator==(const Propagate&) const = default;
};
using HandlerTarget = std::variant<JumpTarget, Propagate>;

/// Regions covering `site`, in exception-table order.
inline std::vector<TryRegion> enclosing_regions(std::uint32_t site, const std::vector<TryRegion>& regions) {
  std::vector<TryRegion> out;
  for (const auto& r : regions) {
    if (r.covers(site)) out.push_back(r);
  }
  return out;
}

/// First covering region whose catch type is the exception or one of its
/// built-in supertypes; a CATCH_ALL region matches anything.
inline HandlerTarget resolve_system_exception_target(std::uint32_t site, const std::string& exception_type,
                                                     const std::vector<TryRegion>& regions) {
  const auto chain = system_supertypes(exception_type);
  for (const auto& r : enclosing_regions(site, regions)) {
    if (r.catch_all()) return JumpTarget{r.handler};
    for (const auto& t : chain) {
      if (*r.catch_type == t) return JumpTarget{r.handler};
    }
  }
  return Propagate{};
}

enum class CheckKind { forwarded, system };

struct CheckSite {
  std::size_t index = 0;  // into MethodModel::instructions
  std::uint32_t offset = 0;
  CheckKind kind = CheckKind::system;
  std::vector<std::string> exceptions;  // system sites only
  bool allocates = false;                // the JVM may raise its own exception (JBCRT_EXC_PENDING)
  bool operator==(const CheckSite&) const = default;
};

/// Array allocation can also fail inside the JVM (OutOfMemoryError).
inline bool allocates(bytecode::Opcode op) {
  return op == bytecode::Opcode::newarray || op == bytecode::Opcode::anewarray ||
         op == bytecode::Opcode::multianewarray;
}

/// Instructions after which the translation tests for an exception: every
/// call (forwarded) and every helper-backed operation that can fail (system).
/// ATHROW is not a check site; it always dispatches.
inline std::vector<CheckSite> plan_exception_checks(const classfile::MethodModel& method) {
  std::vector<CheckSite> out;
  for (std::size_t i = 0; i < method.instructions.size(); ++i) {
    const auto& in = method.instructions[i];
    if (in.is_label()) continue;
    switch (bytecode::site_kind(in.opcode)) {
      case bytecode::SiteKind::forwarded: out.push_back({i, in.offset, CheckKind::forwarded, {}}); break;
      case bytecode::SiteKind::system:
        out.push_back({i, in.offset, CheckKind::system, bytecode::system_exceptions_of(in.opcode),
                       allocates(in.opcode)});
        break;
      default: break;
    }
  }
  return out;
}

}  // namespace jnify::translator
