#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "jnify/bytecode/opcode.hpp"
#include "jnify/classfile/annotations.hpp"
#include "jnify/classfile/class_model.hpp"
#include "jnify/rewriter/code_shift.hpp"
#include "jnify/rewriter/mangle.hpp"

namespace jnify::rewriter {

struct MethodId {
  std::string name;
  std::string descriptor;
  auto operator<=>(const MethodId&) const = default;
};

struct ExplicitMethod {
  std::string class_name;  // internal form, slash separated
  std::string name;
  std::string descriptor;
  bool operator==(const ExplicitMethod&) const = default;
};

struct SelectionConfig {
  std::string annotation_name = "Obfuscate";
  std::vector<ExplicitMethod> explicit_methods;
  std::string library_name;
};

/// True when annotation type `type_name` (internal form) is the configured
/// one. A qualified configuration name must match exactly; a simple name
/// matches any package.
inline bool annotation_matches(std::string_view type_name, std::string_view configured) {
  if (configured.empty()) return false;
  std::string want(configured);
  std::replace(want.begin(), want.end(), '.', '/');
  if (want.find('/') != std::string::npos) return type_name == want;
  const auto slash = type_name.rfind('/');
  return type_name.substr(slash == std::string_view::npos ? 0 : slash + 1) == want;
}

/// Methods carrying the annotation or listed explicitly, in class-file order.
inline std::vector<MethodId> find_annotated_methods(const classfile::ClassModel& model, const SelectionConfig& cfg) {
  std::vector<MethodId> out;
  for (const auto& m : model.methods) {
    const bool annotated = std::any_of(m.annotations.begin(), m.annotations.end(),
                                       [&](const std::string& a) { return annotation_matches(a, cfg.annotation_name); });
    const bool listed = std::any_of(cfg.explicit_methods.begin(), cfg.explicit_methods.end(), [&](const auto& e) {
      return e.class_name == model.class_name && e.name == m.name && e.descriptor == m.descriptor;
    });
    if (annotated || listed) out.push_back({m.name, m.descriptor});
  }
  return out;
}

namespace detail {

inline classfile::MethodModel& require_method(classfile::ClassModel& model, const MethodId& id) {
  auto* m = model.find_method(id.name, id.descriptor);
  if (!m) fail(ErrorCode::no_such_method, model.class_name + "." + id.name + id.descriptor);
  return *m;
}

/// Drops annotations matching `annotation` from both annotation attributes,
/// removing an attribute that ends up empty.
inline void strip_annotation(classfile::MethodModel& m, const classfile::ConstantPool& pool,
                             std::string_view annotation) {
  std::vector<classfile::Attribute> kept;
  for (auto& a : m.attributes) {
    if (a.name == "RuntimeVisibleAnnotations" || a.name == "RuntimeInvisibleAnnotations") {
      auto body = classfile::remove_annotations(
          a.info, pool, [&](const std::string& t) { return annotation_matches(t, annotation); });
      if (!body) continue;
      a.info = std::move(*body);
    }
    kept.push_back(std::move(a));
  }
  m.attributes = std::move(kept);
}

}  // namespace detail

/// Turns a method into a native declaration: sets ACC_NATIVE, removes the
/// Code attribute (and with it the StackMapTable) and the selecting
/// annotation. Name, descriptor, visibility and other attributes are kept.
inline classfile::ClassModel nativize_method(classfile::ClassModel model, const MethodId& id,
                                             std::string_view annotation = "Obfuscate") {
  auto& m = detail::require_method(model, id);
  if (m.is_native()) fail(ErrorCode::already_native, model.class_name + "." + id.name + id.descriptor);
  if (m.is_abstract()) fail(ErrorCode::abstract_method, model.class_name + "." + id.name + id.descriptor);
  detail::strip_annotation(m, model.pool, annotation);
  m.access_flags = static_cast<std::uint16_t>((m.access_flags | classfile::access::native) & ~classfile::access::strict);
  classfile::set_code(m, model.pool, std::nullopt);
  return model;
}

/// True when `code` already starts with `LDC "<library>"; INVOKESTATIC
/// java/lang/System.loadLibrary(Ljava/lang/String;)V`.
inline bool has_loader_prologue(const classfile::MethodModel& clinit, std::string_view library) {
  using bytecode::ConstOperand;
  using bytecode::Opcode;
  std::vector<const bytecode::Instr*> real;
  for (const auto& in : clinit.instructions) {
    if (!in.is_label()) real.push_back(&in);
    if (real.size() == 2) break;
  }
  if (real.size() < 2 || real[0]->opcode != Opcode::ldc || real[1]->opcode != Opcode::invokestatic) return false;
  const auto& c = real[0]->as<ConstOperand>();
  const auto& call = real[1]->as<bytecode::MemberOperand>();
  return c.kind == ConstOperand::Kind::string && c.text == library && call.owner == "java/lang/System" &&
         call.name == "loadLibrary" && call.descriptor == "(Ljava/lang/String;)V";
}

/// Ensures `<clinit>` begins with a System.loadLibrary(library) call. An
/// existing initializer keeps its body after the prologue.
inline classfile::ClassModel inject_library_loader(classfile::ClassModel model, const std::string& library) {
  using classfile::PoolTag;
  auto* clinit = model.find_method("<clinit>", "()V");
  if (clinit && has_loader_prologue(*clinit, library)) return model;

  const auto str = model.pool.intern_string(library);
  const auto call = model.pool.intern_member(PoolTag::methodref, "java/lang/System", "loadLibrary",
                                             "(Ljava/lang/String;)V");
  classfile::ByteWriter prologue;
  if (str <= 255) {
    prologue.u1(0x12);
    prologue.u1(static_cast<std::uint8_t>(str));
  } else {
    prologue.u1(0x13);
    prologue.u2(str);
  }
  prologue.u1(0xB8);
  prologue.u2(call);

  if (!clinit) {
    classfile::CodeAttribute code;
    code.max_stack = 1;
    code.max_locals = 0;
    code.bytecode = prologue.take();
    code.bytecode.push_back(0xB1);
    classfile::MethodModel m;
    m.access_flags = classfile::access::static_;
    m.name = "<clinit>";
    m.descriptor = "()V";
    m.name_index = model.pool.intern_utf8(m.name);
    m.descriptor_index = model.pool.intern_utf8(m.descriptor);
    classfile::set_code(m, model.pool, code);
    model.methods.push_back(std::move(m));
    return model;
  }

  auto code = *clinit->code;
  const bool has_switch = std::any_of(clinit->instructions.begin(), clinit->instructions.end(), [](const auto& in) {
    return in.opcode == bytecode::Opcode::tableswitch || in.opcode == bytecode::Opcode::lookupswitch;
  });
  auto bytes = prologue.take();
  if (has_switch) {
    while (bytes.size() % 4) bytes.push_back(0x00);  // keep switch padding valid
  }
  prepend_bytecode(code, bytes);
  code.max_stack = std::max<std::uint16_t>(code.max_stack, 1);
  classfile::set_code(*clinit, model.pool, code);
  return model;
}

// ---------------------------------------------------------------------------
// Plans

struct PlannedMethod {
  MethodId id;
  std::string c_name;
  bool overloaded = false;
};

struct ClassPlan {
  std::string class_name;
  std::vector<PlannedMethod> methods;
};

struct RewritePlan {
  std::vector<ClassPlan> classes;
};

/// Mangles the selected methods of one class. A method gets the long form
/// when another selected or already-native method of the class shares its
/// name, since JNI could not tell them apart by the short name.
inline ClassPlan plan_class(const classfile::ClassModel& model, const std::vector<MethodId>& selected) {
  std::map<std::string, int> natives_by_name;
  std::set<MethodId> chosen(selected.begin(), selected.end());
  for (const auto& m : model.methods) {
    if (m.is_native() || chosen.count({m.name, m.descriptor})) natives_by_name[m.name]++;
  }
  ClassPlan plan{model.class_name, {}};
  for (const auto& id : selected) {
    const bool overloaded = natives_by_name[id.name] > 1;
    plan.methods.push_back({id, jni_mangle(model.class_name, id.name, id.descriptor, overloaded), overloaded});
  }
  return plan;
}

/// Checks that no C name appears twice across the plan.
inline void validate_plan(const RewritePlan& plan) {
  std::set<std::string> names;
  for (const auto& c : plan.classes) {
    for (const auto& m : c.methods) {
      if (!names.insert(m.c_name).second) fail(ErrorCode::duplicate_function_name, m.c_name);
    }
  }
}

}  // namespace jnify::rewriter
