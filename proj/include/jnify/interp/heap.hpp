#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jnify/classfile/class_model.hpp"
#include "jnify/error.hpp"
#include "jnify/interp/value.hpp"

namespace jnify::interp {

struct HeapObject {
  std::string class_name;  // internal name, or a descriptor for arrays
  std::map<std::string, Value> fields;
  std::vector<Value> elements;  // arrays only
  std::string text;             // String contents, or the name a Class object denotes
};

class Heap {
 public:
  std::uint32_t allocate(HeapObject obj) {
    objects_.push_back(std::move(obj));
    return static_cast<std::uint32_t>(objects_.size());
  }

  HeapObject& at(std::uint32_t id) {
    if (id == 0 || id > objects_.size()) fail(ErrorCode::linkage_error, "dangling reference #" + std::to_string(id));
    return objects_[id - 1];
  }
  HeapObject& at(const Value& v) { return at(v.as_ref()); }

  [[nodiscard]] std::size_t size() const noexcept { return objects_.size(); }

  /// Interned String for literal `utf8`.
  std::uint32_t intern_string(const std::string& utf8) {
    auto [it, fresh] = strings_.try_emplace(utf8, 0);
    if (fresh) it->second = allocate({"java/lang/String", {}, {}, utf8});
    return it->second;
  }

  /// Class object denoting `name`.
  std::uint32_t class_object(const std::string& name) {
    auto [it, fresh] = classes_.try_emplace(name, 0);
    if (fresh) it->second = allocate({"java/lang/Class", {}, {}, name});
    return it->second;
  }

 private:
  std::vector<HeapObject> objects_;
  std::map<std::string, std::uint32_t> strings_;
  std::map<std::string, std::uint32_t> classes_;
};

class Interpreter;

struct Outcome {
  enum class Kind { value, void_, exception };
  Kind kind = Kind::void_;
  Value value;                 // returned value, or the thrown reference
  std::string exception_class;

  static Outcome returned(Value v) { return {Kind::value, v, {}}; }
  static Outcome returned_void() { return {Kind::void_, {}, {}}; }
  static Outcome thrown(Value ref, std::string cls) { return {Kind::exception, ref, std::move(cls)}; }

  [[nodiscard]] bool is_exception() const noexcept { return kind == Kind::exception; }
};

/// Canonical one-line form shared with the C harness: `value I32 3`,
/// `void`, or `exception java/lang/ArithmeticException`.
inline std::string to_string(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::value: return "value " + to_string(o.value);
    case Outcome::Kind::void_: return "void";
    case Outcome::Kind::exception: return "exception " + o.exception_class;
  }
  return "?";
}

/// Host implementation of a method; args include the receiver first.
using NativeBody = std::function<Outcome(Interpreter&, std::vector<Value>&)>;

struct MethodImpl {
  const classfile::MethodModel* bytecode = nullptr;  // owned by the ClassInfo's model
  NativeBody native;
  bool is_static = false;
};

struct ClassInfo {
  std::string name;
  std::string super_name;  // empty for java/lang/Object
  std::vector<std::string> interfaces;
  bool is_interface = false;
  std::map<std::string, std::string> static_field_types;  // name -> descriptor
  std::map<std::string, Value> statics;
  std::map<std::string, MethodImpl> methods;  // key: name + descriptor
  std::shared_ptr<const classfile::ClassModel> model;
  bool initialized = false;
};

namespace builtin {
inline constexpr const char* object = "java/lang/Object";
inline constexpr const char* throwable = "java/lang/Throwable";
}  // namespace builtin

/// Classes the interpreter knows: a small built-in core (Object, String,
/// the Throwable hierarchy used by the runtime helpers) plus user classes
/// loaded from class files or described with native bodies.
class ClassTable {
 public:
  ClassTable() { install_builtins(); }

  ClassInfo& define(std::string name, std::string super_name, std::vector<std::string> interfaces = {},
                    bool is_interface = false) {
    auto& c = classes_[name];
    c.name = std::move(name);
    c.super_name = std::move(super_name);
    c.interfaces = std::move(interfaces);
    c.is_interface = is_interface;
    return c;
  }

  /// Adds a parsed class. Its methods with code run as bytecode; native and
  /// abstract methods need a body from define_native.
  ClassInfo& load(classfile::ClassModel model) {
    auto shared = std::make_shared<const classfile::ClassModel>(std::move(model));
    std::vector<std::string> itfs;
    for (auto idx : shared->interfaces) itfs.push_back(shared->pool.class_name(idx));
    auto& c = define(shared->class_name, shared->super_name, itfs,
                     (shared->access_flags & classfile::access::interface_) != 0);
    c.model = shared;
    for (const auto& f : shared->fields) {
      if (f.access_flags & classfile::access::static_) c.static_field_types[f.name] = f.descriptor;
    }
    for (const auto& m : shared->methods) {
      MethodImpl impl;
      impl.is_static = m.is_static();
      if (m.code) impl.bytecode = &m;
      c.methods[m.name + m.descriptor] = std::move(impl);
    }
    return c;
  }

  void define_native(const std::string& cls, const std::string& name_and_desc, bool is_static, NativeBody body) {
    auto& c = require(cls);
    auto& impl = c.methods[name_and_desc];
    impl.native = std::move(body);
    impl.bytecode = nullptr;
    impl.is_static = is_static;
  }

  [[nodiscard]] bool contains(const std::string& name) const { return classes_.count(name) != 0; }

  ClassInfo& require(const std::string& name) {
    auto it = classes_.find(name);
    if (it == classes_.end()) fail(ErrorCode::linkage_error, "unknown class " + name);
    return it->second;
  }

  /// Whether a value of runtime type `from` may be used as `to`.
  [[nodiscard]] bool is_assignable(const std::string& from, const std::string& to) const {
    if (from == to || to == builtin::object) return true;
    if (!from.empty() && from.front() == '[') {
      if (to == "java/lang/Cloneable" || to == "java/io/Serializable") return true;
      if (to.empty() || to.front() != '[') return false;
      const auto fe = from.substr(1), te = to.substr(1);
      if (fe.front() == 'L' || fe.front() == '[') {
        if (te.front() != 'L' && te.front() != '[') return false;
        return is_assignable(element_name(fe), element_name(te));
      }
      return fe == te;
    }
    auto it = classes_.find(from);
    if (it == classes_.end()) return false;
    for (const auto& i : it->second.interfaces) {
      if (is_assignable(i, to)) return true;
    }
    return !it->second.super_name.empty() && is_assignable(it->second.super_name, to);
  }

  /// Virtual lookup: first class on the superclass chain of `cls` declaring
  /// `name_and_desc` with a body. Interfaces are searched last (defaults).
  const MethodImpl* find_method(const std::string& cls, const std::string& name_and_desc,
                                std::string* declaring = nullptr) const {
    for (std::string c = cls; !c.empty();) {
      auto it = classes_.find(c);
      if (it == classes_.end()) break;
      auto m = it->second.methods.find(name_and_desc);
      if (m != it->second.methods.end() && (m->second.bytecode || m->second.native)) {
        if (declaring) *declaring = c;
        return &m->second;
      }
      c = it->second.super_name;
    }
    std::set<std::string> seen;
    return find_in_interfaces(cls, name_and_desc, seen, declaring);
  }

 private:
  static std::string element_name(const std::string& desc) {
    if (desc.front() == 'L') return desc.substr(1, desc.size() - 2);
    return desc;
  }

  const MethodImpl* find_in_interfaces(const std::string& cls, const std::string& key, std::set<std::string>& seen,
                                       std::string* declaring) const {
    auto it = classes_.find(cls);
    if (it == classes_.end() || !seen.insert(cls).second) return nullptr;
    for (const auto& i : it->second.interfaces) {
      auto ic = classes_.find(i);
      if (ic != classes_.end()) {
        auto m = ic->second.methods.find(key);
        if (m != ic->second.methods.end() && (m->second.bytecode || m->second.native)) {
          if (declaring) *declaring = i;
          return &m->second;
        }
      }
      if (auto* r = find_in_interfaces(i, key, seen, declaring)) return r;
    }
    if (!it->second.super_name.empty()) return find_in_interfaces(it->second.super_name, key, seen, declaring);
    return nullptr;
  }

  void install_builtins();

  std::map<std::string, ClassInfo> classes_;
};

}  // namespace jnify::interp
