#pragma once

#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "jnify/classfile/class_model.hpp"
#include "jnify/interp/interpreter.hpp"
#include "jnify/pipeline/config.hpp"
#include "jnify/pipeline/files.hpp"
#include "jnify/rewriter/rewriter.hpp"
#include "jnify/runtime_header.hpp"
#include "jnify/translator/balance.hpp"
#include "jnify/translator/translator.hpp"

namespace jnify::pipeline {

/// Class-file versions whose methods are translated (Java 6 to 8).
inline constexpr std::uint16_t min_major_version = 50;
inline constexpr std::uint16_t max_major_version = 52;

struct PipelineConfig {
  std::vector<fs::path> inputs;
  fs::path out_classes;
  fs::path out_c;
  rewriter::SelectionConfig selection;
  bool check = false;
  bool strict = false;
  // Used by --check to syntax-check the C units; the pass is skipped when unset.
  std::optional<fs::path> jni_include;
  std::string c_compiler = "cc";
};

struct MethodResult {
  std::string class_name;
  rewriter::MethodId id;
  bool translated = false;
  std::string c_name;            // translated only
  ErrorCode reason{};            // skipped only
  std::string detail;
  std::optional<std::string> check;  // "ok" or a failure description

  [[nodiscard]] std::string qualified() const { return class_name + "." + id.name + id.descriptor; }
};

struct Report {
  std::vector<MethodResult> methods;
  std::vector<fs::path> emitted;  // every file written, in write order
  std::vector<std::string> notes;

  [[nodiscard]] std::size_t translated() const {
    return static_cast<std::size_t>(std::count_if(methods.begin(), methods.end(), [](auto& m) { return m.translated; }));
  }
  [[nodiscard]] std::size_t skipped() const { return methods.size() - translated(); }
  [[nodiscard]] std::size_t selected() const { return methods.size(); }
  [[nodiscard]] bool check_failed() const {
    return std::any_of(methods.begin(), methods.end(), [](auto& m) { return m.check && *m.check != "ok"; });
  }

  /// Skips that violate --strict. Already-native methods are a no-op rather
  /// than a refusal, so re-running on rewritten output stays clean.
  [[nodiscard]] std::vector<const MethodResult*> strict_violations() const {
    std::vector<const MethodResult*> out;
    for (const auto& m : methods) {
      if (!m.translated && m.reason != ErrorCode::already_native) out.push_back(&m);
    }
    return out;
  }

  [[nodiscard]] std::vector<std::string> lines() const {
    std::vector<std::string> out;
    for (const auto& m : methods) {
      std::string line;
      if (m.translated) {
        line = "translated " + m.qualified() + " -> " + m.c_name;
      } else {
        line = "skipped " + m.qualified() + ": " + std::string(to_string(m.reason));
        if (!m.detail.empty()) line += " (" + m.detail + ")";
      }
      if (m.check) line += " [check " + *m.check + "]";
      out.push_back(std::move(line));
    }
    for (const auto& n : notes) out.push_back("note: " + n);
    out.push_back("summary: selected=" + std::to_string(selected()) + " translated=" + std::to_string(translated()) +
                  " skipped=" + std::to_string(skipped()) + " files=" + std::to_string(emitted.size()));
    return out;
  }

  [[nodiscard]] std::string text() const {
    std::string out;
    for (const auto& l : lines()) out += l + "\n";
    return out;
  }
};

/// Raised by run_pipeline under --strict before anything is written.
class StrictModeViolation : public Error {
 public:
  explicit StrictModeViolation(Report report)
      : Error(ErrorCode::strict_mode_violation, std::to_string(report.strict_violations().size()) + " method(s) skipped"),
        report_(std::move(report)) {}
  [[nodiscard]] const Report& report() const noexcept { return report_; }

 private:
  Report report_;
};

/// File name of the C unit for `class_name`.
inline std::string c_unit_name(const std::string& class_name) { return rewriter::jni_escape(class_name) + ".c"; }

/// POSIX sh script compiling the units into lib<library>.so (or .dylib).
inline std::string build_script(const std::string& library, const std::vector<std::string>& units) {
  std::string s =
      "#!/bin/sh\n"
      "# Compiles the generated units into one shared library.\n"
      "set -e\n"
      "cd \"$(dirname \"$0\")\"\n"
      ": \"${CC:=cc}\"\n"
      ": \"${JAVA_HOME:?JAVA_HOME must point at a JDK}\"\n"
      "case \"$(uname -s)\" in\n"
      "  Darwin) platform=darwin; suffix=dylib ;;\n"
      "  *) platform=linux; suffix=so ;;\n"
      "esac\n"
      "$CC -std=c99 -O2 -shared -fPIC -I. -I\"$JAVA_HOME/include\" -I\"$JAVA_HOME/include/$platform\" \\\n"
      "  -o \"lib" + library + ".$suffix\"";
  for (const auto& u : units) s += " \\\n  " + u;
  return s + "\n";
}

namespace detail {

struct InputClass {
  fs::path path;
  classfile::Bytes bytes;
  classfile::ClassModel model;
  std::vector<translator::CFunction> functions;
  std::vector<rewriter::MethodId> translated;
  std::vector<std::size_t> results;  // indexes into Report::methods for translated methods
};

/// Refusal reason decided from the declaration alone.
inline std::optional<std::pair<ErrorCode, std::string>> static_refusal(const classfile::ClassModel& model,
                                                                       const classfile::MethodModel& m) {
  if (model.major_version < min_major_version || model.major_version > max_major_version) {
    return std::pair{ErrorCode::unsupported, "class file version " + std::to_string(model.major_version)};
  }
  if (m.is_native()) return std::pair{ErrorCode::already_native, std::string{}};
  if (m.is_abstract()) return std::pair{ErrorCode::abstract_method, std::string{}};
  if (m.name == "<init>") return std::pair{ErrorCode::unsupported, std::string("constructor")};
  if (m.name == "<clinit>") return std::pair{ErrorCode::unsupported, std::string("static initializer")};
  if (m.access_flags & classfile::access::synchronized_) {
    return std::pair{ErrorCode::unsupported, std::string("synchronized method")};
  }
  return std::nullopt;
}

inline std::size_t count_loader_calls(const classfile::MethodModel& clinit, const std::string& library) {
  std::size_t n = 0;
  const bytecode::Instr* prev = nullptr;
  for (const auto& in : clinit.instructions) {
    if (in.is_label()) continue;
    if (prev && prev->opcode == bytecode::Opcode::ldc && in.opcode == bytecode::Opcode::invokestatic) {
      const auto& c = prev->as<bytecode::ConstOperand>();
      const auto& call = in.as<bytecode::MemberOperand>();
      if (c.kind == bytecode::ConstOperand::Kind::string && c.text == library && call.owner == "java/lang/System" &&
          call.name == "loadLibrary") {
        ++n;
      }
    }
    prev = &in;
  }
  return n;
}

/// Structural check of a rewritten class against what was translated.
inline std::string check_rewritten(const classfile::Bytes& bytes, const InputClass& in, const std::string& library) {
  const auto m = classfile::parse_class(bytes);
  for (const auto& id : in.translated) {
    const auto* method = m.find_method(id.name, id.descriptor);
    if (!method || !method->is_native() || method->code) return id.name + id.descriptor + " is not a bodiless native";
  }
  const auto* clinit = m.find_method("<clinit>", "()V");
  if (!clinit || !rewriter::has_loader_prologue(*clinit, library) || count_loader_calls(*clinit, library) != 1) {
    return "loader prologue missing or repeated";
  }
  if (classfile::emit_class(m) != bytes) return "rewritten class does not round-trip";
  return {};
}

/// Runs the original bytecode of `id` under the interpreter with default
/// arguments and per-step stack-effect checks.
inline std::string check_interp(const std::vector<InputClass>& classes, const InputClass& in,
                                const rewriter::MethodId& id) {
  interp::ClassTable table;
  for (const auto& c : classes) {
    if (!table.contains(c.model.class_name)) table.load(c.model);
  }
  interp::Heap heap;
  interp::Interpreter vm(table, heap, {1'000'000, true});
  const auto* m = in.model.find_method(id.name, id.descriptor);
  std::vector<interp::Value> args;
  if (!m->is_static()) args.push_back(interp::Value::ref(heap.allocate({in.model.class_name, {}, {}, {}})));
  for (const auto& p : m->signature().param_types) args.push_back(interp::default_value(p.descriptor()));
  try {
    (void)vm.invoke(in.model.class_name, id.name, id.descriptor, args);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::stack_effect_mismatch) return e.what();
  }
  return {};
}

}  // namespace detail

/// Reads, selects, rewrites and translates every input class, then writes
/// the rewritten (or copied) classes, one C unit per touched class, the
/// runtime header and a build script.
inline Report run_pipeline(const PipelineConfig& cfg) {
  if (cfg.inputs.empty()) fail(ErrorCode::bad_config, "no inputs");
  if (cfg.out_classes.empty() || cfg.out_c.empty()) fail(ErrorCode::bad_config, "output directories are required");
  if (fs::weakly_canonical(cfg.out_classes) == fs::weakly_canonical(cfg.out_c)) {
    fail(ErrorCode::bad_config, "output directories must differ");
  }
  if (cfg.selection.library_name.empty()) fail(ErrorCode::bad_config, "library name is required");

  Report report;
  std::vector<detail::InputClass> classes;
  for (const auto& path : collect_inputs(cfg.inputs)) {
    auto bytes = read_file(path);
    auto model = classfile::parse_class(bytes);
    classes.push_back({path, std::move(bytes), std::move(model), {}, {}, {}});
  }

  std::set<std::pair<std::string, rewriter::MethodId>> seen;
  rewriter::RewritePlan plan;
  for (auto& in : classes) {
    const auto selected = rewriter::find_annotated_methods(in.model, cfg.selection);
    std::vector<rewriter::MethodId> candidates;
    for (const auto& id : selected) {
      seen.insert({in.model.class_name, id});
      const auto* m = in.model.find_method(id.name, id.descriptor);
      if (auto refusal = detail::static_refusal(in.model, *m)) {
        report.methods.push_back({in.model.class_name, id, false, {}, refusal->first, refusal->second, {}});
        continue;
      }
      candidates.push_back(id);
    }
    const auto class_plan = rewriter::plan_class(in.model, candidates);
    rewriter::ClassPlan kept{in.model.class_name, {}};
    for (const auto& pm : class_plan.methods) {
      const auto* m = in.model.find_method(pm.id.name, pm.id.descriptor);
      try {
        auto fn = translator::translate_method(*m, in.model, {pm.c_name});
        const auto ctx = translator::make_context(*m, in.model, {pm.c_name});
        translator::check_stack_balance(fn.body, translator::label_depths(ctx.depth_map));
        in.functions.push_back(std::move(fn));
        in.translated.push_back(pm.id);
        in.results.push_back(report.methods.size());
        report.methods.push_back({in.model.class_name, pm.id, true, pm.c_name, {}, {}, {}});
        kept.methods.push_back(pm);
      } catch (const Error& e) {
        std::string detail = e.what();
        const auto colon = detail.find(": ");
        if (colon != std::string::npos) detail = detail.substr(colon + 2);
        report.methods.push_back({in.model.class_name, pm.id, false, {}, e.code(), detail, {}});
      }
    }
    plan.classes.push_back(std::move(kept));
  }
  for (const auto& e : cfg.selection.explicit_methods) {
    rewriter::MethodId id{e.name, e.descriptor};
    if (!seen.count({e.class_name, id})) {
      report.methods.push_back({e.class_name, id, false, {}, ErrorCode::no_such_method, "not in the inputs", {}});
    }
  }
  rewriter::validate_plan(plan);
  if (cfg.strict && !report.strict_violations().empty()) throw StrictModeViolation(std::move(report));

  // A run that translates nothing writes nothing, so re-running on the
  // pipeline's own output is a no-op.
  if (report.translated() == 0) return report;
  std::vector<std::string> units;
  std::map<std::string, classfile::Bytes> rewritten;
  for (auto& in : classes) {
    const auto out_path = cfg.out_classes / (in.model.class_name + ".class");
    if (in.translated.empty()) {
      atomic_write(out_path, in.bytes);
      report.emitted.push_back(out_path);
      continue;
    }
    auto model = in.model;
    for (const auto& id : in.translated) model = rewriter::nativize_method(std::move(model), id, cfg.selection.annotation_name);
    model = rewriter::inject_library_loader(std::move(model), cfg.selection.library_name);
    auto bytes = classfile::emit_class(model);
    atomic_write(out_path, bytes);
    report.emitted.push_back(out_path);
    rewritten[in.model.class_name] = std::move(bytes);

    const auto unit = translator::render_c_unit(in.functions, c_unit_name(in.model.class_name));
    atomic_write(cfg.out_c / unit.file_name, unit.text);
    report.emitted.push_back(cfg.out_c / unit.file_name);
    units.push_back(unit.file_name);
  }
  if (!units.empty()) {
    atomic_write(cfg.out_c / "jbcrt.h", runtime::jbcrt_header);
    report.emitted.push_back(cfg.out_c / "jbcrt.h");
    atomic_write(cfg.out_c / "build.sh", build_script(cfg.selection.library_name, units),
                 fs::perms::owner_all | fs::perms::group_read | fs::perms::group_exec | fs::perms::others_read |
                     fs::perms::others_exec);
    report.emitted.push_back(cfg.out_c / "build.sh");
  }

  if (cfg.check) {
    const bool compile = cfg.jni_include.has_value();
    if (!compile) report.notes.push_back("check: C syntax pass skipped (no jni.h configured)");
    for (auto& in : classes) {
      if (in.translated.empty()) continue;
      std::string problem = detail::check_rewritten(rewritten[in.model.class_name], in, cfg.selection.library_name);
      if (problem.empty() && compile) {
        const auto unit = cfg.out_c / c_unit_name(in.model.class_name);
        const std::string cmd = cfg.c_compiler + " -std=c99 -fsyntax-only -I'" + cfg.out_c.string() + "' -I'" +
                                cfg.jni_include->string() + "' '" + unit.string() + "' 2>/dev/null";
        if (std::system(cmd.c_str()) != 0) problem = "C unit does not compile";
      }
      for (std::size_t k = 0; k < in.translated.size(); ++k) {
        auto p = problem.empty() ? detail::check_interp(classes, in, in.translated[k]) : problem;
        report.methods[in.results[k]].check = p.empty() ? "ok" : "failed: " + p;
      }
    }
  }
  return report;
}

}  // namespace jnify::pipeline
