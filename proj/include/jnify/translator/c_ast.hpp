#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace jnify::translator {

enum class StmtKind { push, pop, raw, decl, label, goto_, if_goto, if_block, switch_, return_, call, block };

/// One C statement. Besides the text needed to render it, each statement
/// records its effect on the emulated operand stack (in values) so emitted
/// code can be re-simulated without parsing C.
struct CStmt {
  StmtKind kind = StmtKind::raw;
  std::string text;    // push: expr; pop: target; raw/decl: full statement; label/goto: name;
                       // if_*: condition; switch: scrutinee; return: expr; call: helper name
  std::string target;  // goto target (if_goto), assignment target (call), declared type (pop)
  char slot = 0;       // stack macro suffix for push/pop ('I','J','F','D','A'), 0 for untyped
  std::vector<std::string> args;                          // call arguments
  std::vector<std::pair<std::string, std::string>> cases;  // switch: key text, label
  std::vector<CStmt> body;
  std::vector<CStmt> else_body;

  int pops = 0;
  int pushes = 0;
  std::optional<int> set_depth;  // stack depth after the statement, overriding pops/pushes
  bool terminal = false;         // control never falls through

  bool operator==(const CStmt&) const = default;
};

// Constructors for the common shapes.

inline CStmt stmt(StmtKind kind, std::string text = {}, std::string target = {}) {
  CStmt s;
  s.kind = kind;
  s.text = std::move(text);
  s.target = std::move(target);
  return s;
}

inline CStmt push(std::string expr, char slot = 0) {
  CStmt s = stmt(StmtKind::push, std::move(expr));
  s.slot = slot;
  s.pushes = 1;
  return s;
}

inline CStmt pop(std::string target, char slot = 0, std::string decl_type = {}) {
  CStmt s = stmt(StmtKind::pop, std::move(target));
  s.slot = slot;
  s.target = std::move(decl_type);
  s.pops = 1;
  return s;
}

inline CStmt raw(std::string text, int pops = 0, int pushes = 0) {
  CStmt s = stmt(StmtKind::raw, std::move(text));
  s.pops = pops;
  s.pushes = pushes;
  return s;
}

inline CStmt decl(std::string text) { return stmt(StmtKind::decl, std::move(text)); }

inline CStmt label(std::string name) { return stmt(StmtKind::label, std::move(name)); }

inline CStmt goto_(std::string name) {
  CStmt s = stmt(StmtKind::goto_, std::move(name));
  s.terminal = true;
  return s;
}

inline CStmt if_goto(std::string cond, std::string target, int pops = 0) {
  CStmt s = stmt(StmtKind::if_goto, std::move(cond), std::move(target));
  s.pops = pops;
  return s;
}

inline CStmt if_block(std::string cond, std::vector<CStmt> body, std::vector<CStmt> else_body = {}) {
  CStmt s = stmt(StmtKind::if_block, std::move(cond));
  s.body = std::move(body);
  s.else_body = std::move(else_body);
  return s;
}

inline CStmt return_(std::optional<std::string> expr, int pops = 0) {
  CStmt s = stmt(StmtKind::return_, expr.value_or(""));
  s.pops = pops;
  s.terminal = true;
  return s;
}

inline CStmt call(std::string assign_to, std::string helper, std::vector<std::string> args, int pops = 0,
                  int pushes = 0) {
  CStmt s = stmt(StmtKind::call, std::move(helper), std::move(assign_to));
  s.args = std::move(args);
  s.pops = pops;
  s.pushes = pushes;
  return s;
}

inline CStmt block(std::vector<CStmt> body) {
  CStmt s = stmt(StmtKind::block);
  s.terminal = !body.empty() && body.back().terminal;
  s.body = std::move(body);
  return s;
}

struct CParam {
  std::string type;
  std::string name;
  bool operator==(const CParam&) const = default;
};

struct CFunction {
  std::string name;
  std::string return_type;  // "void", "jint", "jobject", ...
  std::vector<CParam> params;
  std::vector<CStmt> body;
  bool operator==(const CFunction&) const = default;
};

struct CSourceUnit {
  std::string file_name;
  std::string text;
};

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::string macro(const char* base, char slot) {
  std::string m(base);
  if (slot) m.push_back(slot);
  return m;
}

inline void render_stmt(const CStmt& s, int indent, std::string& out);

inline void render_list(const std::vector<CStmt>& list, int indent, std::string& out) {
  for (const auto& s : list) render_stmt(s, indent, out);
}

inline void render_stmt(const CStmt& s, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case StmtKind::push: out += pad + macro("Push", s.slot) + "(" + s.text + ");\n"; break;
    case StmtKind::pop:
      out += pad + (s.target.empty() ? "" : s.target + " ") + s.text + " = " + macro("Pop", s.slot) + "();\n";
      break;
    case StmtKind::raw:
    case StmtKind::decl: out += pad + s.text + "\n"; break;
    case StmtKind::label: out += s.text + ":\n"; break;
    case StmtKind::goto_: out += pad + "goto " + s.text + ";\n"; break;
    case StmtKind::if_goto: out += pad + "if (" + s.text + ") goto " + s.target + ";\n"; break;
    case StmtKind::if_block:
      out += pad + "if (" + s.text + ") {\n";
      render_list(s.body, indent + 1, out);
      if (!s.else_body.empty()) {
        out += pad + "} else {\n";
        render_list(s.else_body, indent + 1, out);
      }
      out += pad + "}\n";
      break;
    case StmtKind::switch_:
      out += pad + "switch (" + s.text + ") {\n";
      for (const auto& [key, lbl] : s.cases) out += pad + "  case " + key + ": goto " + lbl + ";\n";
      out += pad + "  default: goto " + s.target + ";\n";
      out += pad + "}\n";
      break;
    case StmtKind::return_: out += pad + (s.text.empty() ? "return;" : "return " + s.text + ";") + "\n"; break;
    case StmtKind::call: {
      out += pad + (s.target.empty() ? "" : s.target + " = ") + s.text + "(";
      for (std::size_t i = 0; i < s.args.size(); ++i) out += (i ? ", " : "") + s.args[i];
      out += ");\n";
      break;
    }
    case StmtKind::block:
      out += pad + "{\n";
      render_list(s.body, indent + 1, out);
      out += pad + "}\n";
      break;
  }
}

}  // namespace detail

inline std::string render_signature(const CFunction& f) {
  std::string out = "JNIEXPORT " + f.return_type + " JNICALL " + f.name + "(";
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    const auto& t = f.params[i].type;
    out += (i ? ", " : "") + t + (!t.empty() && t.back() == '*' ? "" : " ") + f.params[i].name;
  }
  return out + ")";
}

inline std::string render_function(const CFunction& f) {
  std::string out = render_signature(f) + " {\n";
  detail::render_list(f.body, 1, out);
  return out + "}\n";
}

// ---------------------------------------------------------------------------
// Structural queries used by pruning and tests

inline void collect_jump_targets(const std::vector<CStmt>& list, std::set<std::string>& out) {
  for (const auto& s : list) {
    switch (s.kind) {
      case StmtKind::goto_: out.insert(s.text); break;
      case StmtKind::if_goto: out.insert(s.target); break;
      case StmtKind::switch_:
        out.insert(s.target);
        for (const auto& c : s.cases) out.insert(c.second);
        break;
      default: break;
    }
    collect_jump_targets(s.body, out);
    collect_jump_targets(s.else_body, out);
  }
}

/// Drops statements no path can reach and labels nothing jumps to, until
/// nothing changes. Top-level only: labels never occur inside blocks.
inline void prune_unreachable(std::vector<CStmt>& body) {
  for (bool changed = true; changed;) {
    changed = false;
    std::set<std::string> targets;
    collect_jump_targets(body, targets);
    std::vector<CStmt> kept;
    bool live = true;
    for (auto& s : body) {
      if (s.kind == StmtKind::label) {
        if (!targets.count(s.text)) {
          changed = true;
          continue;
        }
        live = true;
      } else if (!live) {
        changed = true;
        continue;
      }
      live = !s.terminal;
      kept.push_back(std::move(s));
    }
    body = std::move(kept);
  }
}

}  // namespace jnify::translator
