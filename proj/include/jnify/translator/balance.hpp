#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jnify/bytecode/method_checker.hpp"
#include "jnify/error.hpp"
#include "jnify/translator/c_ast.hpp"

namespace jnify::translator {

/// Expected emulated-stack depth (in values) at each label, from the checker.
inline std::map<std::string, int> label_depths(const bytecode::DepthMap& map) {
  std::map<std::string, int> out;
  for (const auto& [offset, state] : map.at_label) {
    out["L" + std::to_string(offset)] = static_cast<int>(state.size());
  }
  return out;
}

namespace detail {

struct BalanceWalk {
  const std::map<std::string, int>& expected;
  std::vector<std::string> problems;

  void jump(const std::string& target, int depth) {
    auto it = expected.find(target);
    if (it == expected.end()) {
      problems.push_back("jump to unknown label " + target);
    } else if (it->second != depth) {
      problems.push_back("jump to " + target + " with depth " + std::to_string(depth) + ", expected " +
                         std::to_string(it->second));
    }
  }

  /// Returns the depth after `list`, or nullopt when control cannot fall out.
  std::optional<int> walk(const std::vector<CStmt>& list, std::optional<int> depth) {
    for (const auto& s : list) {
      if (s.kind == StmtKind::label) {
        auto it = expected.find(s.text);
        if (it == expected.end()) {
          problems.push_back("label " + s.text + " has no recorded depth");
          depth = std::nullopt;
          continue;
        }
        if (depth && *depth != it->second) {
          problems.push_back("fallthrough into " + s.text + " with depth " + std::to_string(*depth) + ", expected " +
                             std::to_string(it->second));
        }
        depth = it->second;
        continue;
      }
      if (!depth) continue;  // dead code; pruning removes it
      int d = *depth - s.pops;
      if (d < 0) problems.push_back("stack underflow at `" + s.text + "`");
      switch (s.kind) {
        case StmtKind::goto_: jump(s.text, d); break;
        case StmtKind::if_goto: jump(s.target, d); break;
        case StmtKind::switch_:
          jump(s.target, d);
          for (const auto& c : s.cases) jump(c.second, d);
          break;
        case StmtKind::if_block: {
          auto then_end = walk(s.body, d);
          auto else_end = walk(s.else_body, d);
          if (then_end && else_end && *then_end != *else_end) {
            problems.push_back("branches of `if (" + s.text + ")` leave different depths");
          }
          d = then_end ? *then_end : else_end.value_or(d);
          break;
        }
        case StmtKind::block: {
          auto end = walk(s.body, d);
          if (!end) {
            depth = std::nullopt;
            continue;
          }
          d = *end;
          break;
        }
        default: break;
      }
      d += s.pushes;
      if (s.set_depth) d = *s.set_depth;
      depth = s.terminal ? std::nullopt : std::optional<int>(d);
    }
    return depth;
  }
};

}  // namespace detail

/// Re-simulates the emulated stack through a translated body and lists every
/// place where it disagrees with the checker's label depths. The body starts
/// from an empty stack.
inline std::vector<std::string> stack_balance_problems(const std::vector<CStmt>& body,
                                                        const std::map<std::string, int>& expected) {
  detail::BalanceWalk w{expected, {}};
  w.walk(body, 0);
  return w.problems;
}

/// Throws InconsistentDepth on the first disagreement.
inline void check_stack_balance(const std::vector<CStmt>& body, const std::map<std::string, int>& expected) {
  const auto problems = stack_balance_problems(body, expected);
  if (!problems.empty()) fail(ErrorCode::inconsistent_depth, problems.front());
}

}  // namespace jnify::translator
