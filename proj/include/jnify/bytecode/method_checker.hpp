#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jnify/bytecode/instr.hpp"
#include "jnify/bytecode/stack_effect.hpp"
#include "jnify/classfile/class_model.hpp"

namespace jnify::bytecode {

// ---------------------------------------------------------------------------
// Which instructions can raise an exception

namespace sysexc {
inline constexpr const char* arithmetic = "java/lang/ArithmeticException";
inline constexpr const char* null_pointer = "java/lang/NullPointerException";
inline constexpr const char* array_index = "java/lang/ArrayIndexOutOfBoundsException";
inline constexpr const char* negative_array_size = "java/lang/NegativeArraySizeException";
inline constexpr const char* class_cast = "java/lang/ClassCastException";
inline constexpr const char* array_store = "java/lang/ArrayStoreException";
}  // namespace sysexc

enum class SiteKind : std::uint8_t { none, forwarded, system, thrown };

constexpr SiteKind site_kind(Opcode op) {
  if (is_invoke(op)) return SiteKind::forwarded;
  if (op == Opcode::athrow) return SiteKind::thrown;
  switch (op) {
    case Opcode::idiv: case Opcode::irem: case Opcode::ldiv: case Opcode::lrem:
    case Opcode::newarray: case Opcode::anewarray: case Opcode::multianewarray:
    case Opcode::arraylength: case Opcode::getfield: case Opcode::putfield: case Opcode::checkcast:
      return SiteKind::system;
    default:
      return is_array_load(op) || is_array_store(op) ? SiteKind::system : SiteKind::none;
  }
}

/// System exceptions a checked non-call instruction can raise, in the order
/// its runtime helper tests for them.
inline std::vector<std::string> system_exceptions_of(Opcode op) {
  using namespace sysexc;
  switch (op) {
    case Opcode::idiv: case Opcode::irem: case Opcode::ldiv: case Opcode::lrem: return {arithmetic};
    case Opcode::newarray: case Opcode::anewarray: case Opcode::multianewarray: return {negative_array_size};
    case Opcode::arraylength: case Opcode::getfield: case Opcode::putfield: return {null_pointer};
    case Opcode::checkcast: return {class_cast};
    case Opcode::aastore: return {null_pointer, array_index, array_store};
    default:
      if (is_array_load(op) || is_array_store(op)) return {null_pointer, array_index};
      return {};
  }
}

// ---------------------------------------------------------------------------
// Static stack simulation

/// A simulated stack value. `new_site` is the offset of the NEW that created
/// a still-uninitialized reference, or -1.
struct StackValue {
  SlotKind kind = SlotKind::int_;
  std::int64_t new_site = -1;
  bool operator==(const StackValue&) const = default;
};

using StackState = std::vector<StackValue>;

inline std::size_t slot_depth(const StackState& s) {
  std::size_t n = 0;
  for (const auto& v : s) n += slot_width(v.kind);
  return n;
}

inline std::vector<SlotKind> kinds_of(const StackState& s) {
  std::vector<SlotKind> out;
  out.reserve(s.size());
  for (const auto& v : s) out.push_back(v.kind);
  return out;
}

/// Result of check_method: the stack state at every reachable label and
/// before every reachable instruction. Depths are reported both in JVM slots
/// and in values (one value per 64-bit emulated slot).
struct DepthMap {
  std::map<std::uint32_t, StackState> at_label;
  std::vector<std::optional<StackState>> before;  // indexed like MethodModel::instructions
  std::size_t max_slots = 0;
  std::size_t max_values = 0;

  [[nodiscard]] bool reachable(std::size_t index) const { return index < before.size() && before[index].has_value(); }
  [[nodiscard]] bool label_reachable(const Label& l) const { return at_label.count(l.offset) != 0; }
  [[nodiscard]] std::size_t label_slots(const Label& l) const { return slot_depth(at_label.at(l.offset)); }
  [[nodiscard]] std::size_t label_values(const Label& l) const { return at_label.at(l.offset).size(); }
};

inline bool is_unsupported(const Instr& in) {
  switch (in.opcode) {
    case Opcode::jsr: case Opcode::ret: case Opcode::invokedynamic:
    case Opcode::monitorenter: case Opcode::monitorexit:
      return true;
    case Opcode::ldc: return in.as<ConstOperand>().kind == ConstOperand::Kind::other;
    default: return false;
  }
}

/// Unsupported instructions of a method, as listing lines.
inline std::vector<std::string> unsupported_instructions(const classfile::MethodModel& m) {
  std::vector<std::string> out;
  for (const auto& in : m.instructions) {
    if (!in.is_label() && is_unsupported(in)) out.push_back(to_string(in) + " @" + std::to_string(in.offset));
  }
  return out;
}

namespace detail {

inline std::size_t local_width(Opcode op) {
  return op == Opcode::lload || op == Opcode::dload || op == Opcode::lstore || op == Opcode::dstore ? 2 : 1;
}

}  // namespace detail

/// Abstract interpretation of a method's operand stack. Rejects methods whose
/// merge points disagree, whose depth exceeds max_stack, that use unsupported
/// opcodes, or that consume an uninitialized reference other than as the
/// receiver of its constructor.
inline DepthMap check_method(const classfile::MethodModel& m) {
  if (!m.code) fail(ErrorCode::unsupported, m.name + m.descriptor + " has no code");
  if (auto bad = unsupported_instructions(m); !bad.empty()) {
    std::string list;
    for (const auto& b : bad) list += (list.empty() ? "" : ", ") + b;
    fail(ErrorCode::unsupported, m.name + m.descriptor + ": " + list);
  }
  const auto& code = m.instructions;
  const std::size_t max_stack = m.code->max_stack;
  const std::size_t max_locals = m.code->max_locals;
  const std::string where = m.name + m.descriptor;

  const std::size_t param_slots = m.signature().param_slots() + (m.is_static() ? 0 : 1);
  if (param_slots > max_locals) {
    fail(ErrorCode::bad_local_index, where + ": parameters need " + std::to_string(param_slots) +
                                         " locals, max_locals is " + std::to_string(max_locals));
  }

  std::map<std::uint32_t, std::size_t> label_index;
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (code[i].is_label()) label_index.emplace(code[i].as<Label>().offset, i);
  }

  DepthMap map;
  map.before.resize(code.size());
  std::deque<std::pair<std::size_t, StackState>> work;

  auto index_of = [&](const Label& l) {
    auto it = label_index.find(l.offset);
    if (it == label_index.end()) fail(ErrorCode::malformed_class, where + ": missing label " + l.name());
    return it->second;
  };

  auto arrive = [&](std::size_t idx, StackState state, std::uint32_t from) {
    if (idx >= code.size()) fail(ErrorCode::malformed_class, where + ": control falls off the end of the code");
    auto& slot = map.before[idx];
    if (slot) {
      if (*slot != state) {
        fail(ErrorCode::inconsistent_stack_depth,
             where + ": stack at offset " + std::to_string(code[idx].offset) + " reached from offset " +
                 std::to_string(from) + " with depth " + std::to_string(slot_depth(state)) + " but previously " +
                 std::to_string(slot_depth(*slot)));
      }
      return;
    }
    const auto depth = slot_depth(state);
    if (depth > max_stack) {
      fail(ErrorCode::stack_overflow_decl, where + ": depth " + std::to_string(depth) + " exceeds max_stack " +
                                               std::to_string(max_stack));
    }
    map.max_slots = std::max(map.max_slots, depth);
    map.max_values = std::max(map.max_values, state.size());
    slot = state;
    work.emplace_back(idx, std::move(state));
  };

  arrive(0, {}, 0);
  while (!work.empty()) {
    auto [idx, state] = std::move(work.front());
    work.pop_front();
    const Instr& in = code[idx];

    if (in.is_label()) {
      map.at_label[in.as<Label>().offset] = state;
      arrive(idx + 1, std::move(state), in.offset);
      continue;
    }

    // Stack effect and kind agreement.
    const auto kinds = kinds_of(state);
    const auto effect = stack_effect(in, kinds);
    if (effect.pops.size() > state.size()) {
      fail(ErrorCode::inconsistent_stack_depth, where + ": " + to_string(in) + " @" + std::to_string(in.offset) +
                                                    " underflows the stack");
    }
    const std::size_t base = state.size() - effect.pops.size();
    for (std::size_t i = 0; i < effect.pops.size(); ++i) {
      if (state[base + i].kind != effect.pops[i]) {
        fail(ErrorCode::inconsistent_stack_depth,
             where + ": " + to_string(in) + " @" + std::to_string(in.offset) + " expects " + effect.to_string() +
                 " but found kind " + to_char(state[base + i].kind));
      }
    }

    // Local indices.
    if (auto* local = std::get_if<LocalOperand>(&in.operand)) {
      if (local->index + detail::local_width(in.opcode) > max_locals) {
        fail(ErrorCode::bad_local_index, where + ": local " + std::to_string(local->index) + " beyond max_locals");
      }
    } else if (auto* inc = std::get_if<IincOperand>(&in.operand)) {
      if (inc->index >= max_locals) fail(ErrorCode::bad_local_index, where + ": IINC local beyond max_locals");
    }

    // Result stack, tracking constructor state.
    StackState next(state.begin(), state.begin() + static_cast<std::ptrdiff_t>(base));
    const bool is_init = in.opcode == Opcode::invokespecial && in.as<MemberOperand>().name == "<init>";
    if (is_shuffle(in.opcode)) {
      const auto sh = shuffle_for(in.opcode, kinds);
      for (auto k : sh.push_order) next.push_back(state[base + k]);
    } else {
      for (std::size_t i = 0; i < effect.pops.size(); ++i) {
        const auto& v = state[base + i];
        if (v.new_site < 0) continue;
        if (is_init && i == 0) continue;
        fail(ErrorCode::bare_new, where + ": uninitialized object from NEW @" + std::to_string(v.new_site) +
                                      " consumed by " + to_string(in) + " @" + std::to_string(in.offset));
      }
      if (is_init) {
        const auto site = state[base].new_site;
        if (site < 0) {
          fail(ErrorCode::bare_new, where + ": constructor call @" + std::to_string(in.offset) +
                                        " on an already initialized reference");
        }
        for (auto& v : next) {
          if (v.new_site == site) v.new_site = -1;
        }
      }
      for (auto k : effect.pushes) {
        next.push_back({k, in.opcode == Opcode::new_ ? static_cast<std::int64_t>(in.offset) : -1});
      }
    }

    // Exception edges.
    if (site_kind(in.opcode) != SiteKind::none) {
      for (const auto& region : m.try_regions) {
        if (region.covers(in.offset)) arrive(index_of(region.handler), {{SlotKind::ref, -1}}, in.offset);
      }
    }

    // Normal successors.
    switch (in.opcode) {
      case Opcode::goto_: arrive(index_of(in.as<JumpOperand>().target), std::move(next), in.offset); break;
      case Opcode::tableswitch:
      case Opcode::lookupswitch: {
        const auto& sw = in.as<SwitchOperand>();
        arrive(index_of(sw.default_target), next, in.offset);
        for (const auto& [key, target] : sw.cases) arrive(index_of(target), next, in.offset);
        break;
      }
      default:
        if (is_conditional_branch(in.opcode)) {
          arrive(index_of(in.as<JumpOperand>().target), next, in.offset);
          arrive(idx + 1, std::move(next), in.offset);
        } else if (!ends_block(in.opcode)) {
          arrive(idx + 1, std::move(next), in.offset);
        }
        break;
    }
  }
  return map;
}

}  // namespace jnify::bytecode
