#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jnify {

enum class ErrorCode {
  // classfile
  bad_magic,
  truncated_input,
  unresolvable_pool_index,
  pool_overflow,
  malformed_descriptor,
  malformed_class,
  // bytecode-ir
  unknown_opcode,
  inconsistent_stack_depth,
  stack_overflow_decl,
  unsupported,
  bad_local_index,
  // rewriter
  already_native,
  abstract_method,
  no_such_method,
  // translator
  unsupported_opcode,
  inconsistent_depth,
  unknown_system_exception,
  duplicate_function_name,
  bare_new,
  // interp
  oracle_unsupported,
  step_limit_exceeded,
  stack_effect_mismatch,
  linkage_error,
  // pipeline
  input_not_found,
  write_failure,
  strict_mode_violation,
  bad_config,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::bad_magic: return "BadMagic";
    case ErrorCode::truncated_input: return "TruncatedInput";
    case ErrorCode::unresolvable_pool_index: return "UnresolvablePoolIndex";
    case ErrorCode::pool_overflow: return "PoolOverflow";
    case ErrorCode::malformed_descriptor: return "MalformedDescriptor";
    case ErrorCode::malformed_class: return "MalformedClass";
    case ErrorCode::unknown_opcode: return "UnknownOpcode";
    case ErrorCode::inconsistent_stack_depth: return "InconsistentStackDepth";
    case ErrorCode::stack_overflow_decl: return "StackOverflowDecl";
    case ErrorCode::unsupported: return "Unsupported";
    case ErrorCode::bad_local_index: return "BadLocalIndex";
    case ErrorCode::already_native: return "AlreadyNative";
    case ErrorCode::abstract_method: return "AbstractMethod";
    case ErrorCode::no_such_method: return "NoSuchMethod";
    case ErrorCode::unsupported_opcode: return "UnsupportedOpcode";
    case ErrorCode::inconsistent_depth: return "InconsistentDepth";
    case ErrorCode::unknown_system_exception: return "UnknownSystemException";
    case ErrorCode::duplicate_function_name: return "DuplicateFunctionName";
    case ErrorCode::bare_new: return "BareNew";
    case ErrorCode::oracle_unsupported: return "OracleUnsupported";
    case ErrorCode::step_limit_exceeded: return "StepLimitExceeded";
    case ErrorCode::stack_effect_mismatch: return "StackEffectMismatch";
    case ErrorCode::linkage_error: return "LinkageError";
    case ErrorCode::input_not_found: return "InputNotFound";
    case ErrorCode::write_failure: return "WriteFailure";
    case ErrorCode::strict_mode_violation: return "StrictModeViolation";
    case ErrorCode::bad_config: return "BadConfig";
  }
  return "Unknown";
}

/// Every failure raised by the toolchain carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace jnify
