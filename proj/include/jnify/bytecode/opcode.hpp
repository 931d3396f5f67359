#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace jnify::bytecode {

// Numeric values are the JVM encodings. `label` is a pseudo opcode used for
// label markers in decoded instruction lists and never appears in bytecode.
enum class Opcode : std::uint16_t {
  nop = 0x00, aconst_null = 0x01,
  iconst_m1 = 0x02, iconst_0 = 0x03, iconst_1 = 0x04, iconst_2 = 0x05, iconst_3 = 0x06, iconst_4 = 0x07,
  iconst_5 = 0x08, lconst_0 = 0x09, lconst_1 = 0x0a, fconst_0 = 0x0b, fconst_1 = 0x0c, fconst_2 = 0x0d,
  dconst_0 = 0x0e, dconst_1 = 0x0f, bipush = 0x10, sipush = 0x11, ldc = 0x12, ldc_w = 0x13, ldc2_w = 0x14,
  iload = 0x15, lload = 0x16, fload = 0x17, dload = 0x18, aload = 0x19,
  iload_0 = 0x1a, iload_1, iload_2, iload_3,
  lload_0 = 0x1e, lload_1, lload_2, lload_3,
  fload_0 = 0x22, fload_1, fload_2, fload_3,
  dload_0 = 0x26, dload_1, dload_2, dload_3,
  aload_0 = 0x2a, aload_1, aload_2, aload_3,
  iaload = 0x2e, laload = 0x2f, faload = 0x30, daload = 0x31, aaload = 0x32, baload = 0x33, caload = 0x34,
  saload = 0x35,
  istore = 0x36, lstore = 0x37, fstore = 0x38, dstore = 0x39, astore = 0x3a,
  istore_0 = 0x3b, istore_1, istore_2, istore_3,
  lstore_0 = 0x3f, lstore_1, lstore_2, lstore_3,
  fstore_0 = 0x43, fstore_1, fstore_2, fstore_3,
  dstore_0 = 0x47, dstore_1, dstore_2, dstore_3,
  astore_0 = 0x4b, astore_1, astore_2, astore_3,
  iastore = 0x4f, lastore = 0x50, fastore = 0x51, dastore = 0x52, aastore = 0x53, bastore = 0x54,
  castore = 0x55, sastore = 0x56,
  pop = 0x57, pop2 = 0x58, dup = 0x59, dup_x1 = 0x5a, dup_x2 = 0x5b, dup2 = 0x5c, dup2_x1 = 0x5d,
  dup2_x2 = 0x5e, swap = 0x5f,
  iadd = 0x60, ladd, fadd, dadd, isub, lsub, fsub, dsub, imul, lmul, fmul, dmul, idiv, ldiv, fdiv, ddiv,
  irem = 0x70, lrem, frem, drem, ineg, lneg, fneg, dneg, ishl, lshl, ishr, lshr, iushr, lushr, iand, land,
  ior = 0x80, lor, ixor, lxor, iinc,
  i2l = 0x85, i2f, i2d, l2i, l2f, l2d, f2i, f2l, f2d, d2i, d2l, d2f, i2b, i2c, i2s,
  lcmp = 0x94, fcmpl, fcmpg, dcmpl, dcmpg,
  ifeq = 0x99, ifne, iflt, ifge, ifgt, ifle,
  if_icmpeq = 0x9f, if_icmpne, if_icmplt, if_icmpge, if_icmpgt, if_icmple, if_acmpeq, if_acmpne,
  goto_ = 0xa7, jsr = 0xa8, ret = 0xa9, tableswitch = 0xaa, lookupswitch = 0xab,
  ireturn = 0xac, lreturn, freturn, dreturn, areturn, return_,
  getstatic = 0xb2, putstatic, getfield, putfield,
  invokevirtual = 0xb6, invokespecial, invokestatic, invokeinterface, invokedynamic,
  new_ = 0xbb, newarray, anewarray, arraylength, athrow, checkcast, instanceof, monitorenter, monitorexit,
  wide = 0xc4, multianewarray = 0xc5, ifnull = 0xc6, ifnonnull = 0xc7, goto_w = 0xc8, jsr_w = 0xc9,
  label = 0x100,
};

/// How the bytes following an opcode are laid out.
enum class OperandFormat : std::uint8_t {
  none,
  local_u1,        // xLOAD/xSTORE/RET index
  byte_s1,         // BIPUSH
  short_s2,        // SIPUSH
  pool_u1,         // LDC
  pool_u2,         // LDC_W, LDC2_W, field/method/type references
  branch_s2,
  branch_s4,
  iinc,
  tableswitch,
  lookupswitch,
  invokeinterface, // u2 index, u1 count, u1 zero
  invokedynamic,   // u2 index, u2 zero
  newarray,        // u1 atype
  multianewarray,  // u2 index, u1 dimensions
  wide,
  invalid,
};

struct OpcodeInfo {
  std::string_view mnemonic;
  OperandFormat format = OperandFormat::invalid;
};

namespace detail {

constexpr std::array<OpcodeInfo, 256> build_opcode_table() {
  using F = OperandFormat;
  std::array<OpcodeInfo, 256> t{};
  auto set = [&](int op, std::string_view m, F f = F::none) { t[static_cast<std::size_t>(op)] = {m, f}; };
  set(0x00, "NOP"); set(0x01, "ACONST_NULL");
  set(0x02, "ICONST_M1"); set(0x03, "ICONST_0"); set(0x04, "ICONST_1"); set(0x05, "ICONST_2");
  set(0x06, "ICONST_3"); set(0x07, "ICONST_4"); set(0x08, "ICONST_5");
  set(0x09, "LCONST_0"); set(0x0a, "LCONST_1");
  set(0x0b, "FCONST_0"); set(0x0c, "FCONST_1"); set(0x0d, "FCONST_2");
  set(0x0e, "DCONST_0"); set(0x0f, "DCONST_1");
  set(0x10, "BIPUSH", F::byte_s1); set(0x11, "SIPUSH", F::short_s2);
  set(0x12, "LDC", F::pool_u1); set(0x13, "LDC_W", F::pool_u2); set(0x14, "LDC2_W", F::pool_u2);
  set(0x15, "ILOAD", F::local_u1); set(0x16, "LLOAD", F::local_u1); set(0x17, "FLOAD", F::local_u1);
  set(0x18, "DLOAD", F::local_u1); set(0x19, "ALOAD", F::local_u1);
  constexpr std::string_view short_loads[] = {
      "ILOAD_0", "ILOAD_1", "ILOAD_2", "ILOAD_3", "LLOAD_0", "LLOAD_1", "LLOAD_2", "LLOAD_3",
      "FLOAD_0", "FLOAD_1", "FLOAD_2", "FLOAD_3", "DLOAD_0", "DLOAD_1", "DLOAD_2", "DLOAD_3",
      "ALOAD_0", "ALOAD_1", "ALOAD_2", "ALOAD_3"};
  for (int i = 0; i < 20; ++i) set(0x1a + i, short_loads[i]);
  set(0x2e, "IALOAD"); set(0x2f, "LALOAD"); set(0x30, "FALOAD"); set(0x31, "DALOAD");
  set(0x32, "AALOAD"); set(0x33, "BALOAD"); set(0x34, "CALOAD"); set(0x35, "SALOAD");
  set(0x36, "ISTORE", F::local_u1); set(0x37, "LSTORE", F::local_u1); set(0x38, "FSTORE", F::local_u1);
  set(0x39, "DSTORE", F::local_u1); set(0x3a, "ASTORE", F::local_u1);
  constexpr std::string_view short_stores[] = {
      "ISTORE_0", "ISTORE_1", "ISTORE_2", "ISTORE_3", "LSTORE_0", "LSTORE_1", "LSTORE_2", "LSTORE_3",
      "FSTORE_0", "FSTORE_1", "FSTORE_2", "FSTORE_3", "DSTORE_0", "DSTORE_1", "DSTORE_2", "DSTORE_3",
      "ASTORE_0", "ASTORE_1", "ASTORE_2", "ASTORE_3"};
  for (int i = 0; i < 20; ++i) set(0x3b + i, short_stores[i]);
  set(0x4f, "IASTORE"); set(0x50, "LASTORE"); set(0x51, "FASTORE"); set(0x52, "DASTORE");
  set(0x53, "AASTORE"); set(0x54, "BASTORE"); set(0x55, "CASTORE"); set(0x56, "SASTORE");
  set(0x57, "POP"); set(0x58, "POP2"); set(0x59, "DUP"); set(0x5a, "DUP_X1"); set(0x5b, "DUP_X2");
  set(0x5c, "DUP2"); set(0x5d, "DUP2_X1"); set(0x5e, "DUP2_X2"); set(0x5f, "SWAP");
  constexpr std::string_view arith[] = {
      "IADD", "LADD", "FADD", "DADD", "ISUB", "LSUB", "FSUB", "DSUB", "IMUL", "LMUL", "FMUL", "DMUL",
      "IDIV", "LDIV", "FDIV", "DDIV", "IREM", "LREM", "FREM", "DREM", "INEG", "LNEG", "FNEG", "DNEG",
      "ISHL", "LSHL", "ISHR", "LSHR", "IUSHR", "LUSHR", "IAND", "LAND", "IOR", "LOR", "IXOR", "LXOR"};
  for (int i = 0; i < 36; ++i) set(0x60 + i, arith[i]);
  set(0x84, "IINC", F::iinc);
  constexpr std::string_view conv[] = {"I2L", "I2F", "I2D", "L2I", "L2F", "L2D", "F2I", "F2L",
                                       "F2D", "D2I", "D2L", "D2F", "I2B", "I2C", "I2S"};
  for (int i = 0; i < 15; ++i) set(0x85 + i, conv[i]);
  set(0x94, "LCMP"); set(0x95, "FCMPL"); set(0x96, "FCMPG"); set(0x97, "DCMPL"); set(0x98, "DCMPG");
  constexpr std::string_view branches[] = {"IFEQ", "IFNE", "IFLT", "IFGE", "IFGT", "IFLE",
                                           "IF_ICMPEQ", "IF_ICMPNE", "IF_ICMPLT", "IF_ICMPGE",
                                           "IF_ICMPGT", "IF_ICMPLE", "IF_ACMPEQ", "IF_ACMPNE",
                                           "GOTO", "JSR"};
  for (int i = 0; i < 16; ++i) set(0x99 + i, branches[i], F::branch_s2);
  set(0xa9, "RET", F::local_u1);
  set(0xaa, "TABLESWITCH", F::tableswitch); set(0xab, "LOOKUPSWITCH", F::lookupswitch);
  set(0xac, "IRETURN"); set(0xad, "LRETURN"); set(0xae, "FRETURN"); set(0xaf, "DRETURN");
  set(0xb0, "ARETURN"); set(0xb1, "RETURN");
  set(0xb2, "GETSTATIC", F::pool_u2); set(0xb3, "PUTSTATIC", F::pool_u2);
  set(0xb4, "GETFIELD", F::pool_u2); set(0xb5, "PUTFIELD", F::pool_u2);
  set(0xb6, "INVOKEVIRTUAL", F::pool_u2); set(0xb7, "INVOKESPECIAL", F::pool_u2);
  set(0xb8, "INVOKESTATIC", F::pool_u2); set(0xb9, "INVOKEINTERFACE", F::invokeinterface);
  set(0xba, "INVOKEDYNAMIC", F::invokedynamic);
  set(0xbb, "NEW", F::pool_u2); set(0xbc, "NEWARRAY", F::newarray); set(0xbd, "ANEWARRAY", F::pool_u2);
  set(0xbe, "ARRAYLENGTH"); set(0xbf, "ATHROW");
  set(0xc0, "CHECKCAST", F::pool_u2); set(0xc1, "INSTANCEOF", F::pool_u2);
  set(0xc2, "MONITORENTER"); set(0xc3, "MONITOREXIT");
  set(0xc4, "WIDE", F::wide); set(0xc5, "MULTIANEWARRAY", F::multianewarray);
  set(0xc6, "IFNULL", F::branch_s2); set(0xc7, "IFNONNULL", F::branch_s2);
  set(0xc8, "GOTO_W", F::branch_s4); set(0xc9, "JSR_W", F::branch_s4);
  return t;
}

inline constexpr auto opcode_table = build_opcode_table();

}  // namespace detail

constexpr const OpcodeInfo& opcode_info(std::uint8_t byte) { return detail::opcode_table[byte]; }

constexpr std::string_view mnemonic(Opcode op) {
  if (op == Opcode::label) return "LABEL";
  return detail::opcode_table[static_cast<std::uint8_t>(op)].mnemonic;
}

constexpr bool in_range(Opcode op, Opcode first, Opcode last) {
  return static_cast<std::uint16_t>(op) >= static_cast<std::uint16_t>(first) &&
         static_cast<std::uint16_t>(op) <= static_cast<std::uint16_t>(last);
}

constexpr Opcode offset(Opcode base, int delta) {
  return static_cast<Opcode>(static_cast<std::uint16_t>(base) + delta);
}

constexpr bool is_conditional_branch(Opcode op) {
  return in_range(op, Opcode::ifeq, Opcode::if_acmpne) || op == Opcode::ifnull || op == Opcode::ifnonnull;
}

constexpr bool is_return(Opcode op) { return in_range(op, Opcode::ireturn, Opcode::return_); }

constexpr bool is_invoke(Opcode op) { return in_range(op, Opcode::invokevirtual, Opcode::invokedynamic); }

constexpr bool is_array_load(Opcode op) { return in_range(op, Opcode::iaload, Opcode::saload); }

constexpr bool is_array_store(Opcode op) { return in_range(op, Opcode::iastore, Opcode::sastore); }

/// Instructions after which control never falls through to the next one.
constexpr bool ends_block(Opcode op) {
  return op == Opcode::goto_ || op == Opcode::tableswitch || op == Opcode::lookupswitch || is_return(op) ||
         op == Opcode::athrow || op == Opcode::ret;
}

}  // namespace jnify::bytecode
