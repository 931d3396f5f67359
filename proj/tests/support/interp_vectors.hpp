#pragma once

// Hand-computed interpreter vectors and the corpus runner, shared by the
// interpreter suite and the acceptance binary.

#include <cmath>
#include <functional>
#include <limits>

#include "class_asm.hpp"
#include "corpus.hpp"
#include "jnify/interp/interpreter.hpp"

namespace interp_vectors {

using namespace jnify;
using interp::Value;
using asmtest::ClassFile;
using asmtest::Code;
namespace op = asmtest::op;
namespace acc = asmtest::acc;

struct Vector {
  std::string name;
  std::string desc;
  std::function<void(Code&)> body;
  std::vector<Value> args;
  std::string expected;
};

struct StaticRun {
  std::string outcome;
  std::uint64_t checked_steps = 0;
};

inline StaticRun run_static(const Vector& v, std::function<void(ClassFile&)> extra = {}) {
  ClassFile cf("V");
  auto c = cf.code();
  v.body(c);
  cf.method(acc::public_ | acc::static_, "m", v.desc, c);
  if (extra) extra(cf);
  const auto bytes = cf.bytes();
  interp::ClassTable classes;
  classes.load(classfile::parse_class(bytes));
  interp::Heap heap;
  interp::Interpreter in(classes, heap);
  auto out = in.invoke("V", "m", v.desc, v.args);
  return {interp::to_string(out), in.checked_steps()};
}

inline Value I(std::int32_t v) { return Value::i32(v); }
inline Value J(std::int64_t v) { return Value::i64(v); }
inline Value F(float v) { return Value::f32(v); }
inline Value D(double v) { return Value::f64(v); }

inline const float fnan = std::numeric_limits<float>::quiet_NaN();
inline const double dnan = std::numeric_limits<double>::quiet_NaN();

inline auto binop_i(std::uint8_t o) {
  return [o](Code& c) { c.max(2, 2).iload(0).iload(1).i(o).i(op::ireturn); };
}
inline auto binop_j(std::uint8_t o) {
  return [o](Code& c) { c.max(4, 4).lload(0).lload(2).i(o).i(op::lreturn); };
}
inline auto shift_j(std::uint8_t o) {
  return [o](Code& c) { c.max(3, 3).lload(0).iload(2).i(o).i(op::lreturn); };
}
inline auto cmp_f(std::uint8_t o) {
  return [o](Code& c) { c.max(2, 2).fload(0).fload(1).i(o).i(op::ireturn); };
}
inline auto cmp_d(std::uint8_t o) {
  return [o](Code& c) { c.max(4, 4).dload(0).dload(2).i(o).i(op::ireturn); };
}
inline auto unary(std::uint8_t load, std::uint16_t locals, std::uint8_t o, std::uint8_t ret) {
  return [=](Code& c) { c.max(2, locals).load(load, 0).i(o).i(ret); };
}

const std::string arith = "exception java/lang/ArithmeticException";
const std::string npe = "exception java/lang/NullPointerException";
const std::string aioobe = "exception java/lang/ArrayIndexOutOfBoundsException";

inline std::vector<Vector> vectors() {
  const auto imin = std::numeric_limits<std::int32_t>::min();
  const auto imax = std::numeric_limits<std::int32_t>::max();
  const auto lmin = std::numeric_limits<std::int64_t>::min();
  const auto lmax = std::numeric_limits<std::int64_t>::max();
  return {
      // wraparound
      {"iadd_wraps", "(II)I", binop_i(op::iadd), {I(imax), I(1)}, "value I32 -2147483648"},
      {"isub_wraps", "(II)I", binop_i(op::isub), {I(imin), I(1)}, "value I32 2147483647"},
      {"imul_wraps", "(II)I", binop_i(op::imul), {I(65536), I(65536)}, "value I32 0"},
      {"imul_wraps_odd", "(II)I", binop_i(op::imul), {I(123456789), I(987654321)}, "value I32 -67153019"},
      {"ineg_min", "(I)I", unary(op::iload, 1, op::ineg, op::ireturn), {I(imin)}, "value I32 -2147483648"},
      {"ladd_wraps", "(JJ)J", binop_j(op::ladd), {J(lmax), J(1)}, "value I64 -9223372036854775808"},
      {"lmul_wraps", "(JJ)J", binop_j(op::lmul), {J(4294967296LL), J(4294967296LL)}, "value I64 0"},
      {"lneg_min", "(J)J", unary(op::lload, 2, op::lneg, op::lreturn), {J(lmin)}, "value I64 -9223372036854775808"},
      {"iinc_wraps", "(I)I", [](Code& c) { c.max(1, 1).iinc(0, 1).iload(0).i(op::ireturn); }, {I(imax)},
       "value I32 -2147483648"},
      {"iinc_negative", "(I)I", [](Code& c) { c.max(1, 1).iinc(0, -300).iload(0).i(op::ireturn); }, {I(5)},
       "value I32 -295"},
      {"l2i_truncates", "(J)I", unary(op::lload, 2, op::l2i, op::ireturn), {J(0x1'8000'0001LL)},
       "value I32 -2147483647"},
      {"i2b_sign", "(I)I", unary(op::iload, 1, op::i2b, op::ireturn), {I(0x1FF)}, "value I32 -1"},
      {"i2c_zero_ext", "(I)I", unary(op::iload, 1, op::i2c, op::ireturn), {I(-1)}, "value I32 65535"},
      {"i2s_sign", "(I)I", unary(op::iload, 1, op::i2s, op::ireturn), {I(0x18000)}, "value I32 -32768"},

      // shift masking
      {"ishl_by_32", "(II)I", binop_i(op::ishl), {I(1), I(32)}, "value I32 1"},
      {"ishl_by_33", "(II)I", binop_i(op::ishl), {I(1), I(33)}, "value I32 2"},
      {"ishl_negative_count", "(II)I", binop_i(op::ishl), {I(1), I(-1)}, "value I32 -2147483648"},
      {"ishr_sign", "(II)I", binop_i(op::ishr), {I(-8), I(1)}, "value I32 -4"},
      {"iushr_zero_fill", "(II)I", binop_i(op::iushr), {I(-1), I(28)}, "value I32 15"},
      {"iushr_by_32", "(II)I", binop_i(op::iushr), {I(-1), I(32)}, "value I32 -1"},
      {"lshl_by_64", "(JI)J", shift_j(op::lshl), {J(1), I(64)}, "value I64 1"},
      {"lshl_by_65", "(JI)J", shift_j(op::lshl), {J(1), I(65)}, "value I64 2"},
      {"lshr_sign", "(JI)J", shift_j(op::lshr), {J(-16), I(2)}, "value I64 -4"},
      {"lushr_zero_fill", "(JI)J", shift_j(op::lushr), {J(-1), I(60)}, "value I64 15"},
      {"lushr_by_63", "(JI)J", shift_j(op::lushr), {J(lmin), I(63)}, "value I64 1"},

      // division edge cases
      {"idiv_min_by_minus_one", "(II)I", binop_i(op::idiv), {I(imin), I(-1)}, "value I32 -2147483648"},
      {"irem_min_by_minus_one", "(II)I", binop_i(op::irem), {I(imin), I(-1)}, "value I32 0"},
      {"idiv_truncates_toward_zero", "(II)I", binop_i(op::idiv), {I(-7), I(2)}, "value I32 -3"},
      {"irem_sign_of_dividend", "(II)I", binop_i(op::irem), {I(-7), I(2)}, "value I32 -1"},
      {"irem_positive_dividend", "(II)I", binop_i(op::irem), {I(7), I(-2)}, "value I32 1"},
      {"idiv_by_zero", "(II)I", binop_i(op::idiv), {I(1), I(0)}, arith},
      {"irem_by_zero", "(II)I", binop_i(op::irem), {I(1), I(0)}, arith},
      {"ldiv_min_by_minus_one", "(JJ)J", binop_j(op::ldiv), {J(lmin), J(-1)}, "value I64 -9223372036854775808"},
      {"lrem_min_by_minus_one", "(JJ)J", binop_j(op::lrem), {J(lmin), J(-1)}, "value I64 0"},
      {"ldiv_by_zero", "(JJ)J", binop_j(op::ldiv), {J(5), J(0)}, arith},
      {"lrem_by_zero", "(JJ)J", binop_j(op::lrem), {J(5), J(0)}, arith},
      {"fdiv_by_zero_is_inf", "(FF)I",
       [](Code& c) {
         c.max(2, 2).fload(0).fload(1).i(op::fdiv).i(op::f2i).i(op::ireturn);
       },
       {F(1.0f), F(0.0f)}, "value I32 2147483647"},
      {"ddiv_zero_by_zero_is_nan", "(DD)I",
       [](Code& c) { c.max(4, 4).dload(0).dload(2).i(op::ddiv).i(op::d2i).i(op::ireturn); }, {D(0.0), D(0.0)},
       "value I32 0"},
      {"drem_sign", "(DD)D", [](Code& c) { c.max(4, 4).dload(0).dload(2).i(op::drem).i(op::dreturn); },
       {D(-7.5), D(2.0)}, "value F64 -0x1.8p+0"},

      // NaN and float compares
      {"fcmpl_nan", "(FF)I", cmp_f(op::fcmpl), {F(fnan), F(1.0f)}, "value I32 -1"},
      {"fcmpg_nan", "(FF)I", cmp_f(op::fcmpg), {F(fnan), F(1.0f)}, "value I32 1"},
      {"fcmpl_nan_rhs", "(FF)I", cmp_f(op::fcmpl), {F(1.0f), F(fnan)}, "value I32 -1"},
      {"dcmpl_nan", "(DD)I", cmp_d(op::dcmpl), {D(dnan), D(dnan)}, "value I32 -1"},
      {"dcmpg_nan", "(DD)I", cmp_d(op::dcmpg), {D(dnan), D(0.0)}, "value I32 1"},
      {"dcmpg_zero_signs", "(DD)I", cmp_d(op::dcmpg), {D(-0.0), D(0.0)}, "value I32 0"},
      {"fcmpl_less", "(FF)I", cmp_f(op::fcmpl), {F(-2.0f), F(1.0f)}, "value I32 -1"},
      {"lcmp_order", "(JJ)I", [](Code& c) { c.max(4, 4).lload(0).lload(2).i(op::lcmp).i(op::ireturn); },
       {J(lmin), J(lmax)}, "value I32 -1"},
      {"f2i_nan", "(F)I", unary(op::fload, 1, op::f2i, op::ireturn), {F(fnan)}, "value I32 0"},
      {"f2i_saturates_low", "(F)I", unary(op::fload, 1, op::f2i, op::ireturn), {F(-1e20f)},
       "value I32 -2147483648"},
      {"d2l_saturates_high", "(D)J", unary(op::dload, 2, op::d2l, op::lreturn), {D(1e300)},
       "value I64 9223372036854775807"},
      {"d2i_truncates", "(D)I", unary(op::dload, 2, op::d2i, op::ireturn), {D(-2.9)}, "value I32 -2"},
      {"ifeq_on_nan_compare", "(F)I",
       [](Code& c) {
         c.max(2, 1).fload(0).fload(0).i(op::fcmpl).jump(op::ifeq, "eq").iconst(0).i(op::ireturn);
         c.label("eq").iconst(1).i(op::ireturn);
       },
       {F(fnan)}, "value I32 0"},

      // handler order
      {"first_matching_handler_wins", "(I)I",
       [](Code& c) {
         c.max(2, 1).label("s").iconst(1).iload(0).i(op::idiv).i(op::ireturn).label("e");
         c.label("h1").i(op::pop).iconst(10).i(op::ireturn);
         c.label("h2").i(op::pop).iconst(20).i(op::ireturn);
         c.try_catch("s", "e", "h1", std::string("java/lang/ArithmeticException"));
         c.try_catch("s", "e", "h2", std::string("java/lang/RuntimeException"));
       },
       {I(0)}, "value I32 10"},
      {"broader_handler_first_wins", "(I)I",
       [](Code& c) {
         c.max(2, 1).label("s").iconst(1).iload(0).i(op::idiv).i(op::ireturn).label("e");
         c.label("h1").i(op::pop).iconst(10).i(op::ireturn);
         c.label("h2").i(op::pop).iconst(20).i(op::ireturn);
         c.try_catch("s", "e", "h2", std::string("java/lang/RuntimeException"));
         c.try_catch("s", "e", "h1", std::string("java/lang/ArithmeticException"));
       },
       {I(0)}, "value I32 20"},
      {"non_matching_handler_skipped", "(I)I",
       [](Code& c) {
         c.max(2, 1).label("s").iconst(1).iload(0).i(op::idiv).i(op::ireturn).label("e");
         c.label("h1").i(op::pop).iconst(10).i(op::ireturn);
         c.label("h2").i(op::pop).iconst(20).i(op::ireturn);
         c.try_catch("s", "e", "h1", std::string("java/lang/NullPointerException"));
         c.try_catch("s", "e", "h2", std::nullopt);
       },
       {I(0)}, "value I32 20"},
      {"region_end_is_exclusive", "(I)I",
       [](Code& c) {
         c.max(2, 1).label("s").iconst(1).i(op::pop).label("e").iconst(1).iload(0).i(op::idiv).i(op::ireturn);
         c.label("h").i(op::pop).iconst(10).i(op::ireturn);
         c.try_catch("s", "e", "h", std::string("java/lang/ArithmeticException"));
       },
       {I(0)}, arith},
      {"handler_clears_stack", "(I)I",
       [](Code& c) {
         c.max(4, 1).label("s").iconst(7).iconst(8).iconst(1).iload(0).i(op::idiv).i(op::ireturn).label("e");
         c.label("h").i(op::pop).iconst(3).i(op::ireturn);
         c.try_catch("s", "e", "h", std::string("java/lang/ArithmeticException"));
       },
       {I(0)}, "value I32 3"},
      {"no_exception_no_handler", "(I)I",
       [](Code& c) {
         c.max(2, 1).label("s").iconst(12).iload(0).i(op::idiv).i(op::ireturn).label("e");
         c.label("h").i(op::pop).iconst(-1).i(op::ireturn);
         c.try_catch("s", "e", "h", std::nullopt);
       },
       {I(4)}, "value I32 3"},
      {"athrow_null_is_npe", "()V", [](Code& c) { c.max(1, 0).i(op::aconst_null).i(op::athrow); }, {}, npe},
      {"athrow_user_exception", "()V",
       [](Code& c) {
         c.max(2, 0).type(op::new_, "java/lang/IllegalStateException").i(op::dup);
         c.invokespecial("java/lang/IllegalStateException", "<init>", "()V").i(op::athrow);
       },
       {}, "exception java/lang/IllegalStateException"},

      // arrays and misc
      {"array_index_negative", "(I)I",
       [](Code& c) { c.max(2, 1).iconst(3).newarray(10).iload(0).i(op::iaload).i(op::ireturn); }, {I(-1)}, aioobe},
      {"array_index_at_length", "(I)I",
       [](Code& c) { c.max(2, 1).iconst(3).newarray(10).iload(0).i(op::iaload).i(op::ireturn); }, {I(3)}, aioobe},
      {"negative_array_size", "(I)I",
       [](Code& c) { c.max(1, 1).iload(0).newarray(10).i(op::arraylength).i(op::ireturn); }, {I(-2)},
       "exception java/lang/NegativeArraySizeException"},
      {"bastore_narrows", "()I",
       [](Code& c) {
         c.max(4, 1).iconst(1).newarray(8).astore(0).aload(0).iconst(0).iconst(200).i(op::bastore);
         c.aload(0).iconst(0).i(op::baload).i(op::ireturn);
       },
       {}, "value I32 -56"},
      {"castore_narrows", "()I",
       [](Code& c) {
         c.max(4, 1).iconst(1).newarray(5).astore(0).aload(0).iconst(0).iconst(-1).i(op::castore);
         c.aload(0).iconst(0).i(op::caload).i(op::ireturn);
       },
       {}, "value I32 65535"},
      {"arraylength_null", "()I", [](Code& c) { c.max(1, 0).i(op::aconst_null).i(op::arraylength).i(op::ireturn); },
       {}, npe},
      {"checkcast_fails", "()I",
       [](Code& c) {
         c.max(1, 0).ldc_string("x").type(op::checkcast, "java/lang/Integer").i(op::pop).iconst(0).i(op::ireturn);
       },
       {}, "exception java/lang/ClassCastException"},
      {"checkcast_null_passes", "()I",
       [](Code& c) {
         c.max(1, 0).i(op::aconst_null).type(op::checkcast, "java/lang/String").jump(op::ifnull, "n");
         c.iconst(0).i(op::ireturn).label("n").iconst(1).i(op::ireturn);
       },
       {}, "value I32 1"},
      {"instanceof_interface", "()I",
       [](Code& c) { c.max(1, 0).ldc_string("x").type(op::instanceof, "java/lang/CharSequence").i(op::ireturn); },
       {}, "value I32 1"},
      {"tableswitch_default_below", "(I)I",
       [](Code& c) {
         c.max(1, 1).iload(0).tableswitch(1, {"a", "b"}, "d");
         c.label("a").iconst(10).i(op::ireturn).label("b").iconst(20).i(op::ireturn);
         c.label("d").iconst(-1).i(op::ireturn);
       },
       {I(0)}, "value I32 -1"},
      {"lookupswitch_min_key", "(I)I",
       [imin](Code& c) {
         c.max(1, 1).iload(0).lookupswitch({{imin, "a"}, {7, "b"}}, "d");
         c.label("a").iconst(10).i(op::ireturn).label("b").iconst(20).i(op::ireturn);
         c.label("d").iconst(-1).i(op::ireturn);
       },
       {I(imin)}, "value I32 10"},
      {"dup_x2_long_under_int", "(JI)I",
       [](Code& c) {
         // form 2: value1 int over a long; result int, long, int
         c.max(4, 3).lload(0).iload(2).i(op::dup_x2).i(op::pop).i(op::pop2).i(op::ireturn);
       },
       {J(9), I(4)}, "value I32 4"},
      {"dup2_x1_long", "(IJ)J",
       [](Code& c) { c.max(5, 3).iload(0).lload(1).i(op::dup2_x1).i(op::pop2).i(op::pop).i(op::lreturn); },
       {I(1), J(-5)}, "value I64 -5"},
      {"swap", "(II)I", [](Code& c) { c.max(2, 2).iload(0).iload(1).i(op::swap).i(op::isub).i(op::ireturn); },
       {I(10), I(3)}, "value I32 -7"},
      {"if_acmp_same_string", "()I",
       [](Code& c) {
         c.max(2, 0).ldc_string("s").ldc_string("s").jump(op::if_acmpeq, "y").iconst(0).i(op::ireturn);
         c.label("y").iconst(1).i(op::ireturn);
       },
       {}, "value I32 1"},
      {"string_length_utf16", "()I",
       [](Code& c) {
         c.max(1, 0).ldc_string("h\xc3\xa9llo").invokevirtual("java/lang/String", "length", "()I").i(op::ireturn);
       },
       {}, "value I32 5"},
      {"loop_sum", "(I)I",
       [](Code& c) {
         c.max(2, 3).iconst(0).istore(1).iconst(0).istore(2).label("top").iload(2).iload(0);
         c.jump(op::if_icmpge, "done").iload(1).iload(2).i(op::iadd).istore(1).iinc(2, 1).jump(op::goto_, "top");
         c.label("done").iload(1).i(op::ireturn);
       },
       {I(100)}, "value I32 4950"},
      {"ldc_float_bits", "()F", [](Code& c) { c.max(1, 0).fconst(0.1f).i(op::freturn); }, {}, "value F32 0x1.99999ap-4"},
      {"i2f_rounds", "(I)F", unary(op::iload, 1, op::i2f, op::freturn), {I(16777217)}, "value F32 0x1p+24"},
      {"void_return", "()V", [](Code& c) { c.max(0, 0).i(op::return_); }, {}, "void"},
  };
}

/// Runs every method with code in `fx` on default arguments; each step is
/// checked against its declared stack effect.
struct FixtureRun {
  std::uint64_t steps = 0;
  std::uint64_t checked_steps = 0;
  std::vector<std::string> problems;
};

inline FixtureRun run_fixture(const corpus::Fixture& fx) {
  FixtureRun run;
  interp::ClassTable classes;
  const auto model = classfile::parse_class(fx.bytes);
  classes.load(model);
  for (const auto& dep : corpus::all()) {
    if (dep.name != fx.name) {
      auto dm = classfile::parse_class(dep.bytes);
      if (!classes.contains(dm.class_name)) classes.load(std::move(dm));
    }
  }
  interp::Heap heap;
  interp::Interpreter in(classes, heap);
  for (const auto& m : model.methods) {
    if (!m.code) continue;
    std::vector<Value> args;
    if (!m.is_static()) args.push_back(Value::ref(heap.allocate({model.class_name, {}, {}, {}})));
    for (const auto& p : m.signature().param_types) {
      args.push_back(p.descriptor() == "I" ? Value::i32(2) : interp::default_value(p.descriptor()));
    }
    try {
      in.invoke(model.class_name, m.name, m.descriptor, args);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::oracle_unsupported && e.code() != ErrorCode::linkage_error) {
        run.problems.push_back(fx.name + "." + m.name + ": " + e.what());
      }
    }
  }
  run.steps = in.steps();
  run.checked_steps = in.checked_steps();
  return run;
}

}  // namespace interp_vectors
