#pragma once

// Fixture classes shared by the test suites and the acceptance binary. Each
// fixture records which methods the pipeline is expected to translate and
// which selected methods it must skip.

#include <string>
#include <vector>

#include "class_asm.hpp"

namespace corpus {

using asmtest::Annotation;
using asmtest::Bytes;
using asmtest::ClassFile;
using asmtest::Code;
namespace op = asmtest::op;
namespace acc = asmtest::acc;

struct Fixture {
  std::string name;  // internal class name
  Bytes bytes;
  std::vector<std::string> translated;  // name + descriptor
  std::vector<std::string> skipped;
};

inline const Annotation obfuscate{"LObfuscate;", std::nullopt, false};
inline const Annotation obfuscate_visible{"Lcom/acme/Obfuscate;", 3, true};

inline constexpr const char* library = "Sim";

/// Config text matching the corpus expectations.
inline std::string config_text() {
  return "# corpus configuration\n"
         "annotation=Obfuscate\n"
         "library=Sim\n"
         "method=demo/Calculator#sub(II)I\n";
}

inline Fixture calculator() {
  ClassFile cf("Calculator");
  cf.default_init();
  auto sum = cf.code();
  sum.max(2, 4).iload(1).iload(2).i(op::iadd).istore(3).iload(3).i(op::ireturn);
  cf.method(acc::public_, "sum", "(II)I", sum, {obfuscate});
  auto sub = cf.code();
  sub.max(2, 3).iload(1).iload(2).i(op::isub).i(op::ireturn);
  cf.method(acc::public_, "sub", "(II)I", sub);
  return {"Calculator", cf.bytes(), {"sum(II)I"}, {}};
}

/// Selected through the explicit method list; `add` is already native.
inline Fixture demo_calculator() {
  ClassFile cf("demo/Calculator");
  cf.default_init();
  cf.method(acc::public_ | acc::native, "add", "(II)I", std::nullopt);
  auto sub = cf.code();
  sub.max(2, 3).iload(1).iload(2).i(op::isub).i(op::ireturn);
  cf.method(acc::public_, "sub", "(II)I", sub);
  return {"demo/Calculator", cf.bytes(), {"sub(II)I"}, {}};
}

inline Fixture virtual_call() {
  ClassFile cf("B");
  cf.default_init();
  auto sum = cf.code();
  sum.max(2, 3).iload(1).iload(2).i(op::iadd).i(op::ireturn);
  cf.method(acc::public_, "sum", "(II)I", sum);
  auto call = cf.code();
  call.max(3, 2)
      .aload(0)
      .iconst(1)
      .iconst(2)
      .invokevirtual("B", "sum", "(II)I")
      .istore(1)
      .iload(1)
      .i(op::ireturn);
  cf.method(acc::public_, "call", "()I", call, {obfuscate});
  return {"B", cf.bytes(), {"call()I"}, {}};
}

inline Fixture my_exception() {
  ClassFile cf("MyException", "java/lang/Exception");
  cf.default_init();
  return {"MyException", cf.bytes(), {}, {}};
}

inline Fixture typed_handler() {
  ClassFile cf("MyClass");
  cf.default_init();
  auto thrower = cf.code();
  thrower.max(2, 0)
      .type(op::new_, "MyException")
      .i(op::dup)
      .invokespecial("MyException", "<init>", "()V")
      .i(op::athrow);
  cf.method(acc::public_ | acc::static_, "methodThrowingException", "()V", thrower);
  auto body = cf.code();
  body.max(2, 1)
      .label("L0")
      .invokestatic("MyClass", "methodThrowingException", "()V")
      .label("L1")
      .iconst(0)
      .i(op::ireturn)
      .label("L2")
      .iconst(1)
      .i(op::ireturn)
      .try_catch("L0", "L1", "L2", "MyException");
  cf.method(acc::public_, "compute", "()I", body, {obfuscate});
  return {"MyClass", cf.bytes(), {"compute()I"}, {}};
}

inline Fixture division() {
  ClassFile cf("Division");
  cf.default_init();
  auto div = cf.code();
  div.max(2, 3)
      .label("L0")
      .iload(1)
      .iload(2)
      .i(op::idiv)
      .label("L1")
      .i(op::ireturn)
      .label("L2")
      .iconst(0)
      .i(op::ireturn)
      .try_catch("L0", "L1", "L2", "java/lang/ArithmeticException");
  cf.method(acc::public_, "div", "(II)I", div, {obfuscate});
  return {"Division", cf.bytes(), {"div(II)I"}, {}};
}

/// StackMapTable body from (offset, stack item) frames with unchanged locals.
/// A stack item is 0 for none, 1 for Integer, or a class pool index | 0x10000.
inline Bytes stack_map(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& frames) {
  Bytes b;
  asmtest::put_u2(b, static_cast<std::uint32_t>(frames.size()));
  std::int64_t prev = -1;
  for (const auto& [offset, item] : frames) {
    const auto delta = static_cast<std::uint32_t>(offset - prev - 1);
    prev = offset;
    if (item == 0) {
      asmtest::put_u1(b, delta);
    } else {
      asmtest::put_u1(b, 64 + delta);
      if (item == 1) {
        asmtest::put_u1(b, 1);
      } else {
        asmtest::put_u1(b, 7);
        asmtest::put_u2(b, item & 0xFFFF);
      }
    }
  }
  return b;
}

/// Existing static initializer with a switch, a handler, line numbers and a
/// stack map, all of which shift when the loader is prepended.
inline Fixture registry() {
  ClassFile cf("Registry");
  cf.field(acc::static_, "counter", "I");
  auto clinit = cf.code();
  clinit.max(1, 0)
      .iconst(2)
      .tableswitch(0, {"A", "B"}, "D")
      .label("A")
      .iconst(10)
      .jump(op::goto_, "S")
      .label("B")
      .iconst(20)
      .jump(op::goto_, "S")
      .label("D")
      .iconst(30)
      .label("S")
      .field(op::putstatic, "Registry", "counter", "I")
      .i(op::return_)
      .label("H")
      .i(op::pop)
      .i(op::return_)
      .try_catch("S", "H", "H", "java/lang/Throwable");
  const auto throwable = cf.pool.cls("java/lang/Throwable");
  clinit.attribute("StackMapTable", stack_map({{clinit.offset_of("A"), 0},
                                               {clinit.offset_of("B"), 0},
                                               {clinit.offset_of("D"), 0},
                                               {clinit.offset_of("S"), 1},
                                               {clinit.offset_of("H"), 0x10000u | throwable}}));
  Bytes lines;
  asmtest::put_u2(lines, 2);
  asmtest::put_u2(lines, 0);
  asmtest::put_u2(lines, 1);
  asmtest::put_u2(lines, clinit.offset_of("S"));
  asmtest::put_u2(lines, 2);
  clinit.attribute("LineNumberTable", lines);
  cf.method(acc::static_, "<clinit>", "()V", clinit);
  auto next = cf.code();
  next.max(2, 0)
      .field(op::getstatic, "Registry", "counter", "I")
      .iconst(1)
      .i(op::iadd)
      .i(op::dup)
      .field(op::putstatic, "Registry", "counter", "I")
      .i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "next", "()I", next, {obfuscate_visible});
  return {"Registry", cf.bytes(), {"next()I"}, {}};
}

inline Fixture untouched() {
  ClassFile cf("Untouched");
  cf.field(acc::private_, "x", "I");
  cf.default_init();
  auto get = cf.code();
  get.max(1, 1).aload(0).field(op::getfield, "Untouched", "x", "I").i(op::ireturn);
  cf.method(acc::public_, "get", "()I", get, {Annotation{"LOther;", std::nullopt, true}});
  cf.source_file("Untouched.java");
  return {"Untouched", cf.bytes(), {}, {}};
}

inline Fixture overloads() {
  ClassFile cf("Overloads");
  cf.default_init();
  auto fi = cf.code();
  fi.max(1, 1).iload(0).i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "f", "(I)I", fi, {obfuscate});
  auto fj = cf.code();
  fj.max(4, 2).lload(0).lconst(1).i(op::ladd).i(op::lreturn);
  cf.method(acc::public_ | acc::static_, "f", "(J)J", fj, {obfuscate});
  return {"Overloads", cf.bytes(), {"f(I)I", "f(J)J"}, {}};
}

inline Fixture long_math() {
  ClassFile cf("LongMath");
  cf.default_init();
  auto mix = cf.code();
  mix.max(6, 4)
      .lload(0)
      .lload(2)
      .i(op::lmul)
      .lload(0)
      .iconst(3)
      .i(op::lshl)
      .i(op::lxor)
      .lload(2)
      .i(op::lneg)
      .i(op::ladd)
      .i(op::lreturn);
  cf.method(acc::public_ | acc::static_, "mix", "(JJ)J", mix, {obfuscate});
  auto area = cf.code();
  area.max(4, 2).dload(0).dload(0).i(op::dmul).dconst(3.14159).i(op::dmul).i(op::dreturn);
  cf.method(acc::public_ | acc::static_, "area", "(D)D", area, {obfuscate});
  auto cmp = cf.code();
  cmp.max(2, 2).fload(0).fload(1).i(op::fcmpl).i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "cmp", "(FF)I", cmp, {obfuscate});
  auto big = cf.code();
  big.max(4, 0).lconst(INT64_MIN).lconst(-1).i(op::ldiv).i(op::lreturn);
  cf.method(acc::public_ | acc::static_, "big", "()J", big, {obfuscate});
  return {"LongMath", cf.bytes(), {"mix(JJ)J", "area(D)D", "cmp(FF)I", "big()J"}, {}};
}

inline Fixture arrays() {
  ClassFile cf("Arrays");
  cf.default_init();
  auto sum = cf.code();
  sum.max(3, 3)
      .iconst(0)
      .istore(1)
      .iconst(0)
      .istore(2)
      .label("loop")
      .iload(2)
      .aload(0)
      .i(op::arraylength)
      .jump(op::if_icmpge, "end")
      .iload(1)
      .aload(0)
      .iload(2)
      .i(op::iaload)
      .i(op::iadd)
      .istore(1)
      .iinc(2, 1)
      .jump(op::goto_, "loop")
      .label("end")
      .iload(1)
      .i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "sum", "([I)I", sum, {obfuscate});
  auto grid = cf.code();
  grid.max(2, 2).iload(0).iload(1).multianewarray("[[I", 2).i(op::areturn);
  cf.method(acc::public_ | acc::static_, "grid", "(II)[[I", grid, {obfuscate});
  auto fill = cf.code();
  fill.max(3, 2)
      .iload(0)
      .newarray(10)
      .astore(1)
      .aload(1)
      .iconst(0)
      .iconst(7)
      .i(op::iastore)
      .aload(1)
      .iconst(0)
      .i(op::iaload)
      .i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "fill", "(I)I", fill, {obfuscate});
  auto names = cf.code();
  names.max(4, 1)
      .iconst(2)
      .type(op::anewarray, "java/lang/String")
      .astore(0)
      .aload(0)
      .iconst(1)
      .ldc_string("b")
      .i(op::aastore)
      .aload(0)
      .iconst(1)
      .i(op::aaload)
      .i(op::areturn);
  cf.method(acc::public_ | acc::static_, "names", "()Ljava/lang/String;", names, {obfuscate});
  return {"Arrays", cf.bytes(), {"sum([I)I", "grid(II)[[I", "fill(I)I", "names()Ljava/lang/String;"}, {}};
}

inline Fixture fields() {
  ClassFile cf("Fields");
  cf.field(acc::private_, "count", "I");
  cf.field(acc::static_, "label", "Ljava/lang/String;");
  cf.field(acc::private_, "flag", "Z");
  cf.default_init();
  auto bump = cf.code();
  bump.max(3, 1)
      .aload(0)
      .i(op::dup)
      .field(op::getfield, "Fields", "count", "I")
      .iconst(1)
      .i(op::iadd)
      .field(op::putfield, "Fields", "count", "I")
      .field(op::getstatic, "Fields", "label", "Ljava/lang/String;")
      .i(op::pop)
      .aload(0)
      .iconst(1)
      .field(op::putfield, "Fields", "flag", "Z")
      .i(op::return_);
  cf.method(acc::public_, "bump", "()V", bump, {obfuscate});
  auto set = cf.code();
  set.max(1, 1).aload(0).field(op::putstatic, "Fields", "label", "Ljava/lang/String;").i(op::return_);
  cf.method(acc::public_ | acc::static_, "setLabel", "(Ljava/lang/String;)V", set, {obfuscate});
  return {"Fields", cf.bytes(), {"bump()V", "setLabel(Ljava/lang/String;)V"}, {}};
}

inline Fixture strings() {
  ClassFile cf("Strings");
  cf.default_init();
  auto greet = cf.code();
  greet.max(1, 0).ldc_string("h\xc3\xa9llo \"q\"?").i(op::areturn);
  cf.method(acc::public_ | acc::static_, "greet", "()Ljava/lang/String;", greet, {obfuscate});
  auto len = cf.code();
  len.max(1, 0).ldc_string("abc").invokevirtual("java/lang/String", "length", "()I").i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "len", "()I", len, {obfuscate});
  auto cls = cf.code();
  cls.max(1, 0).ldc_class("java/lang/String").i(op::areturn);
  cf.method(acc::public_ | acc::static_, "type", "()Ljava/lang/Class;", cls, {obfuscate});
  return {"Strings", cf.bytes(), {"greet()Ljava/lang/String;", "len()I", "type()Ljava/lang/Class;"}, {}};
}

inline Fixture monitor() {
  ClassFile cf("Monitor");
  cf.default_init();
  auto lock = cf.code();
  lock.max(2, 2)
      .aload(0)
      .i(op::dup)
      .astore(1)
      .i(op::monitorenter)
      .aload(1)
      .i(op::monitorexit)
      .i(op::return_);
  cf.method(acc::public_, "lock", "()V", lock, {obfuscate});
  return {"Monitor", cf.bytes(), {}, {"lock()V"}};
}

inline Fixture abstract_annotated() {
  ClassFile cf("Shape3", "java/lang/Object");
  cf.flags(acc::public_ | acc::super_ | acc::abstract_);
  cf.default_init();
  cf.method(acc::public_ | acc::abstract_, "area", "()I", std::nullopt, {obfuscate});
  return {"Shape3", cf.bytes(), {}, {"area()I"}};
}

inline Fixture already_native() {
  ClassFile cf("Native");
  cf.default_init();
  cf.method(acc::public_ | acc::native, "g", "()I", std::nullopt, {obfuscate});
  return {"Native", cf.bytes(), {}, {"g()I"}};
}

inline Fixture switches() {
  ClassFile cf("Switches");
  cf.default_init();
  auto table = cf.code();
  table.max(1, 1)
      .iload(0)
      .tableswitch(-1, {"m", "z", "o"}, "d")
      .label("m")
      .iconst(10)
      .i(op::ireturn)
      .label("z")
      .iconst(20)
      .i(op::ireturn)
      .label("o")
      .iconst(30)
      .i(op::ireturn)
      .label("d")
      .iconst(-1)
      .i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "table", "(I)I", table, {obfuscate});
  auto lookup = cf.code();
  lookup.max(1, 1)
      .iload(0)
      .lookupswitch({{INT32_MIN, "a"}, {5, "b"}, {9, "c"}}, "d")
      .label("a")
      .iconst(1)
      .i(op::ireturn)
      .label("b")
      .iconst(2)
      .i(op::ireturn)
      .label("c")
      .iconst(3)
      .i(op::ireturn)
      .label("d")
      .iconst(0)
      .i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "lookup", "(I)I", lookup, {obfuscate});
  return {"Switches", cf.bytes(), {"table(I)I", "lookup(I)I"}, {}};
}

inline Fixture thrower() {
  ClassFile cf("Thrower");
  cf.default_init();
  auto guard = cf.code();
  guard.max(2, 1)
      .label("L0")
      .iload(0)
      .jump(op::ifne, "ok")
      .type(op::new_, "java/lang/IllegalStateException")
      .i(op::dup)
      .invokespecial("java/lang/IllegalStateException", "<init>", "()V")
      .i(op::athrow)
      .label("ok")
      .iload(0)
      .label("L1")
      .i(op::ireturn)
      .label("H")
      .i(op::pop)
      .iconst(-1)
      .i(op::ireturn)
      .try_catch("L0", "L1", "H", "java/lang/RuntimeException");
  cf.method(acc::public_ | acc::static_, "guard", "(I)I", guard, {obfuscate});
  auto fin = cf.code();
  fin.max(2, 3)
      .label("L0")
      .iconst(10)
      .iload(0)
      .i(op::idiv)
      .istore(1)
      .label("L1")
      .iload(1)
      .i(op::ireturn)
      .label("H")
      .astore(2)
      .aload(2)
      .i(op::athrow)
      .try_catch("L0", "L1", "H", std::nullopt);
  cf.method(acc::public_ | acc::static_, "fin", "(I)I", fin, {obfuscate});
  return {"Thrower", cf.bytes(), {"guard(I)I", "fin(I)I"}, {}};
}

/// More than 255 pool entries: string constants and the injected loader need
/// LDC_W, and locals above 255 need WIDE.
inline Fixture wide_locals() {
  ClassFile cf("WideLocals");
  cf.pool.pad(300);
  cf.default_init();
  auto s = cf.code();
  s.max(1, 0).ldc_w_string("wide").i(op::areturn);
  cf.method(acc::public_ | acc::static_, "s", "()Ljava/lang/String;", s, {obfuscate});
  auto w = cf.code();
  w.max(1, 301).iload(0).istore(300).iinc(300, 1000).iload(300).i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "w", "(I)I", w, {obfuscate});
  return {"WideLocals", cf.bytes(), {"s()Ljava/lang/String;", "w(I)I"}, {}};
}

inline Fixture unicode_names() {
  ClassFile cf("pkg/\xc3\x9cn$Inner_x");
  cf.default_init();
  auto m = cf.code();
  m.max(1, 0).iconst(5).i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "caf\xc3\xa9_1", "()I", m, {obfuscate});
  return {"pkg/\xc3\x9cn$Inner_x", cf.bytes(), {"caf\xc3\xa9_1()I"}, {}};
}

inline Fixture shape_interface() {
  ClassFile cf("Shape", "java/lang/Object");
  cf.flags(acc::public_ | acc::interface_ | acc::abstract_);
  cf.method(acc::public_ | acc::abstract_, "area", "()I", std::nullopt);
  return {"Shape", cf.bytes(), {}, {}};
}

inline Fixture interface_user() {
  ClassFile cf("Measure");
  cf.default_init();
  auto m = cf.code();
  m.max(1, 1)
      .aload(0)
      .invoke(op::invokeinterface, "Shape", "area", "()I")
      .i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "measure", "(LShape;)I", m, {obfuscate});
  return {"Measure", cf.bytes(), {"measure(LShape;)I"}, {}};
}

inline Fixture empty_a() {
  ClassFile cf("A");
  cf.default_init();
  return {"A", cf.bytes(), {}, {}};
}

inline Fixture ctor() {
  ClassFile cf("Ctor");
  cf.default_init();
  auto make = cf.code();
  make.max(3, 0)
      .type(op::new_, "java/lang/StringBuilder")
      .i(op::dup)
      .ldc_string("x")
      .invokespecial("java/lang/StringBuilder", "<init>", "(Ljava/lang/String;)V")
      .i(op::areturn);
  cf.method(acc::public_ | acc::static_, "make", "()Ljava/lang/Object;", make, {obfuscate});
  auto cast = cf.code();
  cast.max(1, 1)
      .aload(0)
      .type(op::checkcast, "java/lang/String")
      .type(op::instanceof, "java/lang/CharSequence")
      .i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "cast", "(Ljava/lang/Object;)Z", cast, {obfuscate});
  return {"Ctor", cf.bytes(), {"make()Ljava/lang/Object;", "cast(Ljava/lang/Object;)Z"}, {}};
}

inline Fixture conversions() {
  ClassFile cf("Conversions");
  cf.default_init();
  auto c = cf.code();
  c.max(4, 2)
      .dload(0)
      .i(op::d2i)
      .i(op::i2b)
      .dload(0)
      .i(op::d2f)
      .i(op::f2l)
      .i(op::l2i)
      .i(op::iadd)
      .i(op::i2c)
      .i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "conv", "(D)I", c, {obfuscate});
  auto s = cf.code();
  s.max(2, 1).iload(0).i(op::i2s).i(op::i2f).fconst(0.5f).i(op::frem).i(op::f2i).i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "shorty", "(I)I", s, {obfuscate});
  return {"Conversions", cf.bytes(), {"conv(D)I", "shorty(I)I"}, {}};
}

inline Fixture version50() {
  ClassFile cf("Old", "java/lang/Object", 50);
  cf.default_init();
  auto m = cf.code();
  m.max(2, 2).iload(0).iload(1).i(op::imul).i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "mul", "(II)I", m, {obfuscate});
  return {"Old", cf.bytes(), {"mul(II)I"}, {}};
}

inline Fixture version53() {
  ClassFile cf("Newer", "java/lang/Object", 53);
  cf.default_init();
  auto m = cf.code();
  m.max(2, 2).iload(0).iload(1).i(op::imul).i(op::ireturn);
  cf.method(acc::public_ | acc::static_, "mul", "(II)I", m, {obfuscate});
  return {"Newer", cf.bytes(), {}, {"mul(II)I"}};
}

/// Annotated constructor and synchronized method: both refused.
inline Fixture refused() {
  ClassFile cf("Refused");
  auto init = cf.code();
  init.max(1, 1).aload(0).invokespecial("java/lang/Object", "<init>", "()V").i(op::return_);
  cf.method(acc::public_, "<init>", "()V", init, {obfuscate});
  auto sync = cf.code();
  sync.max(1, 1).iconst(1).i(op::ireturn);
  cf.method(acc::public_ | acc::synchronized_, "locked", "()I", sync, {obfuscate});
  return {"Refused", cf.bytes(), {}, {"<init>()V", "locked()I"}};
}

inline std::vector<Fixture> all() {
  return {calculator(), demo_calculator(), virtual_call(),          my_exception(),   typed_handler(),
          division(),   registry(),        untouched(),       overloads(),      long_math(),
          arrays(),          fields(),          strings(),         monitor(),        abstract_annotated(),
          already_native(),  switches(),        thrower(),         wide_locals(),    unicode_names(),
          shape_interface(), interface_user(),  empty_a(),         ctor(),           conversions(),
          version50(),       version53(),       refused()};
}

}  // namespace corpus
