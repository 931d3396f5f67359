#include <gtest/gtest.h>

#include <random>

#include "class_asm.hpp"
#include "corpus.hpp"
#include "jnify/bytecode/method_checker.hpp"
#include "jnify/classfile/class_model.hpp"

namespace {

using namespace jnify;
using namespace jnify::bytecode;
using asmtest::ClassFile;
namespace op = asmtest::op;
namespace acc = asmtest::acc;

classfile::ClassModel one_method(const std::function<void(asmtest::Code&)>& body, const std::string& desc = "()V",
                                 std::uint16_t flags = acc::public_ | acc::static_) {
  ClassFile cf("T");
  auto c = cf.code();
  body(c);
  cf.method(flags, "m", desc, c);
  return classfile::parse_class(cf.bytes());
}

std::vector<Instr> real(const classfile::MethodModel& m) {
  std::vector<Instr> out;
  for (const auto& in : m.instructions) {
    if (!in.is_label()) out.push_back(in);
  }
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::bad_config;
}

TEST(Decoder, FoldsShortForms) {
  const auto model = one_method([](auto& c) {
    c.max(3, 3).iconst(2).istore(1).iload(1).i(op::pop).lconst(1).i(op::pop2).i(op::return_);
  });
  const auto ins = real(model.methods.at(0));
  ASSERT_EQ(ins.size(), 7u);
  EXPECT_EQ(ins[1].opcode, Opcode::istore);
  EXPECT_EQ(ins[1].as<LocalOperand>().index, 1);
  EXPECT_EQ(ins[2].opcode, Opcode::iload);
  EXPECT_EQ(ins[2].offset, 2u);
}

TEST(Decoder, LdcWidthsCanonicalize) {
  const auto model = classfile::parse_class(corpus::wide_locals().bytes);
  bool saw_string = false, saw_wide_local = false;
  for (const auto& m : model.methods) {
    for (const auto& in : real(m)) {
      if (in.opcode == Opcode::ldc && in.as<ConstOperand>().kind == ConstOperand::Kind::string) saw_string = true;
      if ((in.opcode == Opcode::istore || in.opcode == Opcode::iload) && in.as<LocalOperand>().index == 300) {
        saw_wide_local = true;
      }
      EXPECT_NE(in.opcode, Opcode::ldc_w);
      EXPECT_NE(in.opcode, Opcode::wide);
    }
  }
  EXPECT_TRUE(saw_string);
  EXPECT_TRUE(saw_wide_local);
}

TEST(Decoder, LabelsAtTargetsAndRegionBounds) {
  const auto model = classfile::parse_class(corpus::typed_handler().bytes);
  for (const auto& m : model.methods) {
    std::set<std::uint32_t> labels;
    for (const auto& in : m.instructions) {
      if (in.is_label()) labels.insert(in.as<Label>().offset);
    }
    for (const auto& r : m.try_regions) {
      EXPECT_TRUE(labels.count(r.start.offset));
      EXPECT_TRUE(labels.count(r.end.offset));
      EXPECT_TRUE(labels.count(r.handler.offset));
    }
    for (const auto& in : m.instructions) {
      if (in.opcode == Opcode::goto_ || (in.opcode >= Opcode::ifeq && in.opcode <= Opcode::if_acmpne)) {
        EXPECT_TRUE(labels.count(in.as<JumpOperand>().target.offset));
      }
    }
  }
}

TEST(Decoder, SwitchesKeepKeysAndTargets) {
  const auto model = classfile::parse_class(corpus::switches().bytes);
  bool table = false, lookup = false;
  for (const auto& m : model.methods) {
    for (const auto& in : real(m)) {
      if (in.opcode == Opcode::tableswitch) {
        table = true;
        const auto& sw = in.as<SwitchOperand>();
        EXPECT_EQ(static_cast<std::int64_t>(sw.cases.size()), std::int64_t{sw.high} - sw.low + 1);
      }
      if (in.opcode == Opcode::lookupswitch) {
        lookup = true;
        const auto& sw = in.as<SwitchOperand>();
        EXPECT_TRUE(std::is_sorted(sw.cases.begin(), sw.cases.end(),
                                   [](auto& a, auto& b) { return a.first < b.first; }));
        EXPECT_EQ(sw.cases.front().first, std::numeric_limits<std::int32_t>::min());
      }
    }
  }
  EXPECT_TRUE(table);
  EXPECT_TRUE(lookup);
}

TEST(Decoder, UnknownOpcode) {
  ClassFile cf("T");
  auto c = cf.code();
  c.max(0, 0).raw(0xCB).i(op::return_);
  cf.method(acc::static_, "m", "()V", c);
  EXPECT_EQ(code_of([&] { (void)classfile::parse_class(cf.bytes()); }), ErrorCode::unknown_opcode);
}

// Independent oracle for the shuffle family: the JVM defines these on
// 32-bit words; wide values occupy two words that must not be split.
struct WordResult {
  bool valid = true;
  std::vector<int> words;  // value ids, one entry per word
};

WordResult word_shuffle(Opcode o, const std::vector<SlotKind>& kinds) {
  std::vector<int> w;
  for (int id = 0; id < static_cast<int>(kinds.size()); ++id) {
    w.push_back(id);
    if (kinds[static_cast<std::size_t>(id)] == SlotKind::long_ || kinds[static_cast<std::size_t>(id)] == SlotKind::double_) {
      w.push_back(id);
    }
  }
  std::size_t take = 0;
  std::vector<std::size_t> order;  // from the taken words, 0 = deepest
  switch (o) {
    case Opcode::pop: take = 1; order = {}; break;
    case Opcode::pop2: take = 2; order = {}; break;
    case Opcode::dup: take = 1; order = {0, 0}; break;
    case Opcode::dup_x1: take = 2; order = {1, 0, 1}; break;
    case Opcode::dup_x2: take = 3; order = {2, 0, 1, 2}; break;
    case Opcode::dup2: take = 2; order = {0, 1, 0, 1}; break;
    case Opcode::dup2_x1: take = 3; order = {1, 2, 0, 1, 2}; break;
    case Opcode::dup2_x2: take = 4; order = {2, 3, 0, 1, 2, 3}; break;
    default: take = 2; order = {1, 0}; break;  // swap
  }
  WordResult r;
  if (w.size() < take) return {false, {}};
  const auto cut = w.size() - take;
  if (cut > 0 && w[cut - 1] == w[cut]) return {false, {}};
  std::vector<int> taken(w.begin() + static_cast<std::ptrdiff_t>(cut), w.end());
  r.words.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(cut));
  for (auto k : order) r.words.push_back(taken[k]);
  // Each value must come out whole: both of its words adjacent and in order.
  for (std::size_t i = cut; i < r.words.size(); ++i) {
    const int id = r.words[i];
    const bool wide = kinds[static_cast<std::size_t>(id)] == SlotKind::long_ ||
                      kinds[static_cast<std::size_t>(id)] == SlotKind::double_;
    if (wide) {
      if (i + 1 >= r.words.size() || r.words[i + 1] != id) return {false, {}};
      ++i;
    }
  }
  // Single-word forms must not touch a wide value at all.
  if ((o == Opcode::pop || o == Opcode::dup || o == Opcode::dup_x1 || o == Opcode::swap || o == Opcode::dup_x2) &&
      (kinds.back() == SlotKind::long_ || kinds.back() == SlotKind::double_)) {
    return {false, {}};
  }
  return r;
}

TEST(StackEffect, ShufflesAgreeWithWordOracle) {
  std::mt19937 rng(3);
  const SlotKind pool[] = {SlotKind::int_, SlotKind::long_, SlotKind::float_, SlotKind::double_, SlotKind::ref};
  std::uniform_int_distribution<int> pick(0, 4), depth(0, 5);
  const Opcode ops[] = {Opcode::pop,  Opcode::pop2,    Opcode::dup,     Opcode::dup_x1, Opcode::dup_x2,
                        Opcode::dup2, Opcode::dup2_x1, Opcode::dup2_x2, Opcode::swap};
  int agreed = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<SlotKind> kinds;
    for (int k = depth(rng); k > 0; --k) kinds.push_back(pool[pick(rng)]);
    const auto o = ops[trial % 9];
    const auto oracle = word_shuffle(o, kinds);
    try {
      const auto sh = shuffle_for(o, kinds);
      ASSERT_TRUE(oracle.valid) << mnemonic(o);
      std::vector<int> values;
      for (std::size_t i = 0; i + sh.pop_count < kinds.size(); ++i) values.push_back(static_cast<int>(i));
      const auto base = kinds.size() - sh.pop_count;
      for (auto k : sh.push_order) values.push_back(static_cast<int>(base + k));
      std::vector<int> words;
      for (int id : values) {
        words.push_back(id);
        if (kinds[static_cast<std::size_t>(id)] == SlotKind::long_ || kinds[static_cast<std::size_t>(id)] == SlotKind::double_) {
          words.push_back(id);
        }
      }
      ASSERT_EQ(words, oracle.words) << mnemonic(o);
      ++agreed;
    } catch (const Error& e) {
      ASSERT_FALSE(oracle.valid) << mnemonic(o) << ": " << e.what();
    }
  }
  EXPECT_GT(agreed, 500);
}

TEST(StackEffect, InvokeCountsReceiverAndWideArgs) {
  const auto model = classfile::parse_class(corpus::virtual_call().bytes);
  bool found = false;
  for (const auto& m : model.methods) {
    for (const auto& in : real(m)) {
      if (in.opcode != Opcode::invokevirtual) continue;
      found = true;
      const auto e = stack_effect(in);
      const auto sig = classfile::parse_descriptor(in.as<MemberOperand>().descriptor);
      EXPECT_EQ(e.pops.size(), sig.param_types.size() + 1);
      EXPECT_EQ(e.pops.front(), SlotKind::ref);
    }
  }
  EXPECT_TRUE(found);
}

TEST(StackEffect, SelectedOpcodes) {
  using K = SlotKind;
  auto fx = [](Opcode o) { return stack_effect(Instr{o, NoOperand{}, 0}); };
  EXPECT_EQ(fx(Opcode::lcmp), (StackEffect{{K::long_, K::long_}, {K::int_}}));
  EXPECT_EQ(fx(Opcode::lshl), (StackEffect{{K::long_, K::int_}, {K::long_}}));
  EXPECT_EQ(fx(Opcode::dastore), (StackEffect{{K::ref, K::int_, K::double_}, {}}));
  EXPECT_EQ(fx(Opcode::d2f), (StackEffect{{K::double_}, {K::float_}}));
  EXPECT_EQ(fx(Opcode::arraylength), (StackEffect{{K::ref}, {K::int_}}));
  EXPECT_EQ(fx(Opcode::athrow), (StackEffect{{K::ref}, {}}));
}

TEST(Checker, DepthsOfCalculatorSum) {
  const auto model = classfile::parse_class(corpus::calculator().bytes);
  const auto& sum = *model.find_method("sum", "(II)I");
  const auto map = check_method(sum);
  EXPECT_EQ(map.max_slots, 2u);
  std::vector<std::size_t> depths;
  for (std::size_t i = 0; i < sum.instructions.size(); ++i) {
    if (!sum.instructions[i].is_label() && map.reachable(i)) depths.push_back(map.before[i]->size());
  }
  EXPECT_EQ(depths, (std::vector<std::size_t>{0, 1, 2, 1, 0, 1}));
}

TEST(Checker, HandlerEntryHasOneReference) {
  const auto model = classfile::parse_class(corpus::typed_handler().bytes);
  for (const auto& m : model.methods) {
    if (!m.code || m.try_regions.empty()) continue;
    const auto map = check_method(m);
    for (const auto& r : m.try_regions) {
      ASSERT_TRUE(map.label_reachable(r.handler));
      EXPECT_EQ(map.at_label.at(r.handler.offset), (StackState{{SlotKind::ref, -1}}));
    }
  }
}

TEST(Checker, InconsistentMergeIsRejected) {
  const auto model = one_method([](auto& c) {
    c.max(2, 1).iload(0).jump(op::ifeq, "a").iconst(1).label("a").iconst(2).i(op::pop).i(op::return_);
  }, "(I)V");
  EXPECT_EQ(code_of([&] { (void)check_method(model.methods.at(0)); }), ErrorCode::inconsistent_stack_depth);
}

TEST(Checker, DeclaredMaxStackExceeded) {
  const auto model = one_method([](auto& c) { c.max(1, 0).iconst(1).iconst(2).i(op::pop2).i(op::return_); });
  EXPECT_EQ(code_of([&] { (void)check_method(model.methods.at(0)); }), ErrorCode::stack_overflow_decl);
}

TEST(Checker, MonitorIsUnsupported) {
  const auto model = classfile::parse_class(corpus::monitor().bytes);
  EXPECT_EQ(code_of([&] { (void)check_method(*model.find_method("lock", "()V")); }), ErrorCode::unsupported);
  EXPECT_FALSE(unsupported_instructions(*model.find_method("lock", "()V")).empty());
}

TEST(Checker, LongsCountTwoSlots) {
  const auto model = classfile::parse_class(corpus::long_math().bytes);
  for (const auto& m : model.methods) {
    if (!m.code || m.name == "<init>") continue;
    const auto map = check_method(m);
    EXPECT_LE(map.max_slots, m.code->max_stack) << m.name;
    EXPECT_LE(map.max_values, map.max_slots) << m.name;
  }
}

TEST(Checker, WholeCorpusChecksOrRefuses) {
  for (const auto& fx : corpus::all()) {
    const auto model = classfile::parse_class(fx.bytes);
    for (const auto& m : model.methods) {
      if (!m.code || m.name == "<init>") continue;
      try {
        const auto map = check_method(m);
        EXPECT_LE(map.max_slots, m.code->max_stack) << fx.name << "." << m.name;
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unsupported) << fx.name << "." << m.name << ": " << e.what();
      }
    }
  }
}

TEST(Checker, SystemExceptionOrderForAastore) {
  EXPECT_EQ(system_exceptions_of(Opcode::aastore),
            (std::vector<std::string>{"java/lang/NullPointerException", "java/lang/ArrayIndexOutOfBoundsException",
                                      "java/lang/ArrayStoreException"}));
  EXPECT_TRUE(system_exceptions_of(Opcode::iadd).empty());
}

}  // namespace
