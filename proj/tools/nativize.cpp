// nativize: moves annotated Java methods into generated JNI C code.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "jnify/pipeline/pipeline.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_strict = 1;
constexpr int exit_failure = 2;

std::optional<std::filesystem::path> find_jni_include() {
  namespace fs = std::filesystem;
  if (const char* dir = std::getenv("JNI_INCLUDE")) {
    if (fs::exists(fs::path(dir) / "jni.h")) return fs::path(dir);
  }
  if (const char* home = std::getenv("JAVA_HOME")) {
    const auto dir = fs::path(home) / "include";
    if (fs::exists(dir / "jni.h")) return dir;
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rewrite annotated methods as JNI natives and emit their C translation"};
  std::string config_path;
  std::vector<std::string> inputs;
  std::string out_classes, out_c;
  bool check = false, strict = false;
  app.add_option("--config", config_path, "selection config file")->required();
  app.add_option("--in", inputs, "class files or directories")->required();
  app.add_option("--out-classes", out_classes, "directory for rewritten classes")->required();
  app.add_option("--out-c", out_c, "directory for C units")->required();
  app.add_flag("--check", check, "verify the outputs after writing");
  app.add_flag("--strict", strict, "fail when any selected method is skipped");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_failure;
  }

  using namespace jnify;
  try {
    pipeline::PipelineConfig cfg;
    cfg.selection = pipeline::parse_config(pipeline::read_text(config_path));
    for (const auto& in : inputs) cfg.inputs.emplace_back(in);
    cfg.out_classes = out_classes;
    cfg.out_c = out_c;
    cfg.check = check;
    cfg.strict = strict;
    if (check) cfg.jni_include = find_jni_include();
    if (const char* cc = std::getenv("CC")) cfg.c_compiler = cc;

    const auto report = pipeline::run_pipeline(cfg);
    std::cout << report.text();
    if (report.check_failed()) {
      std::cerr << "nativize: self-check failed\n";
      return exit_failure;
    }
    return exit_ok;
  } catch (const pipeline::StrictModeViolation& e) {
    std::cout << e.report().text();
    std::cerr << "nativize: " << e.what() << "\n";
    return exit_strict;
  } catch (const Error& e) {
    std::cerr << "nativize: " << e.what() << "\n";
    return exit_failure;
  } catch (const std::exception& e) {
    std::cerr << "nativize: " << e.what() << "\n";
    return exit_failure;
  }
}
