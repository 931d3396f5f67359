#pragma once

#include <cstdio>
#include <string>
#include <string_view>

#include "jnify/classfile/mutf8.hpp"

namespace jnify::rewriter {

/// JNI escape of one name component. '/' becomes the package separator '_'.
inline std::string jni_escape(std::string_view mutf8) {
  std::string out;
  for (char16_t c : classfile::decode_mutf8(mutf8)) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) {
      out.push_back(static_cast<char>(c));
    } else if (c == '/') {
      out += "_";
    } else if (c == '_') {
      out += "_1";
    } else if (c == ';') {
      out += "_2";
    } else if (c == '[') {
      out += "_3";
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "_0%04x", static_cast<unsigned>(c));
      out += buf;
    }
  }
  return out;
}

/// Argument part of a method descriptor: the text between '(' and ')'.
inline std::string_view descriptor_arguments(std::string_view descriptor) {
  const auto close = descriptor.find(')');
  if (descriptor.empty() || descriptor.front() != '(' || close == std::string_view::npos) return {};
  return descriptor.substr(1, close - 1);
}

/// C symbol JNI resolves for a native method. The long form (with the
/// escaped argument descriptor) is used for overloaded methods.
inline std::string jni_mangle(std::string_view class_name, std::string_view method_name, std::string_view descriptor,
                              bool overloaded) {
  std::string out = "Java_" + jni_escape(class_name) + "_" + jni_escape(method_name);
  if (overloaded) out += "__" + jni_escape(descriptor_arguments(descriptor));
  return out;
}

}  // namespace jnify::rewriter
