#pragma once

#include <string>
#include <string_view>

#include "jnify/error.hpp"

namespace jnify::classfile {

/// Decodes modified UTF-8 (as stored in Utf8 pool entries) to UTF-16 code
/// units. Supplementary characters arrive as surrogate pairs already.
inline std::u16string decode_mutf8(std::string_view in) {
  std::u16string out;
  for (std::size_t i = 0; i < in.size();) {
    const auto b0 = static_cast<unsigned char>(in[i]);
    auto cont = [&](std::size_t k) {
      if (i + k >= in.size() || (static_cast<unsigned char>(in[i + k]) & 0xC0) != 0x80) {
        fail(ErrorCode::malformed_class, "bad modified UTF-8 sequence");
      }
      return static_cast<char16_t>(static_cast<unsigned char>(in[i + k]) & 0x3F);
    };
    if (b0 < 0x80 && b0 != 0) {
      out.push_back(b0);
      i += 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      out.push_back(static_cast<char16_t>(((b0 & 0x1F) << 6) | cont(1)));
      i += 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      out.push_back(static_cast<char16_t>(((b0 & 0x0F) << 12) | (cont(1) << 6) | cont(2)));
      i += 3;
    } else {
      fail(ErrorCode::malformed_class, "bad modified UTF-8 lead byte");
    }
  }
  return out;
}

/// Encodes UTF-16 code units as modified UTF-8.
inline std::string encode_mutf8(std::u16string_view in) {
  std::string out;
  for (char16_t c : in) {
    if (c != 0 && c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

}  // namespace jnify::classfile
