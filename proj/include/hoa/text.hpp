#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace hoa::text {

inline constexpr std::string_view kMinus = "−";
inline constexpr std::string_view kDagger = "†";

inline std::string superscript(long n) {
  static constexpr std::string_view digits[] = {"⁰", "¹", "²", "³", "⁴",
                                                "⁵", "⁶", "⁷", "⁸", "⁹"};
  std::string plain = std::to_string(n);
  std::string out;
  for (char c : plain) {
    if (c == '-') {
      out += "⁻";
    } else {
      out += digits[c - '0'];
    }
  }
  return out;
}

/// Pump, Stokes, signal are A, B, C; further modes continue the alphabet.
inline std::string mode_name(std::size_t mode) {
  if (mode < 26) return std::string(1, static_cast<char>('A' + mode));
  return "M" + std::to_string(mode);
}

inline std::string amplitude_label(std::size_t mode) {
  static constexpr std::string_view greek[] = {"α", "β", "γ"};
  if (mode < 3) return std::string(greek[mode]);
  return "z" + std::to_string(mode);
}

/// Replaces ASCII '-' signs that start a number with the typographic minus.
inline std::string typographic(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-') {
      out += kMinus;
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace hoa::text
