#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gtd::utf8 {

constexpr char32_t kInvalid = 0xFFFD;

// Decodes the code point starting at byte offset i, advancing i past it.
// Malformed sequences yield kInvalid and advance by one byte.
char32_t decode(std::string_view s, std::size_t& i);

void append(std::string& out, char32_t cp);

// Letter/digit classification over the blocks this project handles:
// ASCII, Latin-1, Latin Extended-A/B, Greek, Cyrillic, CJK, kana, Hangul.
// Anything outside those blocks is treated as a separator.
bool is_alnum(char32_t cp);

bool is_space(char32_t cp);

// Simple (1:1) case folding for the covered alphabetic blocks.
char32_t fold(char32_t cp);

} // namespace gtd::utf8
