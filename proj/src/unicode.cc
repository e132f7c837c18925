#include "term/unicode.h"

#include <locale.h>
#include <wctype.h>

#include "term/error.h"

namespace term::unicode {
namespace {

// Character classes come from the C.UTF-8 locale; the handle is process-wide
// and read-only, so the *_l calls are safe from any thread.
locale_t ctype_locale() {
  static const locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(nullptr));
    if (l == static_cast<locale_t>(nullptr)) {
      l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(nullptr));
    }
    return l;
  }();
  return loc;
}

// Returns the sequence length at `pos`, or 0 when malformed.
std::size_t sequence_length(std::string_view s, std::size_t pos, char32_t* out) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  std::size_t len;
  char32_t cp;
  if (b0 < 0x80) {
    *out = b0;
    return 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (pos + len > s.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  // Overlong forms, surrogates and out-of-range values.
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  *out = cp;
  return len;
}

}  // namespace

std::size_t find_invalid(std::string_view utf8) {
  std::size_t pos = 0;
  char32_t cp;
  while (pos < utf8.size()) {
    const std::size_t len = sequence_length(utf8, pos, &cp);
    if (len == 0) return pos;
    pos += len;
  }
  return std::string_view::npos;
}

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t pos = 0;
  char32_t cp;
  while (pos < utf8.size()) {
    const std::size_t len = sequence_length(utf8, pos, &cp);
    if (len == 0) throw EncodingError("malformed UTF-8", pos);
    out.push_back(cp);
    pos += len;
  }
  return out;
}

std::string encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) out += encode(cp);
  return out;
}

char32_t to_lower(char32_t ch) {
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(ch), ctype_locale()));
}

char32_t to_upper(char32_t ch) {
  return static_cast<char32_t>(towupper_l(static_cast<wint_t>(ch), ctype_locale()));
}

bool is_letter(char32_t ch) { return iswalpha_l(static_cast<wint_t>(ch), ctype_locale()) != 0; }

bool is_digit(char32_t ch) { return ch >= U'0' && ch <= U'9'; }

bool is_upper(char32_t ch) { return iswupper_l(static_cast<wint_t>(ch), ctype_locale()) != 0; }

bool is_space(char32_t ch) { return iswspace_l(static_cast<wint_t>(ch), ctype_locale()) != 0; }

std::u32string fold(std::u32string_view text) {
  std::u32string out(text);
  for (char32_t& ch : out) ch = to_lower(ch);
  return out;
}

std::string fold(std::string_view utf8) { return encode(fold(decode(utf8))); }

std::string upper(std::string_view utf8) {
  std::u32string text = decode(utf8);
  for (char32_t& ch : text) ch = to_upper(ch);
  return encode(text);
}

std::size_t length(std::string_view utf8) { return decode(utf8).size(); }

}  // namespace term::unicode
