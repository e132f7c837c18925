#ifndef TERM_UNICODE_H_
#define TERM_UNICODE_H_

#include <string>
#include <string_view>

namespace term::unicode {

// Decodes UTF-8. Throws EncodingError naming the offending byte offset.
std::u32string decode(std::string_view utf8);

// Returns the byte offset of the first malformed sequence, or npos.
std::size_t find_invalid(std::string_view utf8);

std::string encode(std::u32string_view text);
std::string encode(char32_t ch);

char32_t to_lower(char32_t ch);
char32_t to_upper(char32_t ch);
bool is_letter(char32_t ch);
bool is_digit(char32_t ch);
bool is_upper(char32_t ch);
bool is_space(char32_t ch);

std::u32string fold(std::u32string_view text);

// Case-folded copy of a UTF-8 string.
std::string fold(std::string_view utf8);
std::string upper(std::string_view utf8);

std::size_t length(std::string_view utf8);

}  // namespace term::unicode

#endif  // TERM_UNICODE_H_
