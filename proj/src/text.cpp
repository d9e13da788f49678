#include "jet/text.hpp"

#include <cwctype>
#include <locale.h>

namespace jet {

namespace {

locale_t utf8_locale() {
  static locale_t loc = [] {
    for (const char* name : {"C.utf8", "C.UTF-8", "en_US.utf8", "en_US.UTF-8"}) {
      locale_t l = newlocale(LC_ALL_MASK, name, (locale_t)0);
      if (l != (locale_t)0) return l;
    }
    return (locale_t)0;
  }();
  return loc;
}

// Decodes one UTF-8 codepoint starting at raw[i]; advances i. Malformed
// bytes decode as 0xFFFD and advance by one byte.
char32_t decode_utf8(std::string_view raw, size_t& i) {
  const unsigned char b0 = raw[i];
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + len > raw.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    const unsigned char b = raw[i + k];
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

enum class CharClass { Keep, Space, Boundary };

CharClass classify(char32_t cp) {
  if (cp < 0x80) {
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9'))
      return CharClass::Keep;
    if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f')
      return CharClass::Space;
    return CharClass::Boundary;
  }
  locale_t loc = utf8_locale();
  if (loc == (locale_t)0) return CharClass::Keep;  // no tables; keep verbatim
  if (iswalnum_l(static_cast<wint_t>(cp), loc)) return CharClass::Keep;
  if (iswspace_l(static_cast<wint_t>(cp), loc)) return CharClass::Space;
  return CharClass::Boundary;
}

char32_t lower(char32_t cp) {
  if (cp < 0x80) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    return cp;
  }
  locale_t loc = utf8_locale();
  if (loc == (locale_t)0) return cp;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc));
}

}  // namespace

std::vector<std::string> normalize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string current;
  size_t i = 0;
  while (i < raw.size()) {
    const char32_t cp = decode_utf8(raw, i);
    if (classify(cp) == CharClass::Keep) {
      encode_utf8(lower(cp), current);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<std::string_view> split_tsv(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t begin = 0;
  while (true) {
    const size_t tab = line.find('\t', begin);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(begin));
      break;
    }
    fields.push_back(line.substr(begin, tab - begin));
    begin = tab + 1;
  }
  return fields;
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  size_t begin = 0;
  while (begin <= text.size()) {
    size_t end = text.find(sep, begin);
    if (end == std::string_view::npos) end = text.size();
    if (end > begin) out.emplace_back(text.substr(begin, end - begin));
    begin = end + 1;
  }
  return out;
}

std::string term_key(const std::vector<std::string>& tokens) {
  std::string key;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) key.push_back('_');
    for (char c : tokens[i]) {
      if (c == '_') key += "\\_";
      else key.push_back(c);
    }
  }
  return key;
}

std::vector<std::string> term_key_tokens(std::string_view key) {
  std::vector<std::string> tokens;
  std::string current;
  for (size_t i = 0; i < key.size(); ++i) {
    if (key[i] == '\\' && i + 1 < key.size() && key[i + 1] == '_') {
      current.push_back('_');
      ++i;
    } else if (key[i] == '_') {
      tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(key[i]);
    }
  }
  tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace jet
