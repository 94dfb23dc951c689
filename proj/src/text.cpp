#include "bew/text.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>

namespace bew {

char32_t utf8_next(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) -> unsigned char {
    return static_cast<unsigned char>(s[k]);
  };
  unsigned char b0 = byte(i);
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
  if (i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    unsigned char bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  // Reject overlong forms and surrogates.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
      (len == 4 && cp < 0x10000) || (cp >= 0xD800 && cp <= 0xDFFF) ||
      cp > 0x10FFFF) {
    ++i;
    return 0xFFFD;
  }
  i += len;
  return cp;
}

void utf8_append(std::string& out, char32_t cp) {
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
}

bool utf8_valid(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t before = i;
    char32_t cp = utf8_next(s, i);
    if (cp == 0xFFFD) {
      // 0xFFFD may legitimately appear encoded as EF BF BD.
      if (i - before != 3) return false;
    }
  }
  return true;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t i = 0, n = 0;
  while (i < s.size()) {
    utf8_next(s, i);
    ++n;
  }
  return n;
}

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09:
    case 0x0A:
    case 0x0B:
    case 0x0C:
    case 0x0D:
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::string normalize_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  bool seen_char = false;
  std::size_t i = 0;
  while (i < s.size()) {
    char32_t cp = utf8_next(s, i);
    if (is_unicode_space(cp)) {
      pending_space = seen_char;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    utf8_append(out, cp);
    seen_char = true;
  }
  return out;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string fold_key(std::string_view s) { return to_lower_ascii(normalize_ws(s)); }

std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    unsigned char
        u = static_cast<unsigned char>(c);
    bool word_char = std::isalnum(u) || c == '\'' || u >= 0x80;
    if (word_char) {
      cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cur += s[i];
    if (s[i] == '.' || s[i] == '!' || s[i] == '?') {
      // Consume a run of terminators; split only when whitespace follows.
      std::size_t j = i + 1;
      while (j < s.size() && (s[j] == '.' || s[j] == '!' || s[j] == '?')) {
        cur += s[j];
        ++j;
      }
      if (j >= s.size() || std::isspace(static_cast<unsigned char>(s[j]))) {
        std::string piece = normalize_ws(cur);
        if (!piece.empty()) out.push_back(piece);
        cur.clear();
      }
      i = j - 1;
    }
  }
  std::string piece = normalize_ws(cur);
  if (!piece.empty()) out.push_back(piece);
  return out;
}

std::string slugify(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      if (pending && !out.empty()) out += '-';
      pending = false;
      out += static_cast<char>(std::tolower(u));
    } else {
      pending = true;
    }
  }
  return out;
}

std::string iso8601_now() {
  auto now = std::chrono::system_clock::now();
  return iso8601_from_time(std::chrono::duration_cast<std::chrono::seconds>(
                               now.time_since_epoch())
                               .count());
}

std::string iso8601_from_time(std::int64_t unix_seconds) {
  std::time_t t = static_cast<std::time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

std::int64_t iso8601_to_time(std::string_view s) {
  std::tm tm{};
  int y, mo, d, h, mi, se;
  if (std::sscanf(std::string(s).c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h,
                  &mi, &se) != 6) {
    return -1;
  }
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = se;
  return static_cast<std::int64_t>(timegm(&tm));
}

}  // namespace bew
