#include "bew/dom.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

#include "bew/errors.hpp"
#include "bew/text.hpp"

namespace bew {
namespace {

// ---------------------------------------------------------------------------
// charset handling
// ---------------------------------------------------------------------------

// Windows-1252 mappings for 0x80..0x9F; the rest of latin-1 maps 1:1.
constexpr std::array<char32_t, 32> kCp1252High = {
    0x20AC, 0xFFFD, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0xFFFD, 0x017D, 0xFFFD,
    0xFFFD, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0xFFFD, 0x017E, 0x0178};

std::string sniff_charset(const std::string& bytes) {
  std::string head = to_lower_ascii(bytes.substr(0, 2048));
  std::size_t pos = head.find("charset");
  if (pos == std::string::npos) return "";
  pos += 7;
  while (pos < head.size() &&
         (head[pos] == '=' || head[pos] == '"' || head[pos] == '\'' ||
          head[pos] == ' '))
    ++pos;
  std::string cs;
  while (pos < head.size() && (std::isalnum(static_cast<unsigned char>(head[pos])) ||
                               head[pos] == '-' || head[pos] == '_')) {
    cs += head[pos++];
  }
  return cs;
}

std::string decode_to_utf8(const std::string& raw) {
  std::string bytes = raw;
  if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xEF &&
      static_cast<unsigned char>(bytes[1]) == 0xBB &&
      static_cast<unsigned char>(bytes[2]) == 0xBF) {
    bytes.erase(0, 3);
  }
  if (bytes.size() >= 2) {
    unsigned char b0 = bytes[0], b1 = bytes[1];
    if ((b0 == 0xFF && b1 == 0xFE) || (b0 == 0xFE && b1 == 0xFF)) {
      throw ParseError("UTF-16 snapshots are not supported");
    }
  }
  if (bytes.find('\0') != std::string::npos) {
    throw ParseError("snapshot contains NUL bytes; not decodable text");
  }

  std::string cs = sniff_charset(bytes);
  if (cs.empty() || cs == "utf-8" || cs == "utf8" || cs == "us-ascii" ||
      cs == "ascii") {
    if (!utf8_valid(bytes)) {
      throw ParseError("snapshot is not valid UTF-8 (charset: " +
                       (cs.empty() ? std::string("unspecified") : cs) + ")");
    }
    return bytes;
  }
  if (cs == "iso-8859-1" || cs == "iso8859-1" || cs == "latin-1" ||
      cs == "latin1" || cs == "windows-1252" || cs == "cp1252") {
    std::string out;
    out.reserve(bytes.size() + bytes.size() / 4);
    for (unsigned char b : bytes) {
      if (b < 0x80) {
        out += static_cast<char>(b);
      } else if (b < 0xA0) {
        utf8_append(out, kCp1252High[b - 0x80]);
      } else {
        utf8_append(out, b);
      }
    }
    return out;
  }
  throw ParseError("unsupported charset: " + cs);
}

// ---------------------------------------------------------------------------
// entity decoding
// ---------------------------------------------------------------------------

const std::unordered_map<std::string, char32_t>& named_entities() {
  static const std::unordered_map<std::string, char32_t> map = {
      {"amp", '&'},      {"lt", '<'},       {"gt", '>'},      {"quot", '"'},
      {"apos", '\''},    {"nbsp", 0xA0},    {"copy", 0xA9},   {"reg", 0xAE},
      {"trade", 0x2122}, {"mdash", 0x2014}, {"ndash", 0x2013},
      {"hellip", 0x2026}, {"bull", 0x2022}, {"middot", 0xB7}, {"deg", 0xB0},
      {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C},
      {"rdquo", 0x201D}, {"laquo", 0xAB},   {"raquo", 0xBB},  {"times", 0xD7},
      {"divide", 0xF7},  {"eacute", 0xE9},  {"egrave", 0xE8}, {"agrave", 0xE0},
      {"uuml", 0xFC},    {"ouml", 0xF6},    {"auml", 0xE4},   {"szlig", 0xDF},
      {"ccedil", 0xE7},  {"ntilde", 0xF1},  {"oacute", 0xF3}, {"iacute", 0xED},
      {"uacute", 0xFA},  {"aacute", 0xE1},  {"sect", 0xA7},   {"para", 0xB6},
      {"cent", 0xA2},    {"pound", 0xA3},   {"euro", 0x20AC}, {"yen", 0xA5},
      {"frac12", 0xBD},  {"frac14", 0xBC},  {"frac34", 0xBE}};
  return map;
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += s[i++];
      continue;
    }
    std::string_view body = s.substr(i + 1, semi - i - 1);
    char32_t cp = 0;
    bool ok = false;
    if (!body.empty() && body[0] == '#') {
      bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
      std::string digits(body.substr(hex ? 2 : 1));
      if (!digits.empty()) {
        char* end = nullptr;
        unsigned long v = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
        if (end && *end == '\0' && v <= 0x10FFFF) {
          cp = static_cast<char32_t>(v);
          ok = true;
        }
      }
    } else {
      auto it = named_entities().find(std::string(body));
      if (it != named_entities().end()) {
        cp = it->second;
        ok = true;
      }
    }
    if (ok) {
      utf8_append(out, cp);
      i = semi + 1;
    } else {
      out += s[i++];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// tokenizer + tree builder
// ---------------------------------------------------------------------------

struct RawNode {
  std::string tag;
  std::map<std::string, std::string> attrs;
  std::string text;
  bool is_text = false;
  std::vector<int> kids;
};

bool is_void_element(const std::string& tag) {
  static const std::unordered_set<std::string> kVoid = {
      "area", "base",  "br",    "col",  "embed",  "hr",    "img",
      "input", "link", "meta",  "param", "source", "track", "wbr"};
  return kVoid.count(tag) > 0;
}

bool is_rawtext_element(const std::string& tag) {
  return tag == "script" || tag == "style" || tag == "textarea" ||
         tag == "title";
}

// Opening one of these closes an open <p>.
bool closes_paragraph(const std::string& tag) {
  static const std::unordered_set<std::string> kBlocks = {
      "address", "article", "aside", "blockquote", "div",  "dl",
      "fieldset", "footer", "form",  "h1",         "h2",   "h3",
      "h4",      "h5",      "h6",    "header",     "hr",   "main",
      "nav",     "ol",      "p",     "pre",        "section", "table",
      "ul"};
  return kBlocks.count(tag) > 0;
}

class HtmlBuilder {
 public:
  explicit HtmlBuilder(std::string_view src) : s_(src) {
    arena_.push_back(RawNode{"#fragment", {}, "", false, {}});
    stack_.push_back(0);
  }

  int build() {
    while (i_ < s_.size()) {
      if (s_[i_] == '<') {
        if (match("<!--")) {
          skip_until("-->", 3);
        } else if (i_ + 1 < s_.size() &&
                   (s_[i_ + 1] == '!' || s_[i_ + 1] == '?')) {
          skip_until(">", 1);
        } else if (i_ + 1 < s_.size() && s_[i_ + 1] == '/') {
          close_tag();
        } else if (i_ + 1 < s_.size() &&
                   std::isalpha(static_cast<unsigned char>(s_[i_ + 1]))) {
          open_tag();
        } else {
          text_ += s_[i_++];
        }
      } else {
        std::size_t next = s_.find('<', i_);
        if (next == std::string_view::npos) next = s_.size();
        text_.append(s_, i_, next - i_);
        i_ = next;
      }
    }
    flush_text();
    return 0;
  }

  const std::vector<RawNode>& arena() const { return arena_; }

 private:
  bool match(std::string_view lit) const {
    return s_.compare(i_, lit.size(), lit) == 0;
  }

  void skip_until(std::string_view terminator, std::size_t offset) {
    std::size_t pos = s_.find(terminator, i_ + offset);
    i_ = pos == std::string_view::npos ? s_.size() : pos + terminator.size();
  }

  void flush_text() {
    if (text_.empty()) return;
    std::string decoded = decode_entities(text_);
    text_.clear();
    if (normalize_ws(decoded).empty()) return;
    int id = static_cast<int>(arena_.size());
    arena_.push_back(RawNode{"#text", {}, decoded, true, {}});
    arena_[stack_.back()].kids.push_back(id);
  }

  std::string read_name() {
    std::string name;
    while (i_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[i_])) ||
            s_[i_] == '-' || s_[i_] == '_' || s_[i_] == ':')) {
      name += static_cast<char>(std::tolower(static_cast<unsigned char>(s_[i_])));
      ++i_;
    }
    return name;
  }

  std::map<std::string, std::string> read_attributes(bool& self_closing) {
    std::map<std::string, std::string> attrs;
    self_closing = false;
    while (i_ < s_.size() && s_[i_] != '>') {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        ++i_;
        continue;
      }
      if (s_[i_] == '/') {
        self_closing = true;
        ++i_;
        continue;
      }
      std::string name;
      while (i_ < s_.size() && s_[i_] != '=' && s_[i_] != '>' &&
             s_[i_] != '/' &&
             !std::isspace(static_cast<unsigned char>(s_[i_]))) {
        name += static_cast<char>(
            std::tolower(static_cast<unsigned char>(s_[i_])));
        ++i_;
      }
      while (i_ < s_.size() &&
             std::isspace(static_cast<unsigned char>(s_[i_])))
        ++i_;
      std::string value;
      if (i_ < s_.size() && s_[i_] == '=') {
        ++i_;
        while (i_ < s_.size() &&
               std::isspace(static_cast<unsigned char>(s_[i_])))
          ++i_;
        if (i_ < s_.size() && (s_[i_] == '"' || s_[i_] == '\'')) {
          char quote = s_[i_++];
          std::size_t end = s_.find(quote, i_);
          if (end == std::string_view::npos) end = s_.size();
          value.assign(s_, i_, end - i_);
          i_ = end < s_.size() ? end + 1 : end;
        } else {
          while (i_ < s_.size() && s_[i_] != '>' &&
                 !std::isspace(static_cast<unsigned char>(s_[i_]))) {
            value += s_[i_++];
          }
        }
      }
      if (!name.empty()) attrs.emplace(name, decode_entities(value));
    }
    if (i_ < s_.size()) ++i_;  // consume '>'
    return attrs;
  }

  void apply_implicit_closes(const std::string& tag) {
    static const std::unordered_set<std::string> kScopeStop = {
        "#fragment", "html", "body", "table", "td", "th", "template"};
    auto pop_through = [&](const std::string& victim) {
      for (std::size_t k = stack_.size(); k-- > 1;) {
        const std::string& open = arena_[stack_[k]].tag;
        if (open == victim) {
          stack_.resize(k);
          return;
        }
        if (kScopeStop.count(open)) return;
      }
    };
    if (closes_paragraph(tag)) pop_through("p");
    if (tag == "li") pop_through("li");
    if (tag == "dt" || tag == "dd") {
      pop_through("dt");
      pop_through("dd");
    }
    if (tag == "tr") {
      pop_through("td");
      pop_through("th");
      pop_through("tr");
    }
    if (tag == "td" || tag == "th") {
      pop_through("td");
      pop_through("th");
    }
    if (tag == "option") pop_through("option");
  }

  void open_tag() {
    ++i_;  // '<'
    std::string tag = read_name();
    bool self_closing = false;
    auto attrs = read_attributes(self_closing);
    flush_text();
    apply_implicit_closes(tag);

    int id = static_cast<int>(arena_.size());
    arena_.push_back(RawNode{tag, std::move(attrs), "", false, {}});
    arena_[stack_.back()].kids.push_back(id);

    if (self_closing || is_void_element(tag)) return;
    if (is_rawtext_element(tag)) {
      consume_rawtext(id, tag);
      return;
    }
    stack_.push_back(id);
  }

  void consume_rawtext(int id, const std::string& tag) {
    std::string close = "</" + tag;
    std::size_t pos = i_;
    std::size_t found = std::string_view::npos;
    while (pos < s_.size()) {
      pos = s_.find('<', pos);
      if (pos == std::string_view::npos) break;
      if (pos + close.size() <= s_.size()) {
        std::string cand(s_.substr(pos, close.size()));
        if (to_lower_ascii(cand) == close) {
          found = pos;
          break;
        }
      }
      ++pos;
    }
    std::size_t end = found == std::string_view::npos ? s_.size() : found;
    std::string content(s_.substr(i_, end - i_));
    if (!content.empty()) {
      int tid = static_cast<int>(arena_.size());
      arena_.push_back(RawNode{"#text", {}, std::move(content), true, {}});
      arena_[id].kids.push_back(tid);
    }
    if (found == std::string_view::npos) {
      i_ = s_.size();
    } else {
      std::size_t gt = s_.find('>', found);
      i_ = gt == std::string_view::npos ? s_.size() : gt + 1;
    }
  }

  void close_tag() {
    i_ += 2;  // "</"
    std::string tag = read_name();
    std::size_t gt = s_.find('>', i_);
    i_ = gt == std::string_view::npos ? s_.size() : gt + 1;
    flush_text();
    for (std::size_t k = stack_.size(); k-- > 1;) {
      if (arena_[stack_[k]].tag == tag) {
        stack_.resize(k);
        return;
      }
    }
    // stray close tag: ignored
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::string text_;
  std::vector<RawNode> arena_;
  std::vector<int> stack_;
};

UiNode convert(const std::vector<RawNode>& arena, int id) {
  const RawNode& rn = arena[id];
  UiNode node;
  node.tag = rn.tag;
  node.attributes = rn.attrs;
  if (rn.is_text) node.text = rn.text;
  node.children.reserve(rn.kids.size());
  for (int kid : rn.kids) node.children.push_back(convert(arena, kid));
  return node;
}

// ---------------------------------------------------------------------------
// style resolution
// ---------------------------------------------------------------------------

struct TagStyle {
  double size;
  int weight;
  bool heading;
};

const std::unordered_map<std::string, TagStyle>& heading_defaults() {
  static const std::unordered_map<std::string, TagStyle> map = {
      {"h1", {32, 700, true}}, {"h2", {24, 700, true}},
      {"h3", {19, 700, true}}, {"h4", {16, 700, true}},
      {"h5", {13, 700, true}}, {"h6", {11, 700, true}}};
  return map;
}

bool hidden_by_default(const std::string& tag) {
  static const std::unordered_set<std::string> kHidden = {
      "head", "script", "style",  "noscript", "template",
      "title", "meta",  "link",   "base"};
  return kHidden.count(tag) > 0;
}

double parse_font_size(const std::string& value, double parent_px) {
  char* end = nullptr;
  double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || v <= 0) return parent_px;
  std::string unit = to_lower_ascii(normalize_ws(end));
  if (unit.empty() || unit == "px") return v;
  if (unit == "pt") return v * 4.0 / 3.0;
  if (unit == "em") return v * parent_px;
  if (unit == "rem") return v * 16.0;
  if (unit == "%") return v * parent_px / 100.0;
  return parent_px;
}

int parse_font_weight(const std::string& value, int parent_weight) {
  std::string v = to_lower_ascii(normalize_ws(value));
  if (v == "bold" || v == "bolder") return 700;
  if (v == "lighter") return 300;
  if (v == "normal") return 400;
  char* end = nullptr;
  long num = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str()) return parent_weight;
  return static_cast<int>(std::clamp<long>(num, 100, 900));
}

void apply_inline_style(const std::string& decl, StyleMap& st) {
  std::size_t pos = 0;
  while (pos < decl.size()) {
    std::size_t semi = decl.find(';', pos);
    if (semi == std::string::npos) semi = decl.size();
    std::string item = decl.substr(pos, semi - pos);
    pos = semi + 1;
    std::size_t colon = item.find(':');
    if (colon == std::string::npos) continue;
    std::string key = to_lower_ascii(normalize_ws(item.substr(0, colon)));
    std::string value = to_lower_ascii(normalize_ws(item.substr(colon + 1)));
    if (key == "font-size") {
      st.font_size_px = parse_font_size(value, st.font_size_px);
    } else if (key == "font-weight") {
      st.font_weight = parse_font_weight(value, st.font_weight);
    } else if (key == "display" && value == "none") {
      st.hidden = true;
    } else if (key == "visibility" && value == "hidden") {
      st.hidden = true;
    }
  }
}

void resolve_styles(UiNode& node, const StyleMap& inherited) {
  StyleMap st = inherited;
  if (!node.is_text()) {
    auto it = heading_defaults().find(node.tag);
    if (it != heading_defaults().end()) {
      st.font_size_px = it->second.size;
      st.font_weight = it->second.weight;
      st.is_heading_tag = true;
    }
    if (node.tag == "b" || node.tag == "strong" || node.tag == "th") {
      st.font_weight = 700;
    }
    if (hidden_by_default(node.tag)) st.hidden = true;
    if (node.attributes.count("hidden")) st.hidden = true;
    auto style_attr = node.attributes.find("style");
    if (style_attr != node.attributes.end()) {
      apply_inline_style(style_attr->second, st);
    }
  }
  node.style = st;
  for (UiNode& child : node.children) resolve_styles(child, st);
}

// Normalizes leaf text and drops leaves that are empty afterwards. Raw text
// of rawtext elements (script/style) is kept verbatim so JSON-LD payloads
// survive; it is still dropped when whitespace-only.
void finalize_text(UiNode& node) {
  std::vector<UiNode> kept;
  kept.reserve(node.children.size());
  for (UiNode& child : node.children) {
    if (child.is_text()) {
      if (is_rawtext_element(node.tag)) {
        if (!normalize_ws(*child.text).empty()) kept.push_back(std::move(child));
        continue;
      }
      std::string norm = normalize_ws(*child.text);
      if (norm.empty()) continue;
      child.text = std::move(norm);
      kept.push_back(std::move(child));
    } else {
      finalize_text(child);
      kept.push_back(std::move(child));
    }
  }
  node.children = std::move(kept);
}

// ---------------------------------------------------------------------------
// boilerplate stripping
// ---------------------------------------------------------------------------

bool matches_boilerplate(const UiNode& node, const BoilerplateConfig& cfg) {
  if (node.is_text()) return false;
  std::string cls, id;
  if (auto it = node.attributes.find("class"); it != node.attributes.end()) {
    cls = to_lower_ascii(it->second);
  }
  if (auto it = node.attributes.find("id"); it != node.attributes.end()) {
    id = to_lower_ascii(it->second);
  }
  for (const std::string& raw : cfg.tokens) {
    std::string token = to_lower_ascii(raw);
    if (token.empty()) continue;
    if (node.tag == token) return true;
    if (!cls.empty() && cls.find(token) != std::string::npos) return true;
    if (!id.empty() && id.find(token) != std::string::npos) return true;
  }
  return false;
}

void salvage_json_ld(const UiNode& node, std::vector<UiNode>& out) {
  if (is_json_ld_script(node)) {
    out.push_back(node);
    return;
  }
  for (const UiNode& child : node.children) salvage_json_ld(child, out);
}

std::vector<UiNode> strip_rec(const UiNode& node, const BoilerplateConfig& cfg) {
  if (is_json_ld_script(node)) return {node};
  bool removed = node.style.hidden || node.tag == "script" ||
                 node.tag == "style" || node.tag == "iframe" ||
                 matches_boilerplate(node, cfg);
  if (removed) {
    std::vector<UiNode> salvaged;
    salvage_json_ld(node, salvaged);
    return salvaged;
  }
  UiNode copy;
  copy.tag = node.tag;
  copy.attributes = node.attributes;
  copy.style = node.style;
  copy.text = node.text;
  for (const UiNode& child : node.children) {
    for (UiNode& kept : strip_rec(child, cfg)) {
      copy.children.push_back(std::move(kept));
    }
  }
  return {std::move(copy)};
}

void collect_rec(const UiNode& node, NodePath& path,
                 std::vector<TextLeaf>& out) {
  if (node.is_text()) {
    if (!node.style.hidden) out.push_back(TextLeaf{*node.text, node.style, path});
    return;
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.push_back(static_cast<int>(i));
    collect_rec(node.children[i], path, out);
    path.pop_back();
  }
}

}  // namespace

bool is_json_ld_script(const UiNode& node) {
  if (node.tag != "script") return false;
  auto it = node.attributes.find("type");
  if (it == node.attributes.end()) return false;
  return to_lower_ascii(it->second).find("ld+json") != std::string::npos;
}

UiNode parse_html(const std::string& html) {
  std::string utf8 = decode_to_utf8(html);
  HtmlBuilder builder(utf8);
  builder.build();
  const auto& arena = builder.arena();

  UiNode fragment = convert(arena, 0);
  finalize_text(fragment);

  UiNode root;
  if (fragment.children.size() == 1 && !fragment.children[0].is_text()) {
    root = std::move(fragment.children[0]);
  } else {
    root.tag = "html";
    root.children = std::move(fragment.children);
  }
  resolve_styles(root, StyleMap{});
  return root;
}

UiNode parse_snapshot(const PageSnapshot& snap) {
  if (!snap.valid()) {
    throw ParseError("snapshot missing aggregator/entity ids or html");
  }
  return parse_html(snap.html);
}

UiNode strip_boilerplate(const UiNode& root, const BoilerplateConfig& cfg) {
  UiNode copy;
  copy.tag = root.tag;
  copy.attributes = root.attributes;
  copy.style = root.style;
  copy.text = root.text;
  for (const UiNode& child : root.children) {
    for (UiNode& kept : strip_rec(child, cfg)) {
      copy.children.push_back(std::move(kept));
    }
  }
  return copy;
}

std::vector<TextLeaf> collect_text_leaves(const UiNode& root) {
  std::vector<TextLeaf> out;
  NodePath path;
  collect_rec(root, path, out);
  return out;
}

const UiNode& resolve_path(const UiNode& root, const NodePath& path) {
  const UiNode* cur = &root;
  for (int idx : path) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= cur->children.size()) {
      throw PathError("node_path does not resolve");
    }
    cur = &cur->children[idx];
  }
  return *cur;
}

bool path_is_prefix(const NodePath& prefix, const NodePath& path) {
  if (prefix.size() > path.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), path.begin());
}

}  // namespace bew
