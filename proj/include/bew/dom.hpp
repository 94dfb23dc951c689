#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bew {

// One saved entity page plus its sidecar metadata.
struct PageSnapshot {
  std::string aggregator_id;
  std::string entity_id;
  std::string source_url;
  std::string fetched_at;  // ISO-8601 UTC
  std::string html;        // raw bytes as fetched

  bool valid() const {
    return !aggregator_id.empty() && !entity_id.empty() && !html.empty();
  }
};

// Resolved presentation attributes for a node. Values inherit parent to
// child during parsing; tag defaults follow browser user-agent styles.
struct StyleMap {
  double font_size_px = 16.0;
  int font_weight = 400;  // 100..900
  bool is_heading_tag = false;
  bool hidden = false;

  bool operator==(const StyleMap&) const = default;
};

using NodePath = std::vector<int>;  // child indices from the root

struct UiNode {
  std::string tag;  // "#text" for text nodes
  std::map<std::string, std::string> attributes;
  StyleMap style;
  std::vector<UiNode> children;
  std::optional<std::string> text;  // leaf text, whitespace-normalized

  bool is_text() const { return text.has_value(); }
  bool operator==(const UiNode&) const = default;
};

struct TextLeaf {
  std::string text;
  StyleMap style;
  NodePath node_path;
};

// Tokens matched (case-insensitive) against class/id substrings and whole
// tag names when pruning boilerplate.
struct BoilerplateConfig {
  std::vector<std::string> tokens = {"ad",        "ads", "banner", "footer",
                                     "copyright", "nav", "cookie", "promo"};
};

// Parses a snapshot into a style-resolved tree. Malformed markup is repaired;
// throws ParseError only when the bytes are not decodable text.
UiNode parse_snapshot(const PageSnapshot& snap);
UiNode parse_html(const std::string& html);

// Copy of the tree without boilerplate token matches, hidden subtrees and
// script/style/iframe elements. JSON-LD data blocks are kept (they carry
// structured data, not executable code) even when their container is pruned.
UiNode strip_boilerplate(const UiNode& root,
                         const BoilerplateConfig& cfg = BoilerplateConfig{});

// Depth-first visible text leaves.
std::vector<TextLeaf> collect_text_leaves(const UiNode& root);

// Walks a child-index path; throws PathError when it does not resolve.
const UiNode& resolve_path(const UiNode& root, const NodePath& path);

// True when `prefix` is `path` or an ancestor of it.
bool path_is_prefix(const NodePath& prefix, const NodePath& path);

bool is_json_ld_script(const UiNode& node);

}  // namespace bew
