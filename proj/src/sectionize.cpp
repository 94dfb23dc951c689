#include "bew/sectionize.hpp"

#include <algorithm>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <unordered_set>

#include "bew/parallel.hpp"
#include "bew/text.hpp"

namespace bew {
namespace {

using json = nlohmann::json;

std::string scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return v.dump();
}

void flatten_json_ld(const json& node,
                     std::vector<std::pair<std::string, std::string>>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      if (!key.empty() && key[0] == '@') continue;
      if (value.is_object() || value.is_array()) {
        if (value.is_array()) {
          for (const json& item : value) {
            if (item.is_object() || item.is_array()) {
              flatten_json_ld(item, out);
            } else if (!item.is_null()) {
              out.emplace_back(key, scalar_to_string(item));
            }
          }
        } else {
          flatten_json_ld(value, out);
        }
      } else if (!value.is_null()) {
        out.emplace_back(key, scalar_to_string(value));
      }
    }
  } else if (node.is_array()) {
    for (const json& item : node) flatten_json_ld(item, out);
  }
}

std::string script_payload(const UiNode& script) {
  std::string payload;
  for (const UiNode& child : script.children) {
    if (child.is_text()) payload += *child.text;
  }
  return payload;
}

// Every "property: value" pair from the page's JSON-LD data blocks.
std::vector<std::pair<std::string, std::string>> page_json_ld(
    const UiNode& page) {
  std::vector<std::pair<std::string, std::string>> props;
  std::vector<const UiNode*> stack{&page};
  while (!stack.empty()) {
    const UiNode* node = stack.back();
    stack.pop_back();
    if (is_json_ld_script(*node)) {
      std::string payload = script_payload(*node);
      if (payload.empty()) continue;
      try {
        flatten_json_ld(json::parse(payload), props);
      } catch (const json::exception& e) {
        std::cerr << "[bew] skipping malformed JSON-LD block: " << e.what()
                  << "\n";
      }
      continue;
    }
    for (auto it = node->children.rbegin(); it != node->children.rend(); ++it) {
      stack.push_back(&*it);
    }
  }
  return props;
}

struct MicrodataItem {
  std::string prop;
  std::string value;
  NodePath path;
};

void subtree_text(const UiNode& node, std::string& out) {
  if (node.is_text()) {
    if (!node.style.hidden) {
      if (!out.empty()) out += ' ';
      out += *node.text;
    }
    return;
  }
  for (const UiNode& child : node.children) subtree_text(child, out);
}

void collect_microdata(const UiNode& node, NodePath& path,
                       std::vector<MicrodataItem>& out) {
  if (!node.is_text()) {
    auto it = node.attributes.find("itemprop");
    if (it != node.attributes.end() && !it->second.empty()) {
      MicrodataItem item;
      item.prop = it->second;
      item.path = path;
      if (auto c = node.attributes.find("content"); c != node.attributes.end()) {
        item.value = normalize_ws(c->second);
      } else if (auto d = node.attributes.find("datetime");
                 d != node.attributes.end()) {
        item.value = normalize_ws(d->second);
      } else {
        std::string text;
        subtree_text(node, text);
        item.value = normalize_ws(text);
      }
      if (!item.value.empty()) out.push_back(std::move(item));
    }
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.push_back(static_cast<int>(i));
    collect_microdata(node.children[i], path, out);
    path.pop_back();
  }
}

bool tokens_intersect(const std::string& a, const std::string& b) {
  auto ta = word_tokens(a);
  auto tb = word_tokens(b);
  std::unordered_set<std::string> set(ta.begin(), ta.end());
  return std::any_of(tb.begin(), tb.end(),
                     [&](const std::string& t) { return set.count(t) > 0; });
}

}  // namespace

std::vector<Phrase> segment_phrases(const std::vector<TextLeaf>& leaves) {
  std::vector<Phrase> phrases;
  for (const TextLeaf& leaf : leaves) {
    std::vector<std::string> pieces = split_sentences(leaf.text);
    if (pieces.size() <= 1) {
      phrases.push_back(Phrase{leaf.text, leaf.node_path});
      continue;
    }
    for (std::string& piece : pieces) {
      phrases.push_back(Phrase{std::move(piece), leaf.node_path});
    }
  }
  return phrases;
}

std::vector<std::string> extract_structured_data(const UiNode& page,
                                                 const Section& section) {
  std::vector<std::string> out;
  if (section.title == kUntitledSection) {
    // The pipeline computes untitled leftovers with knowledge of every
    // boundary; standalone calls get the JSON-LD pool only.
    for (const auto& [prop, value] : page_json_ld(page)) {
      out.push_back(prop + ": " + value);
    }
    return out;
  }
  std::vector<MicrodataItem> micro;
  NodePath path;
  collect_microdata(page, path, micro);
  for (const MicrodataItem& item : micro) {
    if (path_is_prefix(section.boundary_path, item.path)) {
      out.push_back(item.prop + ": " + item.value);
    }
  }
  for (const auto& [prop, value] : page_json_ld(page)) {
    if (tokens_intersect(prop, section.title)) {
      out.push_back(prop + ": " + value);
    }
  }
  return out;
}

PageSections sectionize_page(const UiNode& page, const Template& tpl) {
  PageSections result;
  auto leaves = collect_text_leaves(page);

  std::set<std::string> title_folds;
  for (const TitleSignature& sig : tpl.titles) {
    title_folds.insert(fold_key(sig.text));
  }

  // First occurrence in document order anchors each title.
  std::vector<std::size_t> anchor_order;
  std::set<std::string> claimed;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    std::string key = fold_key(leaves[i].text);
    if (title_folds.count(key) && !claimed.count(key)) {
      claimed.insert(key);
      anchor_order.push_back(i);
    }
  }

  std::vector<Section> sections;
  std::vector<std::size_t> anchor_leaf;
  for (std::size_t idx : anchor_order) {
    Section sec;
    sec.title = leaves[idx].text;
    sec.boundary_path = find_section_boundary(page, leaves[idx], title_folds);
    sec.phrases.push_back(Phrase{leaves[idx].text, leaves[idx].node_path});
    sections.push_back(std::move(sec));
    anchor_leaf.push_back(idx);
  }

  // Each remaining leaf goes to the first section whose boundary holds it.
  std::vector<std::vector<TextLeaf>> member_leaves(sections.size());
  std::vector<TextLeaf> untitled_leaves;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (std::find(anchor_leaf.begin(), anchor_leaf.end(), i) !=
        anchor_leaf.end()) {
      continue;
    }
    bool assigned = false;
    for (std::size_t s = 0; s < sections.size(); ++s) {
      if (path_is_prefix(sections[s].boundary_path, leaves[i].node_path)) {
        member_leaves[s].push_back(leaves[i]);
        assigned = true;
        break;
      }
    }
    if (!assigned) untitled_leaves.push_back(leaves[i]);
  }

  for (std::size_t s = 0; s < sections.size(); ++s) {
    for (Phrase& p : segment_phrases(member_leaves[s])) {
      sections[s].phrases.push_back(std::move(p));
    }
  }

  // Structured data: microdata by position, JSON-LD by title-token match;
  // whatever matches nothing stays available to the untitled section.
  std::vector<MicrodataItem> micro;
  NodePath path;
  collect_microdata(page, path, micro);
  auto ld_props = page_json_ld(page);
  std::vector<bool> ld_used(ld_props.size(), false);

  for (Section& sec : sections) {
    for (const MicrodataItem& item : micro) {
      if (path_is_prefix(sec.boundary_path, item.path)) {
        sec.structured.push_back(item.prop + ": " + item.value);
      }
    }
    for (std::size_t i = 0; i < ld_props.size(); ++i) {
      if (tokens_intersect(ld_props[i].first, sec.title)) {
        sec.structured.push_back(ld_props[i].first + ": " + ld_props[i].second);
        ld_used[i] = true;
      }
    }
  }

  Section untitled;
  untitled.title = kUntitledSection;
  for (Phrase& p : segment_phrases(untitled_leaves)) {
    untitled.phrases.push_back(std::move(p));
  }
  for (const MicrodataItem& item : micro) {
    bool inside = std::any_of(sections.begin(), sections.end(),
                              [&](const Section& sec) {
                                return path_is_prefix(sec.boundary_path,
                                                      item.path);
                              });
    if (!inside) untitled.structured.push_back(item.prop + ": " + item.value);
  }
  for (std::size_t i = 0; i < ld_props.size(); ++i) {
    if (!ld_used[i]) {
      untitled.structured.push_back(ld_props[i].first + ": " +
                                    ld_props[i].second);
    }
  }

  result.sections = std::move(sections);
  if (!untitled.phrases.empty() || !untitled.structured.empty() ||
      result.sections.empty()) {
    result.sections.push_back(std::move(untitled));
  }
  return result;
}

std::vector<PageSections> sectionize_pages_serial(
    const std::vector<UiNode>& pages, const Template& tpl) {
  std::vector<PageSections> out;
  out.reserve(pages.size());
  for (const UiNode& page : pages) out.push_back(sectionize_page(page, tpl));
  return out;
}

std::vector<PageSections> sectionize_pages(const std::vector<UiNode>& pages,
                                           const Template& tpl) {
  std::vector<PageSections> out(pages.size());
  parallel_for(pages.size(),
               [&](std::size_t i) { out[i] = sectionize_page(pages[i], tpl); });
  return out;
}

std::string page_sections_to_json(const PageSections& page) {
  json sections = json::array();
  for (const Section& sec : page.sections) {
    json phrases = json::array();
    for (const Phrase& p : sec.phrases) phrases.push_back(p.text);
    sections.push_back({{"title", sec.title},
                        {"phrases", std::move(phrases)},
                        {"structured", sec.structured}});
  }
  return json{{"sections", std::move(sections)}}.dump(2) + "\n";
}

}  // namespace bew
