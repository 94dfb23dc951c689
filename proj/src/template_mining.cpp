#include "bew/template_mining.hpp"

#include <algorithm>
#include <limits>
#include <nlohmann/json.hpp>

#include "bew/errors.hpp"
#include "bew/parallel.hpp"
#include "bew/text.hpp"

namespace bew {
namespace {

using json = nlohmann::json;

std::set<std::string> page_text_set(const UiNode& page) {
  std::set<std::string> texts;
  for (const TextLeaf& leaf : collect_text_leaves(page)) {
    texts.insert(fold_key(leaf.text));
  }
  return texts;
}

FrequencyMap merge_page_sets(const std::vector<std::set<std::string>>& sets) {
  FrequencyMap freq;
  for (const auto& texts : sets) {
    for (const std::string& t : texts) ++freq[t];
  }
  return freq;
}

double median_font_size(const std::vector<TextLeaf>& leaves) {
  if (leaves.empty()) return 16.0;
  std::vector<double> sizes;
  sizes.reserve(leaves.size());
  for (const TextLeaf& leaf : leaves) sizes.push_back(leaf.style.font_size_px);
  std::sort(sizes.begin(), sizes.end());
  std::size_t n = sizes.size();
  if (n % 2 == 1) return sizes[n / 2];
  return (sizes[n / 2 - 1] + sizes[n / 2]) / 2.0;
}

bool title_like(const StyleMap& style, double page_median) {
  if (style.is_heading_tag) return true;
  return style.font_size_px > page_median && style.font_weight >= 600;
}

}  // namespace

FrequencyMap build_frequency_map_serial(const std::vector<UiNode>& pages) {
  std::vector<std::set<std::string>> sets;
  sets.reserve(pages.size());
  for (const UiNode& page : pages) sets.push_back(page_text_set(page));
  return merge_page_sets(sets);
}

FrequencyMap build_frequency_map(const std::vector<UiNode>& pages) {
  std::vector<std::set<std::string>> sets(pages.size());
  parallel_for(pages.size(),
               [&](std::size_t i) { sets[i] = page_text_set(pages[i]); });
  return merge_page_sets(sets);
}

std::set<std::string> select_immutables(const FrequencyMap& freq, int n_pages,
                                        double theta) {
  std::set<std::string> out;
  if (n_pages <= 0) return out;
  for (const auto& [text, count] : freq) {
    double page_frequency = static_cast<double>(count) / n_pages;
    if (page_frequency < theta) continue;
    std::size_t len = utf8_length(text);
    if (len < 2 || len > 60) continue;
    out.insert(text);
  }
  return out;
}

std::vector<TitleSignature> select_title_immutables(
    const std::set<std::string>& immutables,
    const std::vector<UiNode>& pages) {
  struct Stats {
    int occurrences = 0;
    int title_like_occurrences = 0;
    int bold_qualifying = 0;
    double min_qualifying_size = std::numeric_limits<double>::max();
    std::set<int> pages_seen;
    std::pair<int, int> first_pos{std::numeric_limits<int>::max(), 0};
    std::string display;
  };
  std::map<std::string, Stats> stats;

  for (std::size_t p = 0; p < pages.size(); ++p) {
    auto leaves = collect_text_leaves(pages[p]);
    double median = median_font_size(leaves);
    for (std::size_t l = 0; l < leaves.size(); ++l) {
      std::string key = fold_key(leaves[l].text);
      if (!immutables.count(key)) continue;
      Stats& st = stats[key];
      ++st.occurrences;
      st.pages_seen.insert(static_cast<int>(p));
      std::pair<int, int> pos{static_cast<int>(p), static_cast<int>(l)};
      if (pos < st.first_pos) {
        st.first_pos = pos;
        st.display = leaves[l].text;
      }
      if (title_like(leaves[l].style, median)) {
        ++st.title_like_occurrences;
        st.min_qualifying_size =
            std::min(st.min_qualifying_size, leaves[l].style.font_size_px);
        if (leaves[l].style.font_weight >= 600) ++st.bold_qualifying;
      }
    }
  }

  std::vector<TitleSignature> titles;
  std::vector<std::pair<int, int>> order_keys;
  for (const auto& [key, st] : stats) {
    if (st.occurrences == 0) continue;
    if (2 * st.title_like_occurrences <= st.occurrences) continue;
    TitleSignature sig;
    sig.text = st.display;
    sig.min_font_size_px = st.min_qualifying_size;
    sig.bold = 2 * st.bold_qualifying >= st.title_like_occurrences;
    sig.page_frequency =
        pages.empty() ? 0.0
                      : static_cast<double>(st.pages_seen.size()) /
                            static_cast<double>(pages.size());
    titles.push_back(std::move(sig));
    order_keys.push_back(st.first_pos);
  }

  std::vector<std::size_t> idx(titles.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (titles[a].page_frequency != titles[b].page_frequency) {
      return titles[a].page_frequency > titles[b].page_frequency;
    }
    return order_keys[a] < order_keys[b];
  });
  std::vector<TitleSignature> ordered;
  ordered.reserve(titles.size());
  for (std::size_t i : idx) ordered.push_back(std::move(titles[i]));
  return ordered;
}

NodePath find_section_boundary(const UiNode& page, const TextLeaf& title_leaf,
                               const std::set<std::string>& all_titles) {
  const UiNode* node = nullptr;
  try {
    node = &resolve_path(page, title_leaf.node_path);
  } catch (const PathError&) {
    throw PathError("title leaf path does not resolve");
  }
  if (!node->is_text() || fold_key(*node->text) != fold_key(title_leaf.text)) {
    throw PathError("title leaf path does not resolve to the title text");
  }

  auto leaves = collect_text_leaves(page);
  std::vector<const TextLeaf*> other_titles;
  std::vector<const TextLeaf*> non_titles;
  for (const TextLeaf& leaf : leaves) {
    if (leaf.node_path == title_leaf.node_path) continue;
    if (all_titles.count(fold_key(leaf.text))) {
      other_titles.push_back(&leaf);
    } else {
      non_titles.push_back(&leaf);
    }
  }

  const NodePath& path = title_leaf.node_path;
  NodePath best;
  bool found = false;
  for (std::size_t depth = path.size(); depth-- > 0;) {
    NodePath prefix(path.begin(), path.begin() + depth);
    bool blocked = std::any_of(
        other_titles.begin(), other_titles.end(),
        [&](const TextLeaf* t) { return path_is_prefix(prefix, t->node_path); });
    if (blocked) break;
    bool gains_text = std::any_of(
        non_titles.begin(), non_titles.end(),
        [&](const TextLeaf* t) { return path_is_prefix(prefix, t->node_path); });
    if (gains_text) {
      best = prefix;
      found = true;
    }
  }
  if (found) return best;
  if (path.empty()) return path;
  return NodePath(path.begin(), path.end() - 1);
}

Template extract_template(const std::vector<UiNode>& pages,
                          const std::string& aggregator_id, double theta,
                          const std::string& created_at) {
  if (pages.size() < 2) {
    throw Error("template mining needs at least 2 pages");
  }
  FrequencyMap freq = build_frequency_map(pages);
  std::set<std::string> immutables =
      select_immutables(freq, static_cast<int>(pages.size()), theta);
  std::vector<TitleSignature> titles =
      select_title_immutables(immutables, pages);
  if (titles.empty()) {
    throw EmptyTemplateError("no title immutables found for " + aggregator_id);
  }
  Template tpl;
  tpl.aggregator_id = aggregator_id;
  tpl.sample_size = static_cast<int>(pages.size());
  tpl.created_at = created_at;
  tpl.titles = std::move(titles);
  return tpl;
}

std::string template_to_json(const Template& tpl) {
  json j;
  j["aggregator"] = tpl.aggregator_id;
  j["sample_size"] = tpl.sample_size;
  j["created_at"] = tpl.created_at;
  json titles = json::array();
  for (const TitleSignature& sig : tpl.titles) {
    titles.push_back({{"text", sig.text},
                      {"min_font_size_px", sig.min_font_size_px},
                      {"bold", sig.bold},
                      {"page_frequency", sig.page_frequency}});
  }
  j["titles"] = std::move(titles);
  return j.dump(2) + "\n";
}

Template template_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  Template tpl;
  tpl.aggregator_id = j.at("aggregator").get<std::string>();
  tpl.sample_size = j.at("sample_size").get<int>();
  tpl.created_at = j.value("created_at", "");
  for (const json& t : j.at("titles")) {
    TitleSignature sig;
    sig.text = t.at("text").get<std::string>();
    sig.min_font_size_px = t.at("min_font_size_px").get<double>();
    sig.bold = t.at("bold").get<bool>();
    sig.page_frequency = t.at("page_frequency").get<double>();
    tpl.titles.push_back(std::move(sig));
  }
  return tpl;
}

}  // namespace bew
