#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "bew/dom.hpp"

namespace bew {

// Styling signature of one recurring section title.
struct TitleSignature {
  std::string text;
  double min_font_size_px = 0.0;
  bool bold = false;
  double page_frequency = 0.0;  // fraction of sampled pages containing it

  bool operator==(const TitleSignature&) const = default;
};

// Per-aggregator list of title immutables, mined offline from a page sample.
struct Template {
  std::string aggregator_id;
  int sample_size = 0;
  std::string created_at;
  std::vector<TitleSignature> titles;

  bool operator==(const Template&) const = default;
};

// Number of distinct pages each normalized leaf text appears in. Keys are
// fold_key() forms; values count pages, not occurrences.
using FrequencyMap = std::map<std::string, int>;

FrequencyMap build_frequency_map(const std::vector<UiNode>& pages);
FrequencyMap build_frequency_map_serial(const std::vector<UiNode>& pages);

// Texts whose page frequency reaches theta; 2..60 code points long.
std::set<std::string> select_immutables(const FrequencyMap& freq,
                                        int n_pages, double theta);

// Immutables that look like titles in a majority of their occurrences:
// heading tag, or larger than the page-median leaf font in bold (>= 600).
std::vector<TitleSignature> select_title_immutables(
    const std::set<std::string>& immutables, const std::vector<UiNode>& pages);

// Maximal ancestor of the title leaf that gains at least one non-title text
// leaf without swallowing another title; falls back to the leaf's parent.
NodePath find_section_boundary(const UiNode& page, const TextLeaf& title_leaf,
                               const std::set<std::string>& all_titles);

// Full mining pass over boilerplate-stripped pages. Throws EmptyTemplateError
// when nothing title-like recurs. `created_at` is recorded as given so
// mining is reproducible; callers stamp the wall clock when persisting.
Template extract_template(const std::vector<UiNode>& pages,
                          const std::string& aggregator_id, double theta,
                          const std::string& created_at = "");

std::string template_to_json(const Template& tpl);
Template template_from_json(const std::string& json_text);

}  // namespace bew
