#pragma once

#include <string>
#include <vector>

#include "bew/dom.hpp"
#include "bew/template_mining.hpp"

namespace bew {

inline constexpr const char* kUntitledSection = "untitled";

struct Phrase {
  std::string text;
  NodePath origin;

  bool operator==(const Phrase&) const = default;
};

// One titled region of an entity page. Phrase 0 is the title itself for
// titled sections; "untitled" collects everything outside the boundaries.
struct Section {
  std::string title;
  std::vector<Phrase> phrases;
  std::vector<std::string> structured;
  NodePath boundary_path;

  bool operator==(const Section&) const = default;
};

struct PageSections {
  std::string aggregator_id;
  std::string entity_id;
  std::vector<Section> sections;
};

// One phrase per leaf, with sentence-punctuated leaves split further.
std::vector<Phrase> segment_phrases(const std::vector<TextLeaf>& leaves);

// Applies a mined template to a boilerplate-stripped page. Sections appear
// in document order of their title leaf; the first occurrence of a
// duplicated title wins; structured data annotations are attached.
PageSections sectionize_page(const UiNode& page, const Template& tpl);

std::vector<PageSections> sectionize_pages(const std::vector<UiNode>& pages,
                                           const Template& tpl);
std::vector<PageSections> sectionize_pages_serial(
    const std::vector<UiNode>& pages, const Template& tpl);

// "property: value" strings for microdata nodes inside the section boundary
// and JSON-LD properties whose name shares a token with the section title.
// Malformed JSON-LD blocks are skipped.
std::vector<std::string> extract_structured_data(const UiNode& page,
                                                 const Section& section);

// Debug dump: {"sections":[{"title","phrases","structured"}]}.
std::string page_sections_to_json(const PageSections& page);

}  // namespace bew
