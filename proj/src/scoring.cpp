#include "bew/scoring.hpp"

#include <algorithm>
#include <cctype>

#include "bew/errors.hpp"
#include "bew/parallel.hpp"
#include "bew/rng.hpp"
#include "bew/text.hpp"

namespace bew {
namespace {

bool is_word_byte(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

// Case-insensitive substring check at a fixed position.
bool matches_at(const std::string& haystack, std::size_t pos,
                const std::string& needle_lower) {
  if (pos + needle_lower.size() > haystack.size()) return false;
  for (std::size_t i = 0; i < needle_lower.size(); ++i) {
    char c = haystack[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != needle_lower[i]) return false;
  }
  return true;
}

// Consumes "'s" / unicode-apostrophe "s" at pos; returns consumed length.
std::size_t possessive_length(const std::string& s, std::size_t pos) {
  if (pos + 1 < s.size() && s[pos] == '\'' &&
      (s[pos + 1] == 's' || s[pos + 1] == 'S')) {
    return 2;
  }
  static const std::string kRightQuote = "\xE2\x80\x99";  // U+2019
  if (pos + 3 < s.size() && s.compare(pos, 3, kRightQuote) == 0 &&
      (s[pos + 3] == 's' || s[pos + 3] == 'S')) {
    return 4;
  }
  return 0;
}

std::vector<double> section_matches(const std::string& q, const Section& s,
                                    const TextMatcher& m) {
  std::vector<double> values;
  values.reserve(s.phrases.size() + s.structured.size());
  for (const Phrase& p : s.phrases) values.push_back(m.match(q, p.text));
  for (const std::string& annotation : s.structured) {
    values.push_back(m.match(q, annotation));
  }
  return values;
}

double prior_from_scoring(const std::string& title,
                          const std::vector<std::shared_ptr<const PageSections>>&
                              pages,
                          const std::vector<PageScoring>& scoring) {
  std::string key = fold_key(title);
  double sum = 0.0;
  int count = 0;
  for (std::size_t p = 0; p < pages.size(); ++p) {
    const auto& sections = pages[p]->sections;
    for (std::size_t s = 0; s < sections.size(); ++s) {
      if (fold_key(sections[s].title) == key) {
        sum += scoring[p].section_scores[s];
        ++count;
      }
    }
  }
  return count == 0 ? 0.0 : sum / count;
}

}  // namespace

std::string deentity(const std::string& question,
                     const std::vector<EntityRef>& entities) {
  std::vector<std::string> names;
  for (const EntityRef& e : entities) {
    if (!e.name.empty()) names.push_back(to_lower_ascii(e.name));
    for (const std::string& alias : e.aliases) {
      if (!alias.empty()) names.push_back(to_lower_ascii(alias));
    }
  }
  std::sort(names.begin(), names.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  names.erase(std::unique(names.begin(), names.end()), names.end());
  if (names.empty()) return question;

  std::string out;
  std::size_t i = 0;
  while (i < question.size()) {
    bool at_boundary = i == 0 || !is_word_byte(question[i - 1]);
    bool replaced = false;
    if (at_boundary) {
      for (const std::string& name : names) {
        if (!matches_at(question, i, name)) continue;
        std::size_t end = i + name.size();
        std::size_t poss = possessive_length(question, end);
        if (poss == 0 && end < question.size() && is_word_byte(question[end])) {
          continue;  // mid-token match
        }
        out += poss > 0 ? "its" : "it";
        i = end + poss;
        replaced = true;
        break;
      }
    }
    if (!replaced) out += question[i++];
  }
  return out;
}

double self_weighted_avg(std::span<const double> values) {
  double sum = 0.0, sum_sq = 0.0;
  for (double v : values) {
    sum += v;
    sum_sq += v * v;
  }
  return sum == 0.0 ? 0.0 : sum_sq / sum;
}

double sec_score(const std::string& q, const Section& s, const TextMatcher& m) {
  std::vector<double> values = section_matches(q, s, m);
  if (values.empty()) return 0.0;
  return self_weighted_avg(values);
}

double page_score(const std::string& q, const PageSections& p,
                  const TextMatcher& m, int k) {
  std::vector<double> scores;
  scores.reserve(p.sections.size());
  for (const Section& s : p.sections) scores.push_back(sec_score(q, s, m));
  std::sort(scores.begin(), scores.end(), std::greater<>());
  if (k > 0 && scores.size() > static_cast<std::size_t>(k)) {
    scores.resize(static_cast<std::size_t>(k));
  }
  return self_weighted_avg(scores);
}

std::vector<PageScoring> score_pages_serial(
    const std::string& q,
    const std::vector<std::shared_ptr<const PageSections>>& pages,
    const TextMatcher& m, int k) {
  std::vector<PageScoring> out(pages.size());
  for (std::size_t i = 0; i < pages.size(); ++i) {
    PageScoring& ps = out[i];
    ps.section_scores.reserve(pages[i]->sections.size());
    for (const Section& s : pages[i]->sections) {
      ps.section_scores.push_back(sec_score(q, s, m));
    }
    std::vector<double> top = ps.section_scores;
    std::sort(top.begin(), top.end(), std::greater<>());
    if (k > 0 && top.size() > static_cast<std::size_t>(k)) {
      top.resize(static_cast<std::size_t>(k));
    }
    ps.score = self_weighted_avg(top);
  }
  return out;
}

std::vector<PageScoring> score_pages(
    const std::string& q,
    const std::vector<std::shared_ptr<const PageSections>>& pages,
    const TextMatcher& m, int k) {
  std::vector<PageScoring> out(pages.size());
  parallel_for(pages.size(), [&](std::size_t i) {
    PageScoring ps;
    ps.section_scores.reserve(pages[i]->sections.size());
    for (const Section& s : pages[i]->sections) {
      ps.section_scores.push_back(sec_score(q, s, m));
    }
    std::vector<double> top = ps.section_scores;
    std::sort(top.begin(), top.end(), std::greater<>());
    if (k > 0 && top.size() > static_cast<std::size_t>(k)) {
      top.resize(static_cast<std::size_t>(k));
    }
    ps.score = self_weighted_avg(top);
    out[i] = std::move(ps);
  });
  return out;
}

double agg_score(const std::string& q,
                 const std::vector<std::shared_ptr<const PageSections>>& pages,
                 const TextMatcher& m, int k, std::optional<int> agg_top_k) {
  if (pages.empty()) return 0.0;
  std::vector<PageScoring> scoring = score_pages(q, pages, m, k);
  std::vector<double> scores;
  scores.reserve(scoring.size());
  for (const PageScoring& ps : scoring) scores.push_back(ps.score);
  if (agg_top_k && *agg_top_k > 0 &&
      scores.size() > static_cast<std::size_t>(*agg_top_k)) {
    std::sort(scores.begin(), scores.end(), std::greater<>());
    scores.resize(static_cast<std::size_t>(*agg_top_k));
  }
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

double section_prior(const std::string& q, const std::string& title,
                     const std::vector<std::shared_ptr<const PageSections>>&
                         sample_pages,
                     const TextMatcher& m) {
  std::string key = fold_key(title);
  double sum = 0.0;
  int count = 0;
  for (const auto& page : sample_pages) {
    for (const Section& s : page->sections) {
      if (fold_key(s.title) == key) {
        sum += sec_score(q, s, m);
        ++count;
      }
    }
  }
  return count == 0 ? 0.0 : sum / count;
}

double sec_final_score(double sec, double prior, const MatchConfig& cfg) {
  if (cfg.ablation == Ablation::kNoPrior) return sec;
  return sec + prior;
}

double ans_score(double match, double sec_final) { return match + sec_final; }

std::vector<RankedAggregator> rank_aggregators(const std::string& q_agnostic,
                                               const CorpusStore& corpus,
                                               const MatchConfig& cfg,
                                               const TextMatcher& m,
                                               const std::string&
                                                   exclude_entity) {
  std::vector<RankedAggregator> ranked;
  for (const auto& [agg_id, tpl] : corpus.templates()) {
    auto agg_it = corpus.index().aggregators.find(agg_id);
    if (agg_it == corpus.index().aggregators.end()) continue;

    std::vector<std::string> slugs;
    for (const auto& [slug, ref] : agg_it->second) {
      if (!exclude_entity.empty() && slug == exclude_entity) continue;
      slugs.push_back(slug);
    }
    auto picks =
        sample_indices(slugs.size(), static_cast<std::size_t>(cfg.sample_n),
                       mix_seed(cfg.seed, hash64(agg_id)));
    std::sort(picks.begin(), picks.end());

    RankedAggregator ra;
    ra.id = agg_id;
    for (std::size_t idx : picks) {
      auto sections = corpus.sections_for(agg_id, slugs[idx]);
      if (sections) ra.sample_pages.push_back(std::move(sections));
    }
    if (ra.sample_pages.empty()) continue;

    ra.sample_scoring =
        score_pages(q_agnostic, ra.sample_pages, m, cfg.top_k_sections);
    std::vector<double> scores;
    scores.reserve(ra.sample_scoring.size());
    for (const PageScoring& ps : ra.sample_scoring) scores.push_back(ps.score);
    if (cfg.agg_top_k && *cfg.agg_top_k > 0 &&
        scores.size() > static_cast<std::size_t>(*cfg.agg_top_k)) {
      std::sort(scores.begin(), scores.end(), std::greater<>());
      scores.resize(static_cast<std::size_t>(*cfg.agg_top_k));
    }
    double sum = 0.0;
    for (double s : scores) sum += s;
    ra.score = sum / static_cast<double>(scores.size());
    ranked.push_back(std::move(ra));
  }
  if (ranked.empty()) {
    throw NoTemplatesError("no aggregator has a usable template and pages");
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const RankedAggregator& a, const RankedAggregator& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.id < b.id;
            });
  return ranked;
}

AnswerResult answer(const std::string& question, const EntityRef& entity,
                    const CorpusStore& corpus, const MatchConfig& cfg,
                    const TextMatcher& m) {
  AnswerResult result;
  result.question = question;

  std::vector<EntityRef> repo = corpus.entities();
  repo.push_back(entity);
  result.deentitied = deentity(question, repo);
  const std::string& q = result.deentitied;

  std::string slug = slugify(entity.name);
  std::vector<RankedAggregator> ranked =
      rank_aggregators(q, corpus, cfg, m, slug);
  for (const RankedAggregator& ra : ranked) {
    result.aggregator_ranking.emplace_back(ra.id, ra.score);
  }

  std::vector<const RankedAggregator*> selected;
  for (std::size_t r = 0;
       r < ranked.size() &&
       r < static_cast<std::size_t>(std::max(1, cfg.top_m_aggregators));
       ++r) {
    if (corpus.has_entity_page(ranked[r].id, slug)) {
      selected.push_back(&ranked[r]);
    }
  }
  if (selected.empty()) {
    throw NoEntityPagesError("no top-" + std::to_string(cfg.top_m_aggregators) +
                             " aggregator has a page for " + entity.name);
  }

  for (std::size_t rank = 0; rank < selected.size(); ++rank) {
    const RankedAggregator& ra = *selected[rank];
    auto page = corpus.sections_for(ra.id, slug);
    if (!page) continue;
    for (std::size_t si = 0; si < page->sections.size(); ++si) {
      const Section& sec = page->sections[si];
      ScoredSection scored;
      scored.title = sec.title;
      scored.aggregator_id = ra.id;
      scored.entity_id = slug;
      scored.section_index = si;
      scored.sec_score = sec_score(q, sec, m);
      scored.prior =
          prior_from_scoring(sec.title, ra.sample_pages, ra.sample_scoring);
      scored.final_score = sec_final_score(scored.sec_score, scored.prior, cfg);
      result.sections.push_back(scored);

      // Candidate phrases: body text for titled sections (annotations only
      // when the section has no body phrase); every phrase of "untitled".
      std::vector<std::pair<std::string, std::size_t>> candidates;
      std::size_t first = sec.title == kUntitledSection ? 0 : 1;
      for (std::size_t pi = first; pi < sec.phrases.size(); ++pi) {
        candidates.emplace_back(sec.phrases[pi].text, pi);
      }
      if (candidates.empty()) {
        for (std::size_t ai = 0; ai < sec.structured.size(); ++ai) {
          candidates.emplace_back(sec.structured[ai],
                                  sec.phrases.size() + ai);
        }
      }
      for (const auto& [text, pi] : candidates) {
        AnswerCandidate cand;
        cand.text = text;
        cand.section_title = sec.title;
        cand.aggregator_id = ra.id;
        cand.entity_id = slug;
        cand.match_score = m.match(q, text);
        cand.sec_final = scored.final_score;
        cand.score = ans_score(cand.match_score, cand.sec_final);
        cand.aggregator_rank = rank;
        cand.section_index = si;
        cand.phrase_index = pi;
        result.answers.push_back(std::move(cand));
      }
    }
  }

  std::stable_sort(result.sections.begin(), result.sections.end(),
                   [](const ScoredSection& a, const ScoredSection& b) {
                     return a.final_score > b.final_score;
                   });
  std::sort(result.answers.begin(), result.answers.end(),
            [](const AnswerCandidate& a, const AnswerCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.sec_final != b.sec_final) return a.sec_final > b.sec_final;
              if (a.aggregator_rank != b.aggregator_rank) {
                return a.aggregator_rank < b.aggregator_rank;
              }
              if (a.section_index != b.section_index) {
                return a.section_index < b.section_index;
              }
              return a.phrase_index < b.phrase_index;
            });
  return result;
}

}  // namespace bew
