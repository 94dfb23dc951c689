#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bew/corpus.hpp"
#include "bew/sectionize.hpp"
#include "bew/semantic.hpp"

namespace bew {

struct MatchConfig {
  int sample_n = 20;          // N: sample pages per aggregator
  int top_k_sections = 3;     // k: top sections in a page score
  int top_m_aggregators = 5;  // M: aggregators consulted for answers
  double theta = 0.5;         // immutable threshold (template mining)
  std::uint64_t seed = 0;
  Ablation ablation = Ablation::kNone;
  // When set, the aggregator score averages only the top-k page scores
  // instead of all N.
  std::optional<int> agg_top_k;

  EmbedderSpec lexical;
  EmbedderSpec semantic;
  double lexical_weight = 0.5;
  double semantic_weight = 0.5;

  MatchConfig() { semantic.provider_id = "semantic"; }

  Matcher make_matcher() const {
    return Matcher(lexical, semantic, lexical_weight, semantic_weight,
                   ablation);
  }
};

// Longest-match, token-boundary replacement of entity names with "it"
// ("its" for possessives). Unmatched questions come back unchanged.
std::string deentity(const std::string& question,
                     const std::vector<EntityRef>& entities);

// sum(v_i^2) / sum(v_i); 0 when the denominator vanishes.
double self_weighted_avg(std::span<const double> values);

// Self-weighted average of match(q, phrase) over the section's phrases plus
// its structured annotations.
double sec_score(const std::string& q, const Section& s, const TextMatcher& m);

// Self-weighted average of the top-k section scores.
double page_score(const std::string& q, const PageSections& p,
                  const TextMatcher& m, int k);

struct PageScoring {
  std::vector<double> section_scores;
  double score = 0.0;
};

std::vector<PageScoring> score_pages(
    const std::string& q,
    const std::vector<std::shared_ptr<const PageSections>>& pages,
    const TextMatcher& m, int k);
std::vector<PageScoring> score_pages_serial(
    const std::string& q,
    const std::vector<std::shared_ptr<const PageSections>>& pages,
    const TextMatcher& m, int k);

// Mean page score (or mean of the top agg_top_k page scores when set).
double agg_score(const std::string& q,
                 const std::vector<std::shared_ptr<const PageSections>>& pages,
                 const TextMatcher& m, int k,
                 std::optional<int> agg_top_k = std::nullopt);

// Mean sec_score of same-titled sections in the sample; 0 when none match.
double section_prior(const std::string& q, const std::string& title,
                     const std::vector<std::shared_ptr<const PageSections>>&
                         sample_pages,
                     const TextMatcher& m);

double sec_final_score(double sec, double prior, const MatchConfig& cfg);

double ans_score(double match, double sec_final);

struct RankedAggregator {
  std::string id;
  double score = 0.0;
  std::vector<std::shared_ptr<const PageSections>> sample_pages;
  std::vector<PageScoring> sample_scoring;
};

// Scores each templated aggregator over a seeded page sample (target entity
// excluded) and sorts by score, ties by id. Throws NoTemplatesError when no
// aggregator is usable.
std::vector<RankedAggregator> rank_aggregators(const std::string& q_agnostic,
                                               const CorpusStore& corpus,
                                               const MatchConfig& cfg,
                                               const TextMatcher& m,
                                               const std::string&
                                                   exclude_entity = "");

struct ScoredSection {
  std::string title;
  std::string aggregator_id;
  std::string entity_id;
  std::size_t section_index = 0;
  double sec_score = 0.0;
  double prior = 0.0;
  double final_score = 0.0;
};

struct AnswerCandidate {
  std::string text;
  std::string section_title;
  std::string aggregator_id;
  std::string entity_id;
  double match_score = 0.0;
  double sec_final = 0.0;
  double score = 0.0;
  std::size_t aggregator_rank = 0;
  std::size_t section_index = 0;
  std::size_t phrase_index = 0;
};

struct AnswerResult {
  std::string question;
  std::string deentitied;
  std::vector<std::pair<std::string, double>> aggregator_ranking;
  std::vector<ScoredSection> sections;   // final score descending
  std::vector<AnswerCandidate> answers;  // ans score descending
};

// Full pipeline: deentity, rank aggregators, pick the top-M with entity
// pages, score their sections with priors, rank candidate phrases.
AnswerResult answer(const std::string& question, const EntityRef& entity,
                    const CorpusStore& corpus, const MatchConfig& cfg,
                    const TextMatcher& m);

}  // namespace bew
