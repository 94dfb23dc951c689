#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bew {

// SQuAD-style answer normalization: lowercase, strip punctuation, drop
// articles (a/an/the), split on whitespace.
std::vector<std::string> normalize_answer(std::string_view text);

// Bag-of-tokens F1 between one prediction and one gold answer.
// Both empty -> 1; exactly one empty -> 0.
double token_f1(const std::vector<std::string>& pred,
                const std::vector<std::string>& gold);

// 1 iff any of the top-k predictions equals any gold answer after
// normalization.
int exact_match_at_k(const std::vector<std::string>& predictions,
                     const std::vector<std::string>& golds, int k);

// Maximum token F1 over the top-k predictions and all gold answers.
double f1_at_k(const std::vector<std::string>& predictions,
               const std::vector<std::string>& golds, int k);

// 1 iff any top-k predicted section title equals any gold title
// (case/whitespace-insensitive).
int sec_precision_at_k(const std::vector<std::string>& predicted_titles,
                       const std::vector<std::string>& gold_titles, int k);

}  // namespace bew
