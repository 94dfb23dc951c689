#include "bew/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace bew {

std::vector<std::string> normalize_answer(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::ispunct(u)) continue;
    cleaned += static_cast<char>(std::tolower(u));
  }
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : cleaned) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) tokens.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::string& t : tokens) {
    if (t == "a" || t == "an" || t == "the") continue;
    out.push_back(std::move(t));
  }
  return out;
}

double token_f1(const std::vector<std::string>& pred,
                const std::vector<std::string>& gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;
  std::unordered_map<std::string, int> counts;
  for (const std::string& t : gold) ++counts[t];
  int overlap = 0;
  for (const std::string& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  double precision = static_cast<double>(overlap) / pred.size();
  double recall = static_cast<double>(overlap) / gold.size();
  return 2.0 * precision * recall / (precision + recall);
}

int exact_match_at_k(const std::vector<std::string>& predictions,
                     const std::vector<std::string>& golds, int k) {
  std::vector<std::vector<std::string>> gold_tokens;
  gold_tokens.reserve(golds.size());
  for (const std::string& g : golds) gold_tokens.push_back(normalize_answer(g));
  std::size_t limit =
      std::min<std::size_t>(predictions.size(), std::max(0, k));
  for (std::size_t i = 0; i < limit; ++i) {
    auto pred = normalize_answer(predictions[i]);
    for (const auto& gold : gold_tokens) {
      if (pred == gold) return 1;
    }
  }
  return 0;
}

double f1_at_k(const std::vector<std::string>& predictions,
               const std::vector<std::string>& golds, int k) {
  std::vector<std::vector<std::string>> gold_tokens;
  gold_tokens.reserve(golds.size());
  for (const std::string& g : golds) gold_tokens.push_back(normalize_answer(g));
  double best = 0.0;
  std::size_t limit =
      std::min<std::size_t>(predictions.size(), std::max(0, k));
  for (std::size_t i = 0; i < limit; ++i) {
    auto pred = normalize_answer(predictions[i]);
    for (const auto& gold : gold_tokens) {
      best = std::max(best, token_f1(pred, gold));
    }
  }
  return best;
}

namespace {
std::string title_key(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isspace(u)) {
      pending = !out.empty();
      continue;
    }
    if (pending) {
      out += ' ';
      pending = false;
    }
    out += static_cast<char>(std::tolower(u));
  }
  return out;
}
}  // namespace

int sec_precision_at_k(const std::vector<std::string>& predicted_titles,
                       const std::vector<std::string>& gold_titles, int k) {
  std::vector<std::string> golds;
  golds.reserve(gold_titles.size());
  for (const std::string& g : gold_titles) golds.push_back(title_key(g));
  std::size_t limit =
      std::min<std::size_t>(predicted_titles.size(), std::max(0, k));
  for (std::size_t i = 0; i < limit; ++i) {
    std::string pred = title_key(predicted_titles[i]);
    if (std::find(golds.begin(), golds.end(), pred) != golds.end()) return 1;
  }
  return 0;
}

}  // namespace bew
