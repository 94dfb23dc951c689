#include "bew/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "bew/errors.hpp"
#include "bew/parallel.hpp"
#include "bew/rng.hpp"
#include "bew/text.hpp"

namespace bew {
namespace {

void l2_normalize(std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq <= 0.0) {
    v.assign(v.size(), 0.0);
    v[0] = 1.0;
    return;
  }
  double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

// Character-trigram hashing over '#'-padded words. Favors literal matches:
// shared substrings land in shared buckets.
std::vector<double> lexical_vector(const EmbedderSpec& spec,
                                   const std::string& text) {
  std::vector<double> v(spec.dimension, 0.0);
  std::uint64_t seed = mix_seed(spec.hash_seed, 0x5EED);
  for (const std::string& word : word_tokens(text)) {
    std::string padded = "#" + word + "#";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
      std::uint64_t h = hash64(std::string_view(padded).substr(i, 3), seed);
      v[h % spec.dimension] += 1.0;
    }
  }
  l2_normalize(v);
  return v;
}

// Word-vector file rows: token followed by whitespace-separated floats.
using Vocabulary = std::unordered_map<std::string, std::vector<double>>;

const Vocabulary& vocabulary_for(const std::string& path, int dimension) {
  static std::mutex mu;
  static std::unordered_map<std::string, Vocabulary> registry;
  std::lock_guard<std::mutex> lock(mu);
  std::string key = path + "#" + std::to_string(dimension);
  auto it = registry.find(key);
  if (it != registry.end()) return it->second;

  Vocabulary vocab;
  std::ifstream in(path);
  if (!in) {
    std::cerr << "[bew] word-vector file unreadable: " << path << "\n";
  } else {
    std::string line;
    bool warned = false;
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string token;
      if (!(row >> token)) continue;
      std::vector<double> vec;
      double x;
      while (row >> x) vec.push_back(x);
      if (static_cast<int>(vec.size()) != dimension) {
        if (!warned) {
          std::cerr << "[bew] skipping word vectors with dimension "
                    << vec.size() << " (expected " << dimension << ")\n";
          warned = true;
        }
        continue;
      }
      l2_normalize(vec);
      vocab.emplace(to_lower_ascii(token), std::move(vec));
    }
  }
  return registry.emplace(key, std::move(vocab)).first->second;
}

std::vector<double> hashed_word_vector(const EmbedderSpec& spec,
                                       const std::string& word) {
  SplitMix64 rng(mix_seed(hash64(word), spec.hash_seed));
  std::vector<double> v(spec.dimension);
  for (double& x : v) x = rng.next_signed();
  l2_normalize(v);
  return v;
}

// Mean of per-word unit vectors, renormalized. Known words come from the
// optional vocabulary file; everything else gets a hashed stand-in.
std::vector<double> semantic_vector(const EmbedderSpec& spec,
                                    const std::string& text) {
  std::vector<double> acc(spec.dimension, 0.0);
  const Vocabulary* vocab = nullptr;
  if (!spec.vocab_path.empty()) {
    vocab = &vocabulary_for(spec.vocab_path, spec.dimension);
  }
  for (const std::string& word : word_tokens(text)) {
    const std::vector<double>* wv = nullptr;
    if (vocab) {
      auto it = vocab->find(word);
      if (it != vocab->end()) wv = &it->second;
    }
    std::vector<double> hashed;
    if (!wv) {
      hashed = hashed_word_vector(spec, word);
      wv = &hashed;
    }
    for (int d = 0; d < spec.dimension; ++d) acc[d] += (*wv)[d];
  }
  l2_normalize(acc);
  return acc;
}

std::vector<double> compute_vector(const EmbedderSpec& spec,
                                   const std::string& normalized) {
  if (spec.provider_id == "lexical") return lexical_vector(spec, normalized);
  if (spec.provider_id == "semantic") return semantic_vector(spec, normalized);
  if (spec.is_remote()) {
    auto vectors = remote_embed_batch(spec, {normalized});
    return std::move(vectors[0]);
  }
  throw Error("unknown embedding provider: " + spec.provider_id);
}

std::string require_text(const std::string& text) {
  std::string normalized = normalize_ws(text);
  if (normalized.empty()) {
    throw EmptyTextError("cannot embed empty text");
  }
  return normalized;
}

}  // namespace

std::string ablation_name(Ablation a) {
  switch (a) {
    case Ablation::kLexicalOnly:
      return "lexical-only";
    case Ablation::kSemanticOnly:
      return "semantic-only";
    case Ablation::kNoPrior:
      return "no-prior";
    default:
      return "none";
  }
}

Ablation ablation_from_name(const std::string& name) {
  if (name == "lexical-only" || name == "lexical_only")
    return Ablation::kLexicalOnly;
  if (name == "semantic-only" || name == "semantic_only")
    return Ablation::kSemanticOnly;
  if (name == "no-prior" || name == "no_prior") return Ablation::kNoPrior;
  if (name == "none" || name.empty()) return Ablation::kNone;
  throw Error("unknown ablation mode: " + name);
}

std::string EmbedderSpec::cache_key() const {
  return provider_id + "/" + std::to_string(dimension) + "/" +
         std::to_string(hash_seed) + "/" + vocab_path + "/" + endpoint;
}

Embedding embed(const EmbedderSpec& spec, const std::string& text) {
  if (spec.dimension < 16) {
    throw Error("embedder dimension must be >= 16");
  }
  std::string normalized = require_text(text);
  Embedding e;
  e.provider_id = spec.provider_id;
  e.vector = compute_vector(spec, normalized);
  return e;
}

std::vector<Embedding> embed_batch_serial(const EmbedderSpec& spec,
                                          const std::vector<std::string>& texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(embed(spec, t));
  return out;
}

std::vector<Embedding> embed_batch(const EmbedderSpec& spec,
                                   const std::vector<std::string>& texts) {
  if (spec.is_remote()) {
    // One request pipeline; remote_embed_batch bounds its own parallelism.
    std::vector<Embedding> out(texts.size());
    auto vectors = remote_embed_batch(spec, texts);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      out[i] = Embedding{std::move(vectors[i]), spec.provider_id};
    }
    return out;
  }
  std::vector<Embedding> out(texts.size());
  parallel_for(texts.size(),
               [&](std::size_t i) { out[i] = embed(spec, texts[i]); });
  return out;
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.provider_id != b.provider_id || a.vector.size() != b.vector.size()) {
    throw DimensionMismatchError("cosine requires same provider and dimension");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.vector.size(); ++i) {
    dot += a.vector[i] * b.vector[i];
  }
  return std::clamp(dot, -1.0, 1.0);
}

double combined_match(double lexical_cos, double semantic_cos,
                      double lexical_weight, double semantic_weight,
                      Ablation ablation) {
  double value = 0.0;
  switch (ablation) {
    case Ablation::kLexicalOnly:
      value = lexical_cos;
      break;
    case Ablation::kSemanticOnly:
      value = semantic_cos;
      break;
    default: {
      double sum = lexical_weight + semantic_weight;
      if (sum <= 0.0) {
        value = (lexical_cos + semantic_cos) / 2.0;
      } else {
        value = (lexical_weight * lexical_cos + semantic_weight * semantic_cos) /
                sum;
      }
      break;
    }
  }
  return std::max(0.0, value);
}

Matcher::Matcher(EmbedderSpec lexical, EmbedderSpec semantic,
                 double lexical_weight, double semantic_weight,
                 Ablation ablation)
    : lexical_(std::move(lexical)),
      semantic_(std::move(semantic)),
      lexical_weight_(lexical_weight),
      semantic_weight_(semantic_weight),
      ablation_(ablation) {}

const std::vector<double>& Matcher::cached_embedding(
    const EmbedderSpec& spec, const std::string& text) const {
  std::string key = spec.cache_key() + '\x1F' + normalize_ws(text);
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  std::vector<double> vec;
  try {
    vec = embed(spec, text).vector;
  } catch (const RemoteUnavailableError&) {
    if (spec.fallback_provider.empty()) throw;
    EmbedderSpec fallback = spec;
    fallback.provider_id = spec.fallback_provider;
    fallback.endpoint.clear();
    vec = embed(fallback, text).vector;
  }
  std::unique_lock lock(mutex_);
  return cache_.emplace(std::move(key), std::move(vec)).first->second;
}

double Matcher::match(const std::string& q, const std::string& t) const {
  auto unit_dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return std::clamp(dot, -1.0, 1.0);
  };
  double lex = 0.0, sem = 0.0;
  if (ablation_ != Ablation::kSemanticOnly) {
    lex = unit_dot(cached_embedding(lexical_, q), cached_embedding(lexical_, t));
  }
  if (ablation_ != Ablation::kLexicalOnly) {
    sem = unit_dot(cached_embedding(semantic_, q),
                   cached_embedding(semantic_, t));
  }
  return combined_match(lex, sem, lexical_weight_, semantic_weight_, ablation_);
}

}  // namespace bew
