#pragma once

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace bew {

enum class Ablation { kNone, kLexicalOnly, kSemanticOnly, kNoPrior };

std::string ablation_name(Ablation a);
Ablation ablation_from_name(const std::string& name);

struct Embedding {
  std::vector<double> vector;
  std::string provider_id;
};

struct EmbedderSpec {
  std::string provider_id = "lexical";  // lexical | semantic | remote:<name>
  int dimension = 512;
  std::uint64_t hash_seed = 0;
  std::string vocab_path;            // word-vector file (semantic provider)
  std::string endpoint;              // embedding service base URL (remote)
  std::string fallback_provider;     // builtin used when the remote is down
  int remote_batch = 64;
  int remote_max_in_flight = 8;

  bool is_remote() const { return provider_id.rfind("remote:", 0) == 0; }
  std::string cache_key() const;
};

// Deterministic unit-norm embedding of non-empty text (uncached).
Embedding embed(const EmbedderSpec& spec, const std::string& text);

std::vector<Embedding> embed_batch(const EmbedderSpec& spec,
                                   const std::vector<std::string>& texts);
std::vector<Embedding> embed_batch_serial(const EmbedderSpec& spec,
                                          const std::vector<std::string>& texts);

// Dot product of unit vectors clamped to [-1, 1].
double cosine(const Embedding& a, const Embedding& b);

// Provider-cosine ensemble. Weights are renormalized to sum 1; single-provider
// ablations pass that cosine through. Result is floored at 0 so downstream
// self-weighted sums stay well-defined.
double combined_match(double lexical_cos, double semantic_cos,
                      double lexical_weight, double semantic_weight,
                      Ablation ablation);

// Calls the embedding service: POST <endpoint>/embed with
// {"model": name, "texts": [...]}, response {"vectors": [[...], ...]} in the
// same order. Vectors are renormalized client-side. Batches run with bounded
// parallelism. Throws RemoteUnavailableError.
std::vector<std::vector<double>> remote_embed_batch(
    const EmbedderSpec& spec, const std::vector<std::string>& texts);

// Scoring-facing interface so tests can pin match values directly.
class TextMatcher {
 public:
  virtual ~TextMatcher() = default;
  virtual double match(const std::string& q, const std::string& t) const = 0;
};

// Two-provider matcher with a process-wide memo cache keyed by
// (provider fingerprint, text). Safe for concurrent use.
class Matcher : public TextMatcher {
 public:
  Matcher(EmbedderSpec lexical, EmbedderSpec semantic,
          double lexical_weight = 0.5, double semantic_weight = 0.5,
          Ablation ablation = Ablation::kNone);

  double match(const std::string& q, const std::string& t) const override;

  // Cached unit vector for (spec, text); falls back per spec when a remote
  // provider is unavailable and a fallback is configured.
  const std::vector<double>& cached_embedding(const EmbedderSpec& spec,
                                              const std::string& text) const;

  const EmbedderSpec& lexical_spec() const { return lexical_; }
  const EmbedderSpec& semantic_spec() const { return semantic_; }
  Ablation ablation() const { return ablation_; }

 private:
  EmbedderSpec lexical_;
  EmbedderSpec semantic_;
  double lexical_weight_;
  double semantic_weight_;
  Ablation ablation_;

  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::string, std::vector<double>> cache_;
};

}  // namespace bew
