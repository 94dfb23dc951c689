#include <atomic>
#include <cmath>
#include <nlohmann/json.hpp>
#include <thread>
#include <vector>

#include "bew/errors.hpp"
#include "bew/semantic.hpp"

#include <httplib.h>

namespace bew {
namespace {

using json = nlohmann::json;

std::string remote_model_name(const EmbedderSpec& spec) {
  // "remote:<name>" -> "<name>"
  return spec.provider_id.substr(7);
}

void normalize_inplace(std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq <= 0.0) {
    if (!v.empty()) v[0] = 1.0;
    return;
  }
  double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

std::vector<std::vector<double>> post_embed(const EmbedderSpec& spec,
                                            const std::vector<std::string>& texts) {
  httplib::Client client(spec.endpoint);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(30, 0);

  json body;
  body["model"] = remote_model_name(spec);
  body["texts"] = texts;
  auto res = client.Post("/embed", body.dump(), "application/json");
  if (!res || res->status != 200) {
    throw RemoteUnavailableError(
        "embedding service at " + spec.endpoint + " unavailable" +
        (res ? " (status " + std::to_string(res->status) + ")" : ""));
  }
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception&) {
    throw RemoteUnavailableError("embedding service returned invalid JSON");
  }
  if (!reply.contains("vectors") || !reply["vectors"].is_array() ||
      reply["vectors"].size() != texts.size()) {
    throw RemoteUnavailableError("embedding service returned wrong vector count");
  }
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const json& row : reply["vectors"]) {
    std::vector<double> vec = row.get<std::vector<double>>();
    if (static_cast<int>(vec.size()) != spec.dimension) {
      throw DimensionMismatchError(
          "embedding service returned dimension " + std::to_string(vec.size()) +
          ", expected " + std::to_string(spec.dimension));
    }
    normalize_inplace(vec);
    out.push_back(std::move(vec));
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> remote_embed_batch(
    const EmbedderSpec& spec, const std::vector<std::string>& texts) {
  if (spec.endpoint.empty()) {
    throw RemoteUnavailableError("remote embedder has no endpoint configured");
  }
  if (texts.empty()) return {};

  std::size_t batch = std::max(1, spec.remote_batch);
  std::size_t n_batches = (texts.size() + batch - 1) / batch;
  std::vector<std::vector<std::vector<double>>> results(n_batches);
  std::vector<std::string> errors(n_batches);

  std::size_t workers = std::min<std::size_t>(
      n_batches, std::max(1, spec.remote_max_in_flight));
  std::atomic<std::size_t> next{0};
  auto run = [&]() {
    for (std::size_t b = next.fetch_add(1); b < n_batches;
         b = next.fetch_add(1)) {
      std::size_t begin = b * batch;
      std::size_t end = std::min(texts.size(), begin + batch);
      std::vector<std::string> chunk(texts.begin() + begin, texts.begin() + end);
      try {
        results[b] = post_embed(spec, chunk);
      } catch (const Error& e) {
        errors[b] = e.what();
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
  }

  for (const std::string& err : errors) {
    if (!err.empty()) throw RemoteUnavailableError(err);
  }
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (auto& chunk : results) {
    for (auto& vec : chunk) out.push_back(std::move(vec));
  }
  return out;
}

}  // namespace bew
