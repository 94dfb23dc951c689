// Per-job redirect cap; httplib applies it per request.
#define CPPHTTPLIB_REDIRECT_MAX_COUNT 5
#ifdef BEW_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

#include "bew/corpus.hpp"
#include "bew/errors.hpp"
#include "bew/text.hpp"

namespace bew {
namespace {

namespace fs = std::filesystem;

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // /path?query
};

SplitUrl split_url(const std::string& url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error("unsupported URL (missing scheme): " + url);
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return SplitUrl{url, "/"};
  }
  return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

std::optional<PageSnapshot> cached_snapshot(const FetchOptions& options,
                                            const FetchJob& job) {
  fs::path dir =
      options.corpus_root / job.aggregator_id / slugify(job.entity_id);
  if (!fs::exists(dir / "page.html") || !fs::exists(dir / "meta.json")) {
    return std::nullopt;
  }
  CorpusIndex probe;
  try {
    probe = load_corpus(options.corpus_root);
  } catch (const IoError&) {
    return std::nullopt;
  }
  auto agg = probe.aggregators.find(job.aggregator_id);
  if (agg == probe.aggregators.end()) return std::nullopt;
  auto ref = agg->second.find(slugify(job.entity_id));
  if (ref == agg->second.end()) return std::nullopt;
  return load_snapshot(ref->second);
}

bool snapshot_fresh(const PageSnapshot& snap, double max_age_seconds) {
  std::int64_t fetched = iso8601_to_time(snap.fetched_at);
  if (fetched < 0) return false;
  auto now = std::chrono::system_clock::now();
  std::int64_t now_s = std::chrono::duration_cast<std::chrono::seconds>(
                           now.time_since_epoch())
                           .count();
  return static_cast<double>(now_s - fetched) <= max_age_seconds;
}

FetchOutcome run_job(const FetchJob& job, const FetchOptions& options) {
  FetchOutcome outcome;
  outcome.job = job;

  bool offline = options.offline || offline_forced();
  auto cached = cached_snapshot(options, job);
  if (cached &&
      (offline || snapshot_fresh(*cached, options.max_age_seconds))) {
    outcome.snapshot = std::move(cached);
    outcome.from_cache = true;
    return outcome;
  }
  if (offline) {
    outcome.error = "offline mode and no cached snapshot";
    return outcome;
  }

  SplitUrl split;
  try {
    split = split_url(job.url);
  } catch (const Error& e) {
    outcome.error = e.what();
    return outcome;
  }

  int attempts = std::max(0, job.retry_budget) + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      double delay = options.backoff_base_s * std::pow(2.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    httplib::Client client(split.origin);
    client.set_follow_location(true);
    int timeout_s = static_cast<int>(job.timeout_s);
    int timeout_us =
        static_cast<int>((job.timeout_s - timeout_s) * 1e6);
    client.set_connection_timeout(timeout_s, timeout_us);
    client.set_read_timeout(timeout_s, timeout_us);
    client.set_default_headers({{"User-Agent", options.user_agent}});

    auto res = client.Get(split.path);
    if (!res) {
      outcome.error = "transport error: " + httplib::to_string(res.error());
      continue;  // retryable
    }
    if (res->status >= 500) {
      outcome.error = "server error: status " + std::to_string(res->status);
      continue;  // retryable
    }
    if (res->status != 200) {
      outcome.error = "http status " + std::to_string(res->status);
      return outcome;  // not retryable
    }
    PageSnapshot snap;
    snap.aggregator_id = job.aggregator_id;
    snap.entity_id = job.entity_id;
    snap.source_url = job.url;
    snap.fetched_at = iso8601_now();
    snap.html = res->body;
    if (snap.html.empty()) {
      outcome.error = "empty response body";
      return outcome;
    }
    try {
      save_snapshot(options.corpus_root, snap);
    } catch (const std::exception& e) {
      outcome.error = std::string("cache write failed: ") + e.what();
      return outcome;
    }
    outcome.snapshot = std::move(snap);
    outcome.error.clear();
    return outcome;
  }
  return outcome;  // carries the last error
}

}  // namespace

std::vector<FetchOutcome> fetch_entity_pages(const std::vector<FetchJob>& jobs,
                                             const FetchOptions& options) {
  std::vector<FetchOutcome> outcomes(jobs.size());
  if (jobs.empty()) return outcomes;

  std::size_t workers = std::min<std::size_t>(
      jobs.size(), static_cast<std::size_t>(std::max(1, options.workers)));
  std::atomic<std::size_t> next{0};
  auto run = [&]() {
    for (std::size_t i = next.fetch_add(1); i < jobs.size();
         i = next.fetch_add(1)) {
      outcomes[i] = run_job(jobs[i], options);
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
  return outcomes;
}

}  // namespace bew
