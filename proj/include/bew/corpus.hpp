#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "bew/dom.hpp"
#include "bew/sectionize.hpp"
#include "bew/template_mining.hpp"

namespace bew {

struct EntityRef {
  std::string name;
  std::vector<std::string> aliases;
};

// JSON list [{"name": str, "aliases": [str,...]}, ...].
std::vector<EntityRef> load_entities(const std::filesystem::path& file);

struct SnapshotRef {
  std::filesystem::path dir;  // holds page.html + meta.json
  std::string aggregator_id;
  std::string entity_id;
  std::string source_url;
  std::string fetched_at;
};

struct CorpusIndex {
  std::filesystem::path root;
  // aggregator -> entity slug -> snapshot
  std::map<std::string, std::map<std::string, SnapshotRef>> aggregators;
};

// Scans <root>/<aggregator>/<entity-slug>/{page.html,meta.json}. Entries with
// malformed or missing metadata are skipped with a warning.
CorpusIndex load_corpus(const std::filesystem::path& root);

PageSnapshot load_snapshot(const SnapshotRef& ref);

// Atomic write (temp file + rename) of page.html and meta.json.
void save_snapshot(const std::filesystem::path& corpus_root,
                   const PageSnapshot& snap);

// Deterministic sample of min(n, available) distinct entities' pages.
std::vector<PageSnapshot> sample_pages(const CorpusIndex& index,
                                       const std::string& aggregator_id, int n,
                                       std::uint64_t seed,
                                       const std::string& exclude_entity = "");

struct FetchJob {
  std::string url;
  std::string aggregator_id;
  std::string entity_id;
  int retry_budget = 2;
  double timeout_s = 15.0;
};

struct FetchOutcome {
  FetchJob job;
  std::optional<PageSnapshot> snapshot;
  std::string error;  // empty on success
  bool from_cache = false;
};

struct FetchOptions {
  std::filesystem::path corpus_root;
  bool offline = false;
  double max_age_seconds = 7 * 86400.0;
  int workers = 4;
  double backoff_base_s = 0.5;
  std::string user_agent = "bew/0.1";
};

// Honors BEW_OFFLINE=1.
bool offline_forced();

// Runs jobs on a bounded worker pool. Fresh cached snapshots short-circuit the
// network; failures are collected per job and never abort siblings.
std::vector<FetchOutcome> fetch_entity_pages(const std::vector<FetchJob>& jobs,
                                             const FetchOptions& options);

// Read access to a corpus plus mined templates and the entity repository,
// with a concurrency-safe cache of sectionized pages.
class CorpusStore {
 public:
  explicit CorpusStore(std::filesystem::path corpus_root,
                       std::filesystem::path templates_dir = {},
                       std::filesystem::path entities_file = {});

  const CorpusIndex& index() const { return index_; }
  const std::map<std::string, Template>& templates() const { return templates_; }
  const std::vector<EntityRef>& entities() const { return entities_; }

  bool has_entity_page(const std::string& aggregator_id,
                       const std::string& entity_slug) const;

  // Parse + strip + sectionize, memoized per page.
  std::shared_ptr<const PageSections> sections_for(
      const std::string& aggregator_id, const std::string& entity_slug) const;

 private:
  CorpusIndex index_;
  std::map<std::string, Template> templates_;
  std::vector<EntityRef> entities_;

  mutable std::shared_mutex cache_mutex_;
  mutable std::map<std::pair<std::string, std::string>,
                   std::shared_ptr<const PageSections>>
      section_cache_;
};

}  // namespace bew
