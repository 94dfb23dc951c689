#include "bew/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "bew/errors.hpp"
#include "bew/rng.hpp"
#include "bew/text.hpp"

namespace bew {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

std::vector<EntityRef> load_entities(const fs::path& file) {
  std::vector<EntityRef> out;
  json j = json::parse(read_file(file));
  for (const json& item : j) {
    EntityRef ref;
    ref.name = item.at("name").get<std::string>();
    if (item.contains("aliases")) {
      ref.aliases = item.at("aliases").get<std::vector<std::string>>();
    }
    if (!ref.name.empty()) out.push_back(std::move(ref));
  }
  return out;
}

CorpusIndex load_corpus(const fs::path& root) {
  if (!fs::exists(root) || !fs::is_directory(root)) {
    throw IoError("corpus root not readable: " + root.string());
  }
  CorpusIndex index;
  index.root = root;
  std::vector<fs::path> agg_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) agg_dirs.push_back(entry.path());
  }
  std::sort(agg_dirs.begin(), agg_dirs.end());
  for (const fs::path& agg_dir : agg_dirs) {
    std::string agg = agg_dir.filename().string();
    std::vector<fs::path> entity_dirs;
    for (const auto& entry : fs::directory_iterator(agg_dir)) {
      if (entry.is_directory()) entity_dirs.push_back(entry.path());
    }
    std::sort(entity_dirs.begin(), entity_dirs.end());
    for (const fs::path& dir : entity_dirs) {
      fs::path page = dir / "page.html";
      fs::path meta = dir / "meta.json";
      if (!fs::exists(page) || !fs::exists(meta)) {
        std::cerr << "[bew] skipping " << dir.string()
                  << ": missing page.html or meta.json\n";
        continue;
      }
      SnapshotRef ref;
      ref.dir = dir;
      try {
        json m = json::parse(read_file(meta));
        ref.aggregator_id = m.at("aggregator").get<std::string>();
        ref.entity_id = m.at("entity").get<std::string>();
        ref.source_url = m.at("url").get<std::string>();
        ref.fetched_at = m.at("fetched_at").get<std::string>();
      } catch (const std::exception& e) {
        std::cerr << "[bew] skipping " << dir.string()
                  << ": malformed meta.json (" << e.what() << ")\n";
        continue;
      }
      index.aggregators[agg][dir.filename().string()] = std::move(ref);
    }
  }
  return index;
}

PageSnapshot load_snapshot(const SnapshotRef& ref) {
  PageSnapshot snap;
  snap.aggregator_id = ref.aggregator_id;
  snap.entity_id = ref.entity_id;
  snap.source_url = ref.source_url;
  snap.fetched_at = ref.fetched_at;
  snap.html = read_file(ref.dir / "page.html");
  return snap;
}

void save_snapshot(const fs::path& corpus_root, const PageSnapshot& snap) {
  fs::path dir = corpus_root / snap.aggregator_id / slugify(snap.entity_id);
  fs::create_directories(dir);
  json meta;
  meta["aggregator"] = snap.aggregator_id;
  meta["entity"] = snap.entity_id;
  meta["url"] = snap.source_url;
  meta["fetched_at"] = snap.fetched_at;
  write_file_atomic(dir / "page.html", snap.html);
  write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
}

std::vector<PageSnapshot> sample_pages(const CorpusIndex& index,
                                       const std::string& aggregator_id, int n,
                                       std::uint64_t seed,
                                       const std::string& exclude_entity) {
  std::vector<PageSnapshot> out;
  auto agg_it = index.aggregators.find(aggregator_id);
  if (agg_it == index.aggregators.end() || n <= 0) return out;

  std::vector<const SnapshotRef*> pool;
  for (const auto& [slug, ref] : agg_it->second) {
    if (!exclude_entity.empty() &&
        (slug == exclude_entity || ref.entity_id == exclude_entity)) {
      continue;
    }
    pool.push_back(&ref);
  }
  auto picks = sample_indices(pool.size(),
                              static_cast<std::size_t>(n),
                              mix_seed(seed, hash64(aggregator_id)));
  std::sort(picks.begin(), picks.end());  // document order within the sample
  out.reserve(picks.size());
  for (std::size_t i : picks) out.push_back(load_snapshot(*pool[i]));
  return out;
}

bool offline_forced() {
  const char* v = std::getenv("BEW_OFFLINE");
  return v != nullptr && std::string(v) == "1";
}

CorpusStore::CorpusStore(fs::path corpus_root, fs::path templates_dir,
                         fs::path entities_file)
    : index_(load_corpus(corpus_root)) {
  if (!templates_dir.empty() && fs::exists(templates_dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(templates_dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
      try {
        Template tpl = template_from_json(read_file(file));
        templates_[tpl.aggregator_id] = std::move(tpl);
      } catch (const std::exception& e) {
        std::cerr << "[bew] skipping template " << file.string() << ": "
                  << e.what() << "\n";
      }
    }
  }
  if (!entities_file.empty() && fs::exists(entities_file)) {
    entities_ = load_entities(entities_file);
  }
}

bool CorpusStore::has_entity_page(const std::string& aggregator_id,
                                  const std::string& entity_slug) const {
  auto it = index_.aggregators.find(aggregator_id);
  return it != index_.aggregators.end() && it->second.count(entity_slug) > 0;
}

std::shared_ptr<const PageSections> CorpusStore::sections_for(
    const std::string& aggregator_id, const std::string& entity_slug) const {
  std::pair<std::string, std::string> key{aggregator_id, entity_slug};
  {
    std::shared_lock lock(cache_mutex_);
    auto it = section_cache_.find(key);
    if (it != section_cache_.end()) return it->second;
  }
  auto agg_it = index_.aggregators.find(aggregator_id);
  if (agg_it == index_.aggregators.end()) return nullptr;
  auto ref_it = agg_it->second.find(entity_slug);
  if (ref_it == agg_it->second.end()) return nullptr;
  auto tpl_it = templates_.find(aggregator_id);
  if (tpl_it == templates_.end()) return nullptr;

  PageSnapshot snap = load_snapshot(ref_it->second);
  UiNode stripped = strip_boilerplate(parse_snapshot(snap));
  auto sections =
      std::make_shared<PageSections>(sectionize_page(stripped, tpl_it->second));
  sections->aggregator_id = aggregator_id;
  sections->entity_id = entity_slug;

  std::unique_lock lock(cache_mutex_);
  auto [it, inserted] = section_cache_.emplace(key, std::move(sections));
  return it->second;
}

}  // namespace bew
