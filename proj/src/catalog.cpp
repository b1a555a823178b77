#include "nsaas/catalog.hpp"

#include <algorithm>
#include <array>

#include "nsaas/digest.hpp"
#include "nsaas/error.hpp"

namespace nsaas {

// ---------------------------------------------------------------------------
// LogFile

LogFile::LogFile(std::filesystem::path path, bool truncate) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  out_.open(path_, std::ios::binary | (truncate ? std::ios::trunc : std::ios::app));
  if (!out_) throw Error(Errc::kConfig, "cannot open log " + path_.string(), {{"path", path_.string()}});
}

std::string LogFile::encode(RecordType type, const std::string& payload) {
  std::string body;
  body.push_back(static_cast<char>(type));
  body += payload;
  const auto digest = sha256_raw({reinterpret_cast<const unsigned char*>(body.data()), body.size()});

  std::string rec;
  const auto len = static_cast<std::uint32_t>(payload.size());
  for (int i = 0; i < 4; ++i) rec.push_back(static_cast<char>((len >> (8 * i)) & 0xff));
  rec += body;
  rec.append(reinterpret_cast<const char*>(digest.data()), digest.size());
  return rec;
}

void LogFile::append(RecordType type, const std::string& payload) {
  const auto rec = encode(type, payload);
  std::lock_guard lock(mu_);
  out_.write(rec.data(), static_cast<std::streamsize>(rec.size()));
  out_.flush();
}

std::vector<LogRecord> LogFile::read_all(const std::filesystem::path& path) {
  std::vector<LogRecord> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t pos = 0;
  while (pos < data.size()) {
    if (data.size() - pos < 5) break;  // torn header
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
    const std::size_t total = 4 + 1 + static_cast<std::size_t>(len) + 32;
    if (data.size() - pos < total) break;  // torn body

    const std::string body = data.substr(pos + 4, 1 + len);
    const auto digest = sha256_raw({reinterpret_cast<const unsigned char*>(body.data()), body.size()});
    if (!std::equal(digest.begin(), digest.end(), reinterpret_cast<const unsigned char*>(data.data() + pos + 5 + len))) {
      throw Error(Errc::kLogCorrupt, "log record digest mismatch at offset " + std::to_string(pos),
                  {{"offset", pos}, {"path", path.string()}});
    }
    const auto type = static_cast<RecordType>(static_cast<unsigned char>(body[0]));
    if (type != RecordType::kCatalog && type != RecordType::kInventory) {
      throw Error(Errc::kLogCorrupt, "unknown record type at offset " + std::to_string(pos), {{"offset", pos}});
    }
    out.push_back({type, body.substr(1)});
    pos += total;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalog

std::pair<std::string, int> Catalog::register_template(const Json& artifact, double now) {
  const auto kind = artifact.value("kind", std::string());
  if (kind != "NSST" && kind != "NST") {
    throw Error(Errc::kValidation, "catalog accepts only NSST/NST artifacts", {{"kind", kind}});
  }
  const auto id = artifact.find("id");
  if (id == artifact.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw Error(Errc::kValidation, "catalog artifact needs a non-empty string id", {{"kind", kind}});
  }
  CatalogEntry entry;
  entry.id = id->get<std::string>();
  entry.content = artifact;
  entry.digest = digest_of(artifact);
  entry.committed_at = now;

  std::unique_lock lock(mu_);
  return insert_locked(std::move(entry), true);
}

std::pair<std::string, int> Catalog::insert_locked(CatalogEntry entry, bool log) {
  auto& versions = by_id_[entry.id];
  for (const auto& existing : versions) {
    if (existing.digest == entry.digest) return {existing.id, existing.version};
  }
  entry.version = versions.empty() ? 1 : versions.back().version + 1;
  if (log && log_ != nullptr) {
    log_->append(RecordType::kCatalog, canonical(Json{{"id", entry.id},
                                                      {"version", entry.version},
                                                      {"content", entry.content},
                                                      {"committed_at", entry.committed_at}}));
  }
  versions.push_back(entry);
  return {entry.id, entry.version};
}

void Catalog::replay(const LogRecord& rec) {
  const auto j = Json::parse(rec.payload);
  CatalogEntry entry;
  entry.id = j.at("id").get<std::string>();
  entry.content = j.at("content");
  entry.digest = digest_of(entry.content);
  entry.committed_at = j.at("committed_at").get<double>();
  std::unique_lock lock(mu_);
  const auto [id, version] = insert_locked(std::move(entry), false);
  if (version != j.at("version").get<int>()) {
    throw Error(Errc::kLogCorrupt, "catalog replay version mismatch for " + id, {{"id", id}});
  }
}

std::optional<CatalogEntry> Catalog::get(const std::string& id, int version) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  for (const auto& e : it->second) {
    if (e.version == version) return e;
  }
  return std::nullopt;
}

std::optional<CatalogEntry> Catalog::latest(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(id);
  if (it == by_id_.end() || it->second.empty()) return std::nullopt;
  return it->second.back();
}

std::optional<Nsst> Catalog::nsst(const std::string& id, int version) const {
  auto e = get(id, version);
  if (!e || e->content.value("kind", "") != "NSST") return std::nullopt;
  auto n = Nsst::from_json(e->content);
  n.version = e->version;
  return n;
}

std::vector<Nsst> Catalog::lookup_templates(Domain domain, Scenario scenario) const {
  std::vector<Nsst> out;
  bool any_nsst = false;
  {
    std::shared_lock lock(mu_);
    for (const auto& [id, versions] : by_id_) {
      const auto& e = versions.back();
      if (e.content.value("kind", "") != "NSST") continue;
      any_nsst = true;
      auto n = Nsst::from_json(e.content);
      n.version = e.version;
      if (n.domain == domain && n.serves(scenario)) out.push_back(std::move(n));
    }
  }
  if (!any_nsst) throw Error(Errc::kEmptyCatalog, "catalog holds no NSST templates");
  std::stable_sort(out.begin(), out.end(), [](const Nsst& a, const Nsst& b) {
    if (a.footprint() != b.footprint()) return a.footprint() < b.footprint();
    return a.id < b.id;
  });
  return out;
}

std::size_t Catalog::size() const {
  std::shared_lock lock(mu_);
  std::size_t n = 0;
  for (const auto& [_, v] : by_id_) n += v.size();
  return n;
}

std::vector<CatalogEntry> Catalog::entries() const {
  std::shared_lock lock(mu_);
  std::vector<CatalogEntry> out;
  for (const auto& [_, v] : by_id_) out.insert(out.end(), v.begin(), v.end());
  return out;
}

// ---------------------------------------------------------------------------
// Inventory

std::uint64_t Inventory::commit_state(const std::string& key, const Json& snapshot, std::uint64_t expected_seq) {
  const auto kind = snapshot.is_object() ? snapshot.value("kind", std::string()) : std::string();
  if (kind == "NSST" || kind == "NST") {
    throw Error(Errc::kValidation, "templates belong in the catalog, not the inventory", {{"key", key}});
  }
  const auto digest = digest_of(snapshot);

  std::unique_lock lock(mu_);
  auto it = records_.find(key);
  const std::uint64_t current = it == records_.end() ? 0 : it->second.seq;
  if (it != records_.end() && it->second.digest == digest) return current;
  if (expected_seq != current) {
    throw Error(Errc::kSequenceConflict, "stale sequence for " + key,
                {{"key", key}, {"expected", expected_seq}, {"current", current}});
  }
  InventoryRecord rec{key, snapshot, current + 1, digest};
  if (log_ != nullptr) {
    log_->append(RecordType::kInventory, canonical(Json{{"key", key}, {"seq", rec.seq}, {"snapshot", snapshot}}));
  }
  records_[key] = std::move(rec);
  return current + 1;
}

void Inventory::replay(const LogRecord& rec) {
  const auto j = Json::parse(rec.payload);
  InventoryRecord r;
  r.key = j.at("key").get<std::string>();
  r.seq = j.at("seq").get<std::uint64_t>();
  r.snapshot = j.at("snapshot");
  r.digest = digest_of(r.snapshot);
  std::unique_lock lock(mu_);
  auto it = records_.find(r.key);
  const std::uint64_t current = it == records_.end() ? 0 : it->second.seq;
  if (r.seq != current + 1) {
    throw Error(Errc::kLogCorrupt, "inventory replay sequence gap for " + r.key, {{"key", r.key}});
  }
  records_[r.key] = std::move(r);
}

std::optional<InventoryRecord> Inventory::get(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Inventory::seq(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(key);
  return it == records_.end() ? 0 : it->second.seq;
}

std::vector<InventoryRecord> Inventory::records() const {
  std::shared_lock lock(mu_);
  std::vector<InventoryRecord> out;
  for (const auto& [_, r] : records_) out.push_back(r);
  return out;
}

std::string Inventory::digest() const {
  std::shared_lock lock(mu_);
  Json all = Json::object();
  for (const auto& [k, r] : records_) all[k] = {{"seq", r.seq}, {"digest", r.digest}};
  return digest_of(all);
}

// ---------------------------------------------------------------------------

DataStore::DataStore(const std::filesystem::path& log_path, bool truncate)
    : log_(std::make_unique<LogFile>(log_path, truncate)), catalog_(log_.get()), inventory_(log_.get()) {
  for (const auto& rec : LogFile::read_all(log_path)) {
    if (rec.type == RecordType::kCatalog) {
      catalog_.replay(rec);
    } else {
      inventory_.replay(rec);
    }
  }
}

}  // namespace nsaas
