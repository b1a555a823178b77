#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsaas/slice_model.hpp"

namespace nsaas {

// ---------------------------------------------------------------------------
// Append-only log.
//
// Each record on disk is
//
//   u32 payload_length (little endian)
//   u8  record_type     (1 = catalog entry, 2 = inventory commit)
//   payload             (canonical JSON, payload_length bytes)
//   32 bytes            SHA-256 over record_type || payload
//
// A truncated trailing record (torn write) is ignored on load; a digest mismatch is
// reported as LogCorrupt.

enum class RecordType : std::uint8_t { kCatalog = 1, kInventory = 2 };

struct LogRecord {
  RecordType type;
  std::string payload;
};

class LogFile {
 public:
  explicit LogFile(std::filesystem::path path, bool truncate = false);

  void append(RecordType type, const std::string& payload);
  const std::filesystem::path& path() const { return path_; }

  static std::vector<LogRecord> read_all(const std::filesystem::path& path);
  static std::string encode(RecordType type, const std::string& payload);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::mutex mu_;
};

// ---------------------------------------------------------------------------

struct CatalogEntry {
  std::string id;
  int version = 0;
  Json content;  // canonical artifact (NSST or NST document)
  std::string digest;
  double committed_at = 0;
};

// Design-time template store; (id, version) pairs are never overwritten.
class Catalog {
 public:
  explicit Catalog(LogFile* log = nullptr) : log_(log) {}

  // Artifact must carry "kind" (NSST | NST) and "id". Identical content returns the
  // version already holding it.
  std::pair<std::string, int> register_template(const Json& artifact, double now = 0);
  std::pair<std::string, int> register_nsst(const Nsst& nsst, double now = 0) {
    return register_template(nsst.to_json(), now);
  }
  std::pair<std::string, int> register_nst(const Nst& nst, double now = 0) {
    return register_template(nst.to_json(), now);
  }

  std::optional<CatalogEntry> get(const std::string& id, int version) const;
  std::optional<CatalogEntry> latest(const std::string& id) const;
  std::optional<Nsst> nsst(const std::string& id, int version) const;

  // Latest NSST versions serving (domain, scenario), sorted by footprint then id.
  // Throws EmptyCatalog when the catalog holds no NSST at all.
  std::vector<Nsst> lookup_templates(Domain domain, Scenario scenario) const;

  std::size_t size() const;
  std::vector<CatalogEntry> entries() const;

  void replay(const LogRecord& rec);

 private:
  std::pair<std::string, int> insert_locked(CatalogEntry entry, bool log);

  LogFile* log_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::vector<CatalogEntry>> by_id_;
};

// ---------------------------------------------------------------------------

struct InventoryRecord {
  std::string key;
  Json snapshot;
  std::uint64_t seq = 0;
  std::string digest;
};

// Runtime state store with optimistic concurrency per key.
class Inventory {
 public:
  explicit Inventory(LogFile* log = nullptr) : log_(log) {}

  // Commits when expected_seq matches the current sequence; a byte-identical snapshot is a
  // no-op returning the current sequence. Throws SequenceConflict otherwise.
  std::uint64_t commit_state(const std::string& key, const Json& snapshot, std::uint64_t expected_seq);

  std::optional<InventoryRecord> get(const std::string& key) const;
  std::uint64_t seq(const std::string& key) const;
  std::vector<InventoryRecord> records() const;

  // Digest over every record (key order).
  std::string digest() const;

  void replay(const LogRecord& rec);

 private:
  LogFile* log_;
  mutable std::shared_mutex mu_;
  std::map<std::string, InventoryRecord> records_;
};

// Catalog + Inventory sharing one optional log; rebuilt from the log on open.
class DataStore {
 public:
  DataStore() : catalog_(nullptr), inventory_(nullptr) {}
  explicit DataStore(const std::filesystem::path& log_path, bool truncate = false);

  Catalog& catalog() { return catalog_; }
  const Catalog& catalog() const { return catalog_; }
  Inventory& inventory() { return inventory_; }
  const Inventory& inventory() const { return inventory_; }

 private:
  std::unique_ptr<LogFile> log_;
  Catalog catalog_;
  Inventory inventory_;
};

}  // namespace nsaas
