#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "nsaas/catalog.hpp"
#include "nsaas/config.hpp"
#include "nsaas/digest.hpp"
#include "nsaas/error.hpp"

using namespace nsaas;
namespace fs = std::filesystem;

namespace {

fs::path temp_log(const std::string& name) {
  auto p = fs::temp_directory_path() / ("nsaas-test-" + name + ".log");
  fs::remove(p);
  return p;
}

Json nsst_doc(const std::string& id, double cpu) {
  Nsst n;
  n.id = id;
  n.domain = Domain::kCN;
  n.scenarios = {Scenario::kURLLC};
  n.nfs.push_back({"amf", 1, cpu, cpu, 100, 100, cpu, 100, "amf:1"});
  return n.to_json();
}

}  // namespace

TEST_CASE("templates are versioned and identical content is deduplicated") {
  Catalog c;
  const auto v1 = c.register_template(nsst_doc("cn-x", 0.1));
  CHECK(v1 == std::pair<std::string, int>{"cn-x", 1});
  CHECK(c.register_template(nsst_doc("cn-x", 0.1)) == v1);
  const auto v2 = c.register_template(nsst_doc("cn-x", 0.2));
  CHECK(v2.second == 2);
  CHECK(c.size() == 2);
  CHECK(c.get("cn-x", 1)->content == nsst_doc("cn-x", 0.1));
  CHECK(c.latest("cn-x")->version == 2);
  CHECK_FALSE(c.get("cn-x", 3));
  CHECK(c.get("cn-x", 1)->digest == digest_of(nsst_doc("cn-x", 0.1)));
}

TEST_CASE("artifacts without kind or id are rejected") {
  Catalog c;
  CHECK_THROWS_AS(c.register_template(Json{{"id", "x"}}), Error);
  CHECK_THROWS_AS(c.register_template(Json{{"kind", "NSST"}}), Error);
}

TEST_CASE("lookup returns latest versions sorted by footprint then id") {
  Catalog c;
  CHECK_THROWS_AS(c.lookup_templates(Domain::kCN, Scenario::kURLLC), Error);
  c.register_template(nsst_doc("cn-b", 0.5));
  c.register_template(nsst_doc("cn-a", 0.5));
  c.register_template(nsst_doc("cn-c", 0.1));
  c.register_template(nsst_doc("cn-c", 0.9));
  const auto found = c.lookup_templates(Domain::kCN, Scenario::kURLLC);
  REQUIRE(found.size() == 3);
  CHECK(found[0].id == "cn-a");
  CHECK(found[1].id == "cn-b");
  CHECK(found[2].id == "cn-c");
  CHECK(found[2].version == 2);
  CHECK(c.lookup_templates(Domain::kRAN, Scenario::kURLLC).empty());
  CHECK(c.lookup_templates(Domain::kCN, Scenario::kMMTC).empty());
}

TEST_CASE("inventory commits use optimistic concurrency") {
  Inventory inv;
  CHECK(inv.commit_state("nsi/1", Json{{"state", "Deploying"}}, 0) == 1);
  CHECK(inv.commit_state("nsi/1", Json{{"state", "Deploying"}}, 0) == 1);
  CHECK_THROWS_AS(inv.commit_state("nsi/1", Json{{"state", "Active"}}, 0), Error);
  CHECK(inv.commit_state("nsi/1", Json{{"state", "Active"}}, 1) == 2);
  CHECK(inv.get("nsi/1")->snapshot.at("state") == "Active");
  CHECK(inv.seq("nsi/2") == 0);
}

TEST_CASE("two writers racing on one sequence: exactly one wins") {
  for (int round = 0; round < 50; ++round) {
    Inventory inv;
    inv.commit_state("k", Json{{"v", 0}}, 0);
    std::atomic<int> wins{0};
    std::atomic<int> conflicts{0};
    auto writer = [&](int v) {
      try {
        inv.commit_state("k", Json{{"v", v}}, 1);
        ++wins;
      } catch (const Error& e) {
        if (e.code() == Errc::kSequenceConflict) ++conflicts;
      }
    };
    std::thread a(writer, 1);
    std::thread b(writer, 2);
    a.join();
    b.join();
    CHECK(wins == 1);
    CHECK(conflicts == 1);
    CHECK(inv.seq("k") == 2);
  }
}

TEST_CASE("replaying the log rebuilds identical state") {
  const auto path = temp_log("replay");
  std::string digest;
  std::size_t entries = 0;
  {
    DataStore store(path, true);
    store.catalog().register_template(nsst_doc("cn-x", 0.1));
    store.catalog().register_template(nsst_doc("cn-x", 0.2));
    store.inventory().commit_state("nsi/1", Json{{"state", "Active"}}, 0);
    store.inventory().commit_state("nsi/2", Json{{"state", "Deploying"}}, 0);
    store.inventory().commit_state("nsi/2", Json{{"state", "Active"}}, 1);
    digest = store.inventory().digest();
    entries = store.catalog().size();
  }
  DataStore reopened(path);
  CHECK(reopened.inventory().digest() == digest);
  CHECK(reopened.catalog().size() == entries);
  CHECK(reopened.inventory().seq("nsi/2") == 2);
  fs::remove(path);
}

TEST_CASE("a torn trailing record is ignored and a corrupt one is reported") {
  const auto path = temp_log("torn");
  {
    LogFile log(path, true);
    log.append(RecordType::kInventory, canonical(Json{{"key", "a"}}));
    log.append(RecordType::kInventory, canonical(Json{{"key", "b"}}));
  }
  const auto full = fs::file_size(path);
  fs::resize_file(path, full - 7);
  const auto recs = LogFile::read_all(path);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].payload == canonical(Json{{"key", "a"}}));

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(6);
    f.put('X');
  }
  try {
    LogFile::read_all(path);
    FAIL("expected LogCorrupt");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kLogCorrupt);
  }
  fs::remove(path);
}

TEST_CASE("record encoding layout") {
  const std::string payload = "{\"a\":1}";
  const auto bytes = LogFile::encode(RecordType::kCatalog, payload);
  REQUIRE(bytes.size() == 4 + 1 + payload.size() + 32);
  CHECK(static_cast<unsigned char>(bytes[0]) == payload.size());
  CHECK(bytes[1] == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes.substr(5, payload.size()) == payload);
}

TEST_CASE("the seeded catalog covers every domain and scenario") {
  const auto cfg = Config::defaults();
  Catalog c;
  for (const auto& n : cfg.catalog_seed) c.register_nsst(n);
  for (Domain d : kAllDomains) {
    for (Scenario s : kAllScenarios) CHECK_FALSE(c.lookup_templates(d, s).empty());
  }
}
