#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <future>
#include <set>
#include <thread>

#include "httplib.h"
#include "term/engines.h"
#include "term/error.h"
#include "term/service.h"
#include "term/valstore.h"
#include "test_util.h"

namespace term {
namespace {

using nlohmann::json;

Store::Clock fixed_clock() {
  return [] { return std::string("2024-01-01T00:00:00Z"); };
}

NewCandidate term_candidate(const std::string& surface, double score = 1) {
  return {CandidateKind::kTerm, {{"surface", surface}}, {{"note", "x"}}, score};
}

std::unique_ptr<Engine> medical_engine() {
  PrometheeInputs in;
  in.corpus = testing::fixture("medical.tsv");
  in.seeds = testing::fixture("seeds.tsv");
  return make_promethee_engine(in);
}

std::vector<json> dump(const Store& s) {
  std::vector<json> out;
  for (const auto& it : s.list_items()) out.push_back(to_json(it));
  return out;
}

// Returns what it is told to, and records the accepted items it saw.
class FakeEngine : public Engine {
 public:
  std::vector<NewCandidate> next;
  std::vector<ValidationItem> seen;
  std::string name() const override { return "fake"; }
  std::vector<NewCandidate> run(const std::vector<ValidationItem>& accepted) override {
    seen = accepted;
    return next;
  }
};

// Blocks inside run() until released.
class GateEngine : public Engine {
 public:
  std::promise<void> entered;
  std::promise<void> release;
  std::shared_future<void> released = release.get_future().share();
  std::string name() const override { return "gate"; }
  std::vector<NewCandidate> run(const std::vector<ValidationItem>&) override {
    entered.set_value();
    released.wait();
    return {term_candidate("late")};
  }
};

TEST_CASE("item ids hash the canonical payload") {
  const json a = {{"term1", "neocortex"}, {"term2", "vulnerable  area"}, {"relation", "hypernym"}};
  const json b = json::parse(R"({"relation":"hypernym","term2":" vulnerable area ","term1":"neocortex"})");
  CHECK(item_id(CandidateKind::kPair, a) == item_id(CandidateKind::kPair, b));
  CHECK(item_id(CandidateKind::kPair, a).size() == 16);
  CHECK(item_id(CandidateKind::kPair, a) != item_id(CandidateKind::kTerm, a));
  CHECK(item_id(CandidateKind::kPair, a) !=
        item_id(CandidateKind::kPair, {{"term1", "striatum"}, {"term2", "vulnerable area"},
                                       {"relation", "hypernym"}}));
  // Stable across runs: a fixed known value.
  CHECK(item_id(CandidateKind::kTerm, {{"surface", "SHADE"}}) ==
        item_id(CandidateKind::kTerm, json::parse(R"({"surface":"SHADE"})")));
}

TEST_CASE("empty store") {
  testing::TempDir dir;
  Store s(dir.path() / "store");
  CHECK(s.list_items().empty());
  CHECK(s.list_items(std::nullopt, ItemStatus::kAccepted).empty());
  CHECK(s.iteration() == 0);
  CHECK(s.counts().by_status.at("pending") == 0);
}

TEST_CASE("decisions: accept, conflict, not found") {
  testing::TempDir dir;
  Store s(dir.path(), fixed_clock());
  CHECK(s.insert({term_candidate("SHADE", 5), term_candidate("SOFT WOODS", 2)}) == 2);
  CHECK(s.insert({term_candidate("SHADE", 9)}) == 0);  // same payload, same id

  const auto items = s.list_items();
  REQUIRE(items.size() == 2);
  CHECK(items[0].payload["surface"] == "SHADE");
  CHECK(items[0].score == 5);

  const auto updated = s.record_decision(items[0].id, ItemStatus::kAccepted, "expert");
  CHECK(updated.status == ItemStatus::kAccepted);
  CHECK(updated.decided_by == std::optional<std::string>("expert"));
  CHECK(updated.decided_at == std::optional<std::string>("2024-01-01T00:00:00Z"));

  CHECK_THROWS_AS(s.record_decision(items[0].id, ItemStatus::kRejected, "other"), Conflict);
  CHECK_THROWS_AS(s.record_decision("0000000000000000", ItemStatus::kAccepted, "x"), NotFound);
  CHECK_THROWS_AS(s.record_decision(items[1].id, ItemStatus::kPending, "x"), InvalidInput);

  CHECK(s.list_items(CandidateKind::kTerm, ItemStatus::kAccepted).size() == 1);
  CHECK(s.list_items(CandidateKind::kPair).empty());
  CHECK(s.counts().by_status.at("accepted") == 1);
  CHECK(s.counts().by_status.at("pending") == 1);
}

TEST_CASE("list order is kind, score descending, id") {
  testing::TempDir dir;
  Store s(dir.path());
  s.insert({term_candidate("A", 1), term_candidate("B", 3), term_candidate("C", 3),
            {CandidateKind::kPair, {{"term1", "x"}, {"term2", "y"}}, {}, 0},
            {CandidateKind::kPattern, {{"text", "NP be NP"}}, {}, 2}});
  const auto items = s.list_items();
  REQUIRE(items.size() == 5);
  CHECK(items[0].kind == CandidateKind::kPair);
  CHECK(items[1].kind == CandidateKind::kPattern);
  CHECK(items[2].score == 3);
  CHECK(items[3].score == 3);
  CHECK(items[2].id < items[3].id);
  CHECK(items[4].payload["surface"] == "A");
}

TEST_CASE("reload replays the log exactly") {
  testing::TempDir dir;
  std::vector<json> before;
  {
    Store s(dir.path(), fixed_clock());
    s.insert({term_candidate("A"), term_candidate("B"), term_candidate("C")});
    const auto items = s.list_items();
    s.record_decision(items[0].id, ItemStatus::kAccepted, "e");
    s.record_decision(items[2].id, ItemStatus::kRejected, "e");
    before = dump(s);
  }
  Store again(dir.path());
  CHECK(dump(again) == before);
}

TEST_CASE("a torn final log line is dropped and truncated") {
  testing::TempDir dir;
  std::string id;
  {
    Store s(dir.path(), fixed_clock());
    s.insert({term_candidate("A"), term_candidate("B")});
    id = s.list_items()[0].id;
    s.record_decision(id, ItemStatus::kAccepted, "e");
  }
  const auto log = dir.path() / "log.jsonl";
  const auto good_size = std::filesystem::file_size(log);
  {
    std::ofstream out(log, std::ios::app | std::ios::binary);
    out << R"({"op":"decision","id":")";
  }
  Store s(dir.path());
  CHECK(s.find(id)->status == ItemStatus::kAccepted);
  CHECK(std::filesystem::file_size(log) == good_size);
  // The store keeps working after the repair.
  const auto other = s.list_items(std::nullopt, ItemStatus::kPending).at(0).id;
  s.record_decision(other, ItemStatus::kRejected, "e");
  Store third(dir.path());
  CHECK(third.find(other)->status == ItemStatus::kRejected);
}

TEST_CASE("a corrupt line in the middle of the log is a parse error") {
  testing::TempDir dir;
  {
    Store s(dir.path());
    s.insert({term_candidate("A")});
  }
  {
    std::ofstream out(dir.path() / "log.jsonl", std::ios::app | std::ios::binary);
    out << "not json\n" << R"({"op":"iteration","iteration":1})" << "\n";
  }
  try {
    Store s(dir.path());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("snapshots cover earlier log lines") {
  testing::TempDir dir;
  std::vector<json> before;
  {
    Store s(dir.path(), fixed_clock());
    std::vector<NewCandidate> many;
    for (int i = 0; i < 100; ++i) many.push_back(term_candidate("T" + std::to_string(i), i));
    s.insert(many);
    CHECK(std::filesystem::exists(dir.path() / "snapshot.jsonl"));
    const auto items = s.list_items();
    for (int i = 0; i < 10; ++i) s.record_decision(items[i].id, ItemStatus::kAccepted, "e");
    before = dump(s);
  }
  Store again(dir.path());
  CHECK(dump(again) == before);
  CHECK(again.list_items(std::nullopt, ItemStatus::kAccepted).size() == 10);
}

TEST_CASE("run_iteration with the promethee engine") {
  testing::TempDir dir;
  Store s(dir.path());
  auto engine = medical_engine();

  auto summary = s.run_iteration(engine.get());
  CHECK(summary.new_candidates == 1);
  CHECK(summary.iteration == 1);
  const auto patterns = s.list_items(CandidateKind::kPattern, ItemStatus::kPending);
  REQUIRE(patterns.size() == 1);
  CHECK(patterns[0].payload["text"] == "NP such as LIST");
  CHECK(patterns[0].iteration == 1);
  CHECK(s.list_items(CandidateKind::kPair).empty());

  s.record_decision(patterns[0].id, ItemStatus::kAccepted, "expert");
  summary = s.run_iteration(engine.get());
  CHECK(summary.new_candidates == 4);
  CHECK(summary.iteration == 2);
  std::set<std::string> hyponyms;
  for (const auto& p : s.list_items(CandidateKind::kPair, ItemStatus::kPending)) {
    CHECK(p.payload["term2"] == "vulnerable area");
    CHECK(p.payload["relation"] == "hypernym");
    CHECK(p.evidence["pattern"] == "NP such as LIST");
    hyponyms.insert(p.payload["term1"].get<std::string>());
  }
  CHECK(hyponyms == std::set<std::string>{"neocortex", "striatum", "hippocampus", "thalamus"});

  // Nothing new is accepted, so the next turn finds nothing new.
  summary = s.run_iteration(engine.get());
  CHECK(summary.new_candidates == 0);
  CHECK(summary.iteration == 3);
  CHECK(Store(dir.path()).iteration() == 3);
}

TEST_CASE("accepted items reach the engine as seeds") {
  testing::TempDir dir;
  Store s(dir.path());
  FakeEngine fake;
  fake.next = {{CandidateKind::kPair, {{"term1", "a"}, {"term2", "b"}}, {}, 1},
               {CandidateKind::kPair, {{"term1", "c"}, {"term2", "b"}}, {}, 1}};
  CHECK(s.run_iteration(&fake).new_candidates == 2);
  CHECK(fake.seen.empty());
  const auto items = s.list_items();
  s.record_decision(items[0].id, ItemStatus::kAccepted, "e");
  s.record_decision(items[1].id, ItemStatus::kRejected, "e");
  s.run_iteration(&fake);
  REQUIRE(fake.seen.size() == 1);
  CHECK(fake.seen[0].id == items[0].id);
}

TEST_CASE("run_iteration is exclusive and needs an engine") {
  testing::TempDir dir;
  Store s(dir.path());
  CHECK_THROWS_AS(s.run_iteration(nullptr), ConfigError);

  GateEngine gate;
  auto first = std::async(std::launch::async, [&] { return s.run_iteration(&gate); });
  gate.entered.get_future().wait();
  CHECK_THROWS_AS(s.run_iteration(&gate), Busy);
  // Reads and decisions still go through while a turn runs.
  CHECK(s.list_items().empty());
  gate.release.set_value();
  CHECK(first.get().new_candidates == 1);
}

TEST_CASE("ana engine proposes the toy terms") {
  testing::TempDir dir;
  Store s(dir.path());
  AnaInputs in;
  in.corpus = testing::fixture("ana_toy");
  in.bootstrap = testing::fixture("bootstrap.txt");
  in.schemes = testing::fixture("schemes.txt");
  in.stopwords = testing::fixture("functional.txt");
  auto engine = make_ana_engine(in);
  CHECK(s.run_iteration(engine.get()).new_candidates == 3);
  std::set<std::string> surfaces;
  for (const auto& t : s.list_items(CandidateKind::kTerm)) {
    surfaces.insert(t.payload["surface"].get<std::string>());
  }
  CHECK(surfaces == std::set<std::string>{"DIESEL ENGINE", "SHADE", "SOFT WOODS"});

  in.bootstrap = testing::fixture("missing.txt");
  CHECK_THROWS_AS(make_ana_engine(in), IoError);
}

TEST_CASE("pattern payloads round-trip") {
  Pattern p;
  ExprItem np;
  np.kind = ItemKind::kNp;
  np.slot = 2;
  ExprItem lit;
  lit.lemma = "such";
  ExprItem list;
  list.kind = ItemKind::kList;
  list.slot = 1;
  p.items = {np, lit, list};
  p.relation = "hypernym";
  const json payload = pattern_payload(p);
  CHECK(payload["text"] == "NP such LIST");
  const Pattern back = pattern_from_payload(payload);
  CHECK(back.status == Status::kValidated);
  CHECK(pattern_payload(back) == payload);
}

// HTTP ----------------------------------------------------------------------

struct Running {
  ApiServer server;
  int port = -1;
  std::thread thread;

  Running(Store& store, Engine* engine) : server(store, engine) {
    port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen(); });
    server.wait_until_ready();
  }
  ~Running() {
    server.stop();
    thread.join();
  }
};

TEST_CASE("HTTP API drives the promethee loop") {
  testing::TempDir dir;
  Store store(dir.path());
  auto engine = medical_engine();
  Running running(store, engine.get());
  httplib::Client cli("127.0.0.1", running.port);

  auto res = cli.Get("/api/items");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body) == json::array());

  res = cli.Post("/api/iterate", "", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body) == json{{"new_candidates", 1}, {"iteration", 1}});

  res = cli.Get("/api/items?kind=pattern&status=pending");
  REQUIRE(res);
  const json patterns = json::parse(res->body);
  REQUIRE(patterns.size() == 1);
  CHECK(patterns[0]["payload"]["text"] == "NP such as LIST");
  const std::string id = patterns[0]["id"];

  const std::string accept = R"({"verdict":"accepted","who":"expert"})";
  res = cli.Post("/api/items/" + id + "/decision", accept, "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["status"] == "accepted");

  res = cli.Post("/api/items/" + id + "/decision", accept, "application/json");
  REQUIRE(res);
  CHECK(res->status == 409);
  res = cli.Post("/api/items/ffffffffffffffff/decision", accept, "application/json");
  REQUIRE(res);
  CHECK(res->status == 404);
  res = cli.Post("/api/items/" + id + "/decision", R"({"verdict":"maybe","who":"x"})",
                 "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = cli.Post("/api/items/" + id + "/decision", "not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = cli.Get("/api/items?kind=widget");
  REQUIRE(res);
  CHECK(res->status == 400);

  res = cli.Post("/api/iterate", "", "application/json");
  REQUIRE(res);
  CHECK(json::parse(res->body)["new_candidates"] == 4);

  res = cli.Get("/api/items?kind=pair");
  REQUIRE(res);
  CHECK(json::parse(res->body).size() == 4);

  res = cli.Get("/api/status");
  REQUIRE(res);
  const json status = json::parse(res->body);
  CHECK(status["iteration"] == 2);
  CHECK(status["engine"] == "promethee");
  CHECK(status["counts"]["pending"] == 4);
  CHECK(status["counts"]["accepted"] == 1);
  CHECK(status["kinds"]["pair"] == 4);
}

TEST_CASE("HTTP iterate answers 409 while busy and 503 without engine") {
  testing::TempDir dir;
  Store store(dir.path());
  GateEngine gate;
  Running running(store, &gate);
  httplib::Client slow("127.0.0.1", running.port);
  httplib::Client fast("127.0.0.1", running.port);

  auto first = std::async(std::launch::async, [&] { return slow.Post("/api/iterate"); });
  gate.entered.get_future().wait();
  auto res = fast.Post("/api/iterate");
  REQUIRE(res);
  CHECK(res->status == 409);
  gate.release.set_value();
  auto done = first.get();
  REQUIRE(done);
  CHECK(done->status == 200);

  testing::TempDir dir2;
  Store bare(dir2.path());
  Running none(bare, nullptr);
  httplib::Client cli("127.0.0.1", none.port);
  res = cli.Post("/api/iterate");
  REQUIRE(res);
  CHECK(res->status == 503);
  res = cli.Get("/api/status");
  REQUIRE(res);
  CHECK(json::parse(res->body)["engine"].is_null());
}

}  // namespace
}  // namespace term
