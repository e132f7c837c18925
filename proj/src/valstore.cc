#include "term/valstore.h"

#include <fcntl.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "term/error.h"

namespace term {

using nlohmann::json;

std::string_view to_string(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::kTerm: return "term";
    case CandidateKind::kPattern: return "pattern";
    case CandidateKind::kPair: return "pair";
  }
  return "term";
}

std::string_view to_string(ItemStatus status) {
  switch (status) {
    case ItemStatus::kPending: return "pending";
    case ItemStatus::kAccepted: return "accepted";
    case ItemStatus::kRejected: return "rejected";
  }
  return "pending";
}

std::optional<CandidateKind> parse_candidate_kind(std::string_view s) {
  for (auto k : {CandidateKind::kTerm, CandidateKind::kPattern, CandidateKind::kPair}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<ItemStatus> parse_item_status(std::string_view s) {
  for (auto st : {ItemStatus::kPending, ItemStatus::kAccepted, ItemStatus::kRejected}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

json to_json(const ValidationItem& item) {
  json j = json::object();
  j["id"] = item.id;
  j["kind"] = to_string(item.kind);
  j["status"] = to_string(item.status);
  j["score"] = item.score;
  j["iteration"] = item.iteration;
  j["payload"] = item.payload;
  j["evidence"] = item.evidence;
  j["decided_at"] = item.decided_at ? json(*item.decided_at) : json(nullptr);
  j["decided_by"] = item.decided_by ? json(*item.decided_by) : json(nullptr);
  return j;
}

namespace {

ValidationItem item_from_json(const json& j) {
  ValidationItem item;
  item.id = j.at("id").get<std::string>();
  const auto kind = parse_candidate_kind(j.at("kind").get<std::string>());
  const auto status = parse_item_status(j.value("status", "pending"));
  if (!kind || !status) throw DataError("bad kind or status in item " + item.id);
  item.kind = *kind;
  item.status = *status;
  item.score = j.value("score", 0.0);
  item.iteration = j.value("iteration", std::size_t{0});
  item.payload = j.at("payload");
  item.evidence = j.value("evidence", json::object());
  if (j.contains("decided_at") && !j["decided_at"].is_null()) item.decided_at = j["decided_at"];
  if (j.contains("decided_by") && !j["decided_by"].is_null()) item.decided_by = j["decided_by"];
  return item;
}

std::string collapse_spaces(const std::string& s) {
  std::istringstream in(s);
  std::string out;
  for (std::string w; in >> w;) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

json canonical(const json& j) {
  if (j.is_string()) return collapse_spaces(j.get<std::string>());
  if (j.is_array()) {
    json out = json::array();
    for (const auto& x : j) out.push_back(canonical(x));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();  // std::map backed, so keys come out sorted
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = canonical(it.value());
    return out;
  }
  return j;
}

std::string iso_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

[[noreturn]] void io_fail(const std::string& what, const std::filesystem::path& p) {
  throw IoError(what + " " + p.string() + ": " + std::strerror(errno));
}

void fsync_path(const std::filesystem::path& p, int flags) {
  const int fd = ::open(p.c_str(), flags);
  if (fd < 0) io_fail("cannot open", p);
  if (::fsync(fd) != 0) {
    ::close(fd);
    io_fail("cannot fsync", p);
  }
  ::close(fd);
}

void write_all(int fd, const std::string& data, const std::filesystem::path& p) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("cannot write", p);
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

std::string item_id(CandidateKind kind, const json& payload) {
  const std::string text = std::string(to_string(kind)) + "\n" + canonical(payload).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < 8; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

Store::Store(std::filesystem::path dir, Clock clock)
    : dir_(std::move(dir)), clock_(clock ? std::move(clock) : Clock(iso_now)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    throw IoError("cannot open store directory " + dir_.string());
  }
  load();
}

void Store::load() {
  const auto snap = dir_ / "snapshot.jsonl";
  std::size_t skip = 0;
  if (std::filesystem::exists(snap)) {
    std::ifstream in(snap);
    if (!in) throw IoError("cannot read " + snap.string());
    std::string line;
    std::size_t line_no = 0;
    try {
      if (std::getline(in, line)) {
        ++line_no;
        const json header = json::parse(line);
        skip = header.at("log_lines").get<std::size_t>();
        iteration_ = header.at("iteration").get<std::size_t>();
      }
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ValidationItem item = item_from_json(json::parse(line));
        items_[item.id] = std::move(item);
      }
    } catch (const json::exception& e) {
      throw ParseError(snap.string(), line_no, e.what());
    }
  }

  const auto log = dir_ / "log.jsonl";
  if (!std::filesystem::exists(log)) {
    if (skip > 0) throw DataError("snapshot refers to missing " + log.string());
    return;
  }
  std::ifstream in(log, std::ios::binary);
  if (!in) throw IoError("cannot read " + log.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t pos = 0, line_no = 0, good_end = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string line = text.substr(pos, complete ? nl - pos : std::string::npos);
    const std::size_t next = complete ? nl + 1 : text.size();
    const bool last = next >= text.size();
    ++line_no;
    json event;
    try {
      event = json::parse(line);
    } catch (const json::exception& e) {
      if (last) break;  // torn tail from a crash mid-append
      throw ParseError(log.string(), line_no, e.what());
    }
    if (!complete) break;
    if (line_no > skip) {
      try {
        apply(event);
      } catch (const json::exception& e) {
        throw ParseError(log.string(), line_no, e.what());
      }
      ++since_snapshot_;
    }
    good_end = next;
    pos = next;
  }
  log_lines_ = line_no;
  if (good_end < text.size()) {
    --log_lines_;
    if (::truncate(log.c_str(), static_cast<off_t>(good_end)) != 0) io_fail("cannot truncate", log);
  }
  if (log_lines_ < skip) throw DataError("log shorter than snapshot in " + dir_.string());
}

void Store::apply(const json& event) {
  const std::string op = event.at("op").get<std::string>();
  if (op == "insert") {
    ValidationItem item = item_from_json(event.at("item"));
    items_.emplace(item.id, std::move(item));
  } else if (op == "decision") {
    const std::string id = event.at("id").get<std::string>();
    auto it = items_.find(id);
    if (it == items_.end()) throw DataError("decision for unknown item " + id);
    const auto status = parse_item_status(event.at("status").get<std::string>());
    if (!status || *status == ItemStatus::kPending) throw DataError("bad verdict for " + id);
    it->second.status = *status;
    it->second.decided_at = event.at("at").get<std::string>();
    it->second.decided_by = event.at("by").get<std::string>();
  } else if (op == "iteration") {
    iteration_ = event.at("iteration").get<std::size_t>();
  } else {
    throw DataError("unknown log op '" + op + "'");
  }
}

void Store::append(const json& event) {
  const auto log = dir_ / "log.jsonl";
  const bool fresh = !std::filesystem::exists(log);
  const int fd = ::open(log.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) io_fail("cannot open", log);
  try {
    write_all(fd, event.dump() + "\n", log);
  } catch (...) {
    ::close(fd);
    throw;
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    io_fail("cannot fsync", log);
  }
  ::close(fd);
  if (fresh) fsync_path(dir_, O_RDONLY | O_DIRECTORY);
  // Durable first, then visible; a snapshot must see this event.
  apply(event);
  ++log_lines_;
  if (++since_snapshot_ >= kSnapshotEvery) write_snapshot();
}

void Store::write_snapshot() {
  const auto tmp = dir_ / "snapshot.jsonl.tmp";
  std::string data = json{{"log_lines", log_lines_}, {"iteration", iteration_}}.dump() + "\n";
  for (const auto& [id, item] : items_) data += to_json(item).dump() + "\n";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) io_fail("cannot open", tmp);
  try {
    write_all(fd, data, tmp);
  } catch (...) {
    ::close(fd);
    throw;
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    io_fail("cannot fsync", tmp);
  }
  ::close(fd);
  std::filesystem::rename(tmp, dir_ / "snapshot.jsonl");
  fsync_path(dir_, O_RDONLY | O_DIRECTORY);
  since_snapshot_ = 0;
}

std::vector<ValidationItem> Store::list_items(std::optional<CandidateKind> kind,
                                              std::optional<ItemStatus> status) const {
  std::shared_lock lock(mu_);
  std::vector<ValidationItem> out;
  for (const auto& [id, item] : items_) {
    if (kind && item.kind != *kind) continue;
    if (status && item.status != *status) continue;
    out.push_back(item);
  }
  std::sort(out.begin(), out.end(), [](const ValidationItem& a, const ValidationItem& b) {
    if (a.kind != b.kind) return to_string(a.kind) < to_string(b.kind);
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  return out;
}

std::optional<ValidationItem> Store::find(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = items_.find(id);
  if (it == items_.end()) return std::nullopt;
  return it->second;
}

ValidationItem Store::record_decision(const std::string& id, ItemStatus verdict,
                                      const std::string& who) {
  if (verdict == ItemStatus::kPending) throw InvalidInput("verdict must be accepted or rejected");
  std::unique_lock lock(mu_);
  auto it = items_.find(id);
  if (it == items_.end()) throw NotFound("no item with id " + id);
  if (it->second.status != ItemStatus::kPending) {
    throw Conflict("item " + id + " is already " + std::string(to_string(it->second.status)));
  }
  const std::string at = clock_();
  append(json{{"op", "decision"}, {"id", id}, {"status", to_string(verdict)}, {"by", who}, {"at", at}});
  return it->second;
}

namespace {

ValidationItem make_item(const NewCandidate& c, std::size_t iteration) {
  ValidationItem item;
  item.id = item_id(c.kind, c.payload);
  item.kind = c.kind;
  item.payload = c.payload;
  item.evidence = c.evidence.is_null() ? json::object() : c.evidence;
  item.score = c.score;
  item.iteration = iteration;
  return item;
}

}  // namespace

std::size_t Store::insert(const std::vector<NewCandidate>& candidates) {
  std::unique_lock lock(mu_);
  return insert_locked(candidates, iteration_);
}

std::size_t Store::insert_locked(const std::vector<NewCandidate>& candidates,
                                 std::size_t iteration) {
  std::size_t added = 0;
  for (const auto& c : candidates) {
    ValidationItem item = make_item(c, iteration);
    if (items_.count(item.id)) continue;
    append(json{{"op", "insert"}, {"item", to_json(item)}});
    ++added;
  }
  return added;
}

IterationSummary Store::run_iteration(Engine* engine) {
  std::unique_lock turn(turn_mu_, std::try_to_lock);
  if (!turn.owns_lock()) throw Busy("an iteration is already running");
  if (engine == nullptr) throw ConfigError("no engine configured for this store");

  const auto accepted = list_items(std::nullopt, ItemStatus::kAccepted);
  const auto candidates = engine->run(accepted);

  std::unique_lock lock(mu_);
  const std::size_t next = iteration_ + 1;
  IterationSummary summary;
  summary.new_candidates = insert_locked(candidates, next);
  append(json{{"op", "iteration"}, {"iteration", next}});
  summary.iteration = next;
  return summary;
}

std::size_t Store::iteration() const {
  std::shared_lock lock(mu_);
  return iteration_;
}

StoreCounts Store::counts() const {
  std::shared_lock lock(mu_);
  StoreCounts c;
  for (auto s : {ItemStatus::kPending, ItemStatus::kAccepted, ItemStatus::kRejected}) {
    c.by_status[std::string(to_string(s))] = 0;
  }
  for (auto k : {CandidateKind::kTerm, CandidateKind::kPattern, CandidateKind::kPair}) {
    c.by_kind[std::string(to_string(k))] = 0;
  }
  for (const auto& [id, item] : items_) {
    ++c.by_status[std::string(to_string(item.status))];
    ++c.by_kind[std::string(to_string(item.kind))];
  }
  return c;
}

}  // namespace term
