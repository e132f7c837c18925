#ifndef TERM_VALSTORE_H_
#define TERM_VALSTORE_H_

// Durable store for the expert validation loop.
//
// Candidates (terms, patterns, pairs) enter as pending items keyed by a hash
// of their payload, and an expert moves each one to accepted or rejected
// exactly once. Every change is appended to log.jsonl and fsync'ed before the
// call returns; snapshot.jsonl is rewritten now and then so reload does not
// replay the whole history.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace term {

enum class CandidateKind { kTerm, kPattern, kPair };
enum class ItemStatus { kPending, kAccepted, kRejected };

std::string_view to_string(CandidateKind kind);
std::string_view to_string(ItemStatus status);
std::optional<CandidateKind> parse_candidate_kind(std::string_view s);
std::optional<ItemStatus> parse_item_status(std::string_view s);

struct ValidationItem {
  std::string id;
  CandidateKind kind = CandidateKind::kTerm;
  nlohmann::json payload;   // identity fields, hashed into the id
  nlohmann::json evidence;  // provenance, support; not hashed
  double score = 0;
  std::size_t iteration = 0;  // loop turn that introduced the item
  ItemStatus status = ItemStatus::kPending;
  std::optional<std::string> decided_at;
  std::optional<std::string> decided_by;
};

nlohmann::json to_json(const ValidationItem& item);

struct NewCandidate {
  CandidateKind kind = CandidateKind::kTerm;
  nlohmann::json payload;
  nlohmann::json evidence;
  double score = 0;
};

// First 16 hex digits of SHA-256 over the kind and the canonical payload
// (sorted keys, string whitespace collapsed).
std::string item_id(CandidateKind kind, const nlohmann::json& payload);

// One turn of ANA or Promethee driven by the accepted items.
class Engine {
 public:
  virtual ~Engine() = default;
  virtual std::string name() const = 0;
  virtual std::vector<NewCandidate> run(const std::vector<ValidationItem>& accepted) = 0;
};

struct IterationSummary {
  std::size_t new_candidates = 0;
  std::size_t iteration = 0;
};

struct StoreCounts {
  std::map<std::string, std::size_t> by_status;
  std::map<std::string, std::size_t> by_kind;
};

class Store {
 public:
  using Clock = std::function<std::string()>;

  // Opens or creates the store in `dir`, replaying snapshot and log. A torn
  // final log line is dropped. Throws IoError / ParseError.
  explicit Store(std::filesystem::path dir, Clock clock = {});

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  // Sorted by kind, score descending, id.
  std::vector<ValidationItem> list_items(std::optional<CandidateKind> kind = std::nullopt,
                                         std::optional<ItemStatus> status = std::nullopt) const;
  std::optional<ValidationItem> find(const std::string& id) const;

  // Throws NotFound, Conflict, or InvalidInput for a pending verdict.
  ValidationItem record_decision(const std::string& id, ItemStatus verdict, const std::string& who);

  // Inserts unseen candidates as pending; returns how many were new.
  std::size_t insert(const std::vector<NewCandidate>& candidates);

  // One loop turn: engine over accepted items, insert, bump the counter.
  // Throws Busy while another turn runs, ConfigError when engine is null.
  IterationSummary run_iteration(Engine* engine);

  std::size_t iteration() const;
  StoreCounts counts() const;
  const std::filesystem::path& dir() const { return dir_; }

  static constexpr std::size_t kSnapshotEvery = 64;

 private:
  void load();
  void apply(const nlohmann::json& event);
  // Callers hold the write lock.
  void append(const nlohmann::json& event);
  std::size_t insert_locked(const std::vector<NewCandidate>& candidates, std::size_t iteration);
  void write_snapshot();

  std::filesystem::path dir_;
  Clock clock_;
  mutable std::shared_mutex mu_;
  std::mutex turn_mu_;
  std::map<std::string, ValidationItem> items_;
  std::size_t iteration_ = 0;
  std::size_t log_lines_ = 0;
  std::size_t since_snapshot_ = 0;
};

}  // namespace term

#endif  // TERM_VALSTORE_H_
