#ifndef TERM_PROMETHEE_H_
#define TERM_PROMETHEE_H_

// Lexico-syntactic pattern acquisition for a semantic relation.
//
// Sentences holding a known related pair are abstracted into expressions
// (noun phrases become NP, enumerations become LIST, other words are kept as
// lemmas). Similar expressions are clustered and generalized into candidate
// patterns. Patterns an expert has validated are then matched against the
// corpus to propose further pairs. Nothing is accepted automatically.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "term/corpus.h"
#include "term/flexeq.h"

namespace term {

struct SeedPair {
  std::string term1;  // e.g. the hyponym
  std::string term2;  // e.g. the hypernym
  std::string relation;
};

// Reads `term1<TAB>term2` lines; `#` comments and blank lines are skipped.
// Throws ParseError on malformed lines or term1 == term2.
std::vector<SeedPair> load_seed_pairs(const std::filesystem::path& path,
                                      const std::string& relation);

struct PrometheeConfig {
  std::string relation = "hypernym";
  Rational sim_threshold{1, 2};
  std::size_t window = 5;  // LIT items kept on each side of the slots
  // Verbs dropped when another verb follows them ("was found" -> find).
  std::vector<std::string> auxiliaries = {"be", "have", "être", "avoir"};

  // Throws ConfigError unless 0 < sim_threshold <= 1 and relation is set.
  void validate() const;
};

enum class ItemKind { kLit, kNp, kList };

std::string_view to_string(ItemKind kind);

struct ExprItem {
  ItemKind kind = ItemKind::kLit;
  std::string lemma;               // LIT only, case-folded
  int slot = 0;                    // 0 none, 1 binds term1, 2 binds term2
  TokenRange range;                // covered sentence tokens
  std::vector<std::string> terms;  // NP: its lemma text; LIST: one per member

  bool same_shape(const ExprItem& o) const {
    return kind == o.kind && lemma == o.lemma && slot == o.slot;
  }
};

struct SentenceRef {
  std::string doc_id;
  std::size_t sentence = 0;

  auto operator<=>(const SentenceRef&) const = default;
};

struct LexSynExpression {
  std::vector<ExprItem> items;
  SentenceRef source;

  std::size_t slot_index(int slot) const;  // npos when absent
  std::string text() const;                // "NP find in NP such as LIST"
};

// The whole sentence as unslotted expression items.
std::vector<ExprItem> expression_items(const Sentence& sentence, const PrometheeConfig& cfg = {});

struct SeedHit {
  std::size_t doc = 0;
  std::size_t sentence = 0;
  std::size_t seed = 0;
};

// Sentences where both terms of a seed pair appear as (parts of) noun phrases
// that include the phrase head.
std::vector<SeedHit> find_seed_sentences(const std::vector<TaggedDocument>& corpus,
                                         const std::vector<SeedPair>& seeds);

// Throws InvalidInput unless both terms are found in two distinct items.
LexSynExpression build_expression(const Sentence& sentence, const SeedPair& pair,
                                  const PrometheeConfig& cfg = {});

// 2 * LCS / (|e1| + |e2|). LIT items match on lemma, NP and LIST on kind.
Rational expression_similarity(const LexSynExpression& e1, const LexSynExpression& e2);

enum class Status { kCandidate, kValidated, kRejected };

std::string_view to_string(Status status);

struct Pattern {
  std::vector<ExprItem> items;  // ranges and terms are empty
  std::string relation;
  std::vector<SentenceRef> support;
  Status status = Status::kCandidate;

  std::string text() const;
};

// Common subsequence of all members, folded pairwise; items align only when
// kind, lemma and slot role agree, and alignments keeping the slots (then
// the literals) win over longer ones that drop them. Returns nullopt when the
// result loses a slot or has no literal.
std::optional<Pattern> generalize(const std::vector<LexSynExpression>& cluster,
                                  const std::string& relation);

struct Binding {
  std::size_t slot1 = 0;  // indices into the sentence items
  std::size_t slot2 = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Non-overlapping, minimal-span embeddings of `pattern` in `items`, left to
// right. A pattern NP slot may bind a LIST.
std::vector<Binding> match_pattern(const Pattern& pattern, const std::vector<ExprItem>& items);

struct ExtractedPair {
  std::string term1;
  std::string term2;
  std::string relation;
  std::size_t pattern = 0;  // index into the applied pattern list
  SentenceRef source;
  Status status = Status::kCandidate;
};

// Applies validated patterns only; LIST slots fan out to one pair per member.
std::vector<ExtractedPair> apply_patterns(const std::vector<TaggedDocument>& corpus,
                                          const std::vector<Pattern>& patterns,
                                          const PrometheeConfig& cfg = {});

struct PrometheeTurn {
  std::vector<Pattern> patterns;     // new candidates, support >= 2
  std::vector<ExtractedPair> pairs;  // distinct (term1, term2), first source kept
};

// One loop turn. `seeds` should already include accepted pairs; `patterns`
// may hold any status, only validated ones are applied. Throws ConfigError on
// empty seeds.
PrometheeTurn run_promethee(const std::vector<TaggedDocument>& corpus,
                            const std::vector<SeedPair>& seeds,
                            const std::vector<Pattern>& patterns, const PrometheeConfig& cfg);

}  // namespace term

#endif  // TERM_PROMETHEE_H_
