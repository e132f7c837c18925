#ifndef TERM_ANA_H_
#define TERM_ANA_H_

// Incremental term acquisition from raw text.
//
// Starting from a handful of known terms (the bootstrap), each iteration
// recognizes bootstrap terms in the corpus, looks at the words around them
// and infers new candidate terms from three kinds of recurring context:
//
//   arrangement  two bootstrap terms side by side ("DIESEL ENGINE")
//   scheme       a word tied to a term by a scheme word ("shade of WOOD")
//   adjunct      a word directly before a term, alone ("soft WOODS")
//
// Candidates join the bootstrap and the loop repeats until an iteration
// discovers nothing new or the iteration cap is reached.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "term/corpus.h"
#include "term/flexeq.h"

namespace term {

struct AnaConfig {
  std::size_t window = 5;       // tokens on each side of a recognized term
  std::size_t min_support = 3;  // contexts needed before a candidate is proposed
  std::size_t gap = 2;          // functional tokens allowed between linked items
  std::size_t max_iter = 20;
  bool include_seeds = false;   // list bootstrap seeds in the ranked output

  // Throws ConfigError unless window >= 1, min_support >= 2, max_iter >= 1.
  void validate() const;
};

// Everything the inference steps need besides the corpus and the bootstrap.
struct AnaSetup {
  AnaConfig config;
  CostConfig costs;
  Lexicon functional;
  Lexicon schemes;
};

enum class InferencePattern { kSeed, kArrangement, kScheme, kAdjunct };

std::string_view to_string(InferencePattern pattern);

// Known terms. No two entries are flexible-equal.
class Bootstrap {
 public:
  struct Entry {
    Term term;
    std::size_t generation = 0;  // 0 for seeds
  };

  Bootstrap(CostConfig costs, Lexicon functional)
      : costs_(costs), functional_(std::move(functional)) {}

  // Adds `term` unless it is flexible-equal to an existing entry or has an
  // empty restriction. Returns whether it was added.
  bool insert(Term term, std::size_t generation);
  bool contains_similar(const Term& term) const;
  // True when the single word `word` is flexible-equal to an entry.
  bool contains_similar_word(std::string_view word) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Term> terms() const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  CostConfig costs_;
  Lexicon functional_;
  std::vector<Entry> entries_;
};

struct Occurrence {
  TokenRange range;
  std::size_t term = 0;  // bootstrap entry index
};

struct ContextWindow {
  std::size_t doc = 0;  // index into the corpus
  std::size_t sentence = 0;
  Occurrence center;
  TokenRange left;
  TokenRange right;
  std::vector<Occurrence> others;  // further bootstrap occurrences inside left/right
};

struct Provenance {
  std::string doc_id;
  TokenRange range;

  bool operator==(const Provenance&) const = default;
};

struct AnaCandidate {
  Term term;  // upper-cased surface
  InferencePattern pattern = InferencePattern::kArrangement;
  std::size_t support = 0;
  std::vector<Provenance> provenance;  // one entry per supporting context
  std::size_t frequency = 0;           // occurrences in the corpus, set by run_ana
  std::size_t generation = 0;
};

// One window per recognized bootstrap occurrence. Throws ConfigError on an
// empty bootstrap.
std::vector<ContextWindow> collect_contexts(const std::vector<Document>& corpus,
                                            const Bootstrap& boot, const AnaSetup& setup);

std::vector<AnaCandidate> infer_arrangements(const std::vector<Document>& corpus,
                                             const std::vector<ContextWindow>& windows,
                                             const Bootstrap& boot, const AnaSetup& setup);

std::vector<AnaCandidate> infer_scheme_candidates(const std::vector<Document>& corpus,
                                                  const std::vector<ContextWindow>& windows,
                                                  const Bootstrap& boot, const AnaSetup& setup);

std::vector<AnaCandidate> infer_adjunct_candidates(const std::vector<Document>& corpus,
                                                   const std::vector<ContextWindow>& windows,
                                                   const Bootstrap& boot, const AnaSetup& setup);

struct AnaResult {
  std::vector<AnaCandidate> candidates;  // ranked
  std::size_t iterations = 0;
};

// Runs the bootstrap loop from `seeds`. Candidates are ranked by corpus
// frequency (descending), then surface.
AnaResult run_ana(const std::vector<Document>& corpus, const std::vector<Term>& seeds,
                  const AnaSetup& setup);

}  // namespace term

#endif  // TERM_ANA_H_
