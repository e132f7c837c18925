#ifndef TERM_ACABIT_H_
#define TERM_ACABIT_H_

// Base-term extraction over tagged corpora.
//
// Local grammars pick two-word noun-headed structures and their variants out
// of each sentence. Occurrences are grouped under the lemmas of their two
// content words, and groups are ranked with an association measure computed
// on the 2x2 contingency table of the pair.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "term/corpus.h"

namespace term {

enum class BasePattern {
  kNAdj,       // [N ADJ]            emballage biodégradable
  kNN,         // [N N]              ions calcium
  kNPrepDetN,  // [N (PREP (DET)) N] protéine de poissons
  kNAVinf,     // [N à VINF]         viandes à griller
};

enum class Variant {
  kBase,
  kGraphic,          // inflection or case
  kPrepVariation,    // different preposition
  kOptionalPrepDet,  // preposition and/or determiner present in one, absent in other
  kInsertion,        // modifier inside N PREP N
  kCoordination,     // N ADJ CONJ ADJ
};

std::string_view to_string(BasePattern p);
std::string_view to_string(Variant v);

struct PairOccurrence {
  std::string doc_id;
  std::size_t sentence = 0;
  TokenRange range;   // sentence-relative
  std::size_t first = 0;   // sentence index of the head noun
  std::size_t second = 0;  // sentence index of the second content word
  BasePattern pattern = BasePattern::kNAdj;
  Variant variant = Variant::kBase;
  std::string surface;
  std::optional<std::string> inserted_modifier;
};

// Longest base-term or variant match at every noun, in sentence order.
// Neither content word may be in `functional`.
std::vector<PairOccurrence> match_base_patterns(const Sentence& sentence,
                                                const Lexicon& functional);

struct PairKey {
  std::string lemma1;
  std::string lemma2;
  auto operator<=>(const PairKey&) const = default;
};

// Case-folded lemmas of the two content words.
PairKey normalize_occurrence(const PairOccurrence& occ, const Sentence& sentence);

struct ContingencyTable {
  std::int64_t a = 0;  // pair
  std::int64_t b = 0;  // lemma1 with another second word
  std::int64_t c = 0;  // lemma2 with another head
  std::int64_t d = 0;  // neither

  std::int64_t total() const { return a + b + c + d; }
};

// Log-likelihood ratio of the table. Throws InvalidInput when a == 0 or a
// cell is negative.
double score_pair(const ContingencyTable& table);

using AssociationMeasure = std::function<double(const ContingencyTable&)>;

// "llr" or "frequency". Throws ConfigError for anything else.
AssociationMeasure association_measure(std::string_view name);

struct CandidatePair {
  std::string lemma1;
  std::string lemma2;
  BasePattern pattern = BasePattern::kNAdj;
  std::vector<PairOccurrence> occurrences;
  std::size_t freq = 0;
  ContingencyTable table;
  double score = 0;
};

// Token offset of every sentence start, per document; lets callers turn
// sentence-relative ranges into document token indices.
std::vector<std::size_t> sentence_offsets(const TaggedDocument& doc);

// Match, group, label variants, score and rank: score descending, then
// frequency descending, then lemmas.
std::vector<CandidatePair> extract_acabit(const std::vector<TaggedDocument>& corpus,
                                          const Lexicon& functional,
                                          const AssociationMeasure& measure = score_pair);

}  // namespace term

#endif  // TERM_ACABIT_H_
