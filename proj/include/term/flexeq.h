#ifndef TERM_FLEXEQ_H_
#define TERM_FLEXEQ_H_

// Flexible equality of words and multi-word terms.
//
// Two words are flexible-equal when their edit distance, normalized by the
// sum of their lengths, stays within 1/k. Two terms are flexible-equal when
// their restrictions (the words that are not functional words) have the same
// length and are flexible-equal rank by rank. All distances are exact
// rationals so threshold comparisons never depend on rounding.

#include <boost/rational.hpp>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "term/corpus.h"

namespace term {

using Rational = boost::rational<std::int64_t>;

// Accepts "3", "1/2" and finite decimals such as "0.25".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

struct CostConfig {
  Rational q{1};  // insertion or deletion of one letter
  Rational p{2};  // substitution of one letter by another
  Rational k{5};  // strictness; 1/k is the tolerated share of variation

  Rational threshold() const { return Rational(1) / k; }
  // Throws ConfigError unless q > 0, p > 0 and k >= 1.
  void validate() const;
};

struct Term {
  std::string surface;
  std::vector<std::string> words;
};

// Word and number tokens of `surface`, in order.
Term make_term(std::string_view surface, const SymbolSet& symbols = {});

// Minimum total cost of insertions (q), deletions (q) and substitutions (p)
// turning `a` into `b`. Quadratic time, one row of memory. Case-sensitive.
Rational edit_distance(std::u32string_view a, std::u32string_view b, const CostConfig& cfg);
Rational edit_distance(std::string_view a, std::string_view b, const CostConfig& cfg);

// edit_distance / (|a| + |b|), lengths in code points. Throws InvalidInput
// when both strings are empty.
Rational weighted_distance(std::u32string_view a, std::u32string_view b, const CostConfig& cfg);
Rational weighted_distance(std::string_view a, std::string_view b, const CostConfig& cfg);

// WD(fold(a), fold(b)) <= 1/k.
bool flex_equal_strings(std::string_view a, std::string_view b, const CostConfig& cfg);

// Words of `t` that are not in `functional`, order preserved.
std::vector<std::string> restriction(const Term& t, const Lexicon& functional);

bool flex_equal_terms(const Term& x, const Term& y, const CostConfig& cfg,
                      const Lexicon& functional);

// Mean rank-wise weighted distance of the (case-folded) restrictions.
// Throws IncomparableTerms when the restrictions differ in length or are empty.
Rational term_distance(const Term& x, const Term& y, const CostConfig& cfg,
                       const Lexicon& functional);

struct TermOccurrence {
  std::size_t term_index = 0;  // into the reference list
  std::string doc_id;
  TokenRange range;
  Rational distance{0};
};

// Precomputed reference terms for repeated scanning.
class TermMatcher {
 public:
  TermMatcher(std::vector<Term> refs, CostConfig cfg, Lexicon functional);

  // Non-overlapping occurrences, sorted by position. Windows stay inside a
  // sentence, contain no punctuation, and start and end on a non-functional
  // word. When several references match a window the closest one wins; when
  // windows overlap the longest, then leftmost, wins.
  std::vector<TermOccurrence> scan(const Document& doc) const;

  const std::vector<Term>& refs() const { return refs_; }
  const CostConfig& config() const { return cfg_; }
  const Lexicon& functional() const { return functional_; }

 private:
  struct Ref {
    std::vector<std::u32string> restricted;  // folded
    std::size_t max_window = 0;
  };

  std::vector<Term> refs_;
  CostConfig cfg_;
  Lexicon functional_;
  std::vector<Ref> compiled_;
  std::size_t max_window_ = 0;
};

std::vector<TermOccurrence> recognize_terms(const Document& doc, std::span<const Term> refs,
                                            const CostConfig& cfg, const Lexicon& functional);

}  // namespace term

#endif  // TERM_FLEXEQ_H_
