#ifndef TERM_CORPUS_H_
#define TERM_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace term {

// ---------------------------------------------------------------------------
// Raw text
// ---------------------------------------------------------------------------

enum class TokenKind { kWord, kNumber, kPunctuation };

std::string_view to_string(TokenKind kind);

struct Token {
  std::string surface;
  std::size_t offset = 0;  // code-point index into the source text
  TokenKind kind = TokenKind::kWord;

  bool operator==(const Token&) const = default;
};

// Characters that may occur inside a word: every letter (accented ones
// included) and the digits, plus the hyphen when enabled.
struct SymbolSet {
  bool hyphen = false;

  bool contains(char32_t ch) const;
};

// Maximal runs of symbol characters become word (or number, if all digits)
// tokens. Every other non-space character is a one-character punctuation
// token. Whitespace is dropped.
std::vector<Token> tokenize(std::string_view text, const SymbolSet& symbols = {});

// Half-open token index range.
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool overlaps(const TokenRange& o) const { return begin < o.end && o.begin < end; }
  auto operator<=>(const TokenRange&) const = default;
};

struct Document {
  std::string id;
  std::vector<Token> tokens;
  std::vector<TokenRange> sentence_bounds;  // partitions `tokens`, none empty
};

// Tokenizes `text` and splits it into sentences. A sentence ends after `.`,
// `!` or `?` when whitespace and an uppercase letter follow, and at every
// paragraph break (blank line).
Document make_document(std::string id, std::string_view text, const SymbolSet& symbols = {});

// Loads a directory of UTF-8 `.txt` files, one document per file, ordered by
// file name. A single `.txt` path is accepted as a one-document corpus.
std::vector<Document> load_raw_corpus(const std::filesystem::path& path,
                                      const SymbolSet& symbols = {});

// Joins the surfaces of a token range with single spaces.
std::string join_surface(const Document& doc, TokenRange range);

// ---------------------------------------------------------------------------
// Lexicons
// ---------------------------------------------------------------------------

// Named set of case-folded words; lookups fold their argument.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::string name) : name_(std::move(name)) {}
  Lexicon(std::string name, std::initializer_list<std::string_view> words);

  void insert(std::string_view word);
  bool contains(std::string_view word) const;

  const std::string& name() const { return name_; }
  const std::set<std::string>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::string name_;
  std::set<std::string> entries_;
};

// One entry per line, `#` starts a comment line, blank lines skipped.
Lexicon load_lexicon(const std::filesystem::path& path);
void write_lexicon(const Lexicon& lexicon, const std::filesystem::path& path);

// Reads a UTF-8 list file (same syntax as lexicons) preserving case and
// order. Used for reference-term and bootstrap files.
std::vector<std::string> read_entries(const std::filesystem::path& path);

// Reads a whole file. Throws IoError if unreadable.
std::string read_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Tagged corpora
// ---------------------------------------------------------------------------

enum class Pos { kN, kAdj, kPrep, kDet, kV, kVinf, kAdv, kConj, kPunc, kOther };

std::optional<Pos> parse_pos(std::string_view tag);
std::string_view to_string(Pos pos);

struct TaggedToken {
  std::string form;
  Pos pos = Pos::kOther;
  std::string lemma;
};

using Sentence = std::vector<TaggedToken>;

struct TaggedDocument {
  std::string id;
  std::vector<Sentence> sentences;
};

// TSV `form<TAB>pos<TAB>lemma`; blank line ends a sentence; `##DOC <id>`
// starts a document. `source` names the input in error messages.
std::vector<TaggedDocument> parse_tagged(std::string_view text, const std::string& source);
std::vector<TaggedDocument> load_tagged(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Noun phrases
// ---------------------------------------------------------------------------

struct NounPhrase {
  TokenRange range;
  std::string head_lemma;
  std::string text;
  bool acronym = false;
};

// Enumeration `NP (, NP)* (CONJ NP)?` of at least two noun phrases.
struct NpList {
  TokenRange range;
  std::vector<std::size_t> members;  // indices into NpAnalysis::phrases
};

struct NpAnalysis {
  std::vector<NounPhrase> phrases;
  std::vector<NpList> lists;
};

// Leftmost-longest matches of `(DET)? ADJ* N+ (ADJ | PREP (DET)? N+)*`, plus
// single-token acronyms (two or more letters, all uppercase), plus lists.
NpAnalysis detect_noun_phrases(const Sentence& sentence);

// Case-folded lemmas of a phrase, leading determiner dropped, space-joined.
std::string phrase_lemma_text(const Sentence& sentence, const NounPhrase& phrase);

}  // namespace term

#endif  // TERM_CORPUS_H_
