#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "term/corpus.h"
#include "term/error.h"
#include "test_util.h"

namespace term {
namespace {

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

Sentence tagged(std::initializer_list<std::pair<const char*, Pos>> words) {
  Sentence s;
  for (const auto& [form, pos] : words) s.push_back({form, pos, form});
  return s;
}

TEST_CASE("tokenize splits on whitespace and punctuation") {
  CHECK(surfaces(tokenize("colour of a hammer")) ==
        std::vector<std::string>{"colour", "of", "a", "hammer"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("chimio prophylaxie au rifampine").size() == 4);

  const auto toks = tokenize("fixation d'azote, 12 fois");
  CHECK(surfaces(toks) ==
        std::vector<std::string>{"fixation", "d", "'", "azote", ",", "12", "fois"});
  CHECK(toks[2].kind == TokenKind::kPunctuation);
  CHECK(toks[5].kind == TokenKind::kNumber);
  CHECK(toks[6].kind == TokenKind::kWord);
}

TEST_CASE("tokenize keeps accented letters and counts offsets in code points") {
  const auto toks = tokenize("émballage biodégradable");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].surface == "émballage");
  CHECK(toks[1].offset == 10);
}

TEST_CASE("hyphen membership follows the symbol set") {
  CHECK(tokenize("chimio-prophylaxie").size() == 3);
  CHECK(tokenize("chimio-prophylaxie", SymbolSet{.hyphen = true}).size() == 1);
}

TEST_CASE("tokenize rejects malformed UTF-8") {
  CHECK_THROWS_AS(tokenize("ab\xff"), EncodingError);
}

TEST_CASE("tokenize property: offsets increase and surfaces rebuild the text") {
  std::mt19937 rng(7);
  const std::u32string alphabet = U"abcé Z.,;!?\n-9'";
  for (int trial = 0; trial < 300; ++trial) {
    std::u32string text;
    const int len = static_cast<int>(rng() % 40);
    for (int i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
    std::string utf8;
    std::string squashed;
    for (char32_t c : text) utf8 += c < 0x80 ? std::string(1, static_cast<char>(c)) : "é";
    for (char ch : utf8) {
      if (ch != ' ' && ch != '\n') squashed += ch;
    }
    const auto toks = tokenize(utf8);
    std::string rebuilt;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      CHECK_FALSE(toks[i].surface.empty());
      if (i > 0) CHECK(toks[i].offset > toks[i - 1].offset);
      rebuilt += toks[i].surface;
    }
    CHECK(rebuilt == squashed);
  }
}

TEST_CASE("make_document splits sentences") {
  const auto doc = make_document("d", "The engine runs. It is loud.\nstill loud? yes\n\nnew paragraph");
  REQUIRE(doc.sentence_bounds.size() == 3);
  CHECK(join_surface(doc, doc.sentence_bounds[0]) == "The engine runs .");
  CHECK(join_surface(doc, doc.sentence_bounds[1]) == "It is loud . still loud ? yes");
  CHECK(join_surface(doc, doc.sentence_bounds[2]) == "new paragraph");
}

TEST_CASE("sentence bounds partition the tokens") {
  std::mt19937 rng(11);
  const std::string pieces[] = {"word", "Cap", ".", "!", " ", "\n", "\n\n", "x?", ","};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    for (int i = 0; i < 25; ++i) text += pieces[rng() % std::size(pieces)];
    const auto doc = make_document("d", text);
    std::size_t expect = 0;
    for (const auto& r : doc.sentence_bounds) {
      CHECK(r.begin == expect);
      CHECK(r.end > r.begin);
      expect = r.end;
    }
    CHECK(expect == doc.tokens.size());
  }
}

TEST_CASE("load_raw_corpus reads .txt files in name order") {
  testing::TempDir dir;
  dir.write("b.txt", "second");
  dir.write("a.txt", "first");
  dir.write("skip.md", "ignored");
  const auto docs = load_raw_corpus(dir.path());
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == "a");
  CHECK(docs[1].id == "b");
  CHECK_THROWS_AS(load_raw_corpus(dir.path() / "missing"), IoError);
}

TEST_CASE("load_lexicon folds case, skips comments, collapses duplicates") {
  testing::TempDir dir;
  CHECK(load_lexicon(dir.write("a.txt", "a\nof\nthe")).size() == 3);
  CHECK(load_lexicon(dir.write("b.txt", "Of\nof")).size() == 1);
  const auto lex = load_lexicon(dir.write("c.txt", "# comment\nof"));
  CHECK(lex.size() == 1);
  CHECK(lex.contains("OF"));
  CHECK_FALSE(lex.contains("# comment"));
}

TEST_CASE("load_lexicon errors") {
  testing::TempDir dir;
  CHECK_THROWS_AS(load_lexicon(dir.path() / "nope.txt"), IoError);
  try {
    load_lexicon(dir.write("bad.txt", "ok\nb\xc3("));
    FAIL("expected EncodingError");
  } catch (const EncodingError& e) {
    CHECK(e.byte_offset() == 4);
  }
}

TEST_CASE("write_lexicon then load_lexicon preserves the folded entry set") {
  testing::TempDir dir;
  std::mt19937 rng(3);
  const char* words[] = {"Of", "the", "ÉTÉ", "été", "Any", "x", "colour", "Colour"};
  for (int trial = 0; trial < 50; ++trial) {
    Lexicon lex("trial");
    for (int i = 0; i < 5; ++i) lex.insert(words[rng() % std::size(words)]);
    const auto path = dir.path() / ("lex" + std::to_string(trial) + ".txt");
    write_lexicon(lex, path);
    CHECK(load_lexicon(path).entries() == lex.entries());
  }
}

TEST_CASE("parse_tagged builds documents and sentences") {
  auto docs = parse_tagged("emballage\tN\temballage\nbiodégradable\tADJ\tbiodégradable\n", "t.tsv");
  REQUIRE(docs.size() == 1);
  REQUIRE(docs[0].sentences.size() == 1);
  CHECK(docs[0].sentences[0].size() == 2);
  CHECK(docs[0].sentences[0][1].pos == Pos::kAdj);

  docs = parse_tagged("a\tDET\ta\n\nb\tN\tb\n\n\n##DOC two\nc\tN\tc\n", "t.tsv");
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].sentences.size() == 2);
  CHECK(docs[1].id == "two");
}

TEST_CASE("parse_tagged reports the failing line") {
  try {
    parse_tagged("a\tDET\ta\nx\tN\n", "t.tsv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    parse_tagged("a\tNOUN\ta\n", "t.tsv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("detect_noun_phrases on the medical sentence") {
  const auto docs = load_tagged(testing::fixture("medical.tsv"));
  const Sentence& s = docs.at(0).sentences.at(0);
  const auto analysis = detect_noun_phrases(s);
  std::vector<std::string> texts;
  for (const auto& np : analysis.phrases) texts.push_back(np.text);
  CHECK(texts == std::vector<std::string>{"Neuronal damage", "vulnerable areas", "neocortex",
                                          "striatum", "hippocampus", "thalamus"});
  CHECK(analysis.phrases[1].head_lemma == "area");
  REQUIRE(analysis.lists.size() == 1);
  CHECK(analysis.lists[0].members == std::vector<std::size_t>{2, 3, 4, 5});
  CHECK(analysis.lists[0].range.begin == 11);
  CHECK(analysis.lists[0].range.end == 18);
}

TEST_CASE("detect_noun_phrases grammar cases") {
  CHECK(detect_noun_phrases(tagged({{"runs", Pos::kV}, {"fell", Pos::kV}})).phrases.empty());

  auto a = detect_noun_phrases(tagged({{"protéine", Pos::kN}, {"de", Pos::kPrep}, {"poissons", Pos::kN}}));
  REQUIRE(a.phrases.size() == 1);
  CHECK(a.phrases[0].range == TokenRange{0, 3});
  CHECK(a.phrases[0].head_lemma == "protéine");

  a = detect_noun_phrases(tagged({{"the", Pos::kDet}, {"brain", Pos::kN}, {"regions", Pos::kN}}));
  REQUIRE(a.phrases.size() == 1);
  CHECK(a.phrases[0].head_lemma == "regions");

  a = detect_noun_phrases(tagged({{"see", Pos::kV}, {"MRI", Pos::kOther}, {"and", Pos::kConj},
                                  {"CT", Pos::kOther}}));
  REQUIRE(a.phrases.size() == 2);
  CHECK(a.phrases[0].acronym);
  CHECK(a.lists.size() == 1);

  // A dangling preposition is not part of the phrase.
  a = detect_noun_phrases(tagged({{"lait", Pos::kN}, {"de", Pos::kPrep}, {"qualité", Pos::kAdj}}));
  REQUIRE(a.phrases.size() == 1);
  CHECK(a.phrases[0].range == TokenRange{0, 1});
}

TEST_CASE("noun phrase invariants on random tag sequences") {
  std::mt19937 rng(5);
  const Pos tags[] = {Pos::kN, Pos::kAdj, Pos::kPrep, Pos::kDet, Pos::kV, Pos::kPunc, Pos::kConj};
  for (int trial = 0; trial < 500; ++trial) {
    Sentence s;
    const int len = 1 + static_cast<int>(rng() % 15);
    for (int i = 0; i < len; ++i) {
      const Pos p = tags[rng() % std::size(tags)];
      s.push_back({p == Pos::kPunc ? "," : "w", p, "w"});
    }
    const auto a = detect_noun_phrases(s);
    for (const auto& np : a.phrases) {
      bool has_noun = false;
      for (std::size_t i = np.range.begin; i < np.range.end; ++i) has_noun |= s[i].pos == Pos::kN;
      CHECK(has_noun);
    }
    for (const auto& list : a.lists) {
      CHECK(list.members.size() >= 2);
      for (std::size_t m = 1; m < list.members.size(); ++m) {
        CHECK(a.phrases[list.members[m - 1]].range.end < a.phrases[list.members[m]].range.begin);
      }
    }
  }
}

}  // namespace
}  // namespace term
