#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "term/ana.h"
#include "term/error.h"
#include "test_util.h"

namespace term {
namespace {

AnaSetup toy_setup() {
  AnaSetup s;
  s.functional = Lexicon("functional",
                         {"a", "any", "for", "in", "is", "may", "of", "or", "the", "this", "to"});
  s.schemes = Lexicon("schemes", {"of"});
  return s;
}

std::vector<Document> paragraphs(std::initializer_list<const char*> lines) {
  std::string text;
  for (const char* l : lines) text += std::string(l) + "\n\n";
  return {make_document("toy", text)};
}

Bootstrap boot_of(std::initializer_list<const char*> words, const AnaSetup& s) {
  Bootstrap b(s.costs, s.functional);
  for (const char* w : words) b.insert(make_term(w), 0);
  return b;
}

const std::initializer_list<const char*> kDiesel = {
    "the DIESEL ENGINE is", "this DIESEL ENGINE has", "a DIESEL ENGINE never"};
const std::initializer_list<const char*> kShade = {
    "any shade of WOOD could", "this shade of WOOD is", "the shade of BEECH may",
    "new shade of TIMBER", "same shade of WOOD in"};
const std::initializer_list<const char*> kSoft = {
    "use any soft WOODS to make this", "buy this soft WOODS or plastic for",
    "cheapest soft WOODS comes from"};

std::set<std::string> surfaces(const std::vector<AnaCandidate>& cands) {
  std::set<std::string> out;
  for (const auto& c : cands) out.insert(c.term.surface);
  return out;
}

TEST_CASE("Bootstrap deduplicates flexible-equal entries") {
  const AnaSetup s = toy_setup();
  Bootstrap b(s.costs, s.functional);
  CHECK(b.insert(make_term("WOOD"), 0));
  CHECK_FALSE(b.insert(make_term("woods"), 1));
  CHECK_FALSE(b.insert(make_term("the"), 1));
  CHECK(b.insert(make_term("DIESEL ENGINE"), 1));
  CHECK(b.size() == 2);
}

TEST_CASE("collect_contexts") {
  const AnaSetup s = toy_setup();
  const auto diesel = paragraphs(kDiesel);
  auto windows = collect_contexts(diesel, boot_of({"DIESEL", "ENGINE"}, s), s);
  CHECK(windows.size() == 6);
  for (const auto& w : windows) {
    CHECK(w.left.size() <= s.config.window);
    CHECK(w.right.size() <= s.config.window);
    const auto& bounds = diesel[0].sentence_bounds[w.sentence];
    CHECK(w.left.begin >= bounds.begin);
    CHECK(w.right.end <= bounds.end);
  }

  CHECK(collect_contexts(paragraphs({"nothing here at all"}), boot_of({"DIESEL"}, s), s).empty());

  const auto soft = paragraphs(kSoft);
  windows = collect_contexts(soft, boot_of({"WOOD"}, s), s);
  REQUIRE(windows.size() == 3);
  for (const auto& w : windows) CHECK(soft[0].tokens[w.center.range.begin].surface == "WOODS");

  CHECK_THROWS_AS(collect_contexts(soft, Bootstrap(s.costs, s.functional), s), ConfigError);
}

TEST_CASE("infer_arrangements") {
  const AnaSetup s = toy_setup();
  const auto boot = boot_of({"DIESEL", "ENGINE"}, s);

  auto corpus = paragraphs(kDiesel);
  auto c = infer_arrangements(corpus, collect_contexts(corpus, boot, s), boot, s);
  REQUIRE(c.size() == 1);
  CHECK(c[0].term.surface == "DIESEL ENGINE");
  CHECK(c[0].support == 3);
  CHECK(c[0].provenance.size() == 3);

  corpus = paragraphs({"the DIESEL ENGINE is", "this DIESEL ENGINE has"});
  CHECK(infer_arrangements(corpus, collect_contexts(corpus, boot, s), boot, s).empty());

  corpus = paragraphs({"the DIESEL ENGINE is", "this DIESEL engine has", "a DIESEL ENGINE never"});
  c = infer_arrangements(corpus, collect_contexts(corpus, boot, s), boot, s);
  REQUIRE(c.size() == 1);
  CHECK(c[0].term.surface == "DIESEL ENGINE");
  CHECK(c[0].support == 3);
}

TEST_CASE("arrangements bridge functional words but not scheme words") {
  const AnaSetup s = toy_setup();
  const auto boot = boot_of({"COLOUR", "WOOD", "DIESEL", "ENGINE"}, s);
  auto corpus = paragraphs({"DIESEL the ENGINE", "DIESEL the ENGINE", "DIESEL the ENGINE"});
  CHECK(surfaces(infer_arrangements(corpus, collect_contexts(corpus, boot, s), boot, s)) ==
        std::set<std::string>{"DIESEL THE ENGINE"});
  corpus = paragraphs({"COLOUR of WOOD", "COLOUR of WOOD", "COLOUR of WOOD"});
  CHECK(infer_arrangements(corpus, collect_contexts(corpus, boot, s), boot, s).empty());
  // Non-functional gap words block the arrangement.
  corpus = paragraphs({"DIESEL big ENGINE", "DIESEL big ENGINE", "DIESEL big ENGINE"});
  CHECK(infer_arrangements(corpus, collect_contexts(corpus, boot, s), boot, s).empty());
}

TEST_CASE("infer_scheme_candidates") {
  const AnaSetup s = toy_setup();
  const auto boot = boot_of({"WOOD", "COLOUR", "BEECH", "TIMBER"}, s);

  auto corpus = paragraphs(kShade);
  auto c = infer_scheme_candidates(corpus, collect_contexts(corpus, boot, s), boot, s);
  REQUIRE(c.size() == 1);
  CHECK(c[0].term.surface == "SHADE");
  CHECK(c[0].support == 5);

  corpus = paragraphs(kSoft);
  CHECK(infer_scheme_candidates(corpus, collect_contexts(corpus, boot, s), boot, s).empty());

  corpus = paragraphs({"any shade of WOOD could", "this shade of WOOD is"});
  CHECK(infer_scheme_candidates(corpus, collect_contexts(corpus, boot, s), boot, s).empty());

  // The mirrored shape counts too.
  corpus = paragraphs({"WOOD of quality", "BEECH of quality", "TIMBER of Quality"});
  c = infer_scheme_candidates(corpus, collect_contexts(corpus, boot, s), boot, s);
  REQUIRE(c.size() == 1);
  CHECK(c[0].term.surface == "QUALITY");
}

TEST_CASE("infer_adjunct_candidates") {
  const AnaSetup s = toy_setup();
  const auto boot = boot_of({"WOOD", "COLOUR", "BEECH", "TIMBER"}, s);

  auto corpus = paragraphs(kSoft);
  auto c = infer_adjunct_candidates(corpus, collect_contexts(corpus, boot, s), boot, s);
  REQUIRE(c.size() == 1);
  CHECK(c[0].term.surface == "SOFT WOODS");
  CHECK(c[0].support == 3);

  corpus = paragraphs({"soft WOODS of x", "soft WOODS of y", "soft WOODS of z"});
  CHECK(infer_adjunct_candidates(corpus, collect_contexts(corpus, boot, s), boot, s).empty());

  corpus = paragraphs({"see the WOOD", "see the WOOD", "see the WOOD"});
  CHECK(infer_adjunct_candidates(corpus, collect_contexts(corpus, boot, s), boot, s).empty());
}

TEST_CASE("run_ana on the toy corpus") {
  const AnaSetup s = toy_setup();
  std::vector<Term> seeds;
  for (const char* w : {"WOOD", "COLOUR", "BEECH", "TIMBER", "DIESEL", "ENGINE"}) {
    seeds.push_back(make_term(w));
  }
  const auto corpus = load_raw_corpus(testing::fixture("ana_toy"));
  const auto result = run_ana(corpus, seeds, s);
  CHECK(surfaces(result.candidates) ==
        std::set<std::string>{"DIESEL ENGINE", "SHADE", "SOFT WOODS"});
  CHECK(result.iterations <= 3);
  REQUIRE(result.candidates.size() == 3);
  CHECK(result.candidates[0].term.surface == "SHADE");
  CHECK(result.candidates[0].frequency == 5);
  CHECK(result.candidates[1].term.surface == "DIESEL ENGINE");

  // Provenance spans exist and support never falls below T.
  for (const auto& c : result.candidates) {
    CHECK(c.support >= s.config.min_support);
    CHECK(c.provenance.size() == c.support);
    for (const auto& p : c.provenance) CHECK(p.range.end <= corpus[0].tokens.size());
  }

  const auto again = run_ana(corpus, seeds, s);
  REQUIRE(again.candidates.size() == result.candidates.size());
  for (std::size_t i = 0; i < again.candidates.size(); ++i) {
    CHECK(again.candidates[i].term.surface == result.candidates[i].term.surface);
    CHECK(again.candidates[i].provenance == result.candidates[i].provenance);
  }

  CHECK(run_ana({}, seeds, s).candidates.empty());
  CHECK_THROWS_AS(run_ana(corpus, {}, s), ConfigError);

  AnaSetup with_seeds = s;
  with_seeds.config.include_seeds = true;
  CHECK(run_ana(corpus, seeds, with_seeds).candidates.size() == 9);
}

TEST_CASE("run_ana respects max_iter and validates config") {
  AnaSetup s = toy_setup();
  s.config.max_iter = 1;
  const auto corpus = load_raw_corpus(testing::fixture("ana_toy"));
  const auto r = run_ana(corpus, {make_term("WOOD"), make_term("DIESEL"), make_term("ENGINE")}, s);
  CHECK(r.iterations == 1);
  s.config.min_support = 1;
  CHECK_THROWS_AS(run_ana(corpus, {make_term("WOOD")}, s), ConfigError);
}

}  // namespace
}  // namespace term
