#include "term/ana.h"

#include <algorithm>
#include <map>

#include "term/error.h"
#include "term/unicode.h"

namespace term {

void AnaConfig::validate() const {
  if (window < 1) throw ConfigError("window must be >= 1");
  if (min_support < 2) throw ConfigError("min-support must be >= 2");
  if (max_iter < 1) throw ConfigError("max-iter must be >= 1");
}

std::string_view to_string(InferencePattern pattern) {
  switch (pattern) {
    case InferencePattern::kSeed: return "seed";
    case InferencePattern::kArrangement: return "arrangement";
    case InferencePattern::kScheme: return "scheme";
    case InferencePattern::kAdjunct: return "adjunct";
  }
  return "seed";
}

bool Bootstrap::contains_similar(const Term& term) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) {
    return flex_equal_terms(e.term, term, costs_, functional_);
  });
}

bool Bootstrap::contains_similar_word(std::string_view word) const {
  Term t;
  t.surface = std::string(word);
  t.words = {std::string(word)};
  return contains_similar(t);
}

bool Bootstrap::insert(Term term, std::size_t generation) {
  if (restriction(term, functional_).empty() || contains_similar(term)) return false;
  entries_.push_back({std::move(term), generation});
  return true;
}

std::vector<Term> Bootstrap::terms() const {
  std::vector<Term> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.term);
  return out;
}

namespace {

// Token flags of one document.
struct TokenInfo {
  bool word = false;  // word or number
  bool functional = false;
  bool scheme = false;
};

std::vector<TokenInfo> token_info(const Document& doc, const AnaSetup& setup) {
  std::vector<TokenInfo> info(doc.tokens.size());
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    info[i].word = t.kind != TokenKind::kPunctuation;
    if (info[i].word) {
      info[i].functional = setup.functional.contains(t.surface);
      info[i].scheme = setup.schemes.contains(t.surface);
    }
  }
  return info;
}

// Tokens that may sit between two linked items.
bool is_filler(const TokenInfo& t) { return t.word && t.functional && !t.scheme; }

// Evidence for one candidate: the key used for grouping, the surface it
// would produce, and where it was seen.
struct Record {
  Term key;
  std::string surface;
  Provenance where;
};

struct Group {
  std::vector<const Record*> members;
};

template <typename Same>
std::vector<Group> group_records(const std::vector<Record>& records, Same same) {
  std::vector<Group> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return same(g.members.front()->key, r.key); });
    if (it == groups.end()) {
      groups.push_back({{&r}});
    } else {
      it->members.push_back(&r);
    }
  }
  return groups;
}

// Most frequent surface; ties go to the first seen.
std::string modal_surface(const Group& g) {
  std::vector<std::pair<std::string, std::size_t>> counts;
  for (const Record* r : g.members) {
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& c) { return c.first == r->surface; });
    if (it == counts.end()) counts.emplace_back(r->surface, 1);
    else ++it->second;
  }
  const auto best = std::max_element(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    return a.second < b.second;
  });
  return best->first;
}

std::vector<AnaCandidate> to_candidates(const std::vector<Group>& groups, InferencePattern pattern,
                                        const Bootstrap& boot, const AnaSetup& setup) {
  std::vector<AnaCandidate> out;
  for (const auto& g : groups) {
    if (g.members.size() < setup.config.min_support) continue;
    AnaCandidate c;
    c.term = make_term(unicode::upper(modal_surface(g)));
    if (boot.contains_similar(c.term)) continue;
    c.pattern = pattern;
    c.support = g.members.size();
    for (const Record* r : g.members) c.provenance.push_back(r->where);
    out.push_back(std::move(c));
  }
  return out;
}

Term span_term(const Document& doc, TokenRange range) {
  Term t;
  for (std::size_t i = range.begin; i < range.end; ++i) t.words.push_back(doc.tokens[i].surface);
  t.surface = join_surface(doc, range);
  return t;
}

Term word_term(const std::string& word) {
  Term t;
  t.surface = word;
  t.words = {word};
  return t;
}

}  // namespace

std::vector<ContextWindow> collect_contexts(const std::vector<Document>& corpus,
                                            const Bootstrap& boot, const AnaSetup& setup) {
  if (boot.empty()) throw ConfigError("bootstrap is empty");
  const TermMatcher matcher(boot.terms(), setup.costs, setup.functional);
  const std::size_t n = setup.config.window;

  std::vector<ContextWindow> windows;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const Document& doc = corpus[d];
    const auto found = matcher.scan(doc);
    std::size_t sentence = 0;
    for (const auto& occ : found) {
      while (doc.sentence_bounds[sentence].end <= occ.range.begin) ++sentence;
      const TokenRange bounds = doc.sentence_bounds[sentence];
      ContextWindow w;
      w.doc = d;
      w.sentence = sentence;
      w.center = {occ.range, occ.term_index};
      w.left = {std::max(bounds.begin, occ.range.begin >= n ? occ.range.begin - n : 0),
                occ.range.begin};
      w.right = {occ.range.end, std::min(bounds.end, occ.range.end + n)};
      for (const auto& other : found) {
        if (other.range == occ.range) continue;
        const bool inside = (other.range.begin >= w.left.begin && other.range.end <= w.left.end) ||
                            (other.range.begin >= w.right.begin && other.range.end <= w.right.end);
        if (inside) w.others.push_back({other.range, other.term_index});
      }
      windows.push_back(std::move(w));
    }
  }
  return windows;
}

std::vector<AnaCandidate> infer_arrangements(const std::vector<Document>& corpus,
                                             const std::vector<ContextWindow>& windows,
                                             const Bootstrap& boot, const AnaSetup& setup) {
  std::vector<Record> records;
  std::vector<std::vector<TokenInfo>> infos(corpus.size());
  for (const auto& w : windows) {
    const Document& doc = corpus[w.doc];
    auto& info = infos[w.doc];
    if (info.empty()) info = token_info(doc, setup);
    // Nearest following term reached through filler tokens only.
    const Occurrence* next = nullptr;
    for (const auto& o : w.others) {
      if (o.range.begin < w.center.range.end) continue;
      if (o.range.begin - w.center.range.end > setup.config.gap) continue;
      bool fillers = true;
      for (std::size_t i = w.center.range.end; i < o.range.begin; ++i) fillers &= is_filler(info[i]);
      if (fillers && (next == nullptr || o.range.begin < next->range.begin)) next = &o;
    }
    if (next == nullptr) continue;
    const TokenRange span{w.center.range.begin, next->range.end};
    records.push_back({span_term(doc, span), join_surface(doc, span), {doc.id, span}});
  }

  const auto& functional = setup.functional;
  auto same = [&](const Term& a, const Term& b) {
    if (a.words.size() != b.words.size()) return false;
    for (std::size_t i = 0; i < a.words.size(); ++i) {
      const bool fa = functional.contains(a.words[i]);
      const bool fb = functional.contains(b.words[i]);
      if (fa != fb) return false;
      if (fa) {
        if (unicode::fold(a.words[i]) != unicode::fold(b.words[i])) return false;
      } else if (!flex_equal_strings(a.words[i], b.words[i], setup.costs)) {
        return false;
      }
    }
    return true;
  };
  return to_candidates(group_records(records, same), InferencePattern::kArrangement, boot, setup);
}

std::vector<AnaCandidate> infer_scheme_candidates(const std::vector<Document>& corpus,
                                                  const std::vector<ContextWindow>& windows,
                                                  const Bootstrap& boot, const AnaSetup& setup) {
  std::vector<Record> records;
  std::vector<std::vector<TokenInfo>> infos(corpus.size());
  std::vector<std::pair<std::size_t, std::size_t>> seen;  // (doc, word position)

  auto accept_word = [&](const ContextWindow& w, const std::vector<TokenInfo>& info,
                         std::size_t pos) {
    const Document& doc = corpus[w.doc];
    const TokenInfo& t = info[pos];
    if (!t.word || t.functional || t.scheme) return;
    if (boot.contains_similar_word(doc.tokens[pos].surface)) return;
    if (std::find(seen.begin(), seen.end(), std::pair{w.doc, pos}) != seen.end()) return;
    seen.emplace_back(w.doc, pos);
    const std::string& surface = doc.tokens[pos].surface;
    records.push_back({word_term(surface), surface, {doc.id, {pos, pos + 1}}});
  };

  for (const auto& w : windows) {
    const Document& doc = corpus[w.doc];
    auto& info = infos[w.doc];
    if (info.empty()) info = token_info(doc, setup);

    // word scheme [fillers] TERM
    std::size_t i = w.center.range.begin;
    std::size_t skipped = 0;
    while (i > w.left.begin && is_filler(info[i - 1]) && skipped < setup.config.gap) {
      --i;
      ++skipped;
    }
    if (i > w.left.begin && info[i - 1].scheme && i - 1 > w.left.begin) {
      accept_word(w, info, i - 2);
    }

    // TERM [fillers] scheme word
    std::size_t j = w.center.range.end;
    skipped = 0;
    while (j < w.right.end && is_filler(info[j]) && skipped < setup.config.gap) {
      ++j;
      ++skipped;
    }
    if (j < w.right.end && info[j].scheme && j + 1 < w.right.end) {
      accept_word(w, info, j + 1);
    }
  }

  auto same = [&](const Term& a, const Term& b) {
    return flex_equal_strings(a.surface, b.surface, setup.costs);
  };
  return to_candidates(group_records(records, same), InferencePattern::kScheme, boot, setup);
}

std::vector<AnaCandidate> infer_adjunct_candidates(const std::vector<Document>& corpus,
                                                   const std::vector<ContextWindow>& windows,
                                                   const Bootstrap& boot, const AnaSetup& setup) {
  std::vector<Record> records;
  std::vector<std::size_t> center_terms;  // parallel to records
  std::vector<std::vector<TokenInfo>> infos(corpus.size());
  for (const auto& w : windows) {
    const Document& doc = corpus[w.doc];
    auto& info = infos[w.doc];
    if (info.empty()) info = token_info(doc, setup);
    if (w.left.empty() || !w.others.empty()) continue;
    const std::size_t pos = w.center.range.begin - 1;
    const TokenInfo& t = info[pos];
    if (!t.word || t.functional || t.scheme) continue;
    bool scheme_in_window = false;
    for (std::size_t i = w.left.begin; i < w.left.end; ++i) scheme_in_window |= info[i].scheme;
    for (std::size_t i = w.right.begin; i < w.right.end; ++i) scheme_in_window |= info[i].scheme;
    if (scheme_in_window) continue;
    if (boot.contains_similar_word(doc.tokens[pos].surface)) continue;
    const TokenRange span{pos, w.center.range.end};
    records.push_back({word_term(doc.tokens[pos].surface), join_surface(doc, span), {doc.id, span}});
    center_terms.push_back(w.center.term);
  }

  // Group by (matched bootstrap term, similar adjunct word).
  std::vector<Group> groups;
  std::vector<std::size_t> group_terms;
  for (std::size_t r = 0; r < records.size(); ++r) {
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      if (group_terms[g] == center_terms[r] &&
          flex_equal_strings(groups[g].members.front()->key.surface, records[r].key.surface,
                             setup.costs)) {
        break;
      }
    }
    if (g == groups.size()) {
      groups.push_back({});
      group_terms.push_back(center_terms[r]);
    }
    groups[g].members.push_back(&records[r]);
  }
  return to_candidates(groups, InferencePattern::kAdjunct, boot, setup);
}

AnaResult run_ana(const std::vector<Document>& corpus, const std::vector<Term>& seeds,
                  const AnaSetup& setup) {
  setup.config.validate();
  setup.costs.validate();
  Bootstrap boot(setup.costs, setup.functional);
  for (const auto& s : seeds) boot.insert(s, 0);
  if (boot.empty()) throw ConfigError("bootstrap is empty");
  const std::size_t seed_count = boot.size();

  AnaResult result;
  std::vector<AnaCandidate> found;
  for (std::size_t iter = 1; iter <= setup.config.max_iter; ++iter) {
    result.iterations = iter;
    const auto windows = collect_contexts(corpus, boot, setup);
    std::vector<AnaCandidate> batch = infer_arrangements(corpus, windows, boot, setup);
    for (auto& c : infer_scheme_candidates(corpus, windows, boot, setup)) batch.push_back(std::move(c));
    for (auto& c : infer_adjunct_candidates(corpus, windows, boot, setup)) batch.push_back(std::move(c));

    std::size_t added = 0;
    for (auto& c : batch) {
      if (!boot.insert(c.term, iter)) continue;
      c.generation = iter;
      found.push_back(std::move(c));
      ++added;
    }
    if (added == 0) break;
  }

  // Corpus frequency under the final bootstrap.
  std::vector<std::size_t> freq(boot.size(), 0);
  if (!corpus.empty()) {
    const TermMatcher matcher(boot.terms(), setup.costs, setup.functional);
    for (const auto& doc : corpus) {
      for (const auto& occ : matcher.scan(doc)) ++freq[occ.term_index];
    }
  }
  for (std::size_t i = 0; i < found.size(); ++i) found[i].frequency = freq[seed_count + i];

  if (setup.config.include_seeds) {
    for (std::size_t i = 0; i < seed_count; ++i) {
      AnaCandidate c;
      c.term = boot.entries()[i].term;
      c.pattern = InferencePattern::kSeed;
      c.frequency = freq[i];
      found.push_back(std::move(c));
    }
  }

  std::stable_sort(found.begin(), found.end(), [](const AnaCandidate& a, const AnaCandidate& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.term.surface < b.term.surface;
  });
  result.candidates = std::move(found);
  return result;
}

}  // namespace term
