#include "term/promethee.h"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "term/error.h"
#include "term/unicode.h"

namespace term {

namespace {

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string items_text(const std::vector<ExprItem>& items) {
  std::string out;
  for (const auto& it : items) {
    if (!out.empty()) out += ' ';
    out += it.kind == ItemKind::kLit ? it.lemma : std::string(to_string(it.kind));
  }
  return out;
}

// Aligned index pairs of one longest common subsequence, first in order.
template <typename Eq>
std::vector<std::pair<std::size_t, std::size_t>> lcs_alignment(const std::vector<ExprItem>& a,
                                                               const std::vector<ExprItem>& b,
                                                               Eq eq) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::size_t>> t(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      t[i][j] = eq(a[i], b[j]) ? t[i + 1][j + 1] + 1 : std::max(t[i + 1][j], t[i][j + 1]);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0, j = 0; i < n && j < m;) {
    if (eq(a[i], b[j]) && t[i][j] == t[i + 1][j + 1] + 1) {
      out.emplace_back(i++, j++);
    } else if (t[i + 1][j] >= t[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

// Alignment for generalization. Among common subsequences it maximizes, in
// order: slots kept, literals kept, length. A plain LCS can trade a slot for
// an equally long run of filler items.
std::vector<std::pair<std::size_t, std::size_t>> slot_alignment(const std::vector<ExprItem>& a,
                                                                const std::vector<ExprItem>& b) {
  using Score = std::array<std::size_t, 3>;
  auto gain = [](const ExprItem& it) {
    return Score{it.slot != 0 ? 1u : 0u, it.kind == ItemKind::kLit ? 1u : 0u, 1u};
  };
  auto plus = [](Score x, const Score& y) {
    for (std::size_t i = 0; i < 3; ++i) x[i] += y[i];
    return x;
  };
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<Score>> t(n + 1, std::vector<Score>(m + 1, Score{}));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      t[i][j] = std::max(t[i + 1][j], t[i][j + 1]);
      if (a[i].same_shape(b[j])) t[i][j] = std::max(t[i][j], plus(t[i + 1][j + 1], gain(a[i])));
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0, j = 0; i < n && j < m;) {
    if (a[i].same_shape(b[j]) && t[i][j] == plus(t[i + 1][j + 1], gain(a[i]))) {
      out.emplace_back(i++, j++);
    } else if (t[i + 1][j] >= t[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

bool similar_items(const ExprItem& a, const ExprItem& b) {
  return a.kind == b.kind && (a.kind != ItemKind::kLit || a.lemma == b.lemma);
}

// Items plus the noun phrases behind every NP / LIST item.
struct Built {
  std::vector<ExprItem> items;
  std::vector<std::vector<NounPhrase>> phrases;
};

Built build_items(const Sentence& s, const PrometheeConfig& cfg) {
  const NpAnalysis an = detect_noun_phrases(s);
  std::map<std::size_t, const NpList*> list_at;
  std::map<std::size_t, const NounPhrase*> phrase_at;
  for (const auto& l : an.lists) list_at[l.range.begin] = &l;
  for (const auto& p : an.phrases) phrase_at[p.range.begin] = &p;

  auto auxiliary = [&](std::size_t i) {
    if (s[i].pos != Pos::kV) return false;
    const std::string lemma = unicode::fold(s[i].lemma);
    if (std::find(cfg.auxiliaries.begin(), cfg.auxiliaries.end(), lemma) == cfg.auxiliaries.end()) {
      return false;
    }
    std::size_t j = i + 1;
    while (j < s.size() && s[j].pos == Pos::kAdv) ++j;
    return j < s.size() && s[j].pos == Pos::kV;
  };

  Built out;
  for (std::size_t i = 0; i < s.size();) {
    ExprItem item;
    std::vector<NounPhrase> phrases;
    if (auto l = list_at.find(i); l != list_at.end()) {
      item.kind = ItemKind::kList;
      item.range = l->second->range;
      for (std::size_t m : l->second->members) {
        phrases.push_back(an.phrases[m]);
        item.terms.push_back(phrase_lemma_text(s, an.phrases[m]));
      }
    } else if (auto p = phrase_at.find(i); p != phrase_at.end()) {
      item.kind = ItemKind::kNp;
      item.range = p->second->range;
      phrases.push_back(*p->second);
      item.terms.push_back(phrase_lemma_text(s, *p->second));
    } else {
      const Pos pos = s[i].pos;
      if (pos == Pos::kDet || pos == Pos::kAdv || pos == Pos::kPunc || auxiliary(i)) {
        ++i;
        continue;
      }
      item.kind = ItemKind::kLit;
      item.lemma = unicode::fold(s[i].lemma);
      item.range = {i, i + 1};
    }
    i = item.range.end;
    out.items.push_back(std::move(item));
    out.phrases.push_back(std::move(phrases));
  }
  return out;
}

// The seed's words occur contiguously in the phrase lemmas and include the head.
bool phrase_has_term(const Sentence& s, const NounPhrase& np, const std::vector<std::string>& term) {
  if (term.empty()) return false;
  if (std::find(term.begin(), term.end(), np.head_lemma) == term.end()) return false;
  const auto words = split_words(phrase_lemma_text(s, np));
  return std::search(words.begin(), words.end(), term.begin(), term.end()) != words.end();
}

std::vector<std::size_t> items_with(const Sentence& s, const Built& b, const std::string& term) {
  const auto words = split_words(unicode::fold(term));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < b.items.size(); ++i) {
    for (const auto& np : b.phrases[i]) {
      if (phrase_has_term(s, np, words)) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

ExprItem shape_only(const ExprItem& it) {
  ExprItem out;
  out.kind = it.kind;
  out.lemma = it.lemma;
  out.slot = it.slot;
  return out;
}

bool has_lit(const std::vector<ExprItem>& items) {
  return std::any_of(items.begin(), items.end(),
                     [](const ExprItem& it) { return it.kind == ItemKind::kLit; });
}

bool binds(const ExprItem& p, const ExprItem& s) {
  if (p.slot != 0) {
    if (p.kind == ItemKind::kNp) return s.kind == ItemKind::kNp || s.kind == ItemKind::kList;
    return s.kind == p.kind;
  }
  return similar_items(p, s);
}

}  // namespace

std::vector<SeedPair> load_seed_pairs(const std::filesystem::path& path,
                                      const std::string& relation) {
  const std::string text = read_file(path);
  unicode::decode(text);
  std::vector<SeedPair> out;
  std::size_t line_no = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string::npos || t.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(path.string(), line_no, "expected term1<TAB>term2");
    }
    SeedPair p{trim(t.substr(0, tab)), trim(t.substr(tab + 1)), relation};
    if (p.term1.empty() || p.term2.empty()) throw ParseError(path.string(), line_no, "empty term");
    if (unicode::fold(p.term1) == unicode::fold(p.term2)) {
      throw ParseError(path.string(), line_no, "a term cannot be related to itself");
    }
    out.push_back(std::move(p));
  }
  return out;
}

void PrometheeConfig::validate() const {
  if (relation.empty()) throw ConfigError("relation must not be empty");
  if (sim_threshold <= 0 || sim_threshold > 1) {
    throw ConfigError("sim_threshold must be in (0, 1], got " + to_string(sim_threshold));
  }
}

std::string_view to_string(ItemKind kind) {
  switch (kind) {
    case ItemKind::kLit: return "LIT";
    case ItemKind::kNp: return "NP";
    case ItemKind::kList: return "LIST";
  }
  return "LIT";
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kCandidate: return "candidate";
    case Status::kValidated: return "validated";
    case Status::kRejected: return "rejected";
  }
  return "candidate";
}

std::size_t LexSynExpression::slot_index(int slot) const {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].slot == slot) return i;
  }
  return std::string::npos;
}

std::string LexSynExpression::text() const { return items_text(items); }
std::string Pattern::text() const { return items_text(items); }

std::vector<ExprItem> expression_items(const Sentence& sentence, const PrometheeConfig& cfg) {
  return build_items(sentence, cfg).items;
}

std::vector<SeedHit> find_seed_sentences(const std::vector<TaggedDocument>& corpus,
                                         const std::vector<SeedPair>& seeds) {
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> words;
  for (const auto& p : seeds) {
    words.emplace_back(split_words(unicode::fold(p.term1)), split_words(unicode::fold(p.term2)));
  }
  std::vector<SeedHit> out;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (std::size_t si = 0; si < corpus[d].sentences.size(); ++si) {
      const Sentence& s = corpus[d].sentences[si];
      const NpAnalysis an = detect_noun_phrases(s);
      auto present = [&](const std::vector<std::string>& w) {
        return std::any_of(an.phrases.begin(), an.phrases.end(),
                           [&](const NounPhrase& np) { return phrase_has_term(s, np, w); });
      };
      for (std::size_t k = 0; k < seeds.size(); ++k) {
        if (present(words[k].first) && present(words[k].second)) out.push_back({d, si, k});
      }
    }
  }
  return out;
}

LexSynExpression build_expression(const Sentence& sentence, const SeedPair& pair,
                                  const PrometheeConfig& cfg) {
  Built b = build_items(sentence, cfg);
  const auto c1 = items_with(sentence, b, pair.term1);
  const auto c2 = items_with(sentence, b, pair.term2);
  if (c1.empty() || c2.empty()) {
    throw InvalidInput("sentence does not contain both '" + pair.term1 + "' and '" + pair.term2 + "'");
  }
  // Closest pair of distinct items, leftmost on ties.
  std::size_t best1 = 0, best2 = 0, best_gap = std::string::npos;
  for (std::size_t i : c1) {
    for (std::size_t j : c2) {
      if (i == j) continue;
      const std::size_t gap = i < j ? j - i : i - j;
      if (gap < best_gap || (gap == best_gap && std::min(i, j) < std::min(best1, best2))) {
        best1 = i;
        best2 = j;
        best_gap = gap;
      }
    }
  }
  if (best_gap == std::string::npos) {
    throw InvalidInput("'" + pair.term1 + "' and '" + pair.term2 + "' fall in the same item");
  }
  b.items[best1].slot = 1;
  b.items[best2].slot = 2;

  // Keep at most `window` literals before the first slot and after the last.
  std::size_t lo = std::min(best1, best2), hi = std::max(best1, best2) + 1;
  for (std::size_t lits = 0; lo > 0; --lo) {
    if (b.items[lo - 1].kind == ItemKind::kLit && lits++ == cfg.window) break;
  }
  for (std::size_t lits = 0; hi < b.items.size(); ++hi) {
    if (b.items[hi].kind == ItemKind::kLit && lits++ == cfg.window) break;
  }
  LexSynExpression e;
  e.items.assign(b.items.begin() + static_cast<std::ptrdiff_t>(lo),
                 b.items.begin() + static_cast<std::ptrdiff_t>(hi));
  return e;
}

Rational expression_similarity(const LexSynExpression& e1, const LexSynExpression& e2) {
  const std::size_t total = e1.items.size() + e2.items.size();
  if (total == 0) return 1;
  const auto lcs = lcs_alignment(e1.items, e2.items, similar_items).size();
  return Rational(static_cast<std::int64_t>(2 * lcs), static_cast<std::int64_t>(total));
}

std::optional<Pattern> generalize(const std::vector<LexSynExpression>& cluster,
                                  const std::string& relation) {
  if (cluster.size() < 2) return std::nullopt;
  std::vector<ExprItem> acc;
  for (const auto& it : cluster[0].items) acc.push_back(shape_only(it));
  for (std::size_t k = 1; k < cluster.size(); ++k) {
    std::vector<ExprItem> next;
    for (auto [i, j] : slot_alignment(acc, cluster[k].items)) next.push_back(acc[i]);
    acc = std::move(next);
  }
  const bool slot1 = std::any_of(acc.begin(), acc.end(), [](const ExprItem& it) { return it.slot == 1; });
  const bool slot2 = std::any_of(acc.begin(), acc.end(), [](const ExprItem& it) { return it.slot == 2; });
  if (!slot1 || !slot2 || !has_lit(acc)) return std::nullopt;
  Pattern p;
  p.items = std::move(acc);
  p.relation = relation;
  std::set<SentenceRef> support;
  for (const auto& e : cluster) support.insert(e.source);
  p.support.assign(support.begin(), support.end());
  return p;
}

std::vector<Binding> match_pattern(const Pattern& pattern, const std::vector<ExprItem>& items) {
  const auto& p = pattern.items;
  std::vector<Binding> out;
  if (p.empty()) return out;
  const std::size_t m = p.size();
  std::size_t pos = 0;
  while (pos < items.size()) {
    // Earliest-ending embedding from `pos`...
    std::size_t k = 0, end = pos;
    for (std::size_t j = pos; j < items.size() && k < m; ++j) {
      if (binds(p[k], items[j])) {
        ++k;
        end = j;
      }
    }
    if (k < m) break;
    // ...then pulled right to its shortest span.
    std::vector<std::size_t> at(m);
    at[m - 1] = end;
    for (std::size_t q = m - 1; q-- > 0;) {
      std::size_t j = at[q + 1];
      while (!binds(p[q], items[--j])) {
      }
      at[q] = j;
    }
    Binding b;
    b.begin = at[0];
    b.end = end + 1;
    for (std::size_t q = 0; q < m; ++q) {
      if (p[q].slot == 1) b.slot1 = at[q];
      if (p[q].slot == 2) b.slot2 = at[q];
    }
    out.push_back(b);
    pos = end + 1;
  }
  return out;
}

std::vector<ExtractedPair> apply_patterns(const std::vector<TaggedDocument>& corpus,
                                          const std::vector<Pattern>& patterns,
                                          const PrometheeConfig& cfg) {
  std::vector<ExtractedPair> out;
  for (const auto& doc : corpus) {
    for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
      const auto items = expression_items(doc.sentences[si], cfg);
      for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
        const Pattern& pat = patterns[pi];
        if (pat.status != Status::kValidated) continue;
        for (const auto& b : match_pattern(pat, items)) {
          for (const auto& t1 : items[b.slot1].terms) {
            for (const auto& t2 : items[b.slot2].terms) {
              if (t1 == t2) continue;
              out.push_back({t1, t2, pat.relation, pi, {doc.id, si}, Status::kCandidate});
            }
          }
        }
      }
    }
  }
  return out;
}

PrometheeTurn run_promethee(const std::vector<TaggedDocument>& corpus,
                            const std::vector<SeedPair>& seeds,
                            const std::vector<Pattern>& patterns, const PrometheeConfig& cfg) {
  cfg.validate();
  if (seeds.empty()) throw ConfigError("promethee needs at least one seed pair");

  std::vector<LexSynExpression> exprs;
  for (const auto& hit : find_seed_sentences(corpus, seeds)) {
    LexSynExpression e;
    try {
      e = build_expression(corpus[hit.doc].sentences[hit.sentence], seeds[hit.seed], cfg);
    } catch (const InvalidInput&) {
      continue;  // both terms inside one list or phrase
    }
    e.source = {corpus[hit.doc].id, hit.sentence};
    const bool dup = std::any_of(exprs.begin(), exprs.end(), [&](const LexSynExpression& o) {
      return o.source == e.source && o.items.size() == e.items.size() &&
             std::equal(o.items.begin(), o.items.end(), e.items.begin(),
                        [](const ExprItem& a, const ExprItem& b) { return a.same_shape(b); });
    });
    if (!dup) exprs.push_back(std::move(e));
  }

  // Single-link clusters over the similarity graph.
  std::vector<std::size_t> parent(exprs.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    for (std::size_t j = i + 1; j < exprs.size(); ++j) {
      if (expression_similarity(exprs[i], exprs[j]) >= cfg.sim_threshold) {
        parent[root(j)] = root(i);
      }
    }
  }
  std::map<std::size_t, std::vector<LexSynExpression>> clusters;
  for (std::size_t i = 0; i < exprs.size(); ++i) clusters[root(i)].push_back(exprs[i]);

  PrometheeTurn turn;
  for (auto& [r, members] : clusters) {
    std::set<SentenceRef> sources;
    for (const auto& e : members) sources.insert(e.source);
    if (sources.size() < 2) continue;
    auto p = generalize(members, cfg.relation);
    if (!p) continue;
    auto same = std::find_if(turn.patterns.begin(), turn.patterns.end(), [&](const Pattern& o) {
      return o.items.size() == p->items.size() &&
             std::equal(o.items.begin(), o.items.end(), p->items.begin(),
                        [](const ExprItem& a, const ExprItem& b) { return a.same_shape(b); });
    });
    if (same == turn.patterns.end()) {
      turn.patterns.push_back(std::move(*p));
    } else {
      std::set<SentenceRef> merged(same->support.begin(), same->support.end());
      merged.insert(p->support.begin(), p->support.end());
      same->support.assign(merged.begin(), merged.end());
    }
  }

  std::set<std::pair<std::string, std::string>> seen;
  for (auto& pair : apply_patterns(corpus, patterns, cfg)) {
    if (seen.insert({pair.term1, pair.term2}).second) turn.pairs.push_back(std::move(pair));
  }
  return turn;
}

}  // namespace term
