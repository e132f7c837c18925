#include "term/acabit.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "term/error.h"
#include "term/unicode.h"

namespace term {

std::string_view to_string(BasePattern p) {
  switch (p) {
    case BasePattern::kNAdj: return "N_ADJ";
    case BasePattern::kNN: return "N_N";
    case BasePattern::kNPrepDetN: return "N_PREP_DET_N";
    case BasePattern::kNAVinf: return "N_A_VINF";
  }
  return "N_ADJ";
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kBase: return "base";
    case Variant::kGraphic: return "graphic";
    case Variant::kPrepVariation: return "prep_variation";
    case Variant::kOptionalPrepDet: return "optional_prep_det";
    case Variant::kInsertion: return "insertion";
    case Variant::kCoordination: return "coordination";
  }
  return "base";
}

namespace {

std::string span_surface(const Sentence& s, TokenRange r) {
  std::string out;
  for (std::size_t i = r.begin; i < r.end; ++i) {
    if (i > r.begin) out += ' ';
    out += s[i].form;
  }
  return out;
}

}  // namespace

std::vector<PairOccurrence> match_base_patterns(const Sentence& s, const Lexicon& functional) {
  auto is = [&](std::size_t j, Pos p) { return j < s.size() && s[j].pos == p; };
  auto content = [&](std::size_t j) {
    return !functional.contains(s[j].lemma) && !functional.contains(s[j].form);
  };

  std::vector<PairOccurrence> out;
  auto emit = [&](std::size_t first, std::size_t second, TokenRange range, BasePattern pattern,
                  Variant variant, std::optional<std::string> modifier = std::nullopt) {
    if (!content(first) || !content(second)) return;
    PairOccurrence occ;
    occ.range = range;
    occ.first = first;
    occ.second = second;
    occ.pattern = pattern;
    occ.variant = variant;
    occ.surface = span_surface(s, range);
    occ.inserted_modifier = std::move(modifier);
    out.push_back(std::move(occ));
  };
  // Index of the noun closing `PREP (DET)? N` at j, or 0.
  auto prep_noun = [&](std::size_t j) -> std::size_t {
    if (!is(j, Pos::kPrep)) return 0;
    std::size_t k = j + 1;
    if (is(k, Pos::kDet)) ++k;
    return is(k, Pos::kN) ? k : 0;
  };

  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is(i, Pos::kN)) continue;
    const std::size_t j = i + 1;
    if (is(j, Pos::kAdj)) {
      if (is(j + 1, Pos::kConj) && is(j + 2, Pos::kAdj)) {
        const TokenRange range{i, j + 3};
        emit(i, j, range, BasePattern::kNAdj, Variant::kCoordination);
        emit(i, j + 2, range, BasePattern::kNAdj, Variant::kCoordination);
      } else if (const std::size_t k = prep_noun(j + 1); k != 0) {
        emit(i, k, {i, k + 1}, BasePattern::kNPrepDetN, Variant::kInsertion, s[j].form);
      } else {
        emit(i, j, {i, j + 1}, BasePattern::kNAdj, Variant::kBase);
      }
    } else if (is(j, Pos::kN)) {
      emit(i, j, {i, j + 1}, BasePattern::kNN, Variant::kBase);
    } else if (is(j, Pos::kPrep) && unicode::fold(s[j].lemma) == "à" && is(j + 1, Pos::kVinf)) {
      emit(i, j + 1, {i, j + 2}, BasePattern::kNAVinf, Variant::kBase);
    } else if (const std::size_t k = prep_noun(j); k != 0) {
      emit(i, k, {i, k + 1}, BasePattern::kNPrepDetN, Variant::kBase);
    }
  }
  return out;
}

PairKey normalize_occurrence(const PairOccurrence& occ, const Sentence& sentence) {
  return {unicode::fold(sentence.at(occ.first).lemma), unicode::fold(sentence.at(occ.second).lemma)};
}

double score_pair(const ContingencyTable& t) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) throw InvalidInput("negative contingency cell");
  if (t.a == 0) throw InvalidInput("no co-occurrence evidence (a = 0)");
  // Observed equals expected exactly when the cross products agree.
  if (t.a * t.d == t.b * t.c) return 0.0;
  // Entropy form: G2 = 2 (sum k ln k - sum rows ln rows - sum cols ln cols + N ln N).
  auto xlx = [](std::int64_t x) { return x > 0 ? static_cast<double>(x) * std::log(static_cast<double>(x)) : 0.0; };
  const double cells = xlx(t.a) + xlx(t.b) + xlx(t.c) + xlx(t.d);
  const double rows = xlx(t.a + t.b) + xlx(t.c + t.d);
  const double cols = xlx(t.a + t.c) + xlx(t.b + t.d);
  const double g2 = 2.0 * (cells - rows - cols + xlx(t.total()));
  return std::max(g2, 0.0);
}

AssociationMeasure association_measure(std::string_view name) {
  if (name == "llr") return score_pair;
  if (name == "frequency") {
    return [](const ContingencyTable& t) { return static_cast<double>(t.a); };
  }
  throw ConfigError("unknown association measure '" + std::string(name) + "'");
}

std::vector<std::size_t> sentence_offsets(const TaggedDocument& doc) {
  std::vector<std::size_t> out;
  std::size_t offset = 0;
  for (const auto& s : doc.sentences) {
    out.push_back(offset);
    offset += s.size();
  }
  return out;
}

namespace {

// Preposition and determiner between the two content words.
struct Shape {
  std::optional<std::string> prep;
  bool det = false;
  bool operator==(const Shape&) const = default;
};

Shape shape_of(const PairOccurrence& occ, const Sentence& s) {
  Shape shape;
  for (std::size_t i = occ.first + 1; i < occ.second; ++i) {
    if (s[i].pos == Pos::kPrep) shape.prep = unicode::fold(s[i].lemma);
    if (s[i].pos == Pos::kDet) shape.det = true;
  }
  return shape;
}

struct Located {
  PairOccurrence occ;
  const Sentence* sentence;
};

void label_variants(std::vector<Located>& group) {
  // Canonical form: the most frequent folded surface among plain matches.
  std::vector<std::pair<std::string, std::size_t>> counts;
  const Located* canonical = nullptr;
  for (const auto& l : group) {
    if (l.occ.variant != Variant::kBase) continue;
    const std::string folded = unicode::fold(l.occ.surface);
    auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == folded; });
    if (it == counts.end()) counts.emplace_back(folded, 1);
    else ++it->second;
  }
  if (counts.empty()) return;
  const auto best = std::max_element(counts.begin(), counts.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
  for (const auto& l : group) {
    if (l.occ.variant == Variant::kBase && unicode::fold(l.occ.surface) == best->first) {
      canonical = &l;
      break;
    }
  }
  const Shape ref = shape_of(canonical->occ, *canonical->sentence);
  for (auto& l : group) {
    if (l.occ.variant != Variant::kBase) continue;
    if (unicode::fold(l.occ.surface) == best->first) continue;
    const Shape shape = shape_of(l.occ, *l.sentence);
    if (shape == ref) {
      l.occ.variant = Variant::kGraphic;
    } else if (shape.prep && ref.prep && *shape.prep != *ref.prep && shape.det == ref.det) {
      l.occ.variant = Variant::kPrepVariation;
    } else {
      l.occ.variant = Variant::kOptionalPrepDet;
    }
  }
}

BasePattern modal_pattern(const std::vector<Located>& group) {
  std::map<BasePattern, std::size_t> counts;
  for (const auto& l : group) ++counts[l.occ.pattern];
  // Map order is enum order, so ties go to the earlier pattern.
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

}  // namespace

std::vector<CandidatePair> extract_acabit(const std::vector<TaggedDocument>& corpus,
                                          const Lexicon& functional,
                                          const AssociationMeasure& measure) {
  std::map<PairKey, std::vector<Located>> groups;
  std::vector<PairKey> order;
  std::map<std::string, std::int64_t> as_first, as_second;
  std::int64_t total = 0;

  for (const auto& doc : corpus) {
    for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
      const Sentence& s = doc.sentences[si];
      for (auto& occ : match_base_patterns(s, functional)) {
        occ.doc_id = doc.id;
        occ.sentence = si;
        const PairKey key = normalize_occurrence(occ, s);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back({std::move(occ), &s});
        ++as_first[key.lemma1];
        ++as_second[key.lemma2];
        ++total;
      }
    }
  }

  std::vector<CandidatePair> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    auto& group = groups[key];
    label_variants(group);
    CandidatePair pair;
    pair.lemma1 = key.lemma1;
    pair.lemma2 = key.lemma2;
    pair.pattern = modal_pattern(group);
    pair.freq = group.size();
    for (auto& l : group) pair.occurrences.push_back(std::move(l.occ));
    pair.table.a = static_cast<std::int64_t>(pair.freq);
    pair.table.b = as_first[key.lemma1] - pair.table.a;
    pair.table.c = as_second[key.lemma2] - pair.table.a;
    pair.table.d = total - pair.table.a - pair.table.b - pair.table.c;
    pair.score = measure(pair.table);
    out.push_back(std::move(pair));
  }
  std::sort(out.begin(), out.end(), [](const CandidatePair& x, const CandidatePair& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.freq != y.freq) return x.freq > y.freq;
    if (x.lemma1 != y.lemma1) return x.lemma1 < y.lemma1;
    return x.lemma2 < y.lemma2;
  });
  return out;
}

}  // namespace term
