#include "term/flexeq.h"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "term/error.h"
#include "term/unicode.h"

namespace term {

Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError("not a number: '" + std::string(text) + "'");
    }
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ConfigError("zero denominator: '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 12) throw ConfigError("bad decimal: '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::string_view whole = text.substr(0, dot);
    const bool negative = !whole.empty() && whole.front() == '-';
    if (negative) whole.remove_prefix(1);
    const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
    const std::int64_t f = parse_int(frac);
    if (f < 0) throw ConfigError("bad decimal: '" + std::string(text) + "'");
    const Rational r(w * scale + f, scale);
    return negative ? -r : r;
  }
  return Rational(parse_int(text));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

void CostConfig::validate() const {
  if (q <= 0) throw ConfigError("insertion/deletion cost q must be positive, got " + to_string(q));
  if (p <= 0) throw ConfigError("substitution cost p must be positive, got " + to_string(p));
  if (k < 1) throw ConfigError("strictness k must be >= 1, got " + to_string(k));
}

Term make_term(std::string_view surface, const SymbolSet& symbols) {
  Term t;
  t.surface = std::string(surface);
  for (auto& tok : tokenize(surface, symbols)) {
    if (tok.kind != TokenKind::kPunctuation) t.words.push_back(std::move(tok.surface));
  }
  return t;
}

Rational edit_distance(std::u32string_view a, std::u32string_view b, const CostConfig& cfg) {
  // Integer DP on costs scaled to a common denominator.
  const std::int64_t scale = std::lcm(cfg.q.denominator(), cfg.p.denominator());
  const std::int64_t q = cfg.q.numerator() * (scale / cfg.q.denominator());
  const std::int64_t p = cfg.p.numerator() * (scale / cfg.p.denominator());

  std::vector<std::int64_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = q * static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::int64_t diag = row[0];
    row[0] = q * static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::int64_t up = row[j];
      row[j] = std::min({up + q, row[j - 1] + q, diag + (a[i - 1] == b[j - 1] ? 0 : p)});
      diag = up;
    }
  }
  return Rational(row[b.size()], scale);
}

Rational edit_distance(std::string_view a, std::string_view b, const CostConfig& cfg) {
  return edit_distance(unicode::decode(a), unicode::decode(b), cfg);
}

Rational weighted_distance(std::u32string_view a, std::u32string_view b, const CostConfig& cfg) {
  if (a.empty() && b.empty()) throw InvalidInput("weighted distance of two empty strings");
  return edit_distance(a, b, cfg) / static_cast<std::int64_t>(a.size() + b.size());
}

Rational weighted_distance(std::string_view a, std::string_view b, const CostConfig& cfg) {
  return weighted_distance(unicode::decode(a), unicode::decode(b), cfg);
}

namespace {

bool within(std::u32string_view a, std::u32string_view b, const CostConfig& cfg) {
  if (a.empty() && b.empty()) throw InvalidInput("weighted distance of two empty strings");
  const auto total = static_cast<std::int64_t>(a.size() + b.size());
  const auto diff = static_cast<std::int64_t>(a.size() > b.size() ? a.size() - b.size()
                                                                  : b.size() - a.size());
  // Every length difference costs at least one insertion or deletion.
  if (cfg.q * diff / total > cfg.threshold()) return false;
  return weighted_distance(a, b, cfg) <= cfg.threshold();
}

std::vector<std::u32string> folded_restriction(const Term& t, const Lexicon& functional) {
  std::vector<std::u32string> out;
  for (const auto& w : t.words) {
    if (!functional.contains(w)) out.push_back(unicode::fold(unicode::decode(w)));
  }
  return out;
}

}  // namespace

bool flex_equal_strings(std::string_view a, std::string_view b, const CostConfig& cfg) {
  return within(unicode::fold(unicode::decode(a)), unicode::fold(unicode::decode(b)), cfg);
}

std::vector<std::string> restriction(const Term& t, const Lexicon& functional) {
  std::vector<std::string> out;
  for (const auto& w : t.words) {
    if (!functional.contains(w)) out.push_back(w);
  }
  return out;
}

bool flex_equal_terms(const Term& x, const Term& y, const CostConfig& cfg,
                      const Lexicon& functional) {
  const auto rx = folded_restriction(x, functional);
  const auto ry = folded_restriction(y, functional);
  if (rx.empty() || rx.size() != ry.size()) return false;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    if (!within(rx[i], ry[i], cfg)) return false;
  }
  return true;
}

Rational term_distance(const Term& x, const Term& y, const CostConfig& cfg,
                       const Lexicon& functional) {
  const auto rx = folded_restriction(x, functional);
  const auto ry = folded_restriction(y, functional);
  if (rx.empty() || rx.size() != ry.size()) {
    throw IncomparableTerms("restrictions of '" + x.surface + "' and '" + y.surface +
                            "' have lengths " + std::to_string(rx.size()) + " and " +
                            std::to_string(ry.size()));
  }
  Rational sum(0);
  for (std::size_t i = 0; i < rx.size(); ++i) sum += weighted_distance(rx[i], ry[i], cfg);
  return sum / static_cast<std::int64_t>(rx.size());
}

// ---------------------------------------------------------------------------

TermMatcher::TermMatcher(std::vector<Term> refs, CostConfig cfg, Lexicon functional)
    : refs_(std::move(refs)), cfg_(cfg), functional_(std::move(functional)) {
  compiled_.reserve(refs_.size());
  for (const auto& t : refs_) {
    Ref r;
    r.restricted = folded_restriction(t, functional_);
    r.max_window = t.words.size() + 3;
    max_window_ = std::max(max_window_, r.max_window);
    compiled_.push_back(std::move(r));
  }
}

std::vector<TermOccurrence> TermMatcher::scan(const Document& doc) const {
  struct Candidate {
    TokenRange range;
    std::size_t ref;
    Rational distance;
  };
  std::vector<Candidate> found;

  const std::size_t n = doc.tokens.size();
  std::vector<std::u32string> folded(n);
  std::vector<char> skip(n), functional(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Token& t = doc.tokens[i];
    skip[i] = t.kind == TokenKind::kPunctuation;
    if (!skip[i]) {
      folded[i] = unicode::fold(unicode::decode(t.surface));
      functional[i] = functional_.contains(t.surface);
    }
  }

  const Rational threshold = cfg_.threshold();
  std::vector<std::size_t> window;  // token indices of the window's restriction
  for (const TokenRange& sentence : doc.sentence_bounds) {
    for (std::size_t i = sentence.begin; i < sentence.end; ++i) {
      if (skip[i] || functional[i]) continue;
      window.clear();
      for (std::size_t j = i; j < sentence.end && j - i < max_window_; ++j) {
        if (skip[j]) break;
        if (functional[j]) continue;
        window.push_back(j);
        const std::size_t len = j - i + 1;

        std::size_t best = refs_.size();
        Rational best_distance;
        for (std::size_t r = 0; r < compiled_.size(); ++r) {
          const Ref& ref = compiled_[r];
          if (ref.restricted.size() != window.size() || len > ref.max_window) continue;
          Rational sum(0);
          bool ok = true;
          for (std::size_t w = 0; w < window.size() && ok; ++w) {
            ok = within(folded[window[w]], ref.restricted[w], cfg_);
            if (ok) sum += weighted_distance(folded[window[w]], ref.restricted[w], cfg_);
          }
          if (!ok) continue;
          const Rational d = sum / static_cast<std::int64_t>(window.size());
          if (best == refs_.size() || d < best_distance) {
            best = r;
            best_distance = d;
          }
        }
        if (best != refs_.size() && best_distance <= threshold) {
          found.push_back({{i, j + 1}, best, best_distance});
        }
      }
    }
  }

  std::stable_sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    if (a.range.size() != b.range.size()) return a.range.size() > b.range.size();
    return a.range.begin < b.range.begin;
  });
  std::vector<TermOccurrence> out;
  for (const auto& c : found) {
    const bool clash = std::any_of(out.begin(), out.end(), [&](const TermOccurrence& o) {
      return o.range.overlaps(c.range);
    });
    if (!clash) out.push_back({c.ref, doc.id, c.range, c.distance});
  }
  std::sort(out.begin(), out.end(), [](const TermOccurrence& a, const TermOccurrence& b) {
    return a.range < b.range;
  });
  return out;
}

std::vector<TermOccurrence> recognize_terms(const Document& doc, std::span<const Term> refs,
                                            const CostConfig& cfg, const Lexicon& functional) {
  if (refs.empty()) throw InvalidInput("recognize_terms needs at least one reference term");
  return TermMatcher({refs.begin(), refs.end()}, cfg, functional).scan(doc);
}

}  // namespace term
