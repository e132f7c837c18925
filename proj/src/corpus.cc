#include "term/corpus.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "term/error.h"
#include "term/unicode.h"

namespace term {

namespace fs = std::filesystem;

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::kWord: return "word";
    case TokenKind::kNumber: return "number";
    case TokenKind::kPunctuation: return "punctuation";
  }
  return "word";
}

bool SymbolSet::contains(char32_t ch) const {
  if (unicode::is_letter(ch) || unicode::is_digit(ch)) return true;
  // ASCII hyphen-minus, Unicode hyphen and minus sign.
  return hyphen && (ch == U'-' || ch == U'‐' || ch == U'−');
}

namespace {

std::vector<Token> tokenize_decoded(const std::u32string& text, const SymbolSet& symbols) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t ch = text[i];
    if (unicode::is_space(ch)) {
      ++i;
      continue;
    }
    if (!symbols.contains(ch)) {
      tokens.push_back({unicode::encode(ch), i, TokenKind::kPunctuation});
      ++i;
      continue;
    }
    std::size_t j = i;
    bool all_digits = true;
    while (j < text.size() && symbols.contains(text[j])) {
      all_digits = all_digits && unicode::is_digit(text[j]);
      ++j;
    }
    tokens.push_back({unicode::encode(std::u32string_view(text).substr(i, j - i)), i,
                      all_digits ? TokenKind::kNumber : TokenKind::kWord});
    i = j;
  }
  return tokens;
}

bool is_terminal(const Token& t) {
  return t.kind == TokenKind::kPunctuation &&
         (t.surface == "." || t.surface == "!" || t.surface == "?");
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, const SymbolSet& symbols) {
  return tokenize_decoded(unicode::decode(text), symbols);
}

Document make_document(std::string id, std::string_view text, const SymbolSet& symbols) {
  const std::u32string decoded = unicode::decode(text);
  Document doc;
  doc.id = std::move(id);
  doc.tokens = tokenize_decoded(decoded, symbols);

  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < doc.tokens.size(); ++i) {
    const Token& cur = doc.tokens[i];
    const Token& next = doc.tokens[i + 1];
    const std::size_t gap_begin = cur.offset + unicode::length(cur.surface);
    const std::u32string_view gap =
        std::u32string_view(decoded).substr(gap_begin, next.offset - gap_begin);
    const bool paragraph = std::count(gap.begin(), gap.end(), U'\n') >= 2;
    const bool full_stop = is_terminal(cur) && !gap.empty() &&
                           unicode::is_upper(unicode::decode(next.surface).front());
    if (paragraph || full_stop) {
      doc.sentence_bounds.push_back({start, i + 1});
      start = i + 1;
    }
  }
  if (start < doc.tokens.size()) doc.sentence_bounds.push_back({start, doc.tokens.size()});
  return doc;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || fs::is_directory(path)) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<Document> load_raw_corpus(const fs::path& path, const SymbolSet& symbols) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw IoError("corpus not found: " + path.string());
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<Document> docs;
  docs.reserve(files.size());
  for (const auto& file : files) {
    const std::string text = read_file(file);
    try {
      docs.push_back(make_document(file.stem().string(), text, symbols));
    } catch (const EncodingError& e) {
      throw EncodingError(file.string() + ": malformed UTF-8", e.byte_offset());
    }
  }
  return docs;
}

std::string join_surface(const Document& doc, TokenRange range) {
  std::string out;
  for (std::size_t i = range.begin; i < range.end; ++i) {
    if (i > range.begin) out += ' ';
    out += doc.tokens[i].surface;
  }
  return out;
}

// ---------------------------------------------------------------------------

Lexicon::Lexicon(std::string name, std::initializer_list<std::string_view> words)
    : name_(std::move(name)) {
  for (auto w : words) insert(w);
}

void Lexicon::insert(std::string_view word) { entries_.insert(unicode::fold(word)); }

bool Lexicon::contains(std::string_view word) const {
  return entries_.count(unicode::fold(word)) > 0;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

// Validated, comment-stripped, trimmed lines of a list file.
std::vector<std::string> list_lines(const fs::path& path) {
  const std::string text = read_file(path);
  if (auto bad = unicode::find_invalid(text); bad != std::string_view::npos) {
    throw EncodingError(path.string() + ": malformed UTF-8", bad);
  }
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(t);
  }
  return out;
}

}  // namespace

Lexicon load_lexicon(const fs::path& path) {
  Lexicon lex(path.stem().string());
  for (const auto& line : list_lines(path)) lex.insert(line);
  return lex;
}

void write_lexicon(const Lexicon& lexicon, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# " << lexicon.name() << "\n";
  for (const auto& e : lexicon.entries()) out << e << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string> read_entries(const fs::path& path) {
  std::vector<std::string> out;
  for (auto& line : list_lines(path)) {
    if (std::find(out.begin(), out.end(), line) == out.end()) out.push_back(std::move(line));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::pair<std::string_view, Pos> kTags[] = {
    {"N", Pos::kN},       {"ADJ", Pos::kAdj},   {"PREP", Pos::kPrep}, {"DET", Pos::kDet},
    {"V", Pos::kV},       {"VINF", Pos::kVinf}, {"ADV", Pos::kAdv},   {"CONJ", Pos::kConj},
    {"PUNC", Pos::kPunc}, {"OTHER", Pos::kOther},
};

}  // namespace

std::optional<Pos> parse_pos(std::string_view tag) {
  for (const auto& [name, pos] : kTags) {
    if (name == tag) return pos;
  }
  return std::nullopt;
}

std::string_view to_string(Pos pos) {
  for (const auto& [name, p] : kTags) {
    if (p == pos) return name;
  }
  return "OTHER";
}

std::vector<TaggedDocument> parse_tagged(std::string_view text, const std::string& source) {
  if (auto bad = unicode::find_invalid(text); bad != std::string_view::npos) {
    throw EncodingError(source + ": malformed UTF-8", bad);
  }
  std::vector<TaggedDocument> docs;
  Sentence current;
  auto flush_sentence = [&] {
    if (current.empty()) return;
    if (docs.empty()) docs.push_back({fs::path(source).stem().string(), {}});
    docs.back().sentences.push_back(std::move(current));
    current.clear();
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.rfind("##DOC", 0) == 0) {
      flush_sentence();
      docs.push_back({std::string(trim(line.substr(5))), {}});
      if (docs.back().id.empty()) throw ParseError(source, line_no, "document id missing");
      continue;
    }
    if (trim(line).empty()) {
      flush_sentence();
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) {
      throw ParseError(source, line_no,
                       "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    const auto tag = parse_pos(fields[1]);
    if (!tag) throw ParseError(source, line_no, "unknown tag '" + std::string(fields[1]) + "'");
    if (fields[0].empty()) throw ParseError(source, line_no, "empty form");
    if (fields[2].empty()) throw ParseError(source, line_no, "empty lemma");
    current.push_back({std::string(fields[0]), *tag, std::string(fields[2])});
  }
  flush_sentence();
  return docs;
}

std::vector<TaggedDocument> load_tagged(const fs::path& path) {
  return parse_tagged(read_file(path), path.string());
}

// ---------------------------------------------------------------------------

namespace {

bool is_acronym(const TaggedToken& t) {
  if (t.pos != Pos::kN && t.pos != Pos::kOther) return false;
  const std::u32string form = unicode::decode(t.form);
  if (form.size() < 2) return false;
  return std::all_of(form.begin(), form.end(), [](char32_t c) {
    return unicode::is_letter(c) && unicode::is_upper(c);
  });
}

// Length of the longest noun phrase starting at `i`, 0 if none.
std::size_t match_phrase(const Sentence& s, std::size_t i) {
  auto is = [&](std::size_t j, Pos p) { return j < s.size() && s[j].pos == p; };
  std::size_t j = i;
  if (is(j, Pos::kDet)) ++j;
  while (is(j, Pos::kAdj)) ++j;
  if (!is(j, Pos::kN)) return 0;
  while (is(j, Pos::kN)) ++j;
  while (true) {
    if (is(j, Pos::kAdj)) {
      ++j;
      continue;
    }
    if (is(j, Pos::kPrep)) {
      std::size_t k = j + 1;
      if (is(k, Pos::kDet)) ++k;
      if (is(k, Pos::kN)) {
        while (is(k, Pos::kN)) ++k;
        j = k;
        continue;
      }
    }
    break;
  }
  return j - i;
}

std::string surface_text(const Sentence& s, TokenRange r) {
  std::string out;
  for (std::size_t i = r.begin; i < r.end; ++i) {
    if (i > r.begin) out += ' ';
    out += s[i].form;
  }
  return out;
}

}  // namespace

NpAnalysis detect_noun_phrases(const Sentence& sentence) {
  NpAnalysis out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    if (const std::size_t len = match_phrase(sentence, i); len > 0) {
      NounPhrase np;
      np.range = {i, i + len};
      // Head: last noun of the first noun run.
      std::size_t h = i;
      while (sentence[h].pos != Pos::kN) ++h;
      while (h + 1 < np.range.end && sentence[h + 1].pos == Pos::kN) ++h;
      np.head_lemma = unicode::fold(sentence[h].lemma);
      np.text = surface_text(sentence, np.range);
      out.phrases.push_back(std::move(np));
      i += len;
    } else if (is_acronym(sentence[i])) {
      out.phrases.push_back({{i, i + 1}, unicode::fold(sentence[i].lemma), sentence[i].form, true});
      ++i;
    } else {
      ++i;
    }
  }

  const auto& nps = out.phrases;
  std::size_t k = 0;
  while (k < nps.size()) {
    NpList list;
    list.members.push_back(k);
    std::size_t m = k;
    while (m + 1 < nps.size()) {
      const std::size_t sep = nps[m].range.end;
      if (nps[m + 1].range.begin != sep + 1) break;
      const TaggedToken& t = sentence[sep];
      const bool comma = t.pos == Pos::kPunc && t.form == ",";
      const bool conj = t.pos == Pos::kConj;
      if (!comma && !conj) break;
      list.members.push_back(++m);
      if (conj) break;
    }
    if (list.members.size() >= 2) {
      list.range = {nps[k].range.begin, nps[m].range.end};
      out.lists.push_back(std::move(list));
    }
    k = m + 1;
  }
  return out;
}

std::string phrase_lemma_text(const Sentence& sentence, const NounPhrase& phrase) {
  std::string out;
  for (std::size_t i = phrase.range.begin; i < phrase.range.end; ++i) {
    if (i == phrase.range.begin && sentence[i].pos == Pos::kDet) continue;
    if (!out.empty()) out += ' ';
    out += unicode::fold(sentence[i].lemma);
  }
  return out;
}

}  // namespace term
