#include "term/engines.h"

#include "term/error.h"

namespace term {

using nlohmann::json;

json pattern_payload(const Pattern& pattern) {
  json items = json::array();
  for (const auto& it : pattern.items) {
    json j = {{"kind", to_string(it.kind)}, {"slot", it.slot}};
    if (it.kind == ItemKind::kLit) j["lemma"] = it.lemma;
    items.push_back(std::move(j));
  }
  return {{"relation", pattern.relation}, {"text", pattern.text()}, {"items", std::move(items)}};
}

Pattern pattern_from_payload(const json& payload) {
  Pattern p;
  p.relation = payload.at("relation").get<std::string>();
  for (const auto& j : payload.at("items")) {
    ExprItem it;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "NP") it.kind = ItemKind::kNp;
    else if (kind == "LIST") it.kind = ItemKind::kList;
    else if (kind == "LIT") it.kind = ItemKind::kLit;
    else throw DataError("unknown pattern item kind '" + kind + "'");
    it.slot = j.value("slot", 0);
    if (it.kind == ItemKind::kLit) it.lemma = j.at("lemma").get<std::string>();
    p.items.push_back(std::move(it));
  }
  p.status = Status::kValidated;
  return p;
}

namespace {

json sources_json(const std::vector<SentenceRef>& refs) {
  json out = json::array();
  for (const auto& r : refs) out.push_back({{"doc", r.doc_id}, {"sentence", r.sentence}});
  return out;
}

class PrometheeEngine : public Engine {
 public:
  explicit PrometheeEngine(const PrometheeInputs& in) : cfg_(in.config) {
    cfg_.validate();
    corpus_ = load_tagged(in.corpus);
    seeds_ = load_seed_pairs(in.seeds, cfg_.relation);
    if (seeds_.empty()) throw ConfigError("seed file " + in.seeds.string() + " holds no pairs");
  }

  std::string name() const override { return "promethee"; }

  std::vector<NewCandidate> run(const std::vector<ValidationItem>& accepted) override {
    std::vector<SeedPair> seeds = seeds_;
    std::vector<Pattern> patterns;
    for (const auto& item : accepted) {
      if (item.payload.value("relation", "") != cfg_.relation) continue;
      if (item.kind == CandidateKind::kPair) {
        seeds.push_back({item.payload.at("term1").get<std::string>(),
                         item.payload.at("term2").get<std::string>(), cfg_.relation});
      } else if (item.kind == CandidateKind::kPattern) {
        patterns.push_back(pattern_from_payload(item.payload));
      }
    }
    const PrometheeTurn turn = run_promethee(corpus_, seeds, patterns, cfg_);

    std::vector<NewCandidate> out;
    for (const auto& p : turn.patterns) {
      out.push_back({CandidateKind::kPattern, pattern_payload(p),
                     {{"support", sources_json(p.support)}},
                     static_cast<double>(p.support.size())});
    }
    for (const auto& pair : turn.pairs) {
      out.push_back({CandidateKind::kPair,
                     {{"relation", pair.relation}, {"term1", pair.term1}, {"term2", pair.term2}},
                     {{"pattern", patterns[pair.pattern].text()},
                      {"source", {{"doc", pair.source.doc_id}, {"sentence", pair.source.sentence}}}},
                     1.0});
    }
    return out;
  }

 private:
  PrometheeConfig cfg_;
  std::vector<TaggedDocument> corpus_;
  std::vector<SeedPair> seeds_;
};

class AnaEngine : public Engine {
 public:
  explicit AnaEngine(const AnaInputs& in) {
    setup_.config = in.config;
    setup_.costs = in.costs;
    setup_.config.validate();
    setup_.costs.validate();
    setup_.functional = load_lexicon(in.stopwords);
    setup_.schemes = load_lexicon(in.schemes);
    corpus_ = load_raw_corpus(in.corpus);
    for (const auto& e : read_entries(in.bootstrap)) seeds_.push_back(make_term(e));
    if (seeds_.empty()) throw ConfigError("bootstrap file " + in.bootstrap.string() + " is empty");
  }

  std::string name() const override { return "ana"; }

  std::vector<NewCandidate> run(const std::vector<ValidationItem>& accepted) override {
    std::vector<Term> seeds = seeds_;
    for (const auto& item : accepted) {
      if (item.kind == CandidateKind::kTerm) {
        seeds.push_back(make_term(item.payload.at("surface").get<std::string>()));
      }
    }
    const AnaResult result = run_ana(corpus_, seeds, setup_);
    std::vector<NewCandidate> out;
    for (const auto& c : result.candidates) {
      json prov = json::array();
      for (const auto& p : c.provenance) {
        prov.push_back({{"doc", p.doc_id}, {"start", p.range.begin}, {"end", p.range.end}});
      }
      out.push_back({CandidateKind::kTerm,
                     {{"surface", c.term.surface}},
                     {{"pattern", to_string(c.pattern)},
                      {"support", c.support},
                      {"frequency", c.frequency},
                      {"provenance", std::move(prov)}},
                     static_cast<double>(c.frequency)});
    }
    return out;
  }

 private:
  AnaSetup setup_;
  std::vector<Document> corpus_;
  std::vector<Term> seeds_;
};

}  // namespace

std::unique_ptr<Engine> make_promethee_engine(const PrometheeInputs& inputs) {
  return std::make_unique<PrometheeEngine>(inputs);
}

std::unique_ptr<Engine> make_ana_engine(const AnaInputs& inputs) {
  return std::make_unique<AnaEngine>(inputs);
}

}  // namespace term
