#include "term/cli.h"

#include <pthread.h>
#include <signal.h>

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "term/acabit.h"
#include "term/ana.h"
#include "term/engines.h"
#include "term/error.h"
#include "term/flexeq.h"
#include "term/promethee.h"
#include "term/service.h"
#include "term/valstore.h"

namespace term {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Flags whose values are file system paths; config-file values for these
// are resolved against the config file's directory.
const std::set<std::string> kPathKeys = {"terms",  "corpus", "stopwords", "bootstrap", "schemes",
                                         "seeds",  "store",  "static",    "out"};

struct Shared {
  std::string stopwords;
  std::string out = "-";
  std::string format = "jsonl";
  std::string config;
};

void add_shared(CLI::App* sub, Shared& s) {
  sub->add_option("--stopwords", s.stopwords, "functional-word lexicon, one word per line");
  sub->add_option("--out", s.out, "output file, - for standard output");
  sub->add_option("--format", s.format, "output format (jsonl; xml is reserved)")
      ->check(CLI::IsMember({"jsonl", "xml"}));
  sub->add_option("--config", s.config,
                  "JSON file of defaults, keyed by flag name without dashes");
}

void need(const std::string& value, const std::string& flag) {
  if (value.empty()) throw ConfigError(flag + " is required");
}

void check_format(const Shared& s) {
  if (s.format == "xml") throw ConfigError("--format xml is reserved and not implemented");
}

Lexicon maybe_lexicon(const std::string& path) {
  return path.empty() ? Lexicon("functional") : load_lexicon(path);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  f.flush();
  if (!f) throw IoError("cannot write " + path);
}

std::string jsonl(const std::vector<ojson>& rows) {
  std::string text;
  for (const auto& r : rows) text += r.dump() + "\n";
  return text;
}

// Finds `--config FILE` among the subcommand's arguments without parsing.
std::optional<std::string> config_arg(int argc, char** argv) {
  for (int i = 2; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

// Installs config-file values as option defaults, so explicit flags override.
void apply_config(CLI::App* sub, const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  const nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("config file " + file.string() + " is not a JSON object");
  }
  const fs::path base = file.parent_path();
  for (const auto& [key, value] : doc.items()) {
    CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw ConfigError("unknown key '" + key + "' in " + file.string());
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number() || value.is_boolean()) {
      text = value.dump();
    } else {
      throw ConfigError("key '" + key + "' in " + file.string() + " must be a scalar");
    }
    if (kPathKeys.count(key) && !text.empty() && text != "-" && fs::path(text).is_relative()) {
      text = (base / text).lexically_normal().string();
    }
    opt->default_str(text);
    opt->default_val(text);
  }
}

CostConfig costs_from(const std::string& q, const std::string& p, const std::string& k) {
  CostConfig c;
  c.q = parse_rational(q);
  c.p = parse_rational(p);
  c.k = parse_rational(k);
  c.validate();
  return c;
}

// match -----------------------------------------------------------------------

struct MatchOpts {
  Shared shared;
  std::string terms, corpus;
  std::string q = "1", p = "2", k = "5";
};

int run_match(const MatchOpts& o, std::ostream& out, std::ostream& err) {
  check_format(o.shared);
  need(o.terms, "--terms");
  need(o.corpus, "--corpus");
  const CostConfig costs = costs_from(o.q, o.p, o.k);

  const Lexicon functional = maybe_lexicon(o.shared.stopwords);
  std::vector<Term> refs;
  for (const auto& e : read_entries(o.terms)) refs.push_back(make_term(e));
  const auto corpus = load_raw_corpus(o.corpus);

  const TermMatcher matcher(refs, costs, functional);
  std::vector<ojson> rows;
  for (const auto& doc : corpus) {
    for (const auto& occ : matcher.scan(doc)) {
      ojson r;
      r["term"] = refs[occ.term_index].surface;
      r["doc"] = doc.id;
      r["start"] = occ.range.begin;
      r["end"] = occ.range.end;
      r["surface"] = join_surface(doc, occ.range);
      r["distance"] = to_double(occ.distance);
      r["distance_exact"] = to_string(occ.distance);
      rows.push_back(std::move(r));
    }
  }
  err << "match: " << rows.size() << " occurrences in " << corpus.size() << " documents\n";
  emit(o.shared.out, jsonl(rows), out);
  return 0;
}

// ana -------------------------------------------------------------------------

struct AnaOpts {
  Shared shared;
  std::string corpus, bootstrap, schemes;
  AnaConfig config;
  std::string q = "1", p = "2", k = "5";
};

int run_ana_cmd(const AnaOpts& o, std::ostream& out, std::ostream& err) {
  check_format(o.shared);
  need(o.corpus, "--corpus");
  need(o.bootstrap, "--bootstrap");
  need(o.schemes, "--schemes");
  AnaSetup setup;
  setup.config = o.config;
  setup.config.validate();
  setup.costs = costs_from(o.q, o.p, o.k);

  setup.functional = maybe_lexicon(o.shared.stopwords);
  setup.schemes = load_lexicon(o.schemes);
  std::vector<Term> seeds;
  for (const auto& e : read_entries(o.bootstrap)) seeds.push_back(make_term(e));
  const auto corpus = load_raw_corpus(o.corpus);

  const AnaResult result = run_ana(corpus, seeds, setup);
  std::vector<ojson> rows;
  std::size_t rank = 0;
  for (const auto& c : result.candidates) {
    ojson r;
    r["surface"] = c.term.surface;
    r["pattern"] = to_string(c.pattern);
    r["support"] = c.support;
    r["frequency"] = c.frequency;
    r["rank"] = ++rank;
    ojson prov = ojson::array();
    for (const auto& pv : c.provenance) {
      prov.push_back({{"doc", pv.doc_id}, {"start", pv.range.begin}, {"end", pv.range.end}});
    }
    r["provenance"] = std::move(prov);
    rows.push_back(std::move(r));
  }
  err << "ana: " << rows.size() << " candidates after " << result.iterations << " iterations\n";
  emit(o.shared.out, jsonl(rows), out);
  return 0;
}

// acabit ----------------------------------------------------------------------

struct AcabitOpts {
  Shared shared;
  std::string corpus;
  std::string measure = "llr";
};

int run_acabit(const AcabitOpts& o, std::ostream& out, std::ostream& err) {
  check_format(o.shared);
  need(o.corpus, "--corpus");
  const AssociationMeasure measure = association_measure(o.measure);

  const Lexicon functional = maybe_lexicon(o.shared.stopwords);
  const auto corpus = load_tagged(o.corpus);
  std::map<std::string, std::vector<std::size_t>> offsets;
  for (const auto& doc : corpus) offsets[doc.id] = sentence_offsets(doc);

  std::vector<ojson> rows;
  for (const auto& pair : extract_acabit(corpus, functional, measure)) {
    ojson r;
    r["lemma1"] = pair.lemma1;
    r["lemma2"] = pair.lemma2;
    r["pattern"] = to_string(pair.pattern);
    r["score"] = pair.score;
    r["freq"] = pair.freq;
    ojson variants = ojson::array();
    for (const auto& occ : pair.occurrences) {
      const std::size_t shift = offsets.at(occ.doc_id).at(occ.sentence);
      ojson v;
      v["surface"] = occ.surface;
      v["variant"] = to_string(occ.variant);
      v["doc"] = occ.doc_id;
      v["start"] = shift + occ.range.begin;
      v["end"] = shift + occ.range.end;
      if (occ.inserted_modifier) v["modifier"] = *occ.inserted_modifier;
      variants.push_back(std::move(v));
    }
    r["variants"] = std::move(variants);
    rows.push_back(std::move(r));
  }
  err << "acabit: " << rows.size() << " candidate pairs\n";
  emit(o.shared.out, jsonl(rows), out);
  return 0;
}

// promethee -------------------------------------------------------------------

struct PrometheeOpts {
  Shared shared;
  std::string corpus, seeds, store;
  std::string relation = "hypernym";
  std::string sim_threshold = "1/2";
  std::size_t window = 5;
};

PrometheeConfig promethee_config(const std::string& relation, const std::string& sim,
                                 std::size_t window) {
  PrometheeConfig cfg;
  cfg.relation = relation;
  cfg.sim_threshold = parse_rational(sim);
  cfg.window = window;
  cfg.validate();
  return cfg;
}

int run_promethee_cmd(const PrometheeOpts& o, std::ostream& out, std::ostream& err) {
  check_format(o.shared);
  need(o.corpus, "--corpus");
  need(o.seeds, "--seeds");
  need(o.store, "--store");
  PrometheeInputs in;
  in.corpus = o.corpus;
  in.seeds = o.seeds;
  in.config = promethee_config(o.relation, o.sim_threshold, o.window);

  auto engine = make_promethee_engine(in);
  Store store(o.store);
  const IterationSummary summary = store.run_iteration(engine.get());

  // The items this turn added, in store order.
  std::vector<ojson> rows;
  for (const auto& item : store.list_items(std::nullopt, ItemStatus::kPending)) {
    if (item.iteration != summary.iteration) continue;
    rows.push_back(ojson::parse(to_json(item).dump()));
  }
  err << "promethee: iteration " << summary.iteration << ", " << summary.new_candidates
      << " new candidates in " << o.store << "\n";
  emit(o.shared.out, jsonl(rows), out);
  return 0;
}

// serve -----------------------------------------------------------------------

struct ServeOpts {
  Shared shared;
  std::string store, host = "127.0.0.1", engine = "none", static_dir;
  int port = 8080;
  std::string corpus, seeds, bootstrap, schemes;
  std::string relation = "hypernym";
  std::string sim_threshold = "1/2";
  std::size_t window = 5;
  std::size_t min_support = 3, gap = 2, max_iter = 20;
  std::string q = "1", p = "2", k = "5";
};

std::unique_ptr<Engine> serve_engine(const ServeOpts& o) {
  if (o.engine == "promethee") {
    need(o.corpus, "--corpus");
    need(o.seeds, "--seeds");
    PrometheeInputs in;
    in.corpus = o.corpus;
    in.seeds = o.seeds;
    in.config = promethee_config(o.relation, o.sim_threshold, o.window);
    return make_promethee_engine(in);
  }
  if (o.engine == "ana") {
    need(o.corpus, "--corpus");
    need(o.bootstrap, "--bootstrap");
    need(o.schemes, "--schemes");
    need(o.shared.stopwords, "--stopwords");
    AnaInputs in;
    in.corpus = o.corpus;
    in.bootstrap = o.bootstrap;
    in.schemes = o.schemes;
    in.stopwords = o.shared.stopwords;
    in.config.window = o.window;
    in.config.min_support = o.min_support;
    in.config.gap = o.gap;
    in.config.max_iter = o.max_iter;
    in.config.validate();
    in.costs = costs_from(o.q, o.p, o.k);
    return make_ana_engine(in);
  }
  return nullptr;
}

int run_serve(const ServeOpts& o, std::ostream& err) {
  need(o.store, "--store");
  if (o.port < 0 || o.port > 65535) throw ConfigError("--port must be in 0..65535");
  if (!o.static_dir.empty() && !fs::is_directory(o.static_dir)) {
    throw ConfigError("--static " + o.static_dir + " is not a directory");
  }

  auto engine = serve_engine(o);
  Store store(o.store);
  ApiServer server(store, engine.get());
  if (!o.static_dir.empty()) server.mount_static(o.static_dir);
  const int port = server.bind(o.host, o.port);
  if (port < 0) throw IoError("cannot bind " + o.host + ":" + std::to_string(o.port));

  // Server threads inherit the blocked mask; one thread waits for the signal.
  sigset_t stop_signals, saved;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, &saved);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    server.stop();
  });

  err << "listening on http://" << o.host << ":" << port << std::endl;
  const bool ok = server.listen();
  if (!ok) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_SETMASK, &saved, nullptr);
  err << "stopped at iteration " << store.iteration() << "\n";
  return 0;
}

}  // namespace

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Terminology toolkit: term matching, acquisition and validation", "term"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  MatchOpts mo;
  auto* match = app.add_subcommand("match", "find flexible occurrences of known terms");
  match->add_option("--terms", mo.terms, "reference terms, one per line");
  match->add_option("--corpus", mo.corpus, "directory of .txt files, or one file");
  match->add_option("--q", mo.q, "insertion/deletion cost");
  match->add_option("--p", mo.p, "substitution cost");
  match->add_option("--k", mo.k, "strictness; 1/k of variation is tolerated");
  add_shared(match, mo.shared);

  AnaOpts ao;
  auto* ana = app.add_subcommand("ana", "acquire new terms from raw text");
  ana->add_option("--corpus", ao.corpus, "directory of .txt files, or one file");
  ana->add_option("--bootstrap", ao.bootstrap, "seed terms, one per line");
  ana->add_option("--schemes", ao.schemes, "lexical scheme words, one per line");
  ana->add_option("--window", ao.config.window, "context tokens on each side");
  ana->add_option("--min-support", ao.config.min_support, "contexts needed per candidate");
  ana->add_option("--gap", ao.config.gap, "functional tokens allowed between linked items");
  ana->add_option("--max-iter", ao.config.max_iter, "iteration cap");
  ana->add_option("--q", ao.q, "insertion/deletion cost");
  ana->add_option("--p", ao.p, "substitution cost");
  ana->add_option("--k", ao.k, "strictness of flexible equality");
  add_shared(ana, ao.shared);

  AcabitOpts co;
  auto* acabit = app.add_subcommand("acabit", "extract and rank base-term pairs from tagged text");
  acabit->add_option("--corpus", co.corpus, "tagged TSV file");
  acabit->add_option("--measure", co.measure, "association measure")
      ->check(CLI::IsMember({"llr", "frequency"}));
  add_shared(acabit, co.shared);

  PrometheeOpts po;
  auto* promethee =
      app.add_subcommand("promethee", "run one pattern-acquisition turn into a validation store");
  promethee->add_option("--corpus", po.corpus, "tagged TSV file");
  promethee->add_option("--seeds", po.seeds, "seed pairs, term1<TAB>term2");
  promethee->add_option("--relation", po.relation, "relation name");
  promethee->add_option("--sim-threshold", po.sim_threshold, "expression clustering threshold");
  promethee->add_option("--window", po.window, "literals kept on each side of the pair");
  promethee->add_option("--store", po.store, "validation store directory");
  add_shared(promethee, po.shared);

  ServeOpts so;
  auto* serve = app.add_subcommand("serve", "serve the validation store over HTTP");
  serve->add_option("--store", so.store, "validation store directory");
  serve->add_option("--host", so.host, "address to bind");
  serve->add_option("--port", so.port, "port, 0 picks a free one");
  serve->add_option("--engine", so.engine, "engine behind /api/iterate")
      ->check(CLI::IsMember({"none", "ana", "promethee"}));
  serve->add_option("--static", so.static_dir, "directory served at /");
  serve->add_option("--corpus", so.corpus, "engine corpus");
  serve->add_option("--seeds", so.seeds, "promethee seed pairs");
  serve->add_option("--relation", so.relation, "promethee relation name");
  serve->add_option("--sim-threshold", so.sim_threshold, "promethee clustering threshold");
  serve->add_option("--window", so.window, "context window of either engine");
  serve->add_option("--bootstrap", so.bootstrap, "ana seed terms");
  serve->add_option("--schemes", so.schemes, "ana lexical scheme words");
  serve->add_option("--min-support", so.min_support, "ana contexts per candidate");
  serve->add_option("--gap", so.gap, "ana functional gap");
  serve->add_option("--max-iter", so.max_iter, "ana iteration cap");
  serve->add_option("--q", so.q, "insertion/deletion cost");
  serve->add_option("--p", so.p, "substitution cost");
  serve->add_option("--k", so.k, "strictness of flexible equality");
  add_shared(serve, so.shared);

  try {
    try {
      if (argc >= 2 && argv[1][0] != '-') {
        CLI::App* sub = app.get_subcommand_no_throw(argv[1]);
        if (sub == nullptr) {
          err << "term: unknown subcommand '" << argv[1] << "'\n" << app.help();
          return 1;
        }
        if (const auto cfg = config_arg(argc, argv)) apply_config(sub, *cfg);
      }
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : 1;
    } catch (const CLI::Error& e) {
      err << "term: " << e.what() << "\n";
      return 1;
    }

    if (match->parsed()) return run_match(mo, out, err);
    if (ana->parsed()) return run_ana_cmd(ao, out, err);
    if (acabit->parsed()) return run_acabit(co, out, err);
    if (promethee->parsed()) return run_promethee_cmd(po, out, err);
    if (serve->parsed()) return run_serve(so, err);
    err << app.help();
    return 1;
  } catch (const ConfigError& e) {
    err << "term: " << e.what() << "\n";
    return 1;
  } catch (const InvalidInput& e) {
    err << "term: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "term: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "term: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace term
