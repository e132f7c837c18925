#ifndef TERM_ENGINES_H_
#define TERM_ENGINES_H_

// Store-facing adapters: each runs one loop turn of an acquisition module
// with the expert's accepted items folded back in.

#include <filesystem>
#include <memory>

#include "term/ana.h"
#include "term/promethee.h"
#include "term/valstore.h"

namespace term {

struct PrometheeInputs {
  std::filesystem::path corpus;  // tagged TSV
  std::filesystem::path seeds;   // term1<TAB>term2
  PrometheeConfig config;
};

struct AnaInputs {
  std::filesystem::path corpus;  // directory of .txt files, or one file
  std::filesystem::path bootstrap;
  std::filesystem::path schemes;
  std::filesystem::path stopwords;
  AnaConfig config;
  CostConfig costs;
};

// Both load and validate their inputs up front, throwing ConfigError or
// DataError. Accepted pairs / patterns / terms of other relations are ignored.
std::unique_ptr<Engine> make_promethee_engine(const PrometheeInputs& inputs);
std::unique_ptr<Engine> make_ana_engine(const AnaInputs& inputs);

nlohmann::json pattern_payload(const Pattern& pattern);
// Rebuilds a validated pattern from an accepted store item.
Pattern pattern_from_payload(const nlohmann::json& payload);

}  // namespace term

#endif  // TERM_ENGINES_H_
