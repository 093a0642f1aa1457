#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "xsl/corpus.hpp"
#include "xsl/rng.hpp"

namespace testing {

// One interchange-format line, e.g. "a b\tF1,F2;F3".
inline xsl::InputPair pair_of(std::string_view line) {
  auto pairs = xsl::parse_corpus(line);
  return pairs.at(0);
}

inline std::vector<xsl::InputPair> corpus_of(std::string_view text) {
  return xsl::parse_corpus(text);
}

// Small random corpus over a fixed word and feature inventory. Scenes hold
// random referents unrelated to any gold lexicon, which stresses the
// update rule with overlapping and shared features.
inline std::vector<xsl::InputPair> random_corpus(xsl::Rng& rng, std::size_t n_pairs,
                                                 std::size_t n_words, std::size_t n_features,
                                                 std::size_t max_len = 3,
                                                 std::size_t max_scene = 3) {
  std::vector<xsl::InputPair> pairs;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    xsl::InputPair p;
    p.index = i + 1;
    auto len = rng.between(1, std::min(max_len, n_words));
    while (p.utterance.size() < len)
      p.add_word("w" + std::to_string(rng.below(n_words)));
    auto scene = rng.between(1, max_scene);
    for (std::size_t r = 0; r < scene; ++r) {
      std::vector<std::string> feats;
      auto k = rng.between(1, n_features);
      for (std::size_t j = 0; j < k; ++j)
        feats.push_back("F" + std::to_string(rng.below(n_features)));
      p.add_referent(xsl::Referent::of(feats));
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

} // namespace testing
