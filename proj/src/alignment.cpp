#include "xsl/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xsl {

double similarity(std::span<const double> word_rep, std::span<const double> referent_rep,
                  Similarity kind) {
  if (word_rep.size() != referent_rep.size())
    throw std::invalid_argument("similarity: vectors live in different feature universes");
  double dot = 0.0, word_sq = 0.0, ref_sq = 0.0;
  for (std::size_t i = 0; i < word_rep.size(); ++i) {
    if (word_rep[i] < 0.0)
      throw std::invalid_argument("similarity: negative meaning probability");
    dot += word_rep[i] * referent_rep[i];
    word_sq += word_rep[i] * word_rep[i];
    ref_sq += referent_rep[i] * referent_rep[i];
  }
  if (word_sq == 0.0)
    throw std::invalid_argument("similarity: zero meaning vector");
  if (ref_sq == 0.0)
    throw std::invalid_argument("similarity: referent has no features");
  if (kind == Similarity::Dot)
    return dot;
  return std::min(1.0, dot / (std::sqrt(word_sq) * std::sqrt(ref_sq)));
}

std::vector<double> referent_similarities(const MeaningState& state, const EncodedPair& pair,
                                          std::size_t word_index, Similarity kind) {
  const SymbolId word = pair.words[word_index];
  const double lambda = state.smoothing().lambda;
  const AssocRow* row = state.row(word);

  // Both measures only need the smoothed scores (assoc + lambda); the common
  // normalizer of p(.|w) cancels in the cosine.
  double scale;
  if (kind == Similarity::Cosine)
    scale = std::sqrt(state.smoothed_sq_sum(word, pair.universe_size));
  else
    scale = state.normalizer(word);

  std::vector<double> sims;
  sims.reserve(pair.referents.size());
  for (const auto& referent : pair.referents) {
    double mass = 0.0;
    for (SymbolId f : referent)
      mass += (row ? row->get(f) : 0.0) + lambda;
    double s = kind == Similarity::Cosine
                   ? mass / (scale * std::sqrt(static_cast<double>(referent.size())))
                   : mass / scale;
    sims.push_back(std::min(1.0, s));
  }
  return sims;
}

AlignmentTable similarity_table(const MeaningState& state, const EncodedPair& pair,
                                Similarity kind) {
  AlignmentTable table;
  table.n_words = pair.words.size();
  table.n_targets = pair.referents.size();
  table.strengths.reserve(table.n_words * table.n_targets);
  for (std::size_t i = 0; i < table.n_words; ++i) {
    auto sims = referent_similarities(state, pair, i, kind);
    table.strengths.insert(table.strengths.end(), sims.begin(), sims.end());
  }
  return table;
}

void normalize_over_targets(AlignmentTable& table) {
  for (std::size_t i = 0; i < table.n_words; ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < table.n_targets; ++t)
      sum += table(i, t);
    for (std::size_t t = 0; t < table.n_targets; ++t)
      table.at(i, t) = sum > 0.0 ? table(i, t) / sum : 1.0 / static_cast<double>(table.n_targets);
  }
}

void normalize_over_words(AlignmentTable& table) {
  for (std::size_t t = 0; t < table.n_targets; ++t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < table.n_words; ++i)
      sum += table(i, t);
    for (std::size_t i = 0; i < table.n_words; ++i)
      table.at(i, t) = sum > 0.0 ? table(i, t) / sum : 1.0 / static_cast<double>(table.n_words);
  }
}

AlignmentTable align_fas(const MeaningState& state, const EncodedPair& pair) {
  AlignmentTable table;
  table.mechanism = Mechanism::Fas;
  table.n_words = pair.words.size();
  table.n_targets = pair.features.size();
  table.strengths.reserve(table.n_words * table.n_targets);
  for (SymbolId w : pair.words)
    for (SymbolId f : pair.features)
      table.strengths.push_back(state.meaning_prob(w, f));
  normalize_over_words(table);
  return table;
}

AlignmentTable align_no_comp(const MeaningState& state, const EncodedPair& pair,
                             Similarity kind) {
  auto table = similarity_table(state, pair, kind);
  table.mechanism = Mechanism::NoComp;
  return table;
}

AlignmentTable align_ref_comp(const MeaningState& state, const EncodedPair& pair,
                              Similarity kind) {
  auto table = similarity_table(state, pair, kind);
  table.mechanism = Mechanism::RefComp;
  normalize_over_targets(table);
  return table;
}

AlignmentTable align_word_comp(const MeaningState& state, const EncodedPair& pair,
                               Similarity kind) {
  auto table = similarity_table(state, pair, kind);
  table.mechanism = Mechanism::WordComp;
  normalize_over_words(table);
  return table;
}

AlignmentTable align(Mechanism mechanism, const MeaningState& state, const EncodedPair& pair,
                     Similarity kind) {
  switch (mechanism) {
  case Mechanism::Fas:
    return align_fas(state, pair);
  case Mechanism::NoComp:
    return align_no_comp(state, pair, kind);
  case Mechanism::RefComp:
    return align_ref_comp(state, pair, kind);
  case Mechanism::WordComp:
    return align_word_comp(state, pair, kind);
  }
  throw std::invalid_argument("unknown mechanism");
}

} // namespace xsl
