#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xsl/state.hpp"

namespace xsl {

/// Alignment strengths for one input pair, words x targets, row-major.
/// Targets are the scene referents, or the flattened scene features for FAS.
struct AlignmentTable {
  Mechanism mechanism = Mechanism::WordComp;
  std::size_t n_words = 0;
  std::size_t n_targets = 0;
  std::vector<double> strengths;

  double operator()(std::size_t word, std::size_t target) const {
    return strengths[word * n_targets + target];
  }
  double& at(std::size_t word, std::size_t target) {
    return strengths[word * n_targets + target];
  }
};

/// Similarity of a meaning vector with a referent's 0/1 indicator vector
/// over the same feature universe. Throws std::invalid_argument on a zero
/// vector or mismatched sizes.
double similarity(std::span<const double> word_rep, std::span<const double> referent_rep,
                  Similarity kind = Similarity::Cosine);

/// Similarity of every scene referent with one word's current meaning, via
/// the sparse association row.
std::vector<double> referent_similarities(const MeaningState& state, const EncodedPair& pair,
                                          std::size_t word_index, Similarity kind);

/// Raw similarity matrix, words x referents.
AlignmentTable similarity_table(const MeaningState& state, const EncodedPair& pair,
                                Similarity kind);

/// a(w|f) = p(f|w) / sum over utterance words of p(f|w').
AlignmentTable align_fas(const MeaningState& state, const EncodedPair& pair);
/// a(w,r) = sim(w, r).
AlignmentTable align_no_comp(const MeaningState& state, const EncodedPair& pair,
                             Similarity kind = Similarity::Cosine);
/// a(r|w): similarities normalized over the scene referents.
AlignmentTable align_ref_comp(const MeaningState& state, const EncodedPair& pair,
                              Similarity kind = Similarity::Cosine);
/// a(w|r): similarities normalized over the utterance words.
AlignmentTable align_word_comp(const MeaningState& state, const EncodedPair& pair,
                               Similarity kind = Similarity::Cosine);

AlignmentTable align(Mechanism mechanism, const MeaningState& state, const EncodedPair& pair,
                     Similarity kind = Similarity::Cosine);

// Normalization steps, exposed so the competitive mechanisms can be checked
// on hand-built score matrices. A group whose raw scores are all zero
// becomes uniform.
void normalize_over_targets(AlignmentTable& table);
void normalize_over_words(AlignmentTable& table);

} // namespace xsl
