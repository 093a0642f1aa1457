#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xsl/corpus.hpp"
#include "xsl/symbols.hpp"

namespace xsl {

enum class Mechanism { Fas, NoComp, RefComp, WordComp };

inline constexpr Mechanism kAllMechanisms[] = {Mechanism::Fas, Mechanism::NoComp,
                                               Mechanism::RefComp, Mechanism::WordComp};

/// CLI spelling: fas, no-comp, ref-comp, word-comp.
std::string_view to_string(Mechanism m) noexcept;
/// Throws ConfigError for unknown names.
Mechanism parse_mechanism(std::string_view name);

/// Word-referent similarity used by the referent mechanisms.
enum class Similarity {
  Cosine,
  /// Plain dot product of the probability vector with the referent's
  /// indicator vector: the probability mass the word puts on the referent.
  Dot,
};

std::string_view to_string(Similarity s) noexcept;
Similarity parse_similarity(std::string_view name);

/// Additive smoothing of the meaning probabilities:
///   p(f|w) = (assoc(w,f) + lambda) / (sum_M assoc(w,.) + beta * lambda)
struct Smoothing {
  double lambda = 1e-5;
  /// Expected size of the feature universe; must never fall below |M|.
  double beta = 0.0;
};

/// Sparse association row of one word. Entries keep insertion order so that
/// every reduction over a row is reproducible.
class AssocRow {
public:
  AssocRow() = default;
  /// Rebuilds a row exactly, including its running total (which need not
  /// equal a fresh re-summation of `values`).
  AssocRow(std::vector<SymbolId> features, std::vector<double> values, double total);

  double get(SymbolId feature) const;
  void add(SymbolId feature, double delta);

  double total() const noexcept { return total_; }
  std::size_t size() const noexcept { return features_.size(); }
  const std::vector<SymbolId>& features() const noexcept { return features_; }
  const std::vector<double>& values() const noexcept { return values_; }

private:
  std::vector<SymbolId> features_;
  std::vector<double> values_;
  std::unordered_map<SymbolId, std::uint32_t> slot_;
  double total_ = 0.0;
};

/// The learner's long-term knowledge: association scores, the observed
/// word and feature sets (M), and the input counter.
class MeaningState {
public:
  explicit MeaningState(Smoothing smoothing);

  const Smoothing& smoothing() const noexcept { return smoothing_; }
  const SymbolTable& words() const noexcept { return words_; }
  const SymbolTable& features() const noexcept { return features_; }
  std::uint64_t time() const noexcept { return t_; }

  SymbolId observe_word(std::string_view word);
  SymbolId observe_feature(std::string_view feature);
  void advance() noexcept { ++t_; }

  /// Returns nullptr for words without any association yet.
  const AssocRow* row(SymbolId word) const noexcept;
  double assoc(SymbolId word, SymbolId feature) const noexcept;
  double row_total(SymbolId word) const noexcept;

  /// Adds a non-negative amount to assoc(word, feature).
  void add_assoc(SymbolId word, SymbolId feature, double delta);

  /// p(f|w). Unknown words and features are allowed (kNoSymbol or ids past
  /// the tables); an unseen word is uniform at 1/beta.
  double meaning_prob(SymbolId word, SymbolId feature) const;
  double meaning_prob(std::string_view word, std::string_view feature) const;

  /// Normalizer of p(.|w): row total + beta * lambda.
  double normalizer(SymbolId word) const noexcept;

  /// Sum of squared smoothed scores (assoc + lambda)^2 over a feature
  /// universe of `universe_size` features that contains every feature in the
  /// word's row. Divide by normalizer()^2 for the squared norm of p(.|w).
  double smoothed_sq_sum(SymbolId word, std::size_t universe_size) const noexcept;

  /// Throws ConfigError when |M| exceeds beta.
  void check_capacity() const;

  /// Restores a snapshot; rows are replayed in their stored order.
  void restore(std::uint64_t t, SymbolTable features, SymbolTable words,
               std::vector<AssocRow> rows);
  const std::vector<AssocRow>& rows() const noexcept { return rows_; }

private:
  Smoothing smoothing_;
  SymbolTable words_;
  SymbolTable features_;
  std::vector<AssocRow> rows_;
  std::uint64_t t_ = 0;
};

/// An input pair translated to state symbol ids. Symbols the state has not
/// seen get provisional ids past the end of the tables, and the feature
/// universe used for similarities is M plus those new features.
struct EncodedPair {
  std::vector<SymbolId> words;
  std::vector<std::vector<SymbolId>> referents;
  /// Distinct scene features in first-occurrence order.
  std::vector<SymbolId> features;
  std::size_t universe_size = 0;
};

EncodedPair encode(const MeaningState& state, const InputPair& pair);

} // namespace xsl
