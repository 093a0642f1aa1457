#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xsl/rng.hpp"

namespace xsl {

using Word = std::string;
using Feature = std::string;

/// A bundle of semantic features that one word can refer to. Features are
/// kept sorted and unique so that equality is set equality.
struct Referent {
  std::vector<Feature> features;

  /// Normalizes (sort, dedup) and validates a feature list.
  static Referent of(std::vector<Feature> features);

  std::size_t size() const noexcept { return features.size(); }
  bool contains(std::string_view feature) const;

  friend bool operator==(const Referent&, const Referent&) = default;
  friend auto operator<=>(const Referent&, const Referent&) = default;
};

/// One utterance-scene observation.
///
/// The utterance is a set of words kept in first-occurrence order; the scene
/// is a set of referents kept in insertion order. Neither order carries
/// meaning, but both are preserved so every run is reproducible.
struct InputPair {
  std::vector<Word> utterance;
  std::vector<Referent> scene;
  std::size_t index = 0;

  /// Adds a word unless already present.
  void add_word(Word word);
  /// Adds a referent unless an identical one is already present.
  void add_referent(Referent referent);
};

/// Gold-standard word meanings. Used to build scenes and to score the
/// learner; never shown to the learner.
class Lexicon {
public:
  /// Throws ConfigError when `word` already has an entry.
  void add(Word word, Referent meaning);

  const Referent* find(std::string_view word) const;
  const Referent& gold(std::string_view word) const;

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  const std::vector<Word>& words() const noexcept { return words_; }
  const std::vector<Referent>& meanings() const noexcept { return meanings_; }
  const Referent& meaning(std::size_t i) const { return meanings_[i]; }

  /// Every feature used by any entry, sorted.
  std::vector<Feature> feature_universe() const;

  friend bool operator==(const Lexicon& a, const Lexicon& b) {
    return a.words_ == b.words_ && a.meanings_ == b.meanings_;
  }

private:
  std::vector<Word> words_;
  std::vector<Referent> meanings_;
  std::unordered_map<Word, std::size_t> index_;
};

struct CountRange {
  std::size_t min = 1;
  std::size_t max = 1;

  friend bool operator==(const CountRange&, const CountRange&) = default;
};

/// Parameters of the synthetic lexicon and corpus generators.
struct CorpusSpec {
  std::size_t vocab_size = 1000;
  CountRange features_per_referent{3, 8};
  /// Number of distinct features available to the lexicon generator;
  /// 0 selects max(30% of the vocabulary, 4 x the largest referent).
  std::size_t feature_pool = 0;
  /// Popularity skew over the feature pool: feature j is drawn with weight
  /// (j+1)^-skew. 0 is uniform; larger values make a few features shared by
  /// many words, like category features in a real lexicon.
  double feature_skew = 1.0;
  double zipf_exponent = 1.0;
  CountRange utterance_length{1, 8};
  std::size_t n_pairs = 20000;
  std::uint64_t seed = 1;

  std::size_t effective_feature_pool() const noexcept {
    if (feature_pool)
      return feature_pool;
    return std::max((3 * vocab_size + 9) / 10, 4 * features_per_referent.max);
  }

  /// Throws ConfigError on empty ranges, zero counts, or a non-positive
  /// exponent.
  void validate() const;

  friend bool operator==(const CorpusSpec&, const CorpusSpec&) = default;
};

Lexicon generate_lexicon(const CorpusSpec& spec);

/// Endless Zipfian utterance-scene stream over a lexicon. The first n pairs
/// of the stream are exactly generate_corpus() with n_pairs = n.
class CorpusGenerator {
public:
  CorpusGenerator(const Lexicon& lexicon, const CorpusSpec& spec);

  InputPair next();

  /// Analytic Zipf probability of drawing the word at 0-based `rank`.
  double rank_probability(std::size_t rank) const;

private:
  const Lexicon* lexicon_;
  CountRange length_;
  std::vector<double> cumulative_;
  Rng rng_;
  std::size_t produced_ = 0;
  std::vector<std::size_t> scratch_;
};

std::vector<InputPair> generate_corpus(const Lexicon& lexicon, const CorpusSpec& spec);

// Interchange format: one pair per line,
//   word word ... <TAB> [label:]F,F,...;[label:]F,F,...
// Blank lines and lines starting with '#' are skipped.
std::vector<InputPair> parse_corpus(std::istream& in);
std::vector<InputPair> parse_corpus(std::string_view text);

/// Writes the interchange format. When `labels` is given, each referent that
/// is some word's gold meaning is prefixed with that word.
void write_corpus(std::ostream& out, const std::vector<InputPair>& pairs,
                  const Lexicon* labels = nullptr);
std::string serialize_corpus(const std::vector<InputPair>& pairs,
                             const Lexicon* labels = nullptr);

// Lexicon format: one entry per line, `word <TAB> F,F,...`.
Lexicon parse_lexicon(std::istream& in);
Lexicon parse_lexicon(std::string_view text);
void write_lexicon(std::ostream& out, const Lexicon& lexicon);

enum class LengthCondition { Short, Long };

inline constexpr std::size_t kShortMaxLength = 3;
inline constexpr std::size_t kLongMinLength = 5;

bool satisfies(LengthCondition condition, std::size_t utterance_length) noexcept;

/// Keeps the pairs whose utterance length meets `condition`, re-indexed from 1.
std::vector<InputPair> filter_by_length(const std::vector<InputPair>& pairs,
                                        LengthCondition condition);

/// Takes every (level+1)-th pair and merges into its scene the referents of
/// the `level` pairs that follow it. A trailing partial window is dropped.
std::vector<InputPair> inject_referential_uncertainty(const std::vector<InputPair>& pairs,
                                                      int level);

/// Number of pairs whose utterance contains each word.
std::map<Word, std::size_t> word_frequencies(const std::vector<InputPair>& pairs);

} // namespace xsl
