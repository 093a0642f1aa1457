#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xsl/corpus.hpp"
#include "xsl/learner.hpp"

namespace xsl {

/// A word counts as learned when its acquisition score is strictly above this.
inline constexpr double kDefaultTheta = 0.7;

/// Cosine between a meaning vector and the gold indicator vector over the
/// rep's feature list. Every gold feature must be listed in `rep`.
double acq_score(const WordRep& rep, const Referent& gold);

/// Same score computed from the sparse association row, over M plus the
/// gold features.
double acq_score(const MeaningState& state, std::string_view word, const Referent& gold);

struct AcqReport {
  std::uint64_t checkpoint_t = 0;
  std::map<Word, double> per_word;
  double mean_acq = 0.0;
  double prop_learned = 0.0;
  /// No word was scored; mean_acq and prop_learned are reported as 0.
  bool empty = true;
  /// Observed words with no lexicon entry (excluded from the averages).
  std::vector<Word> not_in_lexicon;

  std::size_t n_words() const noexcept { return per_word.size(); }
};

/// Fills the aggregate fields from per_word.
void summarize(AcqReport& report, double theta);

/// Scores every observed word that has a lexicon entry. Read-only.
AcqReport evaluate(const Learner& learner, const Lexicon& lexicon, double theta = kDefaultTheta);

struct SplitSpec {
  enum class Kind { FrequencyBands, CorpusCondition };
  Kind kind = Kind::FrequencyBands;
  /// Low band: count < low_below. High band: count > high_above. Words in
  /// between are in neither band.
  std::size_t low_below = 5;
  std::size_t high_above = 10;
  /// Band name for CorpusCondition splits (one band holding every word).
  std::string condition;
};

/// "low", "high", or nothing for mid-band counts.
std::optional<std::string> frequency_band(const SplitSpec& split, std::size_t count);

/// Partitions an existing report. Words missing from `freqs` count as 0.
std::map<std::string, AcqReport> split_report(const AcqReport& report, double theta,
                                              const SplitSpec& split,
                                              const std::map<Word, std::size_t>& freqs);

std::map<std::string, AcqReport> evaluate_by_split(const Learner& learner, const Lexicon& lexicon,
                                                   double theta, const SplitSpec& split,
                                                   const std::map<Word, std::size_t>& freqs);

struct TrajectoryPoint {
  std::uint64_t t = 0;
  double mean_acq = 0.0;
  double prop_learned = 0.0;
  std::size_t n_words = 0;
  bool empty = true;
};

/// Trains `learner` on `pairs` in order, evaluating whenever the input count
/// reaches a checkpoint. The schedule must be strictly increasing and may not
/// exceed the number of available pairs.
std::vector<TrajectoryPoint> trajectory(Learner& learner, const std::vector<InputPair>& pairs,
                                        const std::vector<std::uint64_t>& schedule,
                                        const Lexicon& lexicon, double theta = kDefaultTheta);

} // namespace xsl
