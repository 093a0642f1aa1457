#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xsl/alignment.hpp"
#include "xsl/corpus.hpp"
#include "xsl/state.hpp"

namespace xsl {

struct LearnerConfig {
  Mechanism mechanism = Mechanism::WordComp;
  double lambda = 1e-5;
  double beta = 0.0;
  Similarity similarity = Similarity::Cosine;

  /// beta defaults to this multiple of the gold feature universe.
  static constexpr double kBetaPerGoldFeature = 10.0;

  static LearnerConfig for_lexicon(Mechanism mechanism, const Lexicon& lexicon);

  /// Throws ConfigError unless lambda > 0 and beta >= 1.
  void validate() const;
};

/// p(.|w) materialized over an explicit feature list.
struct WordRep {
  std::vector<Feature> features;
  std::vector<double> probs;
};

/// Adds one alignment table into the association scores. Referent
/// mechanisms credit each scene feature with the best alignment among the
/// referents that contain it; FAS adds per-feature alignments directly.
/// Throws std::invalid_argument when the table does not belong to `pair` or
/// was built by another mechanism.
void update_assoc(MeaningState& state, Mechanism mechanism, const AlignmentTable& table,
                  const EncodedPair& pair);

/// Incremental cross-situational learner. Single writer: calls to
/// process() must be serialized; const queries may run concurrently
/// between updates.
class Learner {
public:
  explicit Learner(LearnerConfig config);

  const LearnerConfig& config() const noexcept { return config_; }
  const MeaningState& state() const noexcept { return state_; }
  std::uint64_t time() const noexcept { return state_.time(); }

  /// Align, then accumulate. Probabilities are derived on demand, so queries
  /// after return see the new associations.
  void process(const InputPair& pair);

  /// Alignment the learner would compute for `pair` right now; no state
  /// changes.
  AlignmentTable align(const InputPair& pair) const;

  double meaning_prob(std::string_view word, std::string_view feature) const;

  /// p(.|w) over the observed features M.
  WordRep word_rep(std::string_view word) const;
  /// p(.|w) over M plus `extra` features (unobserved ones get smoothing mass).
  WordRep word_rep(std::string_view word, std::span<const Feature> extra) const;

  /// Full-precision, self-describing text snapshot.
  void save(std::ostream& out) const;
  static Learner load(std::istream& in);

private:
  LearnerConfig config_;
  MeaningState state_;
};

} // namespace xsl
