#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xsl/corpus.hpp"
#include "xsl/evaluation.hpp"
#include "xsl/state.hpp"

namespace xsl {

enum class Condition { Full, Short, Long };

std::string_view to_string(Condition c) noexcept;
Condition parse_condition(std::string_view name);

/// Label used in reports, e.g. "long-u2".
std::string condition_label(Condition condition, int uncertainty);

/// Evaluation points: either every N inputs or an explicit list. The final
/// input count is always included.
struct CheckpointSchedule {
  std::uint64_t every = 500;
  std::vector<std::uint64_t> points;

  /// "every:N" or a comma-separated list of input counts.
  static CheckpointSchedule parse(std::string_view text);
  std::string to_string() const;
  std::vector<std::uint64_t> resolve(std::uint64_t n_pairs) const;
};

struct ExperimentConfig {
  /// Interchange-format corpus; empty means "use the generator".
  std::string corpus_path;
  /// Gold lexicon; required with corpus_path.
  std::string lexicon_path;
  CorpusSpec generator;
  std::vector<Mechanism> mechanisms{std::begin(kAllMechanisms), std::end(kAllMechanisms)};
  std::vector<Condition> conditions{Condition::Full};
  std::vector<int> uncertainty_levels{0};
  std::size_t n_pairs = 20000;
  CheckpointSchedule checkpoints;
  double theta = kDefaultTheta;
  double lambda = 1e-5;
  /// 0 selects 10x the gold feature universe.
  double beta = 0.0;
  Similarity similarity = Similarity::Cosine;
  bool save_states = false;
  /// Output directory; empty runs in memory only.
  std::string out_dir;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;

  std::uint64_t seed() const noexcept { return generator.seed; }

  /// Throws ConfigError.
  void validate() const;

  /// Applies one `key = value` setting. Throws ConfigError for unknown keys
  /// or bad values.
  void set(std::string_view key, std::string_view value);

  /// Sorted key=value lines of every field that affects results (the output
  /// directory and thread count are excluded).
  std::string canonical() const;
  std::uint64_t digest() const;
};

/// Flat `key = value` text; `#` starts a comment. Later lines override
/// earlier ones, which is how CLI flags override a config file.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});

struct BandSummary {
  std::string band;
  double mean_acq = 0.0;
  double prop_learned = 0.0;
  std::size_t n_words = 0;
  bool empty = true;
};

struct CheckpointResult {
  std::uint64_t t = 0;
  /// "all", then "low" and "high" frequency bands.
  std::vector<BandSummary> bands;

  const BandSummary& band(std::string_view name) const;
};

/// One trained learner: a mechanism on one transformed training stream.
struct ConditionRun {
  Mechanism mechanism = Mechanism::WordComp;
  Condition condition = Condition::Full;
  int uncertainty = 0;
  std::vector<CheckpointResult> checkpoints;
  /// Observed words without a gold entry, at the final checkpoint.
  std::vector<Word> not_in_lexicon;

  std::string label() const { return condition_label(condition, uncertainty); }
  const CheckpointResult& final_checkpoint() const { return checkpoints.back(); }
};

struct RunRecord {
  ExperimentConfig config;
  std::uint64_t digest = 0;
  /// Identifies the base corpus (generator settings or file contents).
  std::uint64_t corpus_digest = 0;
  std::vector<ConditionRun> runs;
  /// Not written to the result files, which must be reproducible.
  double wall_clock_seconds = 0.0;
  std::vector<std::string> files;
};

/// Pulls pairs from a corpus file or the generator on demand.
class PairSource {
public:
  explicit PairSource(std::vector<InputPair> pairs);
  PairSource(const Lexicon& lexicon, const CorpusSpec& spec);

  /// nullopt once a finite corpus is exhausted.
  std::optional<InputPair> next();

private:
  std::vector<InputPair> pairs_;
  std::size_t pos_ = 0;
  std::optional<CorpusGenerator> generator_;
};

/// Builds a training stream of exactly n_pairs inputs: base pairs filtered by
/// condition, then referential uncertainty injected. Throws RuntimeError
/// naming the available length when the source runs short.
std::vector<InputPair> training_stream(PairSource& source, Condition condition, int uncertainty,
                                       std::size_t n_pairs);

/// Trains a fresh learner per mechanism x condition x uncertainty level and
/// evaluates at every checkpoint. Writes report.csv, report.jsonl and
/// record.json (and learner snapshots when requested) to config.out_dir.
RunRecord run_experiment(const ExperimentConfig& config);

std::string record_to_json(const RunRecord& record);
RunRecord record_from_json(std::string_view json);
RunRecord read_record(const std::string& path);

/// One `t,mechanism,condition,band,mean_acq,prop_learned,n_words` row per
/// checkpoint x band.
std::string report_csv(const RunRecord& record);
std::string report_jsonl(const RunRecord& record);

struct ComparisonRow {
  std::string name;
  std::string condition;
  double mean_acq = 0.0;
  double prop_learned = 0.0;
  double low_mean_acq = 0.0;
  double high_mean_acq = 0.0;
  std::size_t n_words = 0;
};

struct Comparison {
  std::uint64_t corpus_digest = 0;
  /// Final-checkpoint scores, grouped by condition label.
  std::vector<ComparisonRow> rows;
  /// Pairwise differences (later row minus earlier row) within a condition.
  std::vector<ComparisonRow> deltas;
};

/// Throws RuntimeError when the records were trained on different corpora.
Comparison compare_mechanisms(const std::vector<RunRecord>& records);
std::string format_comparison(const Comparison& comparison);

/// Writes the figure-analogue CSVs (trajectory, frequency split, MLU split,
/// MLU x frequency, uncertainty levels) and returns their paths.
std::vector<std::string> emit_plot_data(const std::vector<RunRecord>& records,
                                        const std::string& out_dir);

/// 6 significant digits, as used in every CSV.
std::string format_number(double value);

} // namespace xsl
