#include "xsl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xsl/error.hpp"

namespace xsl {

double acq_score(const WordRep& rep, const Referent& gold) {
  if (gold.features.empty())
    throw std::invalid_argument("acq_score: empty gold meaning");
  if (rep.features.size() != rep.probs.size())
    throw std::invalid_argument("acq_score: malformed meaning vector");
  std::vector<double> indicator(rep.features.size(), 0.0);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rep.features.size(); ++i)
    if (gold.contains(rep.features[i])) {
      indicator[i] = 1.0;
      ++hits;
    }
  if (hits != gold.size())
    throw std::invalid_argument("acq_score: gold features missing from the meaning vector");
  return similarity(rep.probs, indicator, Similarity::Cosine);
}

double acq_score(const MeaningState& state, std::string_view word, const Referent& gold) {
  if (gold.features.empty())
    throw std::invalid_argument("acq_score: empty gold meaning");
  const auto w = state.words().find(word);
  const auto* row = state.row(w);
  const double lambda = state.smoothing().lambda;
  std::size_t unobserved = 0;
  double mass = 0.0;
  for (const auto& f : gold.features) {
    const auto id = state.features().find(f);
    if (id == kNoSymbol)
      ++unobserved;
    mass += (row && id != kNoSymbol ? row->get(id) : 0.0) + lambda;
  }
  const auto universe = state.features().size() + unobserved;
  const double norm = std::sqrt(state.smoothed_sq_sum(w, universe));
  return std::min(1.0, mass / (norm * std::sqrt(static_cast<double>(gold.size()))));
}

void summarize(AcqReport& report, double theta) {
  report.empty = report.per_word.empty();
  if (report.empty) {
    report.mean_acq = 0.0;
    report.prop_learned = 0.0;
    return;
  }
  double sum = 0.0;
  std::size_t learned = 0;
  for (const auto& [_, score] : report.per_word) {
    sum += score;
    if (score > theta)
      ++learned;
  }
  const auto n = static_cast<double>(report.per_word.size());
  report.mean_acq = sum / n;
  report.prop_learned = static_cast<double>(learned) / n;
}

AcqReport evaluate(const Learner& learner, const Lexicon& lexicon, double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw ConfigError("theta must lie strictly between 0 and 1");
  const auto& state = learner.state();
  AcqReport report;
  report.checkpoint_t = state.time();
  for (const auto& word : state.words().names()) {
    if (const auto* gold = lexicon.find(word))
      report.per_word.emplace(word, acq_score(state, word, *gold));
    else
      report.not_in_lexicon.push_back(word);
  }
  std::sort(report.not_in_lexicon.begin(), report.not_in_lexicon.end());
  summarize(report, theta);
  return report;
}

std::optional<std::string> frequency_band(const SplitSpec& split, std::size_t count) {
  if (count < split.low_below)
    return "low";
  if (count > split.high_above)
    return "high";
  return std::nullopt;
}

std::map<std::string, AcqReport> split_report(const AcqReport& report, double theta,
                                              const SplitSpec& split,
                                              const std::map<Word, std::size_t>& freqs) {
  std::map<std::string, AcqReport> bands;
  auto band = [&](const std::string& name) -> AcqReport& {
    auto& b = bands[name];
    b.checkpoint_t = report.checkpoint_t;
    return b;
  };
  if (split.kind == SplitSpec::Kind::CorpusCondition) {
    auto& b = band(split.condition.empty() ? "all" : split.condition);
    b.per_word = report.per_word;
    b.not_in_lexicon = report.not_in_lexicon;
  } else {
    if (split.low_below > split.high_above + 1)
      throw ConfigError("frequency bands overlap");
    band("low");
    band("high");
    for (const auto& [word, score] : report.per_word) {
      auto it = freqs.find(word);
      if (auto name = frequency_band(split, it == freqs.end() ? 0 : it->second))
        bands[*name].per_word.emplace(word, score);
    }
  }
  for (auto& [_, b] : bands)
    summarize(b, theta);
  return bands;
}

std::map<std::string, AcqReport> evaluate_by_split(const Learner& learner, const Lexicon& lexicon,
                                                   double theta, const SplitSpec& split,
                                                   const std::map<Word, std::size_t>& freqs) {
  return split_report(evaluate(learner, lexicon, theta), theta, split, freqs);
}

std::vector<TrajectoryPoint> trajectory(Learner& learner, const std::vector<InputPair>& pairs,
                                        const std::vector<std::uint64_t>& schedule,
                                        const Lexicon& lexicon, double theta) {
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1])
      throw ConfigError("checkpoint schedule must be strictly increasing");
  if (!schedule.empty() && schedule.back() > learner.time() + pairs.size())
    throw RuntimeError("checkpoint " + std::to_string(schedule.back()) + " is past the " +
                       std::to_string(pairs.size()) + " available pairs");
  std::vector<TrajectoryPoint> points;
  std::size_t next = 0;
  for (auto checkpoint : schedule) {
    while (learner.time() < checkpoint)
      learner.process(pairs[next++]);
    auto report = evaluate(learner, lexicon, theta);
    points.push_back({learner.time(), report.mean_acq, report.prop_learned, report.n_words(),
                      report.empty});
  }
  return points;
}

} // namespace xsl
