#include "xsl/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "xsl/error.hpp"

namespace xsl {

std::string_view to_string(Mechanism m) noexcept {
  switch (m) {
  case Mechanism::Fas:
    return "fas";
  case Mechanism::NoComp:
    return "no-comp";
  case Mechanism::RefComp:
    return "ref-comp";
  case Mechanism::WordComp:
    return "word-comp";
  }
  return "?";
}

Mechanism parse_mechanism(std::string_view name) {
  for (auto m : kAllMechanisms)
    if (to_string(m) == name)
      return m;
  throw ConfigError("unknown mechanism '" + std::string(name) +
                    "' (expected fas, no-comp, ref-comp, or word-comp)");
}

std::string_view to_string(Similarity s) noexcept {
  return s == Similarity::Cosine ? "cosine" : "dot";
}

Similarity parse_similarity(std::string_view name) {
  if (name == "cosine")
    return Similarity::Cosine;
  if (name == "dot")
    return Similarity::Dot;
  throw ConfigError("unknown similarity '" + std::string(name) + "' (expected cosine or dot)");
}

AssocRow::AssocRow(std::vector<SymbolId> features, std::vector<double> values, double total)
    : features_(std::move(features)), values_(std::move(values)), total_(total) {
  if (features_.size() != values_.size())
    throw std::invalid_argument("association row: feature and value counts differ");
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!(values_[i] >= 0.0))
      throw std::invalid_argument("association row: negative score");
    if (!slot_.emplace(features_[i], static_cast<std::uint32_t>(i)).second)
      throw std::invalid_argument("association row: duplicate feature");
  }
}

double AssocRow::get(SymbolId feature) const {
  auto it = slot_.find(feature);
  return it == slot_.end() ? 0.0 : values_[it->second];
}

void AssocRow::add(SymbolId feature, double delta) {
  if (!(delta >= 0.0))
    throw std::invalid_argument("association increments must be non-negative");
  auto [it, inserted] = slot_.try_emplace(feature, static_cast<std::uint32_t>(features_.size()));
  if (inserted) {
    features_.push_back(feature);
    values_.push_back(delta);
  } else {
    values_[it->second] += delta;
  }
  total_ += delta;
}

MeaningState::MeaningState(Smoothing smoothing) : smoothing_(smoothing) {}

SymbolId MeaningState::observe_word(std::string_view word) {
  auto id = words_.intern(word);
  if (rows_.size() < words_.size())
    rows_.resize(words_.size());
  return id;
}

SymbolId MeaningState::observe_feature(std::string_view feature) {
  return features_.intern(feature);
}

const AssocRow* MeaningState::row(SymbolId word) const noexcept {
  return word < rows_.size() ? &rows_[word] : nullptr;
}

double MeaningState::assoc(SymbolId word, SymbolId feature) const noexcept {
  const auto* r = row(word);
  return r ? r->get(feature) : 0.0;
}

double MeaningState::row_total(SymbolId word) const noexcept {
  const auto* r = row(word);
  return r ? r->total() : 0.0;
}

void MeaningState::add_assoc(SymbolId word, SymbolId feature, double delta) {
  if (word >= rows_.size() || feature >= features_.size())
    throw std::invalid_argument("association update for an unobserved word or feature");
  rows_[word].add(feature, delta);
}

double MeaningState::normalizer(SymbolId word) const noexcept {
  return row_total(word) + smoothing_.beta * smoothing_.lambda;
}

double MeaningState::meaning_prob(SymbolId word, SymbolId feature) const {
  return (assoc(word, feature) + smoothing_.lambda) / normalizer(word);
}

double MeaningState::meaning_prob(std::string_view word, std::string_view feature) const {
  check_capacity();
  return meaning_prob(words_.find(word), features_.find(feature));
}

double MeaningState::smoothed_sq_sum(SymbolId word, std::size_t universe_size) const noexcept {
  const double lambda = smoothing_.lambda;
  const auto* r = row(word);
  double sum = 0.0;
  std::size_t listed = 0;
  if (r) {
    for (double v : r->values())
      sum += (v + lambda) * (v + lambda);
    listed = r->size();
  }
  return sum + static_cast<double>(universe_size - listed) * lambda * lambda;
}

void MeaningState::check_capacity() const {
  if (static_cast<double>(features_.size()) > smoothing_.beta)
    throw ConfigError("beta (" + std::to_string(smoothing_.beta) +
                      ") is smaller than the number of observed features (" +
                      std::to_string(features_.size()) + ")");
}

void MeaningState::restore(std::uint64_t t, SymbolTable features, SymbolTable words,
                           std::vector<AssocRow> rows) {
  t_ = t;
  features_ = std::move(features);
  words_ = std::move(words);
  rows_ = std::move(rows);
  rows_.resize(words_.size());
}

EncodedPair encode(const MeaningState& state, const InputPair& pair) {
  EncodedPair enc;
  std::unordered_map<std::string_view, SymbolId> provisional_words, provisional_features;
  auto word_id = [&](std::string_view w) {
    if (auto id = state.words().find(w); id != kNoSymbol)
      return id;
    auto [it, _] = provisional_words.try_emplace(
        w, static_cast<SymbolId>(state.words().size() + provisional_words.size()));
    return it->second;
  };
  auto feature_id = [&](std::string_view f) {
    if (auto id = state.features().find(f); id != kNoSymbol)
      return id;
    auto [it, _] = provisional_features.try_emplace(
        f, static_cast<SymbolId>(state.features().size() + provisional_features.size()));
    return it->second;
  };

  for (const auto& w : pair.utterance) {
    auto id = word_id(w);
    if (std::find(enc.words.begin(), enc.words.end(), id) == enc.words.end())
      enc.words.push_back(id);
  }
  enc.referents.reserve(pair.scene.size());
  for (const auto& r : pair.scene) {
    auto& ids = enc.referents.emplace_back();
    ids.reserve(r.features.size());
    for (const auto& f : r.features) {
      auto id = feature_id(f);
      ids.push_back(id);
      if (std::find(enc.features.begin(), enc.features.end(), id) == enc.features.end())
        enc.features.push_back(id);
    }
  }
  enc.universe_size = state.features().size() + provisional_features.size();
  return enc;
}

} // namespace xsl
