#include "xsl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "xsl/error.hpp"

namespace xsl {

namespace {

constexpr std::string_view kSnapshotMagic = "xsl-learner-snapshot";
constexpr int kSnapshotVersion = 1;

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& token, std::size_t line) {
  char* end = nullptr;
  double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size())
    throw ParseError(line, "bad number '" + token + "'");
  return v;
}

std::uint64_t parse_count(const std::string& token, std::size_t line) {
  char* end = nullptr;
  auto v = std::strtoull(token.c_str(), &end, 10);
  if (token.empty() || end != token.c_str() + token.size())
    throw ParseError(line, "bad count '" + token + "'");
  return v;
}

class SnapshotReader {
public:
  explicit SnapshotReader(std::istream& in) : in_(in) {}

  std::istringstream next_line() {
    std::string line;
    if (!std::getline(in_, line))
      throw ParseError(line_ + 1, "unexpected end of snapshot");
    ++line_;
    return std::istringstream(line);
  }

  std::string expect(std::string_view key) {
    auto ls = next_line();
    std::string k, v;
    ls >> k >> v;
    if (k != key || v.empty())
      throw ParseError(line_, "expected '" + std::string(key) + " <value>'");
    return v;
  }

  std::size_t line() const noexcept { return line_; }

private:
  std::istream& in_;
  std::size_t line_ = 0;
};

} // namespace

LearnerConfig LearnerConfig::for_lexicon(Mechanism mechanism, const Lexicon& lexicon) {
  LearnerConfig config;
  config.mechanism = mechanism;
  config.beta = kBetaPerGoldFeature * static_cast<double>(lexicon.feature_universe().size());
  return config;
}

void LearnerConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("lambda must be positive");
  if (!(beta >= 1.0) || !std::isfinite(beta))
    throw ConfigError("beta must be at least 1");
}

void update_assoc(MeaningState& state, Mechanism mechanism, const AlignmentTable& table,
                  const EncodedPair& pair) {
  if (table.mechanism != mechanism)
    throw std::invalid_argument("alignment table was built by " +
                                std::string(to_string(table.mechanism)) + ", learner uses " +
                                std::string(to_string(mechanism)));
  const bool fas = mechanism == Mechanism::Fas;
  const auto expected_targets = fas ? pair.features.size() : pair.referents.size();
  if (table.n_words != pair.words.size() || table.n_targets != expected_targets ||
      table.strengths.size() != table.n_words * table.n_targets)
    throw std::invalid_argument("alignment table does not match the input pair");

  if (fas) {
    for (std::size_t i = 0; i < table.n_words; ++i)
      for (std::size_t j = 0; j < table.n_targets; ++j)
        state.add_assoc(pair.words[i], pair.features[j], table(i, j));
    return;
  }

  // Position of each referent feature within pair.features.
  std::vector<std::vector<std::size_t>> slots(pair.referents.size());
  for (std::size_t r = 0; r < pair.referents.size(); ++r)
    for (SymbolId f : pair.referents[r])
      slots[r].push_back(static_cast<std::size_t>(
          std::find(pair.features.begin(), pair.features.end(), f) - pair.features.begin()));

  std::vector<double> best(pair.features.size());
  for (std::size_t i = 0; i < table.n_words; ++i) {
    std::fill(best.begin(), best.end(), 0.0);
    for (std::size_t r = 0; r < pair.referents.size(); ++r)
      for (auto slot : slots[r])
        best[slot] = std::max(best[slot], table(i, r));
    for (std::size_t j = 0; j < pair.features.size(); ++j)
      state.add_assoc(pair.words[i], pair.features[j], best[j]);
  }
}

Learner::Learner(LearnerConfig config)
    : config_(config), state_(Smoothing{config.lambda, config.beta}) {
  config_.validate();
}

void Learner::process(const InputPair& pair) {
  if (pair.utterance.empty() || pair.scene.empty())
    throw std::invalid_argument("input pair needs a non-empty utterance and scene");
  auto probe = encode(state_, pair);
  if (static_cast<double>(probe.universe_size) > config_.beta)
    throw ConfigError("beta (" + std::to_string(config_.beta) +
                      ") is smaller than the number of observed features (" +
                      std::to_string(probe.universe_size) + ")");
  for (const auto& w : pair.utterance)
    state_.observe_word(w);
  for (const auto& r : pair.scene)
    for (const auto& f : r.features)
      state_.observe_feature(f);

  auto encoded = encode(state_, pair);
  auto table = xsl::align(config_.mechanism, state_, encoded, config_.similarity);
  update_assoc(state_, config_.mechanism, table, encoded);
  state_.advance();
}

AlignmentTable Learner::align(const InputPair& pair) const {
  return xsl::align(config_.mechanism, state_, encode(state_, pair), config_.similarity);
}

double Learner::meaning_prob(std::string_view word, std::string_view feature) const {
  return state_.meaning_prob(word, feature);
}

WordRep Learner::word_rep(std::string_view word) const {
  return word_rep(word, {});
}

WordRep Learner::word_rep(std::string_view word, std::span<const Feature> extra) const {
  state_.check_capacity();
  WordRep rep;
  const auto w = state_.words().find(word);
  const auto& observed = state_.features().names();
  rep.features = observed;
  for (const auto& f : extra)
    if (state_.features().find(f) == kNoSymbol &&
        std::find(rep.features.begin() + static_cast<std::ptrdiff_t>(observed.size()),
                  rep.features.end(), f) == rep.features.end())
      rep.features.push_back(f);
  rep.probs.reserve(rep.features.size());
  for (std::size_t i = 0; i < rep.features.size(); ++i) {
    const auto f = i < observed.size() ? static_cast<SymbolId>(i) : kNoSymbol;
    rep.probs.push_back(state_.meaning_prob(w, f));
  }
  return rep;
}

void Learner::save(std::ostream& out) const {
  out << kSnapshotMagic << ' ' << kSnapshotVersion << '\n';
  out << "mechanism " << to_string(config_.mechanism) << '\n';
  out << "similarity " << to_string(config_.similarity) << '\n';
  out << "lambda " << hex_double(config_.lambda) << '\n';
  out << "beta " << hex_double(config_.beta) << '\n';
  out << "t " << state_.time() << '\n';
  const auto& features = state_.features().names();
  out << "features " << features.size() << '\n';
  for (const auto& f : features)
    out << f << '\n';
  const auto& words = state_.words().names();
  const auto& rows = state_.rows();
  out << "words " << words.size() << '\n';
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto& row = rows[w];
    out << words[w] << ' ' << hex_double(row.total()) << ' ' << row.size();
    for (std::size_t j = 0; j < row.size(); ++j)
      out << ' ' << row.features()[j] << ':' << hex_double(row.values()[j]);
    out << '\n';
  }
  out << "end\n";
}

Learner Learner::load(std::istream& in) {
  SnapshotReader reader(in);
  {
    auto ls = reader.next_line();
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != kSnapshotMagic)
      throw ParseError(reader.line(), "not a learner snapshot");
    if (version != kSnapshotVersion)
      throw ParseError(reader.line(), "unsupported snapshot version " + std::to_string(version));
  }
  LearnerConfig config;
  config.mechanism = parse_mechanism(reader.expect("mechanism"));
  config.similarity = parse_similarity(reader.expect("similarity"));
  config.lambda = parse_double(reader.expect("lambda"), reader.line());
  config.beta = parse_double(reader.expect("beta"), reader.line());
  const auto t = parse_count(reader.expect("t"), reader.line());

  SymbolTable features;
  const auto n_features = parse_count(reader.expect("features"), reader.line());
  for (std::uint64_t i = 0; i < n_features; ++i) {
    auto ls = reader.next_line();
    std::string name;
    ls >> name;
    if (name.empty() || features.find(name) != kNoSymbol)
      throw ParseError(reader.line(), "bad or duplicate feature name");
    features.intern(name);
  }

  SymbolTable words;
  std::vector<AssocRow> rows;
  const auto n_words = parse_count(reader.expect("words"), reader.line());
  for (std::uint64_t w = 0; w < n_words; ++w) {
    auto ls = reader.next_line();
    std::string name, total_token, count_token;
    ls >> name >> total_token >> count_token;
    if (name.empty() || words.find(name) != kNoSymbol)
      throw ParseError(reader.line(), "bad or duplicate word name");
    words.intern(name);
    const auto total = parse_double(total_token, reader.line());
    const auto n_entries = parse_count(count_token, reader.line());
    std::vector<SymbolId> row_features;
    std::vector<double> row_values;
    for (std::uint64_t j = 0; j < n_entries; ++j) {
      std::string entry;
      if (!(ls >> entry))
        throw ParseError(reader.line(), "missing association entry");
      auto colon = entry.find(':');
      if (colon == std::string::npos)
        throw ParseError(reader.line(), "bad association entry '" + entry + "'");
      const auto f = parse_count(entry.substr(0, colon), reader.line());
      if (f >= features.size())
        throw ParseError(reader.line(), "association names an unknown feature");
      row_features.push_back(static_cast<SymbolId>(f));
      row_values.push_back(parse_double(entry.substr(colon + 1), reader.line()));
    }
    try {
      rows.emplace_back(std::move(row_features), std::move(row_values), total);
    } catch (const std::invalid_argument& e) {
      throw ParseError(reader.line(), e.what());
    }
  }
  {
    auto ls = reader.next_line();
    std::string tail;
    ls >> tail;
    if (tail != "end")
      throw ParseError(reader.line(), "expected 'end'");
  }

  Learner learner(config);
  learner.state_.restore(t, std::move(features), std::move(words), std::move(rows));
  learner.state_.check_capacity();
  return learner;
}

} // namespace xsl
