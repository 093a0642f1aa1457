#include "xsl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "xsl/error.hpp"

namespace xsl {

namespace {

constexpr std::uint64_t kLexiconStream = 0x6c6578696b6f6eULL;
constexpr std::uint64_t kCorpusStream = 0x636f72707573ULL;

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n\v\f";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <class Fn>
void split(std::string_view s, char sep, Fn&& fn) {
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    fn(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
}

std::string padded(char prefix, std::size_t value, std::size_t width) {
  auto digits = std::to_string(value);
  return std::string(1, prefix) + std::string(width > digits.size() ? width - digits.size() : 0, '0') +
         digits;
}

// Saturating binomial coefficient; enough to compare against vocab sizes.
double choose(std::size_t n, std::size_t k) {
  if (k > n)
    return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

std::vector<double> cumulative_power_law(std::size_t n, double exponent) {
  std::vector<double> cumulative(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += std::pow(static_cast<double>(i + 1), -exponent);
    cumulative[i] = total;
  }
  return cumulative;
}

std::size_t sample_cumulative(const std::vector<double>& cumulative, Rng& rng) {
  const double u = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end())
    --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

Referent parse_referent(std::string_view text, std::size_t line) {
  if (auto colon = text.find(':'); colon != std::string_view::npos)
    text = text.substr(colon + 1);
  text = trim(text);
  if (text.empty())
    throw ParseError(line, "empty referent");
  std::vector<Feature> features;
  split(text, ',', [&](std::string_view f) {
    f = trim(f);
    if (f.empty())
      throw ParseError(line, "empty feature name in referent '" + std::string(text) + "'");
    features.emplace_back(f);
  });
  return Referent::of(std::move(features));
}

} // namespace

Referent Referent::of(std::vector<Feature> features) {
  if (features.empty())
    throw ConfigError("referent must have at least one feature");
  for (const auto& f : features)
    if (f.empty())
      throw ConfigError("feature names must be non-empty");
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  return Referent{std::move(features)};
}

bool Referent::contains(std::string_view feature) const {
  return std::binary_search(features.begin(), features.end(), feature);
}

void InputPair::add_word(Word word) {
  if (std::find(utterance.begin(), utterance.end(), word) == utterance.end())
    utterance.push_back(std::move(word));
}

void InputPair::add_referent(Referent referent) {
  if (std::find(scene.begin(), scene.end(), referent) == scene.end())
    scene.push_back(std::move(referent));
}

void Lexicon::add(Word word, Referent meaning) {
  if (word.empty())
    throw ConfigError("lexicon words must be non-empty");
  if (meaning.features.empty())
    throw ConfigError("lexicon entry for '" + word + "' has no features");
  if (index_.count(word))
    throw ConfigError("duplicate lexicon entry for '" + word + "'");
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  meanings_.push_back(std::move(meaning));
}

const Referent* Lexicon::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? nullptr : &meanings_[it->second];
}

const Referent& Lexicon::gold(std::string_view word) const {
  if (const auto* r = find(word))
    return *r;
  throw RuntimeError("word '" + std::string(word) + "' has no lexicon entry");
}

std::vector<Feature> Lexicon::feature_universe() const {
  std::set<Feature> all;
  for (const auto& m : meanings_)
    all.insert(m.features.begin(), m.features.end());
  return {all.begin(), all.end()};
}

void CorpusSpec::validate() const {
  if (vocab_size == 0)
    throw ConfigError("vocab_size must be at least 1");
  if (features_per_referent.min == 0 || features_per_referent.min > features_per_referent.max)
    throw ConfigError("features_per_referent must be a non-empty range of positive counts");
  if (utterance_length.min == 0 || utterance_length.min > utterance_length.max)
    throw ConfigError("utterance_length must be a non-empty range of positive counts");
  if (!(zipf_exponent > 0.0) || !std::isfinite(zipf_exponent))
    throw ConfigError("zipf_exponent must be positive");
  if (!(feature_skew >= 0.0) || !std::isfinite(feature_skew))
    throw ConfigError("feature_skew must be non-negative");
  if (n_pairs == 0)
    throw ConfigError("n_pairs must be at least 1");
}

Lexicon generate_lexicon(const CorpusSpec& spec) {
  spec.validate();
  const std::size_t pool = spec.effective_feature_pool();
  const auto [kmin, kmax] = spec.features_per_referent;
  if (kmax > pool)
    throw ConfigError("feature pool of " + std::to_string(pool) +
                      " is smaller than the largest referent (" + std::to_string(kmax) +
                      "); use a larger feature universe");
  double distinct = 0.0;
  for (std::size_t k = kmin; k <= kmax; ++k)
    distinct += choose(pool, k);
  // Leave headroom so rejection of duplicates stays cheap.
  if (distinct < 2.0 * static_cast<double>(spec.vocab_size))
    throw ConfigError("feature pool of " + std::to_string(pool) + " cannot give " +
                      std::to_string(spec.vocab_size) +
                      " words distinct meanings; use a larger feature universe");

  const auto feature_width = std::to_string(pool).size();
  const auto word_width = std::to_string(spec.vocab_size).size();
  std::vector<Feature> names(pool);
  for (std::size_t i = 0; i < pool; ++i)
    names[i] = padded('F', i + 1, feature_width);
  const auto popularity = cumulative_power_law(pool, spec.feature_skew);

  Rng rng(mix_seed(spec.seed ^ kLexiconStream));
  Lexicon lexicon;
  std::set<std::vector<std::size_t>> used;
  std::vector<std::size_t> chosen;
  for (std::size_t w = 0; w < spec.vocab_size; ++w) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const auto k = static_cast<std::size_t>(rng.between(kmin, kmax));
      chosen.clear();
      while (chosen.size() < k) {
        auto f = sample_cumulative(popularity, rng);
        if (std::find(chosen.begin(), chosen.end(), f) == chosen.end())
          chosen.push_back(f);
      }
      std::sort(chosen.begin(), chosen.end());
      placed = used.insert(chosen).second;
    }
    if (!placed)
      throw ConfigError("could not find a distinct meaning for word " + std::to_string(w + 1) +
                        "; use a larger feature universe or less skew");
    std::vector<Feature> features;
    for (auto f : chosen)
      features.push_back(names[f]);
    lexicon.add(padded('w', w + 1, word_width), Referent::of(std::move(features)));
  }
  return lexicon;
}

CorpusGenerator::CorpusGenerator(const Lexicon& lexicon, const CorpusSpec& spec)
    : lexicon_(&lexicon), length_(spec.utterance_length),
      cumulative_(cumulative_power_law(lexicon.size(), spec.zipf_exponent)),
      rng_(mix_seed(spec.seed ^ kCorpusStream)) {
  spec.validate();
  if (lexicon.empty())
    throw ConfigError("cannot generate a corpus from an empty lexicon");
  if (length_.max > lexicon.size())
    throw ConfigError("maximum utterance length " + std::to_string(length_.max) +
                      " exceeds the vocabulary size " + std::to_string(lexicon.size()));
}

double CorpusGenerator::rank_probability(std::size_t rank) const {
  const double prev = rank == 0 ? 0.0 : cumulative_[rank - 1];
  return (cumulative_[rank] - prev) / cumulative_.back();
}

InputPair CorpusGenerator::next() {
  const auto length = static_cast<std::size_t>(rng_.between(length_.min, length_.max));
  scratch_.clear();
  while (scratch_.size() < length) {
    auto w = sample_cumulative(cumulative_, rng_);
    if (std::find(scratch_.begin(), scratch_.end(), w) == scratch_.end())
      scratch_.push_back(w);
  }
  InputPair pair;
  pair.index = ++produced_;
  pair.utterance.reserve(length);
  pair.scene.reserve(length);
  for (auto w : scratch_) {
    pair.utterance.push_back(lexicon_->words()[w]);
    pair.scene.push_back(lexicon_->meaning(w));
  }
  return pair;
}

std::vector<InputPair> generate_corpus(const Lexicon& lexicon, const CorpusSpec& spec) {
  CorpusGenerator gen(lexicon, spec);
  std::vector<InputPair> pairs;
  pairs.reserve(spec.n_pairs);
  for (std::size_t i = 0; i < spec.n_pairs; ++i)
    pairs.push_back(gen.next());
  return pairs;
}

std::vector<InputPair> parse_corpus(std::istream& in) {
  std::vector<InputPair> pairs;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    auto content = trim(line);
    if (content.empty() || content.front() == '#')
      continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError(line_no, "missing tab between utterance and scene");

    InputPair pair;
    std::istringstream words{std::string(line.substr(0, tab))};
    for (std::string w; words >> w;)
      pair.add_word(std::move(w));
    if (pair.utterance.empty())
      throw ParseError(line_no, "empty utterance");

    auto scene = trim(line.substr(tab + 1));
    if (scene.empty())
      throw ParseError(line_no, "empty scene");
    split(scene, ';', [&](std::string_view r) { pair.add_referent(parse_referent(r, line_no)); });

    pair.index = pairs.size() + 1;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<InputPair> parse_corpus(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const std::vector<InputPair>& pairs, const Lexicon* labels) {
  std::map<Referent, const Word*> label_of;
  if (labels)
    for (std::size_t i = 0; i < labels->size(); ++i)
      label_of.emplace(labels->meaning(i), &labels->words()[i]);
  for (const auto& pair : pairs) {
    for (std::size_t i = 0; i < pair.utterance.size(); ++i)
      out << (i ? " " : "") << pair.utterance[i];
    out << '\t';
    for (std::size_t r = 0; r < pair.scene.size(); ++r) {
      if (r)
        out << ';';
      const auto& ref = pair.scene[r];
      if (auto it = label_of.find(ref); it != label_of.end())
        out << *it->second << ':';
      for (std::size_t f = 0; f < ref.features.size(); ++f)
        out << (f ? "," : "") << ref.features[f];
    }
    out << '\n';
  }
}

std::string serialize_corpus(const std::vector<InputPair>& pairs, const Lexicon* labels) {
  std::ostringstream out;
  write_corpus(out, pairs, labels);
  return out.str();
}

Lexicon parse_lexicon(std::istream& in) {
  Lexicon lexicon;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#')
      continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError(line_no, "missing tab between word and features");
    auto word = trim(line.substr(0, tab));
    if (word.empty() || word.find_first_of(" \t") != std::string_view::npos)
      throw ParseError(line_no, "lexicon word must be a single non-empty token");
    auto referent = parse_referent(line.substr(tab + 1), line_no);
    if (lexicon.find(word))
      throw ParseError(line_no, "duplicate lexicon entry for '" + std::string(word) + "'");
    lexicon.add(std::string(word), std::move(referent));
  }
  return lexicon;
}

Lexicon parse_lexicon(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_lexicon(in);
}

void write_lexicon(std::ostream& out, const Lexicon& lexicon) {
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    out << lexicon.words()[i] << '\t';
    const auto& fs = lexicon.meaning(i).features;
    for (std::size_t f = 0; f < fs.size(); ++f)
      out << (f ? "," : "") << fs[f];
    out << '\n';
  }
}

bool satisfies(LengthCondition condition, std::size_t utterance_length) noexcept {
  return condition == LengthCondition::Short ? utterance_length <= kShortMaxLength
                                             : utterance_length >= kLongMinLength;
}

std::vector<InputPair> filter_by_length(const std::vector<InputPair>& pairs,
                                        LengthCondition condition) {
  std::vector<InputPair> kept;
  for (const auto& p : pairs) {
    if (!satisfies(condition, p.utterance.size()))
      continue;
    kept.push_back(p);
    kept.back().index = kept.size();
  }
  return kept;
}

std::vector<InputPair> inject_referential_uncertainty(const std::vector<InputPair>& pairs,
                                                      int level) {
  if (level < 0 || level > 2)
    throw ConfigError("referential uncertainty level must be 0, 1, or 2");
  const auto stride = static_cast<std::size_t>(level) + 1;
  const auto n_out = pairs.size() / stride;
  std::vector<InputPair> out;
  out.reserve(n_out);
  for (std::size_t k = 0; k < n_out; ++k) {
    InputPair merged = pairs[k * stride];
    for (std::size_t j = 1; j < stride; ++j)
      for (const auto& r : pairs[k * stride + j].scene)
        merged.add_referent(r);
    merged.index = k + 1;
    out.push_back(std::move(merged));
  }
  return out;
}

std::map<Word, std::size_t> word_frequencies(const std::vector<InputPair>& pairs) {
  std::map<Word, std::size_t> counts;
  for (const auto& p : pairs)
    for (const auto& w : p.utterance)
      ++counts[w];
  return counts;
}

} // namespace xsl
