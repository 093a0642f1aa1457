#include "xsl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "xsl/error.hpp"
#include "xsl/learner.hpp"

namespace xsl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kRecordFormat = "xsl-run-record";
constexpr int kRecordVersion = 1;

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> items;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(',', start);
    auto item = trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (!item.empty())
      items.push_back(item);
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return items;
}

template <class T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + std::string(value) +
                      "'");
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  std::string s(value);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + s + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes")
    return true;
  if (value == "false" || value == "0" || value == "no")
    return false;
  throw ConfigError("'" + std::string(key) + "' expects true or false");
}

std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class Fn>
std::string join(const std::vector<T>& items, Fn&& fn) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i)
      out += ',';
    out += fn(items[i]);
  }
  return out;
}

template <class T>
void require_unique(const std::vector<T>& items, std::string_view what) {
  std::set<T> seen(items.begin(), items.end());
  if (seen.size() != items.size())
    throw ConfigError("duplicate entries in " + std::string(what));
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  return std::stoull(s, nullptr, 16);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot write '" + path.string() + "'");
  out << contents;
  if (!out)
    throw IoError("failed writing '" + path.string() + "'");
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

BandSummary summary_of(const std::string& name, const AcqReport& report) {
  return {name, report.mean_acq, report.prop_learned, report.n_words(), report.empty};
}

} // namespace

std::string_view to_string(Condition c) noexcept {
  switch (c) {
  case Condition::Full:
    return "full";
  case Condition::Short:
    return "short";
  case Condition::Long:
    return "long";
  }
  return "?";
}

Condition parse_condition(std::string_view name) {
  for (auto c : {Condition::Full, Condition::Short, Condition::Long})
    if (to_string(c) == name)
      return c;
  throw ConfigError("unknown condition '" + std::string(name) + "' (expected full, short, or long)");
}

std::string condition_label(Condition condition, int uncertainty) {
  return std::string(to_string(condition)) + "-u" + std::to_string(uncertainty);
}

CheckpointSchedule CheckpointSchedule::parse(std::string_view text) {
  text = trim(text);
  CheckpointSchedule schedule;
  if (text.starts_with("every:")) {
    schedule.every = parse_integer<std::uint64_t>("checkpoints", trim(text.substr(6)));
    if (schedule.every == 0)
      throw ConfigError("checkpoint interval must be positive");
    return schedule;
  }
  schedule.every = 0;
  for (auto item : split_list(text))
    schedule.points.push_back(parse_integer<std::uint64_t>("checkpoints", item));
  if (schedule.points.empty())
    throw ConfigError("checkpoints expects 'every:N' or a list of input counts");
  for (std::size_t i = 1; i < schedule.points.size(); ++i)
    if (schedule.points[i] <= schedule.points[i - 1])
      throw ConfigError("checkpoint list must be strictly increasing");
  return schedule;
}

std::string CheckpointSchedule::to_string() const {
  if (every)
    return "every:" + std::to_string(every);
  return join(points, [](auto p) { return std::to_string(p); });
}

std::vector<std::uint64_t> CheckpointSchedule::resolve(std::uint64_t n_pairs) const {
  std::vector<std::uint64_t> out;
  if (every) {
    for (std::uint64_t t = every; t <= n_pairs; t += every)
      out.push_back(t);
  } else {
    for (auto p : points) {
      if (p > n_pairs)
        throw ConfigError("checkpoint " + std::to_string(p) + " is past the " +
                          std::to_string(n_pairs) + " training pairs");
      out.push_back(p);
    }
  }
  if (out.empty() || out.back() != n_pairs)
    out.push_back(n_pairs);
  return out;
}

void ExperimentConfig::validate() const {
  if (corpus_path.empty())
    generator.validate();
  else if (lexicon_path.empty())
    throw ConfigError("a corpus file needs a gold lexicon file (lexicon = ...)");
  if (mechanisms.empty())
    throw ConfigError("at least one mechanism is required");
  if (conditions.empty())
    throw ConfigError("at least one condition is required");
  if (uncertainty_levels.empty())
    throw ConfigError("at least one uncertainty level is required");
  require_unique(mechanisms, "mechanism");
  require_unique(conditions, "condition");
  require_unique(uncertainty_levels, "uncertainty");
  for (int level : uncertainty_levels)
    if (level < 0 || level > 2)
      throw ConfigError("uncertainty levels must be 0, 1, or 2");
  if (n_pairs == 0)
    throw ConfigError("pairs must be at least 1");
  if (!(theta > 0.0 && theta < 1.0))
    throw ConfigError("theta must lie strictly between 0 and 1");
  if (!(lambda > 0.0))
    throw ConfigError("lambda must be positive");
  if (beta < 0.0 || (beta > 0.0 && beta < 1.0))
    throw ConfigError("beta must be 0 (automatic) or at least 1");
  checkpoints.resolve(n_pairs);
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  auto size = [&] { return parse_integer<std::size_t>(key, value); };
  if (key == "corpus")
    corpus_path = value;
  else if (key == "lexicon")
    lexicon_path = value;
  else if (key == "vocab")
    generator.vocab_size = size();
  else if (key == "features_min")
    generator.features_per_referent.min = size();
  else if (key == "features_max")
    generator.features_per_referent.max = size();
  else if (key == "feature_pool")
    generator.feature_pool = size();
  else if (key == "feature_skew")
    generator.feature_skew = parse_real(key, value);
  else if (key == "zipf")
    generator.zipf_exponent = parse_real(key, value);
  else if (key == "len_min")
    generator.utterance_length.min = size();
  else if (key == "len_max")
    generator.utterance_length.max = size();
  else if (key == "seed")
    generator.seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "pairs") {
    n_pairs = size();
    generator.n_pairs = n_pairs;
  } else if (key == "mechanism") {
    mechanisms.clear();
    if (value == "all")
      mechanisms.assign(std::begin(kAllMechanisms), std::end(kAllMechanisms));
    else
      for (auto item : split_list(value))
        mechanisms.push_back(parse_mechanism(item));
  } else if (key == "condition") {
    conditions.clear();
    if (value == "all")
      conditions = {Condition::Full, Condition::Short, Condition::Long};
    else
      for (auto item : split_list(value))
        conditions.push_back(parse_condition(item));
  } else if (key == "uncertainty") {
    uncertainty_levels.clear();
    if (value == "all")
      uncertainty_levels = {0, 1, 2};
    else
      for (auto item : split_list(value))
        uncertainty_levels.push_back(parse_integer<int>(key, item));
  } else if (key == "checkpoints")
    checkpoints = CheckpointSchedule::parse(value);
  else if (key == "theta")
    theta = parse_real(key, value);
  else if (key == "lambda")
    lambda = parse_real(key, value);
  else if (key == "beta")
    beta = parse_real(key, value);
  else if (key == "similarity")
    similarity = parse_similarity(value);
  else if (key == "save_state")
    save_states = parse_bool(key, value);
  else if (key == "out")
    out_dir = value;
  else if (key == "threads")
    threads = parse_integer<unsigned>(key, value);
  else
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["beta"] = full_precision(beta);
  kv["checkpoints"] = checkpoints.to_string();
  kv["condition"] = join(conditions, [](auto c) { return std::string(to_string(c)); });
  kv["corpus"] = corpus_path;
  kv["feature_pool"] = std::to_string(generator.feature_pool);
  kv["feature_skew"] = full_precision(generator.feature_skew);
  kv["features_max"] = std::to_string(generator.features_per_referent.max);
  kv["features_min"] = std::to_string(generator.features_per_referent.min);
  kv["lambda"] = full_precision(lambda);
  kv["len_max"] = std::to_string(generator.utterance_length.max);
  kv["len_min"] = std::to_string(generator.utterance_length.min);
  kv["lexicon"] = lexicon_path;
  kv["mechanism"] = join(mechanisms, [](auto m) { return std::string(to_string(m)); });
  kv["pairs"] = std::to_string(n_pairs);
  kv["save_state"] = save_states ? "true" : "false";
  kv["seed"] = std::to_string(generator.seed);
  kv["similarity"] = std::string(to_string(similarity));
  kv["theta"] = full_precision(theta);
  kv["uncertainty"] = join(uncertainty_levels, [](int l) { return std::to_string(l); });
  kv["vocab"] = std::to_string(generator.vocab_size);
  kv["zipf"] = full_precision(generator.zipf_exponent);
  std::string out;
  for (const auto& [k, v] : kv)
    out += k + "=" + v + "\n";
  return out;
}

std::uint64_t ExperimentConfig::digest() const { return fnv1a(canonical()); }

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? end : end - start);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
      try {
        base.set(line.substr(0, eq), line.substr(eq + 1));
      } catch (const ConfigError& e) {
        throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (end == std::string_view::npos)
      break;
    start = end + 1;
  }
  return base;
}

const BandSummary& CheckpointResult::band(std::string_view name) const {
  for (const auto& b : bands)
    if (b.band == name)
      return b;
  throw RuntimeError("checkpoint has no band '" + std::string(name) + "'");
}

PairSource::PairSource(std::vector<InputPair> pairs) : pairs_(std::move(pairs)) {}

PairSource::PairSource(const Lexicon& lexicon, const CorpusSpec& spec) {
  generator_.emplace(lexicon, spec);
}

std::optional<InputPair> PairSource::next() {
  if (generator_)
    return generator_->next();
  if (pos_ >= pairs_.size())
    return std::nullopt;
  return pairs_[pos_++];
}

std::vector<InputPair> training_stream(PairSource& source, Condition condition, int uncertainty,
                                       std::size_t n_pairs) {
  if (uncertainty < 0 || uncertainty > 2)
    throw ConfigError("uncertainty levels must be 0, 1, or 2");
  const std::size_t needed = n_pairs * static_cast<std::size_t>(uncertainty + 1);
  std::vector<InputPair> base;
  std::size_t pulled = 0;
  while (base.size() < needed) {
    auto pair = source.next();
    if (!pair)
      break;
    ++pulled;
    if (condition == Condition::Full ||
        satisfies(condition == Condition::Short ? LengthCondition::Short : LengthCondition::Long,
                  pair->utterance.size())) {
      pair->index = base.size() + 1;
      base.push_back(std::move(*pair));
    }
  }
  auto stream = inject_referential_uncertainty(base, uncertainty);
  if (stream.size() < n_pairs)
    throw RuntimeError("corpus too short: condition " + condition_label(condition, uncertainty) +
                       " yields " + std::to_string(stream.size()) + " training pairs from " +
                       std::to_string(pulled) + " corpus pairs, but " + std::to_string(n_pairs) +
                       " were requested");
  stream.resize(n_pairs);
  return stream;
}

namespace {

struct Job {
  Mechanism mechanism;
  Condition condition;
  int uncertainty;
  const std::vector<InputPair>* stream;
};

ConditionRun train_one(const Job& job, const ExperimentConfig& config, const Lexicon& lexicon,
                       double beta, const std::vector<std::uint64_t>& schedule,
                       std::string* snapshot) {
  LearnerConfig lc;
  lc.mechanism = job.mechanism;
  lc.lambda = config.lambda;
  lc.beta = beta;
  lc.similarity = config.similarity;
  Learner learner(lc);

  ConditionRun run;
  run.mechanism = job.mechanism;
  run.condition = job.condition;
  run.uncertainty = job.uncertainty;

  SplitSpec bands;
  std::map<Word, std::size_t> freqs;
  std::size_t next = 0;
  const auto& stream = *job.stream;
  for (auto checkpoint : schedule) {
    while (learner.time() < checkpoint) {
      const auto& pair = stream[next++];
      learner.process(pair);
      for (const auto& w : pair.utterance)
        ++freqs[w];
    }
    auto report = evaluate(learner, lexicon, config.theta);
    auto split = split_report(report, config.theta, bands, freqs);
    CheckpointResult cp;
    cp.t = learner.time();
    cp.bands.push_back(summary_of("all", report));
    cp.bands.push_back(summary_of("low", split.at("low")));
    cp.bands.push_back(summary_of("high", split.at("high")));
    run.checkpoints.push_back(std::move(cp));
    run.not_in_lexicon = report.not_in_lexicon;
  }
  if (snapshot) {
    std::ostringstream out;
    learner.save(out);
    *snapshot = out.str();
  }
  return run;
}

} // namespace

RunRecord run_experiment(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();

  RunRecord record;
  record.config = config;
  record.digest = config.digest();

  Lexicon lexicon;
  std::vector<InputPair> file_pairs;
  const bool from_file = !config.corpus_path.empty();
  if (from_file) {
    const auto corpus_text = read_file(config.corpus_path);
    const auto lexicon_text = read_file(config.lexicon_path);
    try {
      file_pairs = parse_corpus(corpus_text);
    } catch (const ParseError& e) {
      throw ParseError(e.line(), config.corpus_path + ": " + e.what());
    }
    lexicon = parse_lexicon(lexicon_text);
    record.corpus_digest = fnv1a(lexicon_text, fnv1a(corpus_text));
  } else {
    lexicon = generate_lexicon(config.generator);
    ExperimentConfig gen_only;
    gen_only.generator = config.generator;
    gen_only.generator.n_pairs = 1;
    record.corpus_digest = fnv1a("generator\n" + gen_only.canonical());
  }
  if (lexicon.empty())
    throw RuntimeError("the gold lexicon is empty");

  const double beta = config.beta > 0.0
                          ? config.beta
                          : LearnerConfig::kBetaPerGoldFeature *
                                static_cast<double>(lexicon.feature_universe().size());
  const auto schedule = config.checkpoints.resolve(config.n_pairs);

  // One stream per condition, shared by every mechanism.
  std::vector<std::vector<InputPair>> streams;
  std::vector<Job> jobs;
  streams.reserve(config.conditions.size() * config.uncertainty_levels.size());
  for (auto condition : config.conditions)
    for (int level : config.uncertainty_levels) {
      auto source = from_file ? PairSource(file_pairs) : PairSource(lexicon, config.generator);
      streams.push_back(training_stream(source, condition, level, config.n_pairs));
      for (auto mechanism : config.mechanisms)
        jobs.push_back({mechanism, condition, level, &streams.back()});
    }

  std::vector<ConditionRun> runs(jobs.size());
  std::vector<std::string> snapshots(config.save_states ? jobs.size() : 0);
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t i; (i = cursor++) < jobs.size();) {
      try {
        runs[i] = train_one(jobs[i], config, lexicon, beta, schedule,
                            config.save_states ? &snapshots[i] : nullptr);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n_threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  n_threads = std::clamp<unsigned>(n_threads, 1, static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_threads; ++i)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
  record.runs = std::move(runs);

  if (!config.out_dir.empty()) {
    ensure_directory(config.out_dir);
    const fs::path dir(config.out_dir);
    record.files = {"report.csv", "report.jsonl", "record.json"};
    if (config.save_states) {
      ensure_directory((dir / "states").string());
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto name = "states/" + std::string(to_string(record.runs[i].mechanism)) + "_" +
                    record.runs[i].label() + ".snapshot";
        write_file(dir / name, snapshots[i]);
        record.files.push_back(name);
      }
    }
    write_file(dir / "report.csv", report_csv(record));
    write_file(dir / "report.jsonl", report_jsonl(record));
    write_file(dir / "record.json", record_to_json(record));
  }
  record.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (!config.out_dir.empty()) {
    json timing{{"wall_clock_seconds", record.wall_clock_seconds}};
    write_file(fs::path(config.out_dir) / "timing.json", timing.dump(2) + "\n");
  }
  return record;
}

std::string record_to_json(const RunRecord& record) {
  json config = json::object();
  std::istringstream canon(record.config.canonical());
  for (std::string line; std::getline(canon, line);) {
    auto eq = line.find('=');
    config[line.substr(0, eq)] = line.substr(eq + 1);
  }
  json runs = json::array();
  for (const auto& run : record.runs) {
    json checkpoints = json::array();
    for (const auto& cp : run.checkpoints) {
      json bands = json::array();
      for (const auto& b : cp.bands)
        bands.push_back({{"band", b.band},
                         {"mean_acq", b.mean_acq},
                         {"prop_learned", b.prop_learned},
                         {"n_words", b.n_words},
                         {"empty", b.empty}});
      checkpoints.push_back({{"t", cp.t}, {"bands", std::move(bands)}});
    }
    runs.push_back({{"mechanism", std::string(to_string(run.mechanism))},
                    {"condition", std::string(to_string(run.condition))},
                    {"uncertainty", run.uncertainty},
                    {"label", run.label()},
                    {"not_in_lexicon", run.not_in_lexicon},
                    {"checkpoints", std::move(checkpoints)}});
  }
  json doc{{"format", kRecordFormat},
           {"version", kRecordVersion},
           {"digest", hex64(record.digest)},
           {"corpus_digest", hex64(record.corpus_digest)},
           {"config", std::move(config)},
           {"files", record.files},
           {"runs", std::move(runs)}};
  return doc.dump(2) + "\n";
}

RunRecord record_from_json(std::string_view text) {
  RunRecord record;
  try {
    auto doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kRecordFormat)
      throw RuntimeError("not a run record");
    if (doc.at("version").get<int>() != kRecordVersion)
      throw RuntimeError("unsupported run record version");
    for (const auto& [k, v] : doc.at("config").items())
      record.config.set(k, v.get<std::string>());
    record.digest = parse_hex64(doc.at("digest").get<std::string>());
    record.corpus_digest = parse_hex64(doc.at("corpus_digest").get<std::string>());
    record.files = doc.at("files").get<std::vector<std::string>>();
    for (const auto& r : doc.at("runs")) {
      ConditionRun run;
      run.mechanism = parse_mechanism(r.at("mechanism").get<std::string>());
      run.condition = parse_condition(r.at("condition").get<std::string>());
      run.uncertainty = r.at("uncertainty").get<int>();
      run.not_in_lexicon = r.at("not_in_lexicon").get<std::vector<std::string>>();
      for (const auto& c : r.at("checkpoints")) {
        CheckpointResult cp;
        cp.t = c.at("t").get<std::uint64_t>();
        for (const auto& b : c.at("bands"))
          cp.bands.push_back({b.at("band").get<std::string>(), b.at("mean_acq").get<double>(),
                              b.at("prop_learned").get<double>(),
                              b.at("n_words").get<std::size_t>(), b.at("empty").get<bool>()});
        run.checkpoints.push_back(std::move(cp));
      }
      if (run.checkpoints.empty())
        throw RuntimeError("run " + run.label() + " has no checkpoints");
      record.runs.push_back(std::move(run));
    }
  } catch (const json::exception& e) {
    throw RuntimeError(std::string("malformed run record: ") + e.what());
  }
  return record;
}

RunRecord read_record(const std::string& path) {
  auto p = fs::path(path);
  if (fs::is_directory(p))
    p /= "record.json";
  auto record = record_from_json(read_file(p.string()));
  record.config.out_dir = p.parent_path().string();
  return record;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string report_csv(const RunRecord& record) {
  std::string out = "t,mechanism,condition,band,mean_acq,prop_learned,n_words\n";
  for (const auto& run : record.runs)
    for (const auto& cp : run.checkpoints)
      for (const auto& b : cp.bands)
        out += std::to_string(cp.t) + "," + std::string(to_string(run.mechanism)) + "," +
               run.label() + "," + b.band + "," + format_number(b.mean_acq) + "," +
               format_number(b.prop_learned) + "," + std::to_string(b.n_words) + "\n";
  return out;
}

std::string report_jsonl(const RunRecord& record) {
  std::string out;
  for (const auto& run : record.runs)
    for (const auto& cp : run.checkpoints)
      for (const auto& b : cp.bands) {
        json row{{"t", cp.t},
                 {"mechanism", std::string(to_string(run.mechanism))},
                 {"condition", run.label()},
                 {"band", b.band},
                 {"mean_acq", b.mean_acq},
                 {"prop_learned", b.prop_learned},
                 {"n_words", b.n_words}};
        out += row.dump() + "\n";
      }
  return out;
}

Comparison compare_mechanisms(const std::vector<RunRecord>& records) {
  if (records.empty())
    throw RuntimeError("nothing to compare");
  Comparison cmp;
  cmp.corpus_digest = records.front().corpus_digest;
  for (const auto& r : records)
    if (r.corpus_digest != cmp.corpus_digest)
      throw RuntimeError("records were trained on different corpora (" + hex64(cmp.corpus_digest) +
                         " vs " + hex64(r.corpus_digest) + ")");

  std::vector<std::string> order;
  std::map<std::string, std::vector<ComparisonRow>> groups;
  for (const auto& record : records)
    for (const auto& run : record.runs) {
      const auto& fin = run.final_checkpoint();
      ComparisonRow row{std::string(to_string(run.mechanism)),
                        run.label(),
                        fin.band("all").mean_acq,
                        fin.band("all").prop_learned,
                        fin.band("low").mean_acq,
                        fin.band("high").mean_acq,
                        fin.band("all").n_words};
      auto& group = groups[row.condition];
      if (group.empty())
        order.push_back(row.condition);
      auto same = std::count_if(group.begin(), group.end(), [&](const ComparisonRow& r) {
        return r.name == row.name || r.name.starts_with(row.name + "#");
      });
      if (same)
        row.name += "#" + std::to_string(same + 1);
      group.push_back(std::move(row));
    }

  for (const auto& label : order) {
    const auto& group = groups[label];
    cmp.rows.insert(cmp.rows.end(), group.begin(), group.end());
    for (std::size_t i = 0; i < group.size(); ++i)
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const auto& a = group[i];
        const auto& b = group[j];
        cmp.deltas.push_back({b.name + " - " + a.name, label, b.mean_acq - a.mean_acq,
                              b.prop_learned - a.prop_learned, b.low_mean_acq - a.low_mean_acq,
                              b.high_mean_acq - a.high_mean_acq, 0});
      }
  }
  return cmp;
}

std::string format_comparison(const Comparison& cmp) {
  std::string out = "# corpus " + hex64(cmp.corpus_digest) + "\n";
  out += "kind,condition,mechanism,mean_acq,prop_learned,low_mean_acq,high_mean_acq,n_words\n";
  auto line = [&](std::string_view kind, const ComparisonRow& r, bool with_count) {
    out += std::string(kind) + "," + r.condition + "," + r.name + "," + format_number(r.mean_acq) +
           "," + format_number(r.prop_learned) + "," + format_number(r.low_mean_acq) + "," +
           format_number(r.high_mean_acq) + "," + (with_count ? std::to_string(r.n_words) : "") +
           "\n";
  };
  for (const auto& r : cmp.rows)
    line("final", r, true);
  for (const auto& d : cmp.deltas)
    line("delta", d, false);
  return out;
}

std::vector<std::string> emit_plot_data(const std::vector<RunRecord>& records,
                                        const std::string& out_dir) {
  ensure_directory(out_dir);
  std::vector<const ConditionRun*> runs;
  std::set<std::tuple<Mechanism, Condition, int>> seen;
  for (const auto& record : records)
    for (const auto& run : record.runs)
      if (seen.emplace(run.mechanism, run.condition, run.uncertainty).second)
        runs.push_back(&run);

  auto mech = [](const ConditionRun* r) { return std::string(to_string(r->mechanism)); };
  std::vector<std::string> paths;
  auto emit = [&](const std::string& name, const std::string& columns, const std::string& body) {
    auto path = (fs::path(out_dir) / name).string();
    write_file(path, "# columns: " + columns + "\n" + columns + "\n" + body);
    paths.push_back(path);
  };

  std::string body;
  for (const auto* r : runs)
    for (const auto& cp : r->checkpoints) {
      const auto& all = cp.band("all");
      body += mech(r) + "," + r->label() + "," + std::to_string(cp.t) + "," +
              format_number(all.mean_acq) + "," + format_number(all.prop_learned) + "," +
              std::to_string(all.n_words) + "\n";
    }
  emit("trajectory.csv", "mechanism,condition,t,mean_acq,prop_learned,n_words", body);

  auto band_rows = [&](auto&& keep) {
    std::string rows;
    for (const auto* r : runs) {
      if (!keep(r))
        continue;
      for (const char* band : {"low", "high"}) {
        const auto& b = r->final_checkpoint().band(band);
        rows += mech(r) + "," + r->label() + "," + band + "," + format_number(b.mean_acq) + "," +
                format_number(b.prop_learned) + "," + std::to_string(b.n_words) + "\n";
      }
    }
    return rows;
  };
  auto final_rows = [&](auto&& keep, auto&& key) {
    std::string rows;
    for (const auto* r : runs) {
      if (!keep(r))
        continue;
      const auto& b = r->final_checkpoint().band("all");
      rows += mech(r) + "," + key(r) + "," + format_number(b.mean_acq) + "," +
              format_number(b.prop_learned) + "," + std::to_string(b.n_words) + "\n";
    }
    return rows;
  };

  emit("frequency_split.csv", "mechanism,condition,band,mean_acq,prop_learned,n_words",
       band_rows([](const ConditionRun* r) {
         return r->condition == Condition::Full && r->uncertainty == 0;
       }));
  emit("mlu_split.csv", "mechanism,corpus,mean_acq,prop_learned,n_words",
       final_rows([](const ConditionRun* r) { return r->uncertainty == 0; },
                  [](const ConditionRun* r) { return std::string(to_string(r->condition)); }));
  emit("mlu_frequency_split.csv", "mechanism,condition,band,mean_acq,prop_learned,n_words",
       band_rows([](const ConditionRun* r) {
         return r->condition != Condition::Full && r->uncertainty == 0;
       }));
  emit("uncertainty.csv", "mechanism,level,mean_acq,prop_learned,n_words",
       final_rows([](const ConditionRun* r) { return r->condition == Condition::Full; },
                  [](const ConditionRun* r) { return std::to_string(r->uncertainty); }));
  return paths;
}

} // namespace xsl
