// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xsl/xsl.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

int report(xsl_status status) {
  if (status == XSL_OK)
    return kExitOk;
  std::fprintf(stderr, "xsl: %s: %s\n", xsl_status_string(status), xsl_last_error());
  // Bad parameters, unparsable config, and misuse are the caller's to fix.
  if (status == XSL_ERR_CONFIG || status == XSL_ERR_INVALID_ARGUMENT)
    return kExitConfig;
  return kExitRuntime;
}

std::string spell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string spell(T v) {
  return std::to_string(v);
}

struct GeneratorFlags {
  std::optional<size_t> vocab, features_min, features_max, feature_pool, len_min, len_max;
  std::optional<double> zipf, feature_skew;
  std::optional<uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--vocab", vocab, "Vocabulary size");
    app->add_option("--zipf", zipf, "Zipf exponent of word frequencies");
    app->add_option("--len-min", len_min, "Shortest utterance");
    app->add_option("--len-max", len_max, "Longest utterance");
    app->add_option("--features-min", features_min, "Fewest features per meaning");
    app->add_option("--features-max", features_max, "Most features per meaning");
    app->add_option("--feature-pool", feature_pool, "Distinct features (0 = automatic)");
    app->add_option("--feature-skew", feature_skew, "Feature popularity skew");
    app->add_option("--seed", seed, "Random seed");
  }

  void apply(xsl_corpus_spec& s) const {
    if (vocab) s.vocab_size = *vocab;
    if (zipf) s.zipf_exponent = *zipf;
    if (len_min) s.len_min = *len_min;
    if (len_max) s.len_max = *len_max;
    if (features_min) s.features_min = *features_min;
    if (features_max) s.features_max = *features_max;
    if (feature_pool) s.feature_pool = *feature_pool;
    if (feature_skew) s.feature_skew = *feature_skew;
    if (seed) s.seed = *seed;
  }

  void append(std::string& text) const {
    auto put = [&](const char* key, const auto& v) {
      if (v) text += std::string(key) + " = " + spell(*v) + "\n";
    };
    put("vocab", vocab);
    put("zipf", zipf);
    put("len_min", len_min);
    put("len_max", len_max);
    put("features_min", features_min);
    put("features_max", features_max);
    put("feature_pool", feature_pool);
    put("feature_skew", feature_skew);
    put("seed", seed);
  }
};

std::string read_text(const std::string& path, bool& ok) {
  std::string text;
  std::FILE* f = std::fopen(path.c_str(), "rb");
  ok = f != nullptr;
  if (!f)
    return text;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0)
    text.append(buf, n);
  std::fclose(f);
  return text;
}

class Records {
public:
  ~Records() {
    for (auto* r : handles_)
      xsl_record_free(r);
  }

  xsl_status load(const std::vector<std::string>& paths) {
    for (const auto& p : paths) {
      xsl_record* r = nullptr;
      if (auto st = xsl_record_load(p.c_str(), &r); st != XSL_OK)
        return st;
      handles_.push_back(r);
    }
    return XSL_OK;
  }

  const xsl_record* const* data() const { return handles_.data(); }
  size_t size() const { return handles_.size(); }

private:
  std::vector<xsl_record*> handles_;
};

int gen_corpus(const GeneratorFlags& gen, size_t pairs, const std::string& out,
               std::string lexicon_out, bool labels) {
  xsl_corpus_spec spec;
  xsl_corpus_spec_init(&spec);
  gen.apply(spec);
  spec.n_pairs = pairs;
  if (lexicon_out.empty())
    lexicon_out = out + ".lexicon";

  xsl_lexicon* lexicon = nullptr;
  xsl_corpus* corpus = nullptr;
  auto st = xsl_lexicon_generate(&spec, &lexicon);
  if (st == XSL_OK)
    st = xsl_corpus_generate(lexicon, &spec, &corpus);
  if (st == XSL_OK)
    st = xsl_corpus_save(corpus, out.c_str(), labels ? lexicon : nullptr);
  if (st == XSL_OK)
    st = xsl_lexicon_save(lexicon, lexicon_out.c_str());
  if (st == XSL_OK)
    std::printf("wrote %zu pairs to %s, lexicon of %zu words to %s\n", xsl_corpus_size(corpus),
                out.c_str(), xsl_lexicon_size(lexicon), lexicon_out.c_str());
  xsl_corpus_free(corpus);
  xsl_lexicon_free(lexicon);
  return report(st);
}

void print_summary(const xsl_record* record) {
  size_t n = xsl_record_run_count(record);
  std::printf("%-10s %-10s %8s %10s %10s %10s %10s\n", "mechanism", "condition", "t", "mean_acq",
              "learned", "low", "high");
  for (size_t i = 0; i < n; ++i) {
    xsl_run_info info;
    if (xsl_record_run_info(record, i, &info) != XSL_OK)
      continue;
    auto band = [](const xsl_acq_summary& s) { return s.empty ? std::string("-") : std::to_string(s.mean_acq); };
    std::printf("%-10s %-10s %8llu %10.4f %10.4f %10s %10s\n", info.mechanism, info.condition,
                static_cast<unsigned long long>(info.final_all.t), info.final_all.mean_acq,
                info.final_all.prop_learned, band(info.final_low).c_str(),
                band(info.final_high).c_str());
  }
  std::printf("config digest %016llx, %.2fs\n",
              static_cast<unsigned long long>(xsl_record_digest(record)),
              xsl_record_wall_clock(record));
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-situational word learning simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(xsl_version()));

  // gen-corpus
  auto* gen_cmd = app.add_subcommand("gen-corpus", "Generate a synthetic lexicon and corpus");
  GeneratorFlags gen_flags;
  gen_flags.attach(gen_cmd);
  size_t gen_pairs = 20000;
  std::string gen_out, gen_lexicon_out;
  bool gen_labels = false;
  gen_cmd->add_option("--pairs", gen_pairs, "Number of utterance-scene pairs")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Corpus file")->required();
  gen_cmd->add_option("--lexicon-out", gen_lexicon_out, "Gold lexicon file (default: <out>.lexicon)");
  gen_cmd->add_flag("--labels", gen_labels, "Prefix referents with their word");

  // run
  auto* run_cmd = app.add_subcommand("run", "Train and evaluate learners");
  GeneratorFlags run_gen;
  run_gen.attach(run_cmd);
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> settings;
  auto setting = [&](const char* flag, const char* key, const char* help) {
    run_cmd->add_option_function<std::string>(
        flag, [&settings, key](const std::string& v) { settings.emplace_back(key, v); }, help);
  };
  run_cmd->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  setting("--corpus", "corpus", "Corpus file (default: generate)");
  setting("--lexicon", "lexicon", "Gold lexicon for --corpus");
  setting("--mechanism", "mechanism", "fas, no-comp, ref-comp, word-comp, a comma list, or all");
  setting("--condition", "condition", "full, short, long, a comma list, or all");
  setting("--uncertainty", "uncertainty", "0, 1, 2, a comma list, or all");
  setting("--pairs", "pairs", "Training pairs per run");
  setting("--theta", "theta", "Acquisition threshold");
  setting("--checkpoints", "checkpoints", "every:N or a comma list");
  setting("--lambda", "lambda", "Smoothing constant");
  setting("--beta", "beta", "Feature universe upper bound (0 = automatic)");
  setting("--similarity", "similarity", "cosine or dot");
  setting("--out", "out", "Output directory");
  setting("--threads", "threads", "Worker threads (0 = all cores)");
  bool save_state = false;
  run_cmd->add_flag("--save-state", save_state, "Write learner snapshots");
  bool quiet = false;
  run_cmd->add_flag("-q,--quiet", quiet, "Do not print the summary table");

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "Tabulate final scores across records");
  std::vector<std::string> cmp_records;
  std::string cmp_out;
  cmp_cmd->add_option("records", cmp_records, "record.json files or run directories")->required();
  cmp_cmd->add_option("--out", cmp_out, "Write the table here instead of stdout");

  // emit-plots
  auto* plot_cmd = app.add_subcommand("emit-plots", "Write figure data as CSV");
  std::vector<std::string> plot_records;
  std::string plot_out;
  plot_cmd->add_option("records", plot_records, "record.json files or run directories")->required();
  plot_cmd->add_option("--out", plot_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*gen_cmd)
    return gen_corpus(gen_flags, gen_pairs, gen_out, gen_lexicon_out, gen_labels);

  if (*run_cmd) {
    std::string text;
    if (!config_path.empty()) {
      bool ok = false;
      text = read_text(config_path, ok);
      if (!ok) {
        std::fprintf(stderr, "xsl: cannot read %s\n", config_path.c_str());
        return kExitConfig;
      }
      text += "\n";
    }
    run_gen.append(text);
    for (const auto& [key, value] : settings)
      text += key + " = " + value + "\n";
    if (save_state)
      text += "save_state = true\n";

    xsl_record* record = nullptr;
    auto st = xsl_experiment_run(text.c_str(), &record);
    if (st == XSL_OK && !quiet)
      print_summary(record);
    xsl_record_free(record);
    return report(st);
  }

  if (*cmp_cmd) {
    Records records;
    auto st = records.load(cmp_records);
    char* table = nullptr;
    if (st == XSL_OK)
      st = xsl_compare(records.data(), records.size(), &table);
    if (st == XSL_OK) {
      if (cmp_out.empty()) {
        std::fputs(table, stdout);
      } else if (std::FILE* f = std::fopen(cmp_out.c_str(), "wb")) {
        std::fputs(table, f);
        std::fclose(f);
      } else {
        std::fprintf(stderr, "xsl: cannot write %s\n", cmp_out.c_str());
        xsl_string_free(table);
        return kExitRuntime;
      }
    }
    xsl_string_free(table);
    return report(st);
  }

  Records records;
  auto st = records.load(plot_records);
  if (st == XSL_OK)
    st = xsl_emit_plots(records.data(), records.size(), plot_out.c_str());
  if (st == XSL_OK)
    std::printf("wrote plot data to %s\n", plot_out.c_str());
  return report(st);
}
