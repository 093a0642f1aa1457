#include "xsl/xsl.h"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <stdexcept>
#include <string>

#include "xsl/error.hpp"
#include "xsl/evaluation.hpp"
#include "xsl/experiments.hpp"
#include "xsl/learner.hpp"

struct xsl_lexicon {
  xsl::Lexicon value;
};

struct xsl_corpus {
  std::vector<xsl::InputPair> pairs;
};

struct xsl_learner {
  xsl::Learner value;
};

struct xsl_record {
  xsl::RunRecord value;
  std::vector<std::string> mechanisms;
  std::vector<std::string> labels;

  explicit xsl_record(xsl::RunRecord r) : value(std::move(r)) {
    for (const auto& run : value.runs) {
      mechanisms.emplace_back(xsl::to_string(run.mechanism));
      labels.push_back(run.label());
    }
  }
};

namespace {

thread_local std::string g_last_error;

xsl_status fail(xsl_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class Fn>
xsl_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return XSL_OK;
  } catch (const xsl::ParseError& e) {
    return fail(XSL_ERR_PARSE, e.what());
  } catch (const xsl::ConfigError& e) {
    return fail(XSL_ERR_CONFIG, e.what());
  } catch (const xsl::IoError& e) {
    return fail(XSL_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(XSL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(XSL_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(XSL_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(XSL_ERR_RUNTIME, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok)
    throw std::invalid_argument(what);
}

std::ifstream open_in(const char* path) {
  require(path != nullptr, "null path");
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw xsl::IoError(std::string("cannot open '") + path + "'");
  return in;
}

std::ofstream open_out(const char* path) {
  require(path != nullptr, "null path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw xsl::IoError(std::string("cannot write '") + path + "'");
  return out;
}

void finish(std::ofstream& out, const char* path) {
  out.flush();
  if (!out)
    throw xsl::IoError(std::string("failed writing '") + path + "'");
}

xsl::CorpusSpec to_spec(const xsl_corpus_spec& s) {
  xsl::CorpusSpec spec;
  spec.vocab_size = s.vocab_size;
  spec.features_per_referent = {s.features_min, s.features_max};
  spec.feature_pool = s.feature_pool;
  spec.feature_skew = s.feature_skew;
  spec.zipf_exponent = s.zipf_exponent;
  spec.utterance_length = {s.len_min, s.len_max};
  spec.n_pairs = s.n_pairs;
  spec.seed = s.seed;
  return spec;
}

xsl_acq_summary to_summary(const xsl::AcqReport& r) {
  return {r.checkpoint_t, r.mean_acq, r.prop_learned, r.n_words(), r.empty ? 1 : 0,
          r.not_in_lexicon.size()};
}

xsl_acq_summary to_summary(std::uint64_t t, const xsl::BandSummary& b) {
  return {t, b.mean_acq, b.prop_learned, b.n_words, b.empty ? 1 : 0, 0};
}

std::vector<xsl::RunRecord> gather(const xsl_record* const* records, size_t count) {
  require(records != nullptr || count == 0, "null record list");
  std::vector<xsl::RunRecord> out;
  for (size_t i = 0; i < count; ++i) {
    require(records[i] != nullptr, "null record");
    out.push_back(records[i]->value);
  }
  return out;
}

} // namespace

extern "C" {

const char* xsl_version(void) { return "0.1.0"; }

const char* xsl_last_error(void) { return g_last_error.c_str(); }

const char* xsl_status_string(xsl_status status) {
  switch (status) {
  case XSL_OK:
    return "ok";
  case XSL_ERR_INVALID_ARGUMENT:
    return "invalid argument";
  case XSL_ERR_CONFIG:
    return "configuration error";
  case XSL_ERR_PARSE:
    return "parse error";
  case XSL_ERR_IO:
    return "i/o error";
  case XSL_ERR_RUNTIME:
    return "runtime error";
  }
  return "unknown status";
}

const char* xsl_mechanism_name(xsl_mechanism mechanism) {
  switch (mechanism) {
  case XSL_MECHANISM_FAS:
    return "fas";
  case XSL_MECHANISM_NO_COMP:
    return "no-comp";
  case XSL_MECHANISM_REF_COMP:
    return "ref-comp";
  case XSL_MECHANISM_WORD_COMP:
    return "word-comp";
  }
  return nullptr;
}

xsl_status xsl_mechanism_parse(const char* name, xsl_mechanism* out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = static_cast<xsl_mechanism>(xsl::parse_mechanism(name));
  });
}

void xsl_corpus_spec_init(xsl_corpus_spec* spec) {
  if (!spec)
    return;
  const xsl::CorpusSpec d;
  *spec = {d.vocab_size,
           d.features_per_referent.min,
           d.features_per_referent.max,
           d.feature_pool,
           d.feature_skew,
           d.zipf_exponent,
           d.utterance_length.min,
           d.utterance_length.max,
           d.n_pairs,
           d.seed};
}

xsl_status xsl_lexicon_generate(const xsl_corpus_spec* spec, xsl_lexicon** out) {
  return guarded([&] {
    require(spec && out, "null argument");
    *out = new xsl_lexicon{xsl::generate_lexicon(to_spec(*spec))};
  });
}

xsl_status xsl_lexicon_load(const char* path, xsl_lexicon** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    auto in = open_in(path);
    *out = new xsl_lexicon{xsl::parse_lexicon(in)};
  });
}

xsl_status xsl_lexicon_save(const xsl_lexicon* lexicon, const char* path) {
  return guarded([&] {
    require(lexicon != nullptr, "null lexicon");
    auto out = open_out(path);
    xsl::write_lexicon(out, lexicon->value);
    finish(out, path);
  });
}

size_t xsl_lexicon_size(const xsl_lexicon* lexicon) { return lexicon ? lexicon->value.size() : 0; }

void xsl_lexicon_free(xsl_lexicon* lexicon) { delete lexicon; }

xsl_status xsl_corpus_generate(const xsl_lexicon* lexicon, const xsl_corpus_spec* spec,
                               xsl_corpus** out) {
  return guarded([&] {
    require(lexicon && spec && out, "null argument");
    *out = new xsl_corpus{xsl::generate_corpus(lexicon->value, to_spec(*spec))};
  });
}

xsl_status xsl_corpus_parse(const char* text, xsl_corpus** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new xsl_corpus{xsl::parse_corpus(std::string_view(text))};
  });
}

xsl_status xsl_corpus_load(const char* path, xsl_corpus** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    auto in = open_in(path);
    *out = new xsl_corpus{xsl::parse_corpus(in)};
  });
}

xsl_status xsl_corpus_save(const xsl_corpus* corpus, const char* path, const xsl_lexicon* labels) {
  return guarded([&] {
    require(corpus != nullptr, "null corpus");
    auto out = open_out(path);
    xsl::write_corpus(out, corpus->pairs, labels ? &labels->value : nullptr);
    finish(out, path);
  });
}

size_t xsl_corpus_size(const xsl_corpus* corpus) { return corpus ? corpus->pairs.size() : 0; }

xsl_status xsl_corpus_pair_shape(const xsl_corpus* corpus, size_t index, size_t* utterance_length,
                                 size_t* scene_size) {
  return guarded([&] {
    require(corpus != nullptr, "null corpus");
    require(index < corpus->pairs.size(), "pair index out of range");
    if (utterance_length)
      *utterance_length = corpus->pairs[index].utterance.size();
    if (scene_size)
      *scene_size = corpus->pairs[index].scene.size();
  });
}

xsl_status xsl_corpus_filter_length(const xsl_corpus* corpus, xsl_length_condition condition,
                                    xsl_corpus** out) {
  return guarded([&] {
    require(corpus && out, "null argument");
    require(condition == XSL_LENGTH_SHORT || condition == XSL_LENGTH_LONG, "bad length condition");
    auto c = condition == XSL_LENGTH_SHORT ? xsl::LengthCondition::Short : xsl::LengthCondition::Long;
    *out = new xsl_corpus{xsl::filter_by_length(corpus->pairs, c)};
  });
}

xsl_status xsl_corpus_inject_uncertainty(const xsl_corpus* corpus, int level, xsl_corpus** out) {
  return guarded([&] {
    require(corpus && out, "null argument");
    *out = new xsl_corpus{xsl::inject_referential_uncertainty(corpus->pairs, level)};
  });
}

xsl_status xsl_corpus_word_frequency(const xsl_corpus* corpus, const char* word, size_t* out) {
  return guarded([&] {
    require(corpus && word && out, "null argument");
    size_t n = 0;
    for (const auto& p : corpus->pairs)
      for (const auto& w : p.utterance)
        if (w == word)
          ++n;
    *out = n;
  });
}

void xsl_corpus_free(xsl_corpus* corpus) { delete corpus; }

void xsl_learner_config_init(xsl_learner_config* config) {
  if (!config)
    return;
  const xsl::LearnerConfig d;
  *config = {static_cast<xsl_mechanism>(d.mechanism), static_cast<xsl_similarity>(d.similarity),
             d.lambda, d.beta};
}

xsl_status xsl_learner_config_for_lexicon(xsl_learner_config* config, const xsl_lexicon* lexicon) {
  return guarded([&] {
    require(config && lexicon, "null argument");
    auto c = xsl::LearnerConfig::for_lexicon(static_cast<xsl::Mechanism>(config->mechanism),
                                             lexicon->value);
    config->beta = c.beta;
  });
}

xsl_status xsl_learner_create(const xsl_learner_config* config, xsl_learner** out) {
  return guarded([&] {
    require(config && out, "null argument");
    require(config->mechanism >= XSL_MECHANISM_FAS && config->mechanism <= XSL_MECHANISM_WORD_COMP,
            "bad mechanism");
    require(config->similarity == XSL_SIMILARITY_COSINE || config->similarity == XSL_SIMILARITY_DOT,
            "bad similarity");
    xsl::LearnerConfig c;
    c.mechanism = static_cast<xsl::Mechanism>(config->mechanism);
    c.similarity = static_cast<xsl::Similarity>(config->similarity);
    c.lambda = config->lambda;
    c.beta = config->beta;
    *out = new xsl_learner{xsl::Learner(c)};
  });
}

xsl_status xsl_learner_process(xsl_learner* learner, const xsl_corpus* corpus, size_t begin,
                               size_t end) {
  return guarded([&] {
    require(learner && corpus, "null argument");
    require(begin <= end && end <= corpus->pairs.size(), "pair range out of bounds");
    for (size_t i = begin; i < end; ++i)
      learner->value.process(corpus->pairs[i]);
  });
}

xsl_status xsl_learner_meaning_prob(const xsl_learner* learner, const char* word,
                                    const char* feature, double* out) {
  return guarded([&] {
    require(learner && word && feature && out, "null argument");
    *out = learner->value.meaning_prob(word, feature);
  });
}

uint64_t xsl_learner_time(const xsl_learner* learner) { return learner ? learner->value.time() : 0; }

xsl_status xsl_learner_save(const xsl_learner* learner, const char* path) {
  return guarded([&] {
    require(learner != nullptr, "null learner");
    auto out = open_out(path);
    learner->value.save(out);
    finish(out, path);
  });
}

xsl_status xsl_learner_load(const char* path, xsl_learner** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    auto in = open_in(path);
    *out = new xsl_learner{xsl::Learner::load(in)};
  });
}

void xsl_learner_free(xsl_learner* learner) { delete learner; }

xsl_status xsl_evaluate(const xsl_learner* learner, const xsl_lexicon* lexicon, double theta,
                        xsl_acq_summary* out) {
  return guarded([&] {
    require(learner && lexicon && out, "null argument");
    *out = to_summary(xsl::evaluate(learner->value, lexicon->value, theta));
  });
}

xsl_status xsl_acq_score(const xsl_learner* learner, const xsl_lexicon* lexicon, const char* word,
                         double* out) {
  return guarded([&] {
    require(learner && lexicon && word && out, "null argument");
    *out = xsl::acq_score(learner->value.state(), word, lexicon->value.gold(word));
  });
}

xsl_status xsl_experiment_run(const char* config_text, xsl_record** out) {
  return guarded([&] {
    require(config_text && out, "null argument");
    auto config = xsl::parse_config(config_text);
    *out = new xsl_record(xsl::run_experiment(config));
  });
}

xsl_status xsl_record_load(const char* path, xsl_record** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new xsl_record(xsl::read_record(path));
  });
}

uint64_t xsl_record_digest(const xsl_record* record) { return record ? record->value.digest : 0; }

double xsl_record_wall_clock(const xsl_record* record) {
  return record ? record->value.wall_clock_seconds : 0.0;
}

size_t xsl_record_run_count(const xsl_record* record) {
  return record ? record->value.runs.size() : 0;
}

xsl_status xsl_record_run_info(const xsl_record* record, size_t index, xsl_run_info* out) {
  return guarded([&] {
    require(record && out, "null argument");
    require(index < record->value.runs.size(), "run index out of range");
    const auto& run = record->value.runs[index];
    const auto& fin = run.final_checkpoint();
    *out = {record->mechanisms[index].c_str(),
            record->labels[index].c_str(),
            run.checkpoints.size(),
            to_summary(fin.t, fin.band("all")),
            to_summary(fin.t, fin.band("low")),
            to_summary(fin.t, fin.band("high"))};
  });
}

void xsl_record_free(xsl_record* record) { delete record; }

xsl_status xsl_compare(const xsl_record* const* records, size_t count, char** table) {
  return guarded([&] {
    require(table != nullptr, "null output");
    auto text = xsl::format_comparison(xsl::compare_mechanisms(gather(records, count)));
    auto* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *table = buf;
  });
}

xsl_status xsl_emit_plots(const xsl_record* const* records, size_t count, const char* out_dir) {
  return guarded([&] {
    require(out_dir != nullptr, "null output directory");
    xsl::emit_plot_data(gather(records, count), out_dir);
  });
}

void xsl_string_free(char* text) { delete[] text; }

} // extern "C"
