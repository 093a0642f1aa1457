#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "helpers.hpp"
#include "oracle.hpp"
#include "xsl/error.hpp"
#include "xsl/evaluation.hpp"
#include "xsl/learner.hpp"

using namespace xsl;
using testing::pair_of;

namespace {

Learner make(Mechanism m = Mechanism::WordComp, double beta = 200) {
  LearnerConfig c;
  c.mechanism = m;
  c.beta = beta;
  return Learner(c);
}

std::string snapshot(const Learner& l) {
  std::ostringstream out;
  l.save(out);
  return out.str();
}

WordRep rep_of(std::vector<Feature> features, std::vector<double> probs) {
  return WordRep{std::move(features), std::move(probs)};
}

Lexicon small_lexicon() {
  Lexicon lex;
  lex.add("a", Referent::of({"A1", "A2"}));
  lex.add("b", Referent::of({"B1", "B2", "S"}));
  lex.add("c", Referent::of({"C1", "S"}));
  return lex;
}

} // namespace

TEST_CASE("acq: parallel, closed form, disjoint") {
  auto gold = Referent::of({"A", "B"});
  CHECK(acq_score(rep_of({"A", "B", "C"}, {0.4, 0.4, 0.0}), gold) ==
        doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t n = 2; n <= 10; ++n)
    for (std::size_t k = 1; k <= n; ++k) {
      std::vector<Feature> fs;
      std::vector<Feature> g;
      for (std::size_t i = 0; i < n; ++i) {
        fs.push_back("F" + std::to_string(i));
        if (i < k)
          g.push_back(fs.back());
      }
      CHECK(acq_score(rep_of(fs, std::vector<double>(n, 1.0 / n)), Referent::of(g)) ==
            doctest::Approx(std::sqrt(double(k) / n)).epsilon(1e-12));
    }
  CHECK(acq_score(rep_of({"A", "B", "C", "D"}, {0, 0, 0.5, 0.5}), gold) == 0.0);
}

TEST_CASE("acq: scale invariant, misuse rejected") {
  auto gold = Referent::of({"A", "C"});
  auto base = acq_score(rep_of({"A", "B", "C"}, {0.2, 0.5, 0.3}), gold);
  for (double c : {0.01, 7.0, 1e5})
    CHECK(acq_score(rep_of({"A", "B", "C"}, {0.2 * c, 0.5 * c, 0.3 * c}), gold) ==
          doctest::Approx(base).epsilon(1e-12));
  CHECK_THROWS_AS(acq_score(rep_of({"A"}, {1.0}), Referent{}), std::invalid_argument);
  CHECK_THROWS_AS(acq_score(rep_of({"A"}, {1.0}), gold), std::invalid_argument);
  Learner l = make();
  CHECK_THROWS_AS(acq_score(l.state(), "a", Referent{}), std::invalid_argument);
}

TEST_CASE("acq: sparse route agrees with dense rep and with the oracle") {
  Rng rng(17);
  for (auto m : kAllMechanisms)
    for (int trial = 0; trial < 25; ++trial) {
      Learner l = make(m, 100);
      oracle::Model o(static_cast<oracle::Mech>(static_cast<int>(m)), 1e-5, 100);
      for (const auto& p : testing::random_corpus(rng, 20, 5, 8, 3, 3)) {
        l.process(p);
        o.step(p);
      }
      // Gold meanings may include features the learner has never seen.
      for (const auto& w : o.words()) {
        auto gold = Referent::of({"F1", "F3", "NEVER_SEEN"});
        auto rep = l.word_rep(w, gold.features);
        auto sparse = acq_score(l.state(), w, gold);
        CHECK(sparse == doctest::Approx(acq_score(rep, gold)).epsilon(1e-12));
        CHECK(sparse == doctest::Approx(oracle::acq(o, w, gold, 1e-5, 100)).epsilon(1e-12));
      }
    }
}

TEST_CASE("evaluate: fresh state is an empty report") {
  Learner l = make();
  auto r = evaluate(l, small_lexicon());
  CHECK(r.empty);
  CHECK(r.n_words() == 0);
  CHECK(r.mean_acq == 0.0);
  CHECK(r.prop_learned == 0.0);
  CHECK(r.checkpoint_t == 0);
}

TEST_CASE("evaluate: a converged word") {
  Learner l = make();
  for (int i = 0; i < 100; ++i)
    l.process(pair_of("a\tA1,A2"));
  auto r = evaluate(l, small_lexicon());
  CHECK_FALSE(r.empty);
  CHECK(r.n_words() == 1);
  CHECK(r.mean_acq > 0.99);
  CHECK(r.prop_learned == 1.0);
  CHECK(r.checkpoint_t == 100);
}

TEST_CASE("evaluate: theta is strict") {
  AcqReport r;
  r.per_word = {{"a", 0.7}, {"b", 0.70000000001}, {"c", 0.2}};
  summarize(r, 0.7);
  CHECK(r.prop_learned == doctest::Approx(1.0 / 3.0));
  CHECK(r.mean_acq == doctest::Approx((0.7 + 0.70000000001 + 0.2) / 3));

  Learner l = make();
  CHECK_THROWS_AS(evaluate(l, small_lexicon(), 0.0), ConfigError);
  CHECK_THROWS_AS(evaluate(l, small_lexicon(), 1.0), ConfigError);
}

TEST_CASE("evaluate: words outside the lexicon are reported, not scored") {
  Learner l = make();
  l.process(pair_of("a zz yy\tA1,A2;Q;R"));
  auto r = evaluate(l, small_lexicon());
  CHECK(r.n_words() == 1);
  CHECK(r.not_in_lexicon == std::vector<Word>{"yy", "zz"});
}

TEST_CASE("evaluate: read-only, bounded, monotone in theta") {
  Rng rng(41);
  auto lex = small_lexicon();
  Learner l = make(Mechanism::RefComp);
  for (int i = 0; i < 40; ++i) {
    auto w = lex.words()[rng.below(3)];
    auto v = lex.words()[rng.below(3)];
    InputPair p;
    p.add_word(w);
    p.add_word(v);
    p.add_referent(lex.gold(w));
    p.add_referent(lex.gold(v));
    l.process(p);
  }
  auto before = snapshot(l);
  double last = 2.0;
  for (double theta = 0.05; theta < 1.0; theta += 0.05) {
    auto r = evaluate(l, lex, theta);
    CHECK(r.prop_learned >= 0.0);
    CHECK(r.prop_learned <= 1.0);
    CHECK(r.prop_learned <= last);
    last = r.prop_learned;
    for (const auto& [w, s] : r.per_word) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
  }
  CHECK(snapshot(l) == before);
}

TEST_CASE("frequency bands") {
  SplitSpec s;
  CHECK(frequency_band(s, 0) == "low");
  CHECK(frequency_band(s, 4) == "low");
  CHECK_FALSE(frequency_band(s, 5).has_value());
  CHECK_FALSE(frequency_band(s, 7).has_value());
  CHECK_FALSE(frequency_band(s, 10).has_value());
  CHECK(frequency_band(s, 11) == "high");
}

TEST_CASE("split: all words seen once land in the low band") {
  Learner l = make();
  l.process(pair_of("a b\tA1,A2;B1,B2,S"));
  l.process(pair_of("c\tC1,S"));
  auto lex = small_lexicon();
  std::vector<InputPair> stream{pair_of("a b\tA1,A2;B1,B2,S"), pair_of("c\tC1,S")};
  auto bands = evaluate_by_split(l, lex, 0.7, SplitSpec{}, word_frequencies(stream));
  CHECK(bands.at("low").n_words() == 3);
  CHECK(bands.at("high").empty);
}

TEST_CASE("split: partition matches a brute-force re-partition") {
  Rng rng(3);
  Lexicon lex;
  std::vector<Word> words;
  for (int i = 0; i < 30; ++i) {
    words.push_back("w" + std::to_string(i));
    lex.add(words.back(), Referent::of({"G" + std::to_string(i), "S" + std::to_string(i % 4)}));
  }
  std::vector<InputPair> stream;
  for (int i = 0; i < 400; ++i) {
    InputPair p;
    // Skewed draw so every band is populated.
    auto w = words[std::min<std::size_t>(rng.below(30), rng.below(30))];
    p.add_word(w);
    p.add_referent(lex.gold(w));
    stream.push_back(p);
  }
  stream.push_back(pair_of("w29\tG29,S1"));
  Learner l = make(Mechanism::WordComp, 500);
  for (const auto& p : stream)
    l.process(p);
  auto freqs = word_frequencies(stream);
  auto all = evaluate(l, lex);
  auto bands = evaluate_by_split(l, lex, 0.7, SplitSpec{}, freqs);

  std::map<std::string, std::set<Word>> expect;
  for (const auto& [w, c] : freqs)
    expect[c < 5 ? "low" : c > 10 ? "high" : "mid"].insert(w);
  for (const auto* band : {"low", "high"}) {
    std::set<Word> got;
    for (const auto& [w, s] : bands.at(band).per_word) {
      got.insert(w);
      CHECK(s == all.per_word.at(w));
    }
    CHECK(got == expect[band]);
  }
  CHECK(expect["low"].size() + expect["high"].size() + expect["mid"].size() == all.n_words());
  CHECK(bands.count("mid") == 0);
}

TEST_CASE("split: corpus condition puts every word in one band") {
  Learner l = make();
  l.process(pair_of("a b\tA1,A2;B1,B2,S"));
  SplitSpec s;
  s.kind = SplitSpec::Kind::CorpusCondition;
  s.condition = "short";
  auto bands = evaluate_by_split(l, small_lexicon(), 0.7, s, {});
  REQUIRE(bands.size() == 1);
  CHECK(bands.at("short").n_words() == 2);
}

TEST_CASE("trajectory: schedule handling") {
  auto lex = small_lexicon();
  std::vector<InputPair> pairs;
  for (int i = 0; i < 30; ++i)
    pairs.push_back(pair_of(i % 2 ? "a b\tA1,A2;B1,B2,S" : "c a\tC1,S;A1,A2"));

  Learner l = make();
  auto pts = trajectory(l, pairs, {30}, lex);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].t == 30);

  Learner fresh = make();
  auto with_zero = trajectory(fresh, pairs, {0, 10, 20}, lex);
  REQUIRE(with_zero.size() == 3);
  CHECK(with_zero[0].empty);
  CHECK(with_zero[0].n_words == 0);
  CHECK(with_zero[2].t == 20);
  CHECK(fresh.time() == 20);

  Learner bad = make();
  CHECK_THROWS(trajectory(bad, pairs, {10, 5}, lex));
  CHECK_THROWS(trajectory(bad, pairs, {31}, lex));
}

TEST_CASE("trajectory: word-comp is nondecreasing after burn-in on clean data") {
  CorpusSpec s;
  s.vocab_size = 200;
  s.n_pairs = 4000;
  s.seed = 12;
  auto lex = generate_lexicon(s);
  auto pairs = generate_corpus(lex, s);
  Learner l(LearnerConfig::for_lexicon(Mechanism::WordComp, lex));
  std::vector<std::uint64_t> schedule;
  for (std::uint64_t t = 200; t <= 4000; t += 200)
    schedule.push_back(t);
  auto pts = trajectory(l, pairs, schedule, lex);
  for (std::size_t i = 1; i < pts.size(); ++i)
    CHECK(pts[i].mean_acq >= pts[i - 1].mean_acq - 0.01);
  CHECK(pts.back().mean_acq > pts.front().mean_acq);
}
