#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "helpers.hpp"
#include "xsl/alignment.hpp"
#include "xsl/learner.hpp"

using namespace xsl;
using testing::pair_of;

namespace {

AlignmentTable table_of(std::size_t words, std::size_t targets, std::vector<double> values) {
  AlignmentTable t;
  t.n_words = words;
  t.n_targets = targets;
  t.strengths = std::move(values);
  return t;
}

Learner trained(Mechanism m, std::string_view text, double beta = 1000.0) {
  LearnerConfig c;
  c.mechanism = m;
  c.beta = beta;
  Learner l(c);
  for (const auto& p : testing::corpus_of(text))
    l.process(p);
  return l;
}

void check_sums(const AlignmentTable& t) {
  for (double v : t.strengths) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  if (t.mechanism == Mechanism::Fas || t.mechanism == Mechanism::WordComp)
    for (std::size_t j = 0; j < t.n_targets; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < t.n_words; ++i)
        s += t(i, j);
      CHECK(std::abs(s - 1.0) <= 1e-9);
    }
  if (t.mechanism == Mechanism::RefComp)
    for (std::size_t i = 0; i < t.n_words; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < t.n_targets; ++j)
        s += t(i, j);
      CHECK(std::abs(s - 1.0) <= 1e-9);
    }
}

} // namespace

TEST_CASE("similarity: parallel, closed form, disjoint") {
  std::vector<double> w{0.5, 0.5, 0.0, 0.0}, r{1, 1, 0, 0};
  CHECK(similarity(w, r) == doctest::Approx(1.0).epsilon(1e-15));

  for (std::size_t n = 1; n <= 12; ++n)
    for (std::size_t k = 1; k <= n; ++k) {
      std::vector<double> u(n, 1.0 / n), hot(n, 0.0);
      for (std::size_t i = 0; i < k; ++i)
        hot[i] = 1.0;
      double dot = 0, uu = 0, hh = 0;
      for (std::size_t i = 0; i < n; ++i) {
        dot += u[i] * hot[i];
        uu += u[i] * u[i];
        hh += hot[i] * hot[i];
      }
      const double brute = dot / std::sqrt(uu * hh);
      CHECK(std::abs(brute - std::sqrt(double(k) / n)) < 1e-12);
      CHECK(std::abs(similarity(u, hot) - std::sqrt(double(k) / n)) < 1e-12);
    }

  std::vector<double> a{0.3, 0.7, 0, 0}, b{0, 0, 1, 1};
  CHECK(similarity(a, b) == 0.0);
}

TEST_CASE("similarity: scale invariance and misuse") {
  std::vector<double> w{0.1, 0.4, 0.2, 0.3}, r{1, 0, 1, 1};
  auto base = similarity(w, r);
  for (double c : {0.001, 3.0, 1e6}) {
    std::vector<double> scaled;
    for (double v : w)
      scaled.push_back(v * c);
    CHECK(similarity(scaled, r) == doctest::Approx(base).epsilon(1e-12));
  }
  CHECK(similarity(w, r, Similarity::Dot) == doctest::Approx(0.6));
  std::vector<double> zero(4, 0.0), short_r{1, 1};
  std::vector<double> neg{-0.1, 0.5, 0.3, 0.3};
  CHECK_THROWS_AS(similarity(zero, r), std::invalid_argument);
  CHECK_THROWS_AS(similarity(w, zero), std::invalid_argument);
  CHECK_THROWS_AS(similarity(w, short_r), std::invalid_argument);
  CHECK_THROWS_AS(similarity(neg, r), std::invalid_argument);
}

TEST_CASE("sparse similarities match the dense definition") {
  Rng rng(31);
  for (auto kind : {Similarity::Cosine, Similarity::Dot})
    for (int trial = 0; trial < 30; ++trial) {
      LearnerConfig c;
      c.mechanism = Mechanism::WordComp;
      c.beta = 200;
      c.similarity = kind;
      Learner l(c);
      auto pairs = testing::random_corpus(rng, 12, 5, 6);
      for (std::size_t i = 0; i + 1 < pairs.size(); ++i)
        l.process(pairs[i]);
      const auto& probe = pairs.back();
      auto raw = similarity_table(l.state(), encode(l.state(), probe), kind);

      // Dense route over M plus the probe's unseen features.
      std::vector<Feature> extra;
      for (const auto& r : probe.scene)
        extra.insert(extra.end(), r.features.begin(), r.features.end());
      for (std::size_t i = 0; i < probe.utterance.size(); ++i) {
        auto rep = l.word_rep(probe.utterance[i], extra);
        for (std::size_t j = 0; j < probe.scene.size(); ++j) {
          std::vector<double> hot;
          for (const auto& f : rep.features)
            hot.push_back(probe.scene[j].contains(f) ? 1.0 : 0.0);
          CHECK(raw(i, j) == doctest::Approx(similarity(rep.probs, hot, kind)).epsilon(1e-12));
        }
      }
    }
}

TEST_CASE("fas: single word takes every feature") {
  auto l = trained(Mechanism::Fas, "a b\tA,B;C\nb\tC\n");
  auto t = l.align(pair_of("a\tA,B;C,D"));
  CHECK(t.mechanism == Mechanism::Fas);
  CHECK(t.n_targets == 4);
  for (double v : t.strengths)
    CHECK(v == 1.0);
}

TEST_CASE("fas: equal probabilities split evenly") {
  auto l = trained(Mechanism::Fas, "");
  auto t = l.align(pair_of("x y\tA;B"));
  for (double v : t.strengths)
    CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("fas: 0.2 vs 0.1 gives 2/3 vs 1/3") {
  auto t = table_of(2, 1, {0.2, 0.1});
  normalize_over_words(t);
  CHECK(t(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(t(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  // Same ratio built from a real state: assoc chosen so p(A|w1) = 2 p(A|w2).
  MeaningState s(Smoothing{1e-5, 10});
  auto w1 = s.observe_word("w1"), w2 = s.observe_word("w2");
  auto A = s.observe_feature("A"), B = s.observe_feature("B");
  s.add_assoc(w1, A, 0.2);
  s.add_assoc(w1, B, 0.8);
  s.add_assoc(w2, A, 0.1);
  s.add_assoc(w2, B, 0.9);
  auto e = encode(s, pair_of("w1 w2\tA"));
  auto fas = align_fas(s, e);
  const double p1 = (0.2 + 1e-5) / (1.0 + 10 * 1e-5), p2 = (0.1 + 1e-5) / (1.0 + 10 * 1e-5);
  CHECK(fas(0, 0) == doctest::Approx(p1 / (p1 + p2)).epsilon(1e-12));
  CHECK(fas(1, 0) == doctest::Approx(p2 / (p1 + p2)).epsilon(1e-12));
}

TEST_CASE("no-comp: novel word against k of N features") {
  // M = {A..F}; the probe adds nothing new, so N = 6.
  auto l = trained(Mechanism::NoComp, "z\tA,B,C;D,E,F\n", 50);
  auto t = l.align(pair_of("fresh\tA,B;C,D,E,F;A"));
  CHECK(t(0, 0) == doctest::Approx(std::sqrt(2.0 / 6)).epsilon(1e-12));
  CHECK(t(0, 1) == doctest::Approx(std::sqrt(4.0 / 6)).epsilon(1e-12));
  CHECK(t(0, 2) == doctest::Approx(std::sqrt(1.0 / 6)).epsilon(1e-12));
}

TEST_CASE("no-comp: parallel rep scores 1") {
  MeaningState s(Smoothing{1e-5, 4});
  auto w = s.observe_word("w");
  for (auto f : {"A", "B", "C", "D"})
    s.observe_feature(f);
  // Equal assoc on every feature of r and on nothing else would leave lambda
  // mass elsewhere; make r the whole universe instead.
  for (SymbolId f = 0; f < 4; ++f)
    s.add_assoc(w, f, 1.0);
  auto t = align_no_comp(s, encode(s, pair_of("w\tA,B,C,D")));
  CHECK(t(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("no-comp: entries are independent of other referents") {
  auto l = trained(Mechanism::NoComp, "a b\tA,B;C,D\na c\tA,B;E\nb\tC,D,E\n");
  auto before = l.align(pair_of("a b c\tA,B;C;D,E"));
  auto after = l.align(pair_of("a b c\tA,B;C,E,D;D,E"));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(before(i, 0) == after(i, 0));
    CHECK(before(i, 2) == after(i, 2));
    CHECK(before(i, 1) != after(i, 1));
  }
}

TEST_CASE("ref-comp: single referent, 0.6/0.3, novel word uniform") {
  auto l = trained(Mechanism::RefComp, "a b\tA,B;C\n");
  auto t = l.align(pair_of("a b\tA,B,C"));
  CHECK(t(0, 0) == 1.0);
  CHECK(t(1, 0) == 1.0);

  auto h = table_of(1, 2, {0.6, 0.3});
  normalize_over_targets(h);
  CHECK(h(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(h(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  auto u = l.align(pair_of("novel\tA,B;C,D;E,F"));
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(u(0, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("word-comp: single word, worked cosine example") {
  auto l = trained(Mechanism::WordComp, "a\tA\n");
  auto t = l.align(pair_of("a\tB,C;A"));
  CHECK(t(0, 0) == 1.0);
  CHECK(t(0, 1) == 1.0);

  // w1 uniform over 4 features, w2 = (0.5, 0.5, 0, 0), r = {f1, f2}.
  std::vector<double> w1(4, 0.25), w2{0.5, 0.5, 0, 0}, r{1, 1, 0, 0};
  auto s1 = similarity(w1, r), s2 = similarity(w2, r);
  CHECK(s1 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(s2 == doctest::Approx(1.0).epsilon(1e-12));
  auto h = table_of(2, 1, {s1, s2});
  normalize_over_words(h);
  CHECK(h(1, 0) == doctest::Approx(1.0 / (1.0 + std::sqrt(0.5))).epsilon(1e-12));
  CHECK(h(0, 0) == doctest::Approx(std::sqrt(0.5) / (1.0 + std::sqrt(0.5))).epsilon(1e-12));
  CHECK(std::abs(h(1, 0) - 0.5858) < 1e-4);
  CHECK(std::abs(h(0, 0) - 0.4142) < 1e-4);
}

TEST_CASE("word-comp: novel word wins the novel referent") {
  std::string text;
  for (int i = 0; i < 20; ++i)
    text += "dog ball\tANIMAL,DOG,FURRY;ROUND,TOY,BALL\ndog\tANIMAL,DOG,FURRY\nball\tROUND,TOY,BALL\n";
  auto l = trained(Mechanism::WordComp, text);
  auto t = l.align(pair_of("dog ball dax\tANIMAL,DOG,FURRY;ROUND,TOY,BALL;SHINY,METAL,TOOL"));
  CHECK(t(2, 2) > t(0, 2));
  CHECK(t(2, 2) > t(1, 2));

  auto r = trained(Mechanism::RefComp, text);
  auto rt = r.align(pair_of("dog ball dax\tANIMAL,DOG,FURRY;ROUND,TOY,BALL;SHINY,METAL,TOOL"));
  CHECK(rt(2, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("normalization sums hold for every mechanism on random states") {
  Rng rng(77);
  for (auto m : kAllMechanisms)
    for (auto kind : {Similarity::Cosine, Similarity::Dot}) {
      LearnerConfig c;
      c.mechanism = m;
      c.beta = 300;
      c.similarity = kind;
      Learner l(c);
      for (const auto& p : testing::random_corpus(rng, 60, 8, 12, 5, 4)) {
        auto t = l.align(p);
        CHECK(t.mechanism == m);
        check_sums(t);
        l.process(p);
      }
    }
}

TEST_CASE("competitive normalization is scale invariant per group") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t nw = rng.between(1, 5), nt = rng.between(1, 5);
    std::vector<double> raw(nw * nt);
    for (auto& v : raw)
      v = rng.uniform() + 1e-3;
    const double c = 0.01 + 100 * rng.uniform();

    auto by_target = table_of(nw, nt, raw);
    normalize_over_words(by_target);
    auto scaled = raw;
    const std::size_t j = rng.below(nt);
    for (std::size_t i = 0; i < nw; ++i)
      scaled[i * nt + j] *= c;
    auto t2 = table_of(nw, nt, scaled);
    normalize_over_words(t2);
    for (std::size_t k = 0; k < raw.size(); ++k)
      CHECK(t2.strengths[k] == doctest::Approx(by_target.strengths[k]).epsilon(1e-12));

    auto by_word = table_of(nw, nt, raw);
    normalize_over_targets(by_word);
    scaled = raw;
    const std::size_t i = rng.below(nw);
    for (std::size_t k = 0; k < nt; ++k)
      scaled[i * nt + k] *= c;
    auto t3 = table_of(nw, nt, scaled);
    normalize_over_targets(t3);
    for (std::size_t k = 0; k < raw.size(); ++k)
      CHECK(t3.strengths[k] == doctest::Approx(by_word.strengths[k]).epsilon(1e-12));
  }
}

TEST_CASE("raising one word's raw score raises it and lowers its competitors") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t nw = rng.between(2, 5), nt = rng.between(1, 4);
    std::vector<double> raw(nw * nt);
    for (auto& v : raw)
      v = rng.uniform() + 1e-3;
    auto base = table_of(nw, nt, raw);
    normalize_over_words(base);
    const std::size_t w = rng.below(nw), t = rng.below(nt);
    raw[w * nt + t] *= 1.0 + rng.uniform() + 1e-3;
    auto bumped = table_of(nw, nt, raw);
    normalize_over_words(bumped);
    CHECK(bumped(w, t) > base(w, t));
    for (std::size_t i = 0; i < nw; ++i)
      if (i != w)
        CHECK(bumped(i, t) < base(i, t));
  }
}

TEST_CASE("uniform states give uniform competition") {
  auto l = trained(Mechanism::WordComp, "a\tA\n");
  auto t = l.align(pair_of("p q r s\tA,B;C;D,E,F"));
  for (double v : t.strengths)
    CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

  auto eq = table_of(2, 3, {0.4, 0.4, 0.4, 0.2, 0.2, 0.2});
  normalize_over_targets(eq);
  for (double v : eq.strengths)
    CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("all-zero groups fall back to uniform") {
  auto t = table_of(2, 2, {0.0, 0.5, 0.0, 0.5});
  normalize_over_words(t);
  CHECK(t(0, 0) == 0.5);
  CHECK(t(1, 0) == 0.5);
  auto u = table_of(2, 3, {0, 0, 0, 1, 0, 0});
  normalize_over_targets(u);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(u(0, j) == doctest::Approx(1.0 / 3.0));
  CHECK(u(1, 0) == 1.0);
}

TEST_CASE("alignment never mutates the learner") {
  auto l = trained(Mechanism::WordComp, "a b\tA;B\n");
  std::ostringstream before, after;
  l.save(before);
  (void)l.align(pair_of("a b c\tA;B;C"));
  l.save(after);
  CHECK(before.str() == after.str());
}
