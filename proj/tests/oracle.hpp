#pragma once

// Brute-force re-derivation of the learning model, kept deliberately naive:
// string-keyed maps, dense vectors over the sorted feature set, every sum
// recomputed from scratch, and no code shared with the library beyond the
// input pair type.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "xsl/corpus.hpp"

namespace oracle {

enum class Mech { Fas, NoComp, RefComp, WordComp };

class Model {
public:
  Model(Mech mech, double lambda, double beta, bool dot = false)
      : mech_(mech), lambda_(lambda), beta_(beta), dot_(dot) {}

  double assoc(const std::string& w, const std::string& f) const {
    auto row = assoc_.find(w);
    if (row == assoc_.end())
      return 0.0;
    auto it = row->second.find(f);
    return it == row->second.end() ? 0.0 : it->second;
  }

  double prob(const std::string& w, const std::string& f) const {
    double total = 0.0;
    for (const auto& g : features_)
      total += assoc(w, g);
    return (assoc(w, f) + lambda_) / (total + beta_ * lambda_);
  }

  // Dense rep over the current feature set, in sorted order.
  std::vector<double> rep(const std::string& w) const {
    std::vector<double> v;
    for (const auto& f : features_)
      v.push_back(prob(w, f));
    return v;
  }

  double sim(const std::string& w, const xsl::Referent& r) const {
    auto v = rep(w);
    double dot = 0.0, vv = 0.0, rr = 0.0;
    std::size_t i = 0;
    for (const auto& f : features_) {
      double ind = r.contains(f) ? 1.0 : 0.0;
      dot += v[i] * ind;
      vv += v[i] * v[i];
      rr += ind * ind;
      ++i;
    }
    if (dot_)
      return dot;
    return dot / (std::sqrt(vv) * std::sqrt(rr));
  }

  // Alignment strengths keyed by (word, target). Targets are referent
  // positions for the referent mechanisms and feature names for FAS.
  std::map<std::pair<std::string, std::string>, double> align(const xsl::InputPair& pair) const {
    std::map<std::pair<std::string, std::string>, double> a;
    const auto& U = pair.utterance;
    const auto& S = pair.scene;
    if (mech_ == Mech::Fas) {
      std::set<std::string> flat;
      for (const auto& r : S)
        flat.insert(r.features.begin(), r.features.end());
      for (const auto& f : flat) {
        double denom = 0.0;
        for (const auto& w : U)
          denom += prob(w, f);
        for (const auto& w : U)
          a[{w, f}] = prob(w, f) / denom;
      }
      return a;
    }
    std::vector<std::vector<double>> s(U.size(), std::vector<double>(S.size()));
    for (std::size_t i = 0; i < U.size(); ++i)
      for (std::size_t j = 0; j < S.size(); ++j)
        s[i][j] = sim(U[i], S[j]);
    for (std::size_t i = 0; i < U.size(); ++i)
      for (std::size_t j = 0; j < S.size(); ++j) {
        double v = s[i][j];
        if (mech_ == Mech::RefComp) {
          double d = 0.0;
          for (std::size_t k = 0; k < S.size(); ++k)
            d += s[i][k];
          v = d > 0 ? v / d : 1.0 / S.size();
        } else if (mech_ == Mech::WordComp) {
          double d = 0.0;
          for (std::size_t k = 0; k < U.size(); ++k)
            d += s[k][j];
          v = d > 0 ? v / d : 1.0 / U.size();
        }
        a[{U[i], std::to_string(j)}] = v;
      }
    return a;
  }

  void step(const xsl::InputPair& pair) {
    for (const auto& r : pair.scene)
      features_.insert(r.features.begin(), r.features.end());
    for (const auto& w : pair.utterance)
      words_.insert(w);
    auto a = align(pair);

    std::map<std::pair<std::string, std::string>, double> delta;
    for (const auto& w : pair.utterance) {
      if (mech_ == Mech::Fas) {
        for (const auto& r : pair.scene)
          for (const auto& f : r.features)
            delta[{w, f}] = a.at({w, f});
        continue;
      }
      for (std::size_t j = 0; j < pair.scene.size(); ++j)
        for (const auto& f : pair.scene[j].features) {
          double v = a.at({w, std::to_string(j)});
          auto [it, fresh] = delta.emplace(std::make_pair(w, f), v);
          if (!fresh && v > it->second)
            it->second = v;
        }
    }
    for (const auto& [key, v] : delta)
      assoc_[key.first][key.second] += v;
    ++t_;
  }

  const std::set<std::string>& features() const { return features_; }
  const std::set<std::string>& words() const { return words_; }
  int time() const { return t_; }

private:
  Mech mech_;
  double lambda_, beta_;
  bool dot_;
  std::map<std::string, std::map<std::string, double>> assoc_;
  std::set<std::string> features_, words_;
  int t_ = 0;
};

// Acquisition score: cosine of p(.|w) against the gold indicator over the
// observed features plus the gold ones.
inline double acq(const Model& m, const std::string& w, const xsl::Referent& gold, double lambda,
                  double beta) {
  std::set<std::string> universe = m.features();
  universe.insert(gold.features.begin(), gold.features.end());
  double total = 0.0;
  for (const auto& f : m.features())
    total += m.assoc(w, f);
  double dot = 0.0, vv = 0.0, gg = 0.0;
  for (const auto& f : universe) {
    double p = (m.assoc(w, f) + lambda) / (total + beta * lambda);
    double g = gold.contains(f) ? 1.0 : 0.0;
    dot += p * g;
    vv += p * p;
    gg += g;
  }
  return dot / (std::sqrt(vv) * std::sqrt(gg));
}

} // namespace oracle
