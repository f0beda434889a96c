// SPDX-License-Identifier: Apache-2.0
// Independent reference implementations used to cross-check the engine.
#pragma once

#include <algorithm>
#include <limits>
#include <random>
#include <tuple>
#include <vector>

#include <Eigen/Core>

#include "refground/scoring.hpp"

namespace refground::testing_oracle {

/// Short sentences over a small pool with repeats and synonym pairs.
template <class Rng>
Expression random_sentence(Rng& rng, std::size_t max_len) {
  static const std::vector<std::string> pool = {"the", "red", "cup", "mug", "ball", "sphere", "on",
                                                "left", "big",  "large", "of", "box", "carton"};
  const std::size_t n = 1 + rng() % max_len;
  Expression e;
  for (std::size_t i = 0; i < n; ++i) e.tokens.push_back(pool[rng() % pool.size()]);
  return e;
}

struct BruteAlignment {
  int matches = 0;
  int chunks = 0;
  int exact_matches = 0;
};

inline int count_chunks(const std::vector<std::pair<int, int>>& links) {
  int chunks = 0;
  for (std::size_t k = 0; k < links.size(); ++k) {
    const bool continues = k > 0 && links[k].first == links[k - 1].first + 1 && links[k].second == links[k - 1].second + 1;
    if (!continues) ++chunks;
  }
  return chunks;
}

/// Enumerates every injective matching of candidate to reference positions.
/// Best = most matches, then fewest chunks, then most exact matches.
inline BruteAlignment brute_force_alignment(const Expression& cand, const Expression& ref, const MeteorConfig& cfg) {
  const bool synonyms = std::find(cfg.matchers.begin(), cfg.matchers.end(), Matcher::synonym) != cfg.matchers.end();
  BruteAlignment best{0, 0, 0};
  std::vector<std::pair<int, int>> links;
  std::vector<bool> used(ref.size(), false);
  auto better = [](const BruteAlignment& a, const BruteAlignment& b) {
    return std::make_tuple(a.matches, -a.chunks, a.exact_matches) > std::make_tuple(b.matches, -b.chunks, b.exact_matches);
  };
  auto rec = [&](auto&& self, std::size_t i, int exact) -> void {
    if (i == cand.size()) {
      const BruteAlignment here{static_cast<int>(links.size()), count_chunks(links), exact};
      if (better(here, best)) best = here;
      return;
    }
    self(self, i + 1, exact);
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (used[j]) continue;
      const bool ex = cand[i] == ref[j];
      if (!ex && !(synonyms && cfg.synonyms.related(cand[i], ref[j]))) continue;
      used[j] = true;
      links.emplace_back(static_cast<int>(i), static_cast<int>(j));
      self(self, i + 1, exact + (ex ? 1 : 0));
      links.pop_back();
      used[j] = false;
    }
  };
  rec(rec, 0, 0);
  return best;
}

/// Minimum SSE over all 2-partitions with both sides non-empty.
inline double exhaustive_min_sse(const Eigen::MatrixX2d& pts, std::vector<int>* best_labels = nullptr) {
  const int n = static_cast<int>(pts.rows());
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    if (mask & 1u) continue;  // fix point 0 in cluster 0 to skip mirrored labellings
    Eigen::Vector2d sum[2] = {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
    int cnt[2] = {0, 0};
    for (int i = 0; i < n; ++i) {
      const int c = (mask >> i) & 1u;
      sum[c] += pts.row(i).transpose();
      ++cnt[c];
    }
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
      const int c = (mask >> i) & 1u;
      sse += (pts.row(i).transpose() - sum[c] / cnt[c]).squaredNorm();
    }
    if (sse < best) {
      best = sse;
      if (best_labels) {
        best_labels->assign(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < n; ++i) (*best_labels)[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
      }
    }
  }
  return best;
}

}  // namespace refground::testing_oracle
