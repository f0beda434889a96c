// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "refground/scoring.hpp"

namespace refground {

struct KMeansOptions {
  int restarts = 20;
  std::uint64_t seed = 0x2d6d65616e73ULL;
  int max_iterations = 100;
};

/// A 2-way partition of points; `labels[i]` is 0 or 1.
struct Partition {
  std::vector<int> labels;
  double sse = 0.0;
};

/// Sum of squared distances to the two cluster means.
double partition_sse(const Eigen::Ref<const Eigen::MatrixX2d>& points, std::span<const int> labels);

/// Lloyd's 2-means. The first run is seeded at the points with minimum and
/// maximum first coordinate; each restart seeds from a shuffled order. The
/// lowest-SSE partition wins (earliest on ties).
Partition two_means(const Eigen::Ref<const Eigen::MatrixX2d>& points, const KMeansOptions& opts = {});

/// Min-max normalisation per column (CEL, METEOR). A column with range <= 1e-9 maps to 0.
Eigen::MatrixX2d normalized_features(std::span<const ScorePair> scores);

/// `true` for members of the relevant cluster: the one with lower mean
/// normalised CEL, ties broken by higher mean normalised METEOR. Singletons
/// and all-identical inputs are entirely relevant.
std::vector<bool> relevant_mask(std::span<const ScorePair> scores, const KMeansOptions& opts = {});

/// Splits scored items (anything with a `scores` member) into relevant and irrelevant.
template <class T>
std::pair<std::vector<T>, std::vector<T>> cluster_relevant(std::span<const T> items, const KMeansOptions& opts = {}) {
  std::vector<ScorePair> scores;
  scores.reserve(items.size());
  for (const T& item : items) scores.push_back(item.scores);
  const std::vector<bool> mask = relevant_mask(scores, opts);
  std::pair<std::vector<T>, std::vector<T>> out;
  for (std::size_t i = 0; i < items.size(); ++i) (mask[i] ? out.first : out.second).push_back(items[i]);
  return out;
}

}  // namespace refground
