// SPDX-License-Identifier: Apache-2.0
#include "refground/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "refground/error.hpp"
#include "refground/hash.hpp"

namespace refground {

double partition_sse(const Eigen::Ref<const Eigen::MatrixX2d>& points, std::span<const int> labels) {
  double sse = 0.0;
  for (int c = 0; c < 2; ++c) {
    Eigen::RowVector2d sum = Eigen::RowVector2d::Zero();
    int count = 0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) {
        sum += points.row(i);
        ++count;
      }
    }
    if (count == 0) continue;
    const Eigen::RowVector2d mean = sum / count;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) sse += (points.row(i) - mean).squaredNorm();
    }
  }
  return sse;
}

namespace {

Partition lloyd(const Eigen::Ref<const Eigen::MatrixX2d>& points, Eigen::Index seed_a, Eigen::Index seed_b,
                int max_iterations) {
  const Eigen::Index n = points.rows();
  Eigen::Matrix2d centroids;
  centroids.row(0) = points.row(seed_a);
  centroids.row(1) = points.row(seed_b);
  std::vector<int> labels(static_cast<std::size_t>(n), -1);

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d0 = (points.row(i) - centroids.row(0)).squaredNorm();
      const double d1 = (points.row(i) - centroids.row(1)).squaredNorm();
      const int label = d1 < d0 ? 1 : 0;
      if (labels[static_cast<std::size_t>(i)] != label) {
        labels[static_cast<std::size_t>(i)] = label;
        changed = true;
      }
    }
    for (int c = 0; c < 2; ++c) {
      if (std::count(labels.begin(), labels.end(), c) > 0) continue;
      // Empty cluster: take over the point farthest from the other centroid.
      Eigen::Index far = 0;
      double best = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = (points.row(i) - centroids.row(1 - c)).squaredNorm();
        if (d > best) {
          best = d;
          far = i;
        }
      }
      labels[static_cast<std::size_t>(far)] = c;
      changed = true;
    }
    for (int c = 0; c < 2; ++c) {
      Eigen::RowVector2d sum = Eigen::RowVector2d::Zero();
      int count = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] == c) {
          sum += points.row(i);
          ++count;
        }
      }
      centroids.row(c) = sum / count;
    }
    if (!changed) break;
  }
  Partition p;
  p.sse = partition_sse(points, labels);
  p.labels = std::move(labels);
  return p;
}

bool same_point(const Eigen::Ref<const Eigen::MatrixX2d>& points, Eigen::Index a, Eigen::Index b) {
  return (points.row(a) - points.row(b)).cwiseAbs().maxCoeff() <= 1e-12;
}

}  // namespace

Partition two_means(const Eigen::Ref<const Eigen::MatrixX2d>& points, const KMeansOptions& opts) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw Error("two_means needs at least one point");
  if (n == 1) return Partition{{0}, 0.0};

  Eigen::Index seed_a = 0;
  Eigen::Index seed_b = 0;
  points.col(0).minCoeff(&seed_a);
  points.col(0).maxCoeff(&seed_b);
  if (same_point(points, seed_a, seed_b)) {
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = (points.row(i) - points.row(seed_a)).squaredNorm();
      if (d > best) {
        best = d;
        seed_b = i;
      }
    }
    if (same_point(points, seed_a, seed_b)) return Partition{std::vector<int>(static_cast<std::size_t>(n), 0), 0.0};
  }
  Partition best = lloyd(points, seed_a, seed_b, opts.max_iterations);

  std::mt19937_64 rng(opts.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (int r = 0; r < opts.restarts; ++r) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    stable_shuffle(order, rng);
    const Eigen::Index a = order[0];
    auto b = std::find_if(order.begin() + 1, order.end(), [&](Eigen::Index i) { return !same_point(points, a, i); });
    if (b == order.end()) continue;
    Partition p = lloyd(points, a, *b, opts.max_iterations);
    if (p.sse < best.sse - 1e-15) best = std::move(p);
  }
  return best;
}

Eigen::MatrixX2d normalized_features(std::span<const ScorePair> scores) {
  const auto n = static_cast<Eigen::Index>(scores.size());
  Eigen::MatrixX2d f(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    f(i, 0) = scores[static_cast<std::size_t>(i)].cel;
    f(i, 1) = scores[static_cast<std::size_t>(i)].meteor;
  }
  for (int c = 0; c < 2; ++c) {
    const double lo = f.col(c).minCoeff();
    const double range = f.col(c).maxCoeff() - lo;
    if (range <= 1e-9) f.col(c).setZero();
    else f.col(c) = (f.col(c).array() - lo) / range;
  }
  return f;
}

std::vector<bool> relevant_mask(std::span<const ScorePair> scores, const KMeansOptions& opts) {
  if (scores.empty()) throw Error("cannot cluster an empty candidate list");
  const std::size_t n = scores.size();
  if (n == 1) return {true};

  const bool degenerate = std::all_of(scores.begin(), scores.end(), [&](const ScorePair& s) {
    return std::abs(s.cel - scores[0].cel) <= 1e-9 && std::abs(s.meteor - scores[0].meteor) <= 1e-9;
  });
  if (degenerate) return std::vector<bool>(n, true);

  const Eigen::MatrixX2d f = normalized_features(scores);

  const Partition p = two_means(f, opts);
  Eigen::Matrix2d mean = Eigen::Matrix2d::Zero();
  Eigen::Vector2d count = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mean.row(p.labels[i]) += f.row(static_cast<Eigen::Index>(i));
    count[p.labels[i]] += 1.0;
  }
  for (int c = 0; c < 2; ++c) {
    if (count[c] > 0) mean.row(c) /= count[c];
  }
  int relevant = 0;
  if (count[1] > 0) {
    const double dcel = mean(1, 0) - mean(0, 0);
    if (dcel < -1e-12 || (std::abs(dcel) <= 1e-12 && mean(1, 1) > mean(0, 1))) relevant = 1;
  }
  std::vector<bool> mask(n);
  for (std::size_t i = 0; i < n; ++i) mask[i] = p.labels[i] == relevant;
  return mask;
}

}  // namespace refground
