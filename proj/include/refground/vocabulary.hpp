// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace refground {

/// A sequence of lowercase word tokens (a referring expression).
struct Expression {
  std::vector<std::string> tokens;

  Expression() = default;
  explicit Expression(std::vector<std::string> t) : tokens(std::move(t)) {}
  Expression(std::initializer_list<std::string> t) : tokens(t) {}

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }
  std::string text() const;

  friend bool operator==(const Expression&, const Expression&) = default;
};

/// Closed token set with dense indices. Always holds `<eos>` and `<unk>` exactly once.
class Vocabulary {
 public:
  static constexpr std::string_view kEos = "<eos>";
  static constexpr std::string_view kUnk = "<unk>";

  explicit Vocabulary(std::vector<std::string> tokens);

  /// One token per line; blank lines and `#` comments are skipped.
  static Vocabulary load(std::istream& in);
  static Vocabulary load_file(const std::string& path);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  bool contains(std::string_view t) const;
  /// Index of `t`, or of `<unk>` when absent.
  std::size_t index(std::string_view t) const;
  std::size_t eos() const { return eos_; }
  std::size_t unk() const { return unk_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t eos_ = 0;
  std::size_t unk_ = 0;
};

inline constexpr std::size_t kMaxSequenceLength = 15;

/// Row-stochastic matrix: one row per generated word, one column per vocabulary entry.
class ExpressionDistribution {
 public:
  explicit ExpressionDistribution(Eigen::MatrixXd probs);

  Eigen::Index steps() const { return probs_.rows(); }
  Eigen::Index vocab_size() const { return probs_.cols(); }
  const Eigen::MatrixXd& probs() const { return probs_; }
  double operator()(Eigen::Index step, Eigen::Index token) const { return probs_(step, token); }

 private:
  Eigen::MatrixXd probs_;
};

/// Per-step argmax (lowest index wins ties), truncated at the first `<eos>`.
Expression decode(const ExpressionDistribution& dist, const Vocabulary& vocab);

}  // namespace refground
