// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "refground/vocabulary.hpp"

namespace refground {

/// Lowercases, splits on whitespace and strips ASCII punctuation.
/// Throws `Error` when nothing is left.
Expression tokenize(std::string_view text);

inline constexpr double kProbabilityFloor = 1e-12;

/// Average cross-entropy (nats) of `expr` under `dist`. The expression is
/// padded with `<eos>` (or truncated) to the distribution's length; words
/// outside the vocabulary score as `<unk>`.
double cross_entropy_loss(const Expression& expr, const ExpressionDistribution& dist, const Vocabulary& vocab);

struct ScorePair {
  double cel = 0.0;     // lower is better
  double meteor = 0.0;  // higher is better

  friend bool operator==(const ScorePair&, const ScorePair&) = default;
};

/// Unordered token pairs treated as interchangeable by the synonym matcher.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;
  explicit SynonymLexicon(const std::vector<std::pair<std::string, std::string>>& pairs);

  /// One "token_a token_b" pair per line; `#` starts a comment.
  static SynonymLexicon load(std::istream& in);
  static SynonymLexicon load_file(const std::string& path);
  static const SynonymLexicon& builtin();

  bool related(std::string_view a, std::string_view b) const;
  std::size_t size() const { return pairs_.size(); }
  const std::set<std::pair<std::string, std::string>>& pairs() const { return pairs_; }
  /// Any synonym of `token`, or empty.
  std::vector<std::string> synonyms_of(std::string_view token) const;

 private:
  std::set<std::pair<std::string, std::string>> pairs_;  // stored with first < second
};

enum class Matcher { exact, synonym };

struct MeteorConfig {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
  std::vector<Matcher> matchers = {Matcher::exact, Matcher::synonym};
  SynonymLexicon synonyms = SynonymLexicon::builtin();

  static MeteorConfig exact_only() {
    MeteorConfig c;
    c.matchers = {Matcher::exact};
    return c;
  }
  void validate() const;
};

/// A unigram alignment: which candidate position maps to which reference position.
struct Alignment {
  int matches = 0;
  int chunks = 0;
  int exact_matches = 0;
  std::vector<std::pair<int, int>> links;  // (candidate index, reference index), candidate-ordered
};

/// Maximum-cardinality alignment; among those, fewest chunks; then most exact
/// matches. Exact search (memoised over candidate position, used reference
/// positions and the previous link).
Alignment align(const Expression& candidate, const Expression& reference, const MeteorConfig& cfg);

/// Score from an alignment: F-mean of unigram precision and recall times (1 - fragmentation penalty).
double meteor_score(int matches, int chunks, std::size_t candidate_len, std::size_t reference_len,
                    const MeteorConfig& cfg);

double meteor(const Expression& candidate, const Expression& reference, const MeteorConfig& cfg = {});

}  // namespace refground
