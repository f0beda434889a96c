// SPDX-License-Identifier: Apache-2.0
#include "refground/vocabulary.hpp"

#include <cmath>
#include <fstream>
#include <istream>

#include "refground/error.hpp"

namespace refground {

std::string Expression::text() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  bool has_eos = false;
  bool has_unk = false;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const std::string& t = tokens_[i];
    if (t.empty()) throw ConfigError("vocabulary: empty token at index " + std::to_string(i));
    if (!index_.emplace(t, i).second) throw ConfigError("vocabulary: duplicate token '" + t + "'");
    if (t == kEos) {
      eos_ = i;
      has_eos = true;
    } else if (t == kUnk) {
      unk_ = i;
      has_unk = true;
    }
  }
  if (!has_eos || !has_unk) throw ConfigError("vocabulary must contain <eos> and <unk>");
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    tokens.push_back(line.substr(start));
  }
  return Vocabulary(std::move(tokens));
}

Vocabulary Vocabulary::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open vocabulary file " + path);
  return load(in);
}

bool Vocabulary::contains(std::string_view t) const { return index_.contains(std::string(t)); }

std::size_t Vocabulary::index(std::string_view t) const {
  auto it = index_.find(std::string(t));
  return it == index_.end() ? unk_ : it->second;
}

ExpressionDistribution::ExpressionDistribution(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.rows() == 0) throw Error("expression distribution must have at least one step");
  if (static_cast<std::size_t>(probs_.rows()) > kMaxSequenceLength)
    throw Error("expression distribution longer than " + std::to_string(kMaxSequenceLength) + " steps");
  if ((probs_.array() < 0.0).any()) throw Error("expression distribution has negative entries");
  for (Eigen::Index i = 0; i < probs_.rows(); ++i) {
    if (std::abs(probs_.row(i).sum() - 1.0) > 1e-9)
      throw Error("expression distribution step " + std::to_string(i) + " does not sum to 1");
  }
}

Expression decode(const ExpressionDistribution& dist, const Vocabulary& vocab) {
  Expression out;
  const auto& p = dist.probs();
  for (Eigen::Index s = 0; s < p.rows(); ++s) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < p.cols(); ++k) {
      if (p(s, k) > p(s, best)) best = k;
    }
    if (static_cast<std::size_t>(best) == vocab.eos()) break;
    out.tokens.push_back(vocab.token(static_cast<std::size_t>(best)));
  }
  return out;
}

}  // namespace refground
