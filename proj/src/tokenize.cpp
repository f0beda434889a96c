// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <cmath>

#include "refground/error.hpp"
#include "refground/scoring.hpp"

namespace refground {

Expression tokenize(std::string_view text) {
  Expression out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.tokens.push_back(std::move(current));
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      continue;
    } else {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    }
  }
  flush();
  if (out.empty()) throw Error("expression is empty after normalization");
  return out;
}

double cross_entropy_loss(const Expression& expr, const ExpressionDistribution& dist, const Vocabulary& vocab) {
  if (static_cast<std::size_t>(dist.vocab_size()) != vocab.size())
    throw Error("distribution width does not match the vocabulary");
  const Eigen::Index steps = dist.steps();
  double total = 0.0;
  for (Eigen::Index t = 0; t < steps; ++t) {
    const auto pos = static_cast<std::size_t>(t);
    const std::size_t k = pos < expr.size() ? vocab.index(expr[pos]) : vocab.eos();
    total -= std::log(std::max(dist(t, static_cast<Eigen::Index>(k)), kProbabilityFloor));
  }
  return total / static_cast<double>(steps);
}

}  // namespace refground
