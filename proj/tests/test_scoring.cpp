// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "refground/error.hpp"
#include "refground/generator.hpp"
#include "refground/scoring.hpp"

using namespace refground;

TEST_CASE("tokenize") {
  CHECK(tokenize("The red Cup!") == Expression{"the", "red", "cup"});
  CHECK(tokenize("cup, on the left") == Expression{"cup", "on", "the", "left"});
  CHECK(tokenize("  a\tb\n") == Expression{"a", "b"});
  CHECK(tokenize("saucer") == Expression{"saucer"});
  CHECK_THROWS_AS(tokenize("  "), Error);
  CHECK_THROWS_AS(tokenize("?! ..."), Error);
}

TEST_CASE("cross-entropy examples") {
  const Vocabulary v({"<eos>", "<unk>", "the", "red", "cup", "ball", "blue", "box", "on", "left"});
  REQUIRE(v.size() == 10);

  Eigen::MatrixXd one_hot = Eigen::MatrixXd::Zero(4, 10);
  one_hot(0, 2) = one_hot(1, 3) = one_hot(2, 4) = one_hot(3, 0) = 1.0;
  CHECK(cross_entropy_loss({"the", "red", "cup"}, ExpressionDistribution(one_hot), v) == 0.0);

  const ExpressionDistribution uniform(Eigen::MatrixXd::Constant(5, 10, 0.1));
  CHECK(std::abs(cross_entropy_loss({"the", "blue", "saucer"}, uniform, v) - std::log(10.0)) < 1e-9);
  CHECK(std::abs(cross_entropy_loss({"the", "blue", "saucer"}, uniform, v) - 2.302585) < 1e-6);

  Eigen::MatrixXd two = Eigen::MatrixXd::Constant(2, 10, 0.0);
  two.row(0).setConstant(0.2 / 9);
  two(0, 3) = 0.8;
  two.row(1).setConstant(0.5 / 9);
  two(1, 4) = 0.5;
  const double expected = (-std::log(0.8) - std::log(0.5)) / 2.0;
  CHECK(std::abs(cross_entropy_loss({"red", "cup"}, ExpressionDistribution(two), v) - expected) < 1e-9);
  CHECK(std::abs(expected - 0.458145) < 1e-6);
}

TEST_CASE("cross-entropy pads with eos, truncates, floors and maps unknown words to unk") {
  const Vocabulary v({"<eos>", "<unk>", "a", "b"});
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3, 4);
  p(0, 2) = 1.0;
  p(1, 0) = 1.0;
  p(2, 0) = 1.0;
  const ExpressionDistribution d(p);
  CHECK(cross_entropy_loss({"a"}, d, v) == 0.0);
  const double floored = -std::log(kProbabilityFloor);
  CHECK(cross_entropy_loss({"a", "b"}, d, v) == doctest::Approx(floored / 3));
  // Truncated to three steps: the fourth token never counts.
  CHECK(cross_entropy_loss({"a", "<eos>", "<eos>", "b"}, d, v) == 0.0);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(1, 4);
  u(0, 1) = 1.0;
  CHECK(cross_entropy_loss({"zebra"}, ExpressionDistribution(u), v) == 0.0);
}

TEST_CASE("METEOR examples") {
  const auto cfg = MeteorConfig::exact_only();
  CHECK(meteor({"a", "b"}, {"c", "d"}, cfg) == 0.0);
  CHECK(std::abs(meteor({"the", "red", "cup"}, {"the", "red", "cup"}) - (1.0 - 0.5 / 27.0)) < 1e-9);
  CHECK(std::abs(meteor({"the", "red", "cup"}, {"the", "red", "cup"}) - 0.981481) < 1e-6);

  const Alignment al = align({"the", "green", "glass"}, {"the", "green", "cup"}, cfg);
  CHECK(al.matches == 2);
  CHECK(al.chunks == 1);
  CHECK(std::abs(meteor({"the", "green", "glass"}, {"the", "green", "cup"}, cfg) - 0.625) < 1e-9);

  // Two matches in two chunks: F = 2/3, penalty 0.5.
  CHECK(std::abs(meteor({"the", "red", "cup"}, {"the", "blue", "cup"}, cfg) - 1.0 / 3.0) < 1e-9);
  CHECK_THROWS_AS(meteor({}, {"a"}), Error);
}

TEST_CASE("METEOR identity formula and bounds") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const Expression a = testing_oracle::random_sentence(rng, 6);
    const Expression b = testing_oracle::random_sentence(rng, 6);
    const double s = meteor(a, b);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    const double m = static_cast<double>(a.size());
    CHECK(std::abs(meteor(a, a, MeteorConfig::exact_only()) - (1.0 - 0.5 * std::pow(1.0 / m, 3.0))) < 1e-12);
  }
}

TEST_CASE("the synonym matcher never lowers the score") {
  std::mt19937_64 rng(23);
  const MeteorConfig exact = MeteorConfig::exact_only();
  const MeteorConfig both;
  for (int i = 0; i < 500; ++i) {
    const Expression a = testing_oracle::random_sentence(rng, 6);
    const Expression b = testing_oracle::random_sentence(rng, 6);
    CHECK(align(a, b, both).matches >= align(a, b, exact).matches);
    CHECK(meteor(a, b, both) >= meteor(a, b, exact) - 1e-12);
  }
  CHECK(meteor({"the", "red", "mug"}, {"the", "red", "cup"}) > meteor({"the", "red", "mug"}, {"the", "red", "cup"}, exact));
}

TEST_CASE("alignment agrees with brute-force enumeration of injective matchings") {
  std::mt19937_64 rng(29);
  const MeteorConfig cfg;
  for (int i = 0; i < 300; ++i) {
    const Expression a = testing_oracle::random_sentence(rng, 6);
    const Expression b = testing_oracle::random_sentence(rng, 6);
    const auto oracle = testing_oracle::brute_force_alignment(a, b, cfg);
    const Alignment al = align(a, b, cfg);
    CHECK(al.matches == oracle.matches);
    CHECK(al.chunks == oracle.chunks);
    CHECK(al.exact_matches == oracle.exact_matches);
    CHECK(static_cast<int>(al.links.size()) == al.matches);
  }
}

TEST_CASE("alignment prefers fewer chunks among maximum matchings") {
  // "the" can align to either occurrence; the contiguous choice gives one chunk.
  const Alignment al = align({"the", "cup"}, {"the", "red", "the", "cup"}, MeteorConfig::exact_only());
  CHECK(al.matches == 2);
  CHECK(al.chunks == 1);
}

TEST_CASE("meteor config validation") {
  MeteorConfig c;
  c.alpha = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = MeteorConfig{};
  c.beta = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = MeteorConfig{};
  c.gamma = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = MeteorConfig{};
  c.matchers.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("synonym lexicon") {
  std::istringstream in("# pairs\ncup mug  # drinkware\nbox crate\n");
  const SynonymLexicon lex = SynonymLexicon::load(in);
  CHECK(lex.size() == 2);
  CHECK(lex.related("mug", "cup"));
  CHECK(lex.related("cup", "mug"));
  CHECK_FALSE(lex.related("cup", "box"));
  CHECK(lex.synonyms_of("crate") == std::vector<std::string>{"box"});
  const SynonymLexicon file = SynonymLexicon::load_file(testing::data_path("synonyms.txt"));
  CHECK(file.pairs() == SynonymLexicon::builtin().pairs());
}
