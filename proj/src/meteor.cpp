// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "refground/error.hpp"
#include "refground/scoring.hpp"

namespace refground {

SynonymLexicon::SynonymLexicon(const std::vector<std::pair<std::string, std::string>>& pairs) {
  for (const auto& [a, b] : pairs) {
    if (a == b) continue;
    pairs_.insert(a < b ? std::pair{a, b} : std::pair{b, a});
  }
}

SynonymLexicon SynonymLexicon::load(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;
    if (!(ls >> b) || (ls >> extra)) throw ConfigError("synonym lexicon line " + std::to_string(lineno) + ": expected two tokens");
    pairs.emplace_back(a, b);
  }
  return SynonymLexicon(pairs);
}

SynonymLexicon SynonymLexicon::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open synonym lexicon " + path);
  return load(in);
}

const SynonymLexicon& SynonymLexicon::builtin() {
  static const SynonymLexicon lex({{"cup", "mug"},
                                   {"glass", "tumbler"},
                                   {"bottle", "flask"},
                                   {"ball", "sphere"},
                                   {"box", "carton"},
                                   {"can", "tin"},
                                   {"book", "novel"},
                                   {"bowl", "dish"},
                                   {"bear", "teddy"},
                                   {"phone", "mobile"},
                                   {"remote", "controller"},
                                   {"marker", "pen"},
                                   {"jar", "pot"},
                                   {"large", "big"},
                                   {"small", "little"},
                                   {"middle", "center"}});
  return lex;
}

bool SynonymLexicon::related(std::string_view a, std::string_view b) const {
  if (a == b) return false;
  std::pair<std::string, std::string> key = a < b ? std::pair{std::string(a), std::string(b)}
                                                  : std::pair{std::string(b), std::string(a)};
  return pairs_.contains(key);
}

std::vector<std::string> SynonymLexicon::synonyms_of(std::string_view token) const {
  std::vector<std::string> out;
  for (const auto& [a, b] : pairs_) {
    if (a == token) out.push_back(b);
    else if (b == token) out.push_back(a);
  }
  return out;
}

void MeteorConfig::validate() const {
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("meteor alpha must lie in [0, 1]");
  if (!(beta > 0.0)) throw ConfigError("meteor beta must be positive");
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("meteor gamma must lie in [0, 1]");
  if (matchers.empty()) throw ConfigError("meteor needs at least one matcher");
}

namespace {

struct Value {
  int matches = 0;
  int chunks = 0;
  int exact = 0;
};

bool better(const Value& a, const Value& b) {
  if (a.matches != b.matches) return a.matches > b.matches;
  if (a.chunks != b.chunks) return a.chunks < b.chunks;
  return a.exact > b.exact;
}

struct Link {
  int ref;  // compressed reference slot
  bool exact;
};

class AlignmentSearch {
 public:
  AlignmentSearch(std::vector<std::vector<Link>> options, std::vector<int> slot_position)
      : options_(std::move(options)), slot_position_(std::move(slot_position)) {}

  Value solve(std::size_t i, std::uint64_t used, int prev) {
    if (i == options_.size()) return {};
    const Key key{i, used, prev};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second.value;

    Entry entry;
    entry.value = solve(i + 1, used, -1);
    entry.choice = -1;
    for (std::size_t o = 0; o < options_[i].size(); ++o) {
      const Link& link = options_[i][o];
      if (used & (std::uint64_t{1} << link.ref)) continue;
      Value v = solve(i + 1, used | (std::uint64_t{1} << link.ref), link.ref);
      v.matches += 1;
      v.chunks += continues(prev, link.ref) ? 0 : 1;
      v.exact += link.exact ? 1 : 0;
      if (better(v, entry.value)) {
        entry.value = v;
        entry.choice = static_cast<int>(o);
      }
    }
    memo_.emplace(key, entry);
    return entry.value;
  }

  std::vector<std::pair<int, int>> links() {
    std::vector<std::pair<int, int>> out;
    std::uint64_t used = 0;
    int prev = -1;
    for (std::size_t i = 0; i < options_.size(); ++i) {
      solve(i, used, prev);
      const int choice = memo_.at(Key{i, used, prev}).choice;
      if (choice < 0) {
        prev = -1;
        continue;
      }
      const Link& link = options_[i][static_cast<std::size_t>(choice)];
      out.emplace_back(static_cast<int>(i), slot_position_[static_cast<std::size_t>(link.ref)]);
      used |= std::uint64_t{1} << link.ref;
      prev = link.ref;
    }
    return out;
  }

 private:
  struct Key {
    std::size_t i;
    std::uint64_t used;
    int prev;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return std::hash<std::uint64_t>{}(k.used * 1315423911u ^ (k.i << 8) ^ static_cast<std::size_t>(k.prev + 1));
    }
  };
  struct Entry {
    Value value;
    int choice = -1;
  };

  bool continues(int prev, int ref) const {
    return prev >= 0 && slot_position_[static_cast<std::size_t>(ref)] == slot_position_[static_cast<std::size_t>(prev)] + 1;
  }

  std::vector<std::vector<Link>> options_;
  std::vector<int> slot_position_;  // compressed slot -> reference index
  std::unordered_map<Key, Entry, KeyHash> memo_;
};

}  // namespace

Alignment align(const Expression& candidate, const Expression& reference, const MeteorConfig& cfg) {
  const bool use_exact = std::find(cfg.matchers.begin(), cfg.matchers.end(), Matcher::exact) != cfg.matchers.end();
  const bool use_synonym = std::find(cfg.matchers.begin(), cfg.matchers.end(), Matcher::synonym) != cfg.matchers.end();

  // Only reference positions that some candidate word can match get a bit in the mask.
  std::vector<int> slot_of(reference.size(), -1);
  std::vector<int> slot_position;
  std::vector<std::vector<Link>> options(candidate.size());
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    for (std::size_t j = 0; j < reference.size(); ++j) {
      const bool exact = use_exact && candidate[i] == reference[j];
      const bool syn = !exact && use_synonym && cfg.synonyms.related(candidate[i], reference[j]);
      if (!exact && !syn) continue;
      if (slot_of[j] < 0) {
        if (slot_position.size() == 64) throw Error("alignment supports at most 64 matchable reference words");
        slot_of[j] = static_cast<int>(slot_position.size());
        slot_position.push_back(static_cast<int>(j));
      }
      options[i].push_back({slot_of[j], exact});
    }
  }

  AlignmentSearch search(std::move(options), std::move(slot_position));
  const Value best = search.solve(0, 0, -1);
  Alignment out;
  out.matches = best.matches;
  out.chunks = best.chunks;
  out.exact_matches = best.exact;
  out.links = search.links();
  return out;
}

double meteor_score(int matches, int chunks, std::size_t candidate_len, std::size_t reference_len,
                    const MeteorConfig& cfg) {
  if (matches == 0) return 0.0;
  const double m = matches;
  const double precision = m / static_cast<double>(candidate_len);
  const double recall = m / static_cast<double>(reference_len);
  const double fmean = precision * recall / (cfg.alpha * precision + (1.0 - cfg.alpha) * recall);
  const double penalty = cfg.gamma * std::pow(static_cast<double>(chunks) / m, cfg.beta);
  return fmean * (1.0 - penalty);
}

double meteor(const Expression& candidate, const Expression& reference, const MeteorConfig& cfg) {
  if (candidate.empty() || reference.empty()) throw Error("meteor needs two non-empty expressions");
  const Alignment a = align(candidate, reference, cfg);
  return meteor_score(a.matches, a.chunks, candidate.size(), reference.size(), cfg);
}

}  // namespace refground
