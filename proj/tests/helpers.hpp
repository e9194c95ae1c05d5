#pragma once

#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lcv/abstraction.hpp"
#include "lcv/core.hpp"

namespace lcv::test {

inline Alphabet ys(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("y" + std::to_string(i));
  return Alphabet(names);
}

/// "y1 y2 y3" -> ids.
inline std::vector<SymbolId> word(const Alphabet& a, const std::string& text) {
  std::istringstream in(text);
  std::vector<SymbolId> out;
  for (std::string t; in >> t;) out.push_back(a.at(t));
  return out;
}

inline LSeq seq(const Alphabet& a, const std::string& text) { return LSeq(word(a, text)); }

inline TraceSet traces(const Alphabet& a, const std::vector<std::string>& rows) {
  std::vector<Trace> ts;
  for (const auto& r : rows) ts.emplace_back(word(a, r), a);
  const auto h = ts.empty() ? 1 : ts.front().horizon();
  return TraceSet(a, h, std::move(ts));
}

/// Every word of length n over `size` symbols, in lexicographic order.
inline std::vector<std::vector<SymbolId>> all_words(std::size_t size, std::size_t n) {
  std::vector<std::vector<SymbolId>> out;
  std::vector<SymbolId> w(n);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      out.push_back(w);
      return;
    }
    for (std::uint32_t s = 0; s < size; ++s) {
      w[i] = SymbolId(s);
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

/// Random subset of Y^l with at most `max_states` members (at least one).
inline Slca random_slca(std::mt19937_64& rng, std::size_t size, std::size_t l, std::size_t max_states) {
  const auto universe = all_words(size, l);
  std::uniform_int_distribution<std::size_t> count(1, std::min(max_states, universe.size()));
  std::uniform_int_distribution<std::size_t> pick(0, universe.size() - 1);
  std::vector<LSeq> states;
  const auto n = count(rng);
  for (std::size_t i = 0; i < n; ++i) states.emplace_back(universe[pick(rng)]);
  return Slca(ys(static_cast<int>(size)), l, std::move(states));
}

/// Definitional domino predicate.
inline bool domino(const LSeq& u, const LSeq& v) {
  for (std::size_t i = 1; i < u.length(); ++i)
    if (u[i] != v[i - 1]) return false;
  return true;
}

/// Same states and completion flags.
inline bool slca_states_equal(const Slca& a, const Slca& b) {
  if (a.state_count() != b.state_count() || a.window_length() != b.window_length()) return false;
  for (std::size_t i = 0; i < a.state_count(); ++i)
    if (!(a.state(i) == b.state(i)) || a.added_by_completion(i) != b.added_by_completion(i)) return false;
  return true;
}

}  // namespace lcv::test
