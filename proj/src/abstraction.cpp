#include "lcv/abstraction.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <boost/algorithm/string.hpp>

namespace lcv {

Slca::Slca(Alphabet alphabet, std::size_t l, std::vector<LSeq> states, std::vector<bool> added)
    : alphabet_(std::move(alphabet)), l_(l) {
  if (l_ == 0) throw Error("window length must be positive");
  if (!added.empty() && added.size() != states.size())
    throw Error("completion flags must match the states");
  added.resize(states.size(), false);

  std::vector<std::size_t> order(states.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return states[a] < states[b]; });
  for (auto i : order) {
    const auto& s = states[i];
    if (s.length() != l_) throw Error("state length differs from ℓ");
    for (auto sym : s.word())
      if (sym.value >= alphabet_.size()) throw Error("state symbol outside the alphabet");
    if (!states_.empty() && states_.back() == s) {
      // A witnessed copy wins over a completion-added one.
      added_.back() = added_.back() && added[i];
      continue;
    }
    states_.push_back(s);
    added_.push_back(added[i]);
  }

  std::unordered_map<LSeq, std::vector<std::size_t>, LSeqHash> by_prefix;
  for (std::size_t i = 0; i < states_.size(); ++i) by_prefix[LSeq(states_[i].prefix())].push_back(i);
  succ_.resize(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (auto it = by_prefix.find(LSeq(states_[i].suffix())); it != by_prefix.end()) succ_[i] = it->second;
    edge_count_ += succ_[i].size();
  }
}

std::size_t Slca::added_count() const {
  return static_cast<std::size_t>(std::count(added_.begin(), added_.end(), true));
}

std::optional<std::size_t> Slca::find(std::span<const SymbolId> word) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), word, [](const LSeq& s, auto w) {
    return std::lexicographical_compare(s.word().begin(), s.word().end(), w.begin(), w.end());
  });
  if (it == states_.end() || !std::equal(word.begin(), word.end(), it->word().begin(), it->word().end()))
    return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

Slca build_slca(const TraceSet& traces, std::size_t l) {
  return Slca(traces.alphabet(), l, distinct_lseqs(traces, l));
}

Slca domino_complete(const Slca& slca) {
  const auto& alphabet = slca.alphabet();
  const auto l = slca.window_length();
  std::vector<LSeq> states(slca.states().begin(), slca.states().end());
  std::vector<bool> added;
  for (std::size_t i = 0; i < slca.state_count(); ++i) added.push_back(slca.added_by_completion(i));

  std::unordered_set<LSeq, LSeqHash> present(states.begin(), states.end());
  std::unordered_set<LSeq, LSeqHash> prefixes;
  for (const auto& s : states) prefixes.emplace(s.prefix());

  std::deque<std::size_t> pending(states.size());
  std::iota(pending.begin(), pending.end(), 0);
  while (!pending.empty()) {
    const LSeq suffix(states[pending.front()].suffix());
    pending.pop_front();
    if (prefixes.contains(suffix)) continue;
    std::vector<SymbolId> next(suffix.word().begin(), suffix.word().end());
    next.push_back(SymbolId{});
    const bool absorbed = !suffix.word().empty() && alphabet.is_dagger(suffix.word().back());
    for (std::uint32_t k = 0; k < alphabet.size(); ++k) {
      const SymbolId sym(k);
      if (absorbed && !alphabet.is_dagger(sym)) continue;
      next.back() = sym;
      LSeq candidate(next);
      if (!present.insert(candidate).second) continue;
      prefixes.emplace(candidate.prefix());
      states.push_back(std::move(candidate));
      added.push_back(true);
      pending.push_back(states.size() - 1);
    }
  }
  return Slca(alphabet, l, std::move(states), std::move(added));
}

bool is_non_blocking(const Slca& slca) {
  for (std::size_t i = 0; i < slca.state_count(); ++i)
    if (slca.successors(i).empty()) return false;
  return true;
}

bool is_deterministic(const Slca& slca) {
  for (std::size_t i = 0; i < slca.state_count(); ++i)
    if (slca.successors(i).size() > 1) return false;
  return true;
}

bool includes_trace(const Slca& slca, std::span<const SymbolId> word) {
  const auto l = slca.window_length();
  if (word.size() < l) throw Error("trace shorter than ℓ");
  for (std::size_t i = 0; i + l <= word.size(); ++i)
    if (!slca.contains(word.subspan(i, l))) return false;
  return true;
}

std::vector<Word> behaviors(const Slca& slca, std::size_t horizon, std::size_t cap) {
  const auto l = slca.window_length();
  if (horizon < l) throw Error("behaviour horizon shorter than ℓ");
  std::vector<Word> out;
  const std::size_t extra = horizon - l;

  // Iterative DFS over walks of extra + 1 states.
  struct Frame {
    std::size_t state;
    std::size_t next_succ;
  };
  for (std::size_t start = 0; start < slca.state_count(); ++start) {
    Word word(slca.state(start).word().begin(), slca.state(start).word().end());
    std::vector<Frame> stack{{start, 0}};
    while (!stack.empty()) {
      if (stack.size() == extra + 1) {
        if (out.size() == cap)
          throw Error("state-space blow-up: more than " + std::to_string(cap) + " behaviours of length " +
                      std::to_string(horizon));
        out.push_back(word);
        stack.pop_back();
        if (!stack.empty()) word.pop_back();
        continue;
      }
      auto& top = stack.back();
      const auto succ = slca.successors(top.state);
      if (top.next_succ == succ.size()) {
        stack.pop_back();
        if (!stack.empty()) word.pop_back();
        continue;
      }
      const auto s = succ[top.next_succ++];
      word.push_back(slca.state(s).word().back());
      stack.push_back({s, 0});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool uses_any(const LSeq& s, const std::set<SymbolId>& symbols) {
  return std::any_of(s.word().begin(), s.word().end(), [&](auto x) { return symbols.contains(x); });
}

std::string word_text(const Slca& slca, std::size_t i) {
  return format_word(slca.state(i).word(), slca.alphabet(), " ");
}

// Tarjan's algorithm, iterative. Returns the component id of every state.
std::vector<std::size_t> strongly_connected_components(const Slca& slca, std::size_t& count) {
  const auto n = slca.state_count();
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t next_index = 0;
  count = 0;
  struct Frame {
    std::size_t v;
    std::size_t child;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& f = call.back();
      const auto succ = slca.successors(f.v);
      if (f.child < succ.size()) {
        const auto w = succ[f.child++];
        if (index[w] == kUnset) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const auto v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
    }
  }
  return comp;
}

// Shortest cycle through v staying inside v's component.
std::vector<std::size_t> cycle_through(const Slca& slca, const std::vector<std::size_t>& comp,
                                       std::size_t v) {
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(slca.state_count(), kUnset);
  std::deque<std::size_t> queue{v};
  std::optional<std::size_t> last;
  while (!queue.empty() && !last) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto w : slca.successors(u)) {
      if (comp[w] != comp[v]) continue;
      if (w == v) {
        last = u;
        break;
      }
      if (parent[w] == kUnset) {
        parent[w] = u;
        queue.push_back(w);
      }
    }
  }
  std::vector<std::size_t> cycle;
  for (auto u = *last; u != v; u = parent[u]) cycle.push_back(u);
  cycle.push_back(v);
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace

VerificationVerdict verify_invariance(const Slca& slca, const std::set<SymbolId>& bad) {
  for (std::size_t i = 0; i < slca.state_count(); ++i) {
    if (uses_any(slca.state(i), bad))
      return {false, Lasso{{i}, {}}, "state (" + word_text(slca, i) + ") contains a bad symbol"};
  }
  return {true, std::nullopt, "no state contains a bad symbol"};
}

VerificationVerdict verify_reach_stay(const Slca& slca, const std::set<SymbolId>& target,
                                      const std::set<SymbolId>& bad) {
  auto safe = verify_invariance(slca, bad);
  if (!safe.holds) return safe;

  std::size_t count = 0;
  const auto comp = strongly_connected_components(slca, count);
  std::vector<std::size_t> size(count, 0);
  for (auto c : comp) ++size[c];
  for (std::size_t v = 0; v < slca.state_count(); ++v) {
    const auto succ = slca.successors(v);
    const bool self_loop = std::find(succ.begin(), succ.end(), v) != succ.end();
    if (size[comp[v]] == 1 && !self_loop) continue;
    const auto& word = slca.state(v).word();
    const bool target_only =
        std::all_of(word.begin(), word.end(), [&](auto s) { return target.contains(s); });
    if (target_only) continue;
    return {false, Lasso{{}, cycle_through(slca, comp, v)},
            "cycle through (" + word_text(slca, v) + ") leaves the target forever"};
  }
  return {true, std::nullopt, "every cycle stays within the target"};
}

bool is_valid_lasso(const Slca& slca, const Lasso& lasso) {
  auto edge = [&](std::size_t a, std::size_t b) {
    if (a >= slca.state_count() || b >= slca.state_count()) return false;
    const auto succ = slca.successors(a);
    return std::find(succ.begin(), succ.end(), b) != succ.end();
  };
  std::vector<std::size_t> path = lasso.stem;
  path.insert(path.end(), lasso.cycle.begin(), lasso.cycle.end());
  if (path.empty()) return false;
  for (auto s : path)
    if (s >= slca.state_count()) return false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    if (!edge(path[i], path[i + 1])) return false;
  return lasso.cycle.empty() || edge(lasso.cycle.back(), lasso.cycle.front());
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const Slca& slca) {
  std::ostringstream out;
  out << "digraph slca {\n";
  for (std::size_t i = 0; i < slca.state_count(); ++i) {
    out << "  s" << i << " [label=\"" << dot_escape(word_text(slca, i)) << "\"";
    if (slca.added_by_completion(i)) out << ", style=dashed";
    out << "];\n";
  }
  for (std::size_t i = 0; i < slca.state_count(); ++i) {
    for (auto j : slca.successors(i)) {
      out << "  s" << i << " -> s" << j;
      if (slca.added_by_completion(i) || slca.added_by_completion(j)) out << " [style=dashed]";
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

namespace {
constexpr std::string_view kSlcaTag = "lcv-slca 1";
}

void write_slca(std::ostream& out, const Slca& slca) {
  const auto& alphabet = slca.alphabet();
  out << kSlcaTag << "\n";
  out << "l " << slca.window_length() << "\n";
  out << "alphabet ";
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    out << (i ? "," : "") << external_name(alphabet, SymbolId(static_cast<std::uint32_t>(i)));
  out << "\n";
  out << "states " << slca.state_count() << "\n";
  for (std::size_t i = 0; i < slca.state_count(); ++i) {
    const auto& w = slca.state(i).word();
    for (std::size_t k = 0; k < w.size(); ++k) out << (k ? "," : "") << external_name(alphabet, w[k]);
    out << " " << (slca.added_by_completion(i) ? 1 : 0) << "\n";
  }
}

Slca read_slca(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      boost::trim(line);
      if (!line.empty()) return line;
    }
    throw Error("abstraction file truncated");
  };
  if (next_line() != kSlcaTag) throw Error("not an abstraction file (missing '" + std::string(kSlcaTag) + "')");

  auto keyed = [&](std::string_view key) {
    auto l = next_line();
    if (!l.starts_with(key) || l.size() <= key.size() || l[key.size()] != ' ')
      throw Error("abstraction file: expected '" + std::string(key) + "' line");
    return boost::trim_copy(l.substr(key.size() + 1));
  };
  const auto l = std::stoul(keyed("l"));
  Alphabet alphabet;
  std::vector<std::string> names;
  const auto alphabet_text = keyed("alphabet");
  boost::split(names, alphabet_text, boost::is_any_of(","));
  for (const auto& n : names) alphabet.intern(internal_name(boost::trim_copy(n)));
  const auto count = std::stoul(keyed("states"));

  std::vector<LSeq> states;
  std::vector<bool> added;
  for (std::size_t i = 0; i < count; ++i) {
    auto row = next_line();
    auto space = row.rfind(' ');
    if (space == std::string::npos) throw Error("abstraction file: malformed state line '" + row + "'");
    std::vector<std::string> fields;
    boost::split(fields, row.substr(0, space), boost::is_any_of(","));
    std::vector<SymbolId> word;
    for (const auto& f : fields) word.push_back(alphabet.at(internal_name(boost::trim_copy(f))));
    states.emplace_back(word);
    const auto flag = boost::trim_copy(row.substr(space + 1));
    if (flag != "0" && flag != "1") throw Error("abstraction file: completion flag must be 0 or 1");
    added.push_back(flag == "1");
  }
  return Slca(std::move(alphabet), l, std::move(states), std::move(added));
}

}  // namespace lcv
