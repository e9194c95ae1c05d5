#pragma once

// Data-driven l-complete abstractions: states are witnessed output words of
// length l, transitions follow the domino rule, every state is initial.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lcv/core.hpp"

namespace lcv {

class Slca {
 public:
  /// States are sorted and deduplicated; `added` flags (if given) follow the
  /// input order. Edges are derived, never supplied.
  Slca(Alphabet alphabet, std::size_t l, std::vector<LSeq> states, std::vector<bool> added = {});

  std::size_t window_length() const { return l_; }
  const Alphabet& alphabet() const { return alphabet_; }

  std::size_t state_count() const { return states_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::span<const LSeq> states() const { return states_; }
  const LSeq& state(std::size_t i) const { return states_[i]; }
  /// Successor indices in lexicographic order.
  std::span<const std::size_t> successors(std::size_t i) const { return succ_[i]; }
  bool added_by_completion(std::size_t i) const { return added_[i]; }
  std::size_t added_count() const;
  SymbolId output(std::size_t i) const { return states_[i].first(); }

  std::optional<std::size_t> find(std::span<const SymbolId> word) const;
  bool contains(std::span<const SymbolId> word) const { return find(word).has_value(); }

 private:
  Alphabet alphabet_;
  std::size_t l_;
  std::vector<LSeq> states_;
  std::vector<bool> added_;
  std::vector<std::vector<std::size_t>> succ_;
  std::size_t edge_count_ = 0;
};

/// Abstraction whose states are the distinct windows of the traces; no
/// completion applied.
Slca build_slca(const TraceSet& traces, std::size_t l);

/// Adds, until none is left, every continuation σk' of each blocking state
/// kσ. When σ ends in the dagger only σ† is added (the dagger is absorbing).
Slca domino_complete(const Slca& slca);

bool is_non_blocking(const Slca& slca);
bool is_deterministic(const Slca& slca);

/// True iff every window of length l of the word is a state.
bool includes_trace(const Slca& slca, std::span<const SymbolId> word);
inline bool includes_trace(const Slca& slca, const Trace& trace) {
  return includes_trace(slca, trace.symbols());
}

using Word = std::vector<SymbolId>;

/// Every external behaviour of length H (H >= l), by exhaustive unrolling
/// from all states, sorted. Throws once more than `cap` behaviours exist.
std::vector<Word> behaviors(const Slca& slca, std::size_t horizon, std::size_t cap);

/// Path of state indices: `stem` followed by `cycle` repeated forever (the
/// last cycle state steps back to the first). An empty cycle denotes a
/// finite path.
struct Lasso {
  std::vector<std::size_t> stem;
  std::vector<std::size_t> cycle;
};

struct VerificationVerdict {
  bool holds = true;
  std::optional<Lasso> witness;
  std::string explanation;
};

/// Holds iff no state word contains a bad symbol. Every state is initial, so
/// any such state is reachable; the witness is that state.
VerificationVerdict verify_invariance(const Slca& slca, const std::set<SymbolId>& bad);

/// Holds iff no state contains a bad symbol and every cycle-bearing strongly
/// connected component consists of target-only words. Any infinite run ends
/// up inside one such component, so every infinite behaviour eventually
/// stays in the target.
VerificationVerdict verify_reach_stay(const Slca& slca, const std::set<SymbolId>& target,
                                      const std::set<SymbolId>& bad);

/// Checks that a witness is a real path of the automaton.
bool is_valid_lasso(const Slca& slca, const Lasso& lasso);

std::string to_dot(const Slca& slca);

/// Text serialization: header (format tag, l, alphabet), then one state per
/// line in lexicographic order with a completion flag.
void write_slca(std::ostream& out, const Slca& slca);
Slca read_slca(std::istream& in);

}  // namespace lcv
