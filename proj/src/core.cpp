#include "lcv/core.hpp"

#include <algorithm>
#include <unordered_set>

#include <boost/container_hash/hash.hpp>

namespace lcv {

Alphabet::Alphabet(const std::vector<std::string>& names) {
  for (const auto& n : names) intern(n);
}

SymbolId Alphabet::intern(std::string_view name) {
  if (auto id = find(name)) return *id;
  if (name.empty()) throw Error("symbol names must be non-empty");
  if (name == kDaggerName) {
    names_.emplace_back(name);
    has_dagger_ = true;
    return SymbolId(static_cast<std::uint32_t>(names_.size() - 1));
  }
  if (has_dagger_) {
    // The new symbol takes the dagger's slot; the dagger moves to the end.
    names_.back() = std::string(name);
    names_.emplace_back(kDaggerName);
    return SymbolId(static_cast<std::uint32_t>(names_.size() - 2));
  }
  names_.emplace_back(name);
  return SymbolId(static_cast<std::uint32_t>(names_.size() - 1));
}

std::optional<SymbolId> Alphabet::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return SymbolId(static_cast<std::uint32_t>(it - names_.begin()));
}

SymbolId Alphabet::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw Error("unknown symbol '" + std::string(name) + "'");
}

const std::string& Alphabet::name(SymbolId id) const {
  if (id.value >= names_.size()) throw Error("symbol id out of range");
  return names_[id.value];
}

std::optional<SymbolId> Alphabet::dagger() const {
  if (!has_dagger_) return std::nullopt;
  return SymbolId(static_cast<std::uint32_t>(names_.size() - 1));
}

bool Alphabet::is_dagger(SymbolId id) const {
  return has_dagger_ && id.value + 1 == names_.size();
}

bool LSeq::contains(SymbolId s) const {
  return std::find(word_.begin(), word_.end(), s) != word_.end();
}

std::size_t LSeqHash::operator()(std::span<const SymbolId> word) const noexcept {
  std::size_t seed = word.size();
  for (auto s : word) boost::hash_combine(seed, s.value);
  return seed;
}

std::string format_word(std::span<const SymbolId> word, const Alphabet& alphabet,
                        std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += sep;
    out += alphabet.name(word[i]);
  }
  return out;
}

Trace::Trace(std::vector<SymbolId> symbols, const Alphabet& alphabet)
    : symbols_(std::move(symbols)) {
  bool exited = false;
  for (auto s : symbols_) {
    if (s.value >= alphabet.size()) throw Error("trace symbol outside the alphabet");
    if (alphabet.is_dagger(s)) {
      exited = true;
    } else if (exited) {
      throw Error("trace leaves the dagger state; the out-of-domain symbol is absorbing");
    }
  }
}

TraceSet::TraceSet(Alphabet alphabet, std::size_t horizon, std::vector<Trace> traces,
                   Provenance provenance)
    : alphabet_(std::move(alphabet)),
      horizon_(horizon),
      traces_(std::move(traces)),
      provenance_(std::move(provenance)) {
  if (horizon_ == 0) throw Error("trace horizon must be at least 1");
  for (const auto& t : traces_) {
    if (t.horizon() != horizon_) throw Error("all traces must share the same horizon");
    for (auto s : t.symbols())
      if (s.value >= alphabet_.size()) throw Error("trace symbol outside the alphabet");
  }
}

std::vector<LSeq> window(std::span<const SymbolId> trace, std::size_t l) {
  if (l == 0) throw Error("window length must be positive");
  if (l > trace.size()) throw Error("horizon shorter than ℓ");
  std::vector<LSeq> out;
  out.reserve(trace.size() - l + 1);
  for (std::size_t i = 0; i + l <= trace.size(); ++i) out.emplace_back(trace.subspan(i, l));
  return out;
}

std::vector<LSeq> distinct_lseqs(const TraceSet& traces, std::size_t l) {
  if (traces.empty()) throw Error("empty trace set");
  if (l == 0) throw Error("window length must be positive");
  if (l > traces.horizon()) throw Error("horizon shorter than ℓ");
  std::unordered_set<LSeq, LSeqHash> seen;
  for (const auto& t : traces.traces())
    for (std::size_t i = 0; i + l <= t.horizon(); ++i) seen.emplace(t.symbols().subspan(i, l));
  std::vector<LSeq> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace lcv
