#pragma once

// Output alphabets, sampled traces and fixed-length output words.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace lcv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SymbolId {
  std::uint32_t value = 0;

  constexpr SymbolId() = default;
  constexpr explicit SymbolId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(SymbolId, SymbolId) = default;
};

/// Interned output symbols. Identifiers are contiguous and follow insertion
/// order, except that the out-of-domain symbol, when present, always holds
/// the last identifier.
class Alphabet {
 public:
  static constexpr std::string_view kDaggerName = "†";

  Alphabet() = default;
  explicit Alphabet(const std::vector<std::string>& names);

  /// Returns the id of `name`, appending it if unknown. Interning a regular
  /// symbol into an alphabet that already holds the dagger renumbers the
  /// dagger so that it stays last.
  SymbolId intern(std::string_view name);

  std::optional<SymbolId> find(std::string_view name) const;
  SymbolId at(std::string_view name) const;
  const std::string& name(SymbolId id) const;

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  std::span<const std::string> names() const { return names_; }

  std::optional<SymbolId> dagger() const;
  bool is_dagger(SymbolId id) const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> names_;
  bool has_dagger_ = false;
};

/// A fixed-length output word. Short words are stored inline.
class LSeq {
 public:
  using Storage = boost::container::small_vector<SymbolId, 32>;

  LSeq() = default;
  explicit LSeq(std::span<const SymbolId> word) : word_(word.begin(), word.end()) {}
  LSeq(std::initializer_list<SymbolId> word) : word_(word.begin(), word.end()) {}

  std::size_t length() const { return word_.size(); }
  SymbolId operator[](std::size_t i) const { return word_[i]; }
  std::span<const SymbolId> word() const { return {word_.data(), word_.size()}; }

  /// Output of the abstract state labelled by this word.
  SymbolId first() const { return word_.front(); }
  /// All but the last symbol.
  std::span<const SymbolId> prefix() const { return word().first(word_.size() - 1); }
  /// All but the first symbol.
  std::span<const SymbolId> suffix() const { return word().subspan(1); }

  bool contains(SymbolId s) const;

  friend bool operator==(const LSeq& a, const LSeq& b) {
    return std::equal(a.word_.begin(), a.word_.end(), b.word_.begin(), b.word_.end());
  }
  friend std::strong_ordering operator<=>(const LSeq& a, const LSeq& b) {
    return std::lexicographical_compare_three_way(a.word_.begin(), a.word_.end(),
                                                  b.word_.begin(), b.word_.end());
  }

 private:
  Storage word_;
};

struct LSeqHash {
  std::size_t operator()(std::span<const SymbolId> word) const noexcept;
  std::size_t operator()(const LSeq& s) const noexcept { return (*this)(s.word()); }
};

/// Word rendered with symbol names, e.g. "y1y2" (joined by `sep`).
std::string format_word(std::span<const SymbolId> word, const Alphabet& alphabet,
                        std::string_view sep = "");

/// Finite output sequence of one sampled run. Once the dagger appears every
/// later symbol is the dagger.
class Trace {
 public:
  Trace() = default;
  Trace(std::vector<SymbolId> symbols, const Alphabet& alphabet);

  std::size_t horizon() const { return symbols_.size(); }
  std::span<const SymbolId> symbols() const { return symbols_; }
  SymbolId operator[](std::size_t i) const { return symbols_[i]; }

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::vector<SymbolId> symbols_;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string system;
};

/// N traces sharing one alphabet and one horizon.
class TraceSet {
 public:
  TraceSet(Alphabet alphabet, std::size_t horizon, std::vector<Trace> traces,
           Provenance provenance = {});

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t size() const { return traces_.size(); }
  bool empty() const { return traces_.empty(); }
  std::span<const Trace> traces() const { return traces_; }
  const Trace& operator[](std::size_t i) const { return traces_[i]; }
  const Provenance& provenance() const { return provenance_; }

 private:
  Alphabet alphabet_;
  std::size_t horizon_;
  std::vector<Trace> traces_;
  Provenance provenance_;
};

/// The horizon - l + 1 consecutive windows of length l, duplicates kept.
std::vector<LSeq> window(std::span<const SymbolId> trace, std::size_t l);
inline std::vector<LSeq> window(const Trace& trace, std::size_t l) {
  return window(trace.symbols(), l);
}

/// Every window of length l seen in any trace, deduplicated and sorted.
std::vector<LSeq> distinct_lseqs(const TraceSet& traces, std::size_t l);

// CSV trace format: comment headers `# alphabet: a,b,...` and `# H: <int>`
// (optionally `# seed:` and `# system:`), then one comma-separated row per
// trace. The dagger is written as DAGGER.
inline constexpr std::string_view kDaggerToken = "DAGGER";

void write_traces_csv(std::ostream& out, const TraceSet& traces);
TraceSet read_traces_csv(std::istream& in);

/// Symbol name as written in files and on the command line.
std::string external_name(const Alphabet& alphabet, SymbolId id);
/// Inverse of external_name; DAGGER maps to the dagger name.
std::string internal_name(std::string_view token);

}  // namespace lcv
