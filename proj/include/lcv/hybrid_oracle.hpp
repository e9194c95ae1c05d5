#pragma once

// Exact Pre-set analysis of the one-dimensional hybrid benchmark
// x+ = x/2 + 1/2 on [0, lambda], x/2 on (lambda, 1], observed through the
// dyadic partition y1..y5. All arithmetic is rational.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "lcv/core.hpp"

namespace lcv {

using Rational = boost::multiprecision::cpp_rational;

/// "p/q", an integer, or a finite decimal such as "0.01"; all exact.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);

struct Interval {
  Rational lo;
  Rational hi;
  bool lo_closed = true;
  bool hi_closed = true;

  bool empty() const;
  Rational length() const { return empty() ? Rational(0) : Rational(hi - lo); }
  bool contains(const Rational& x) const;
  friend bool operator==(const Interval&, const Interval&) = default;
};

std::string format_interval(const Interval& i);

/// Finite union of intervals kept sorted, disjoint and merged.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> parts);

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  Rational measure() const;
  bool contains(const Rational& x) const;

  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet intersect(const IntervalSet& other) const;
  /// {a x + b : x in S} for a > 0.
  IntervalSet affine_image(const Rational& a, const Rational& b) const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> parts_;
};

/// Points of [0, 1] mapped into S by one step.
IntervalSet hybrid_pre(const IntervalSet& s, const Rational& lambda);
/// One step of the dynamics, exactly.
Rational hybrid_step(const Rational& x, const Rational& lambda);

struct EquivalenceClass {
  LSeq word;
  IntervalSet region;
  Rational probability;
  /// Smallest k with |R_k| = |R_inf|, R_k the points reaching the class
  /// within k steps.
  std::size_t settle_steps = 0;
};

struct HybridGeometry {
  Rational lambda;
  std::size_t l = 0;
  Alphabet alphabet;  // y1..y5
  /// Non-empty classes in lexicographic word order, null sets included.
  std::vector<EquivalenceClass> classes;
  std::size_t k_bar_exact = 0;

  Rational probability(std::span<const SymbolId> word) const;
  Rational total_probability() const;
};

/// Supports l in {1, 2} and 0 < lambda < 1/16.
HybridGeometry hybrid_pre_analysis(const Rational& lambda, std::size_t l);

/// Columns: word,part,lo_num,lo_den,lo_closed,hi_num,hi_den,hi_closed.
void write_intervals_csv(std::ostream& out, const HybridGeometry& g);

void to_json(nlohmann::json& j, const HybridGeometry& g);

}  // namespace lcv
