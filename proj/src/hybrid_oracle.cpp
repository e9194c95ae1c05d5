#include "lcv/hybrid_oracle.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "lcv/systems.hpp"

namespace lcv {

Rational parse_rational(std::string_view text) {
  using boost::multiprecision::cpp_int;
  std::string s(text);
  auto bad = [&] { return Error("not an exact rational: '" + s + "'"); };
  auto parse_int = [&](std::string_view t) {
    if (t.empty()) throw bad();
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) throw bad();
    for (std::size_t k = i; k < t.size(); ++k)
      if (t[k] < '0' || t[k] > '9') throw bad();
    return cpp_int(std::string(t[0] == '+' ? t.substr(1) : t));
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    const cpp_int den = parse_int(std::string_view(s).substr(slash + 1));
    if (den == 0) throw Error("zero denominator in '" + s + "'");
    return Rational(parse_int(std::string_view(s).substr(0, slash)), den);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const auto frac = s.size() - dot - 1;
    if (frac == 0) throw bad();
    if (digits.empty() || digits == "-" || digits == "+") throw bad();
    cpp_int den = 1;
    for (std::size_t i = 0; i < frac; ++i) den *= 10;
    return Rational(parse_int(digits), den);
  }
  return Rational(parse_int(s));
}

std::string format_rational(const Rational& r) {
  std::ostringstream out;
  out << numerator(r);
  if (denominator(r) != 1) out << "/" << denominator(r);
  return out.str();
}

bool Interval::empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }

bool Interval::contains(const Rational& x) const {
  const bool above = lo_closed ? x >= lo : x > lo;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

std::string format_interval(const Interval& i) {
  return std::string(i.lo_closed ? "[" : "(") + format_rational(i.lo) + ", " + format_rational(i.hi) +
         (i.hi_closed ? "]" : ")");
}

IntervalSet::IntervalSet(std::vector<Interval> parts) {
  std::erase_if(parts, [](const Interval& i) { return i.empty(); });
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.lo_closed && !b.lo_closed;
  });
  for (auto& p : parts) {
    if (!parts_.empty()) {
      auto& cur = parts_.back();
      const bool touches = p.lo < cur.hi || (p.lo == cur.hi && (cur.hi_closed || p.lo_closed));
      if (touches) {
        if (p.hi > cur.hi) {
          cur.hi = p.hi;
          cur.hi_closed = p.hi_closed;
        } else if (p.hi == cur.hi) {
          cur.hi_closed = cur.hi_closed || p.hi_closed;
        }
        continue;
      }
    }
    parts_.push_back(std::move(p));
  }
}

Rational IntervalSet::measure() const {
  Rational total = 0;
  for (const auto& p : parts_) total += p.length();
  return total;
}

bool IntervalSet::contains(const Rational& x) const {
  return std::any_of(parts_.begin(), parts_.end(), [&](const Interval& p) { return p.contains(x); });
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  auto all = parts_;
  all.insert(all.end(), other.parts_.begin(), other.parts_.end());
  return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  for (const auto& a : parts_) {
    for (const auto& b : other.parts_) {
      Interval c;
      if (a.lo > b.lo) {
        c.lo = a.lo;
        c.lo_closed = a.lo_closed;
      } else if (b.lo > a.lo) {
        c.lo = b.lo;
        c.lo_closed = b.lo_closed;
      } else {
        c.lo = a.lo;
        c.lo_closed = a.lo_closed && b.lo_closed;
      }
      if (a.hi < b.hi) {
        c.hi = a.hi;
        c.hi_closed = a.hi_closed;
      } else if (b.hi < a.hi) {
        c.hi = b.hi;
        c.hi_closed = b.hi_closed;
      } else {
        c.hi = a.hi;
        c.hi_closed = a.hi_closed && b.hi_closed;
      }
      if (!c.empty()) out.push_back(std::move(c));
    }
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::affine_image(const Rational& a, const Rational& b) const {
  if (a <= 0) throw Error("affine image needs a positive slope");
  std::vector<Interval> out;
  for (const auto& p : parts_) out.push_back({a * p.lo + b, a * p.hi + b, p.lo_closed, p.hi_closed});
  return IntervalSet(std::move(out));
}

namespace {

IntervalSet closed(const Rational& lo, const Rational& hi) { return IntervalSet({{lo, hi, true, true}}); }
IntervalSet left_open(const Rational& lo, const Rational& hi) {
  return IntervalSet({{lo, hi, false, true}});
}

void check_lambda(const Rational& lambda) {
  if (!(lambda > 0 && lambda < Rational(1, 16))) throw Error("lambda must lie in (0, 1/16)");
}

}  // namespace

IntervalSet hybrid_pre(const IntervalSet& s, const Rational& lambda) {
  // x/2 in S on (lambda, 1]; x/2 + 1/2 in S on [0, lambda].
  const auto halving = s.affine_image(2, 0).intersect(left_open(lambda, 1));
  const auto jump = s.affine_image(2, -1).intersect(closed(0, lambda));
  return halving.unite(jump);
}

Rational hybrid_step(const Rational& x, const Rational& lambda) {
  return x <= lambda ? Rational(x / 2 + Rational(1, 2)) : Rational(x / 2);
}

Rational HybridGeometry::probability(std::span<const SymbolId> word) const {
  for (const auto& c : classes)
    if (std::equal(word.begin(), word.end(), c.word.word().begin(), c.word.word().end()))
      return c.probability;
  return 0;
}

Rational HybridGeometry::total_probability() const {
  Rational total = 0;
  for (const auto& c : classes) total += c.probability;
  return total;
}

namespace {

constexpr std::size_t kMaxPreDepth = 256;

std::size_t settle_steps(const IntervalSet& s, const Rational& lambda) {
  std::vector<Rational> measures{s.measure()};
  IntervalSet reach = s;
  for (std::size_t k = 0; k < kMaxPreDepth; ++k) {
    auto next = s.unite(hybrid_pre(reach, lambda));
    if (next == reach) {
      const auto final_measure = measures.back();
      return static_cast<std::size_t>(
          std::find(measures.begin(), measures.end(), final_measure) - measures.begin());
    }
    reach = std::move(next);
    measures.push_back(reach.measure());
  }
  throw Error("Pre chain did not reach a fixpoint");
}

}  // namespace

HybridGeometry hybrid_pre_analysis(const Rational& lambda, std::size_t l) {
  check_lambda(lambda);
  if (l != 1 && l != 2) throw Error("exact analysis supports l = 1 or l = 2 only");
  HybridGeometry g;
  g.lambda = lambda;
  g.l = l;
  g.alphabet = make_dyadic_partition().alphabet(false);

  // P_i = (2^-i, 2^-(i-1)] for i = 1..4, P_5 = [0, 1/16].
  std::vector<IntervalSet> cells;
  for (int i = 1; i <= 4; ++i) cells.push_back(left_open(Rational(1, 1 << i), Rational(1, 1 << (i - 1))));
  cells.push_back(closed(0, Rational(1, 16)));
  std::vector<IntervalSet> by_symbol(g.alphabet.size());
  for (int i = 1; i <= 5; ++i) by_symbol[g.alphabet.at("y" + std::to_string(i)).value] = cells[i - 1];

  const auto n = static_cast<std::uint32_t>(g.alphabet.size());
  std::vector<std::vector<SymbolId>> words;
  for (std::uint32_t a = 0; a < n; ++a) {
    if (l == 1) {
      words.push_back({SymbolId(a)});
      continue;
    }
    for (std::uint32_t b = 0; b < n; ++b) words.push_back({SymbolId(a), SymbolId(b)});
  }
  for (const auto& w : words) {
    IntervalSet region = by_symbol[w.back().value];
    for (std::size_t i = w.size() - 1; i-- > 0;)
      region = by_symbol[w[i].value].intersect(hybrid_pre(region, lambda));
    if (region.empty()) continue;
    EquivalenceClass c{LSeq(w), region, region.measure(), settle_steps(region, lambda)};
    g.k_bar_exact = std::max(g.k_bar_exact, c.settle_steps);
    g.classes.push_back(std::move(c));
  }
  std::sort(g.classes.begin(), g.classes.end(),
            [](const auto& a, const auto& b) { return a.word < b.word; });
  return g;
}

void write_intervals_csv(std::ostream& out, const HybridGeometry& g) {
  out << "word,part,lo_num,lo_den,lo_closed,hi_num,hi_den,hi_closed\n";
  for (const auto& c : g.classes) {
    const auto name = format_word(c.word.word(), g.alphabet);
    std::size_t part = 0;
    for (const auto& p : c.region.parts()) {
      out << name << "," << part++ << "," << numerator(p.lo) << "," << denominator(p.lo) << ","
          << (p.lo_closed ? 1 : 0) << "," << numerator(p.hi) << "," << denominator(p.hi) << ","
          << (p.hi_closed ? 1 : 0) << "\n";
    }
  }
}

void to_json(nlohmann::json& j, const HybridGeometry& g) {
  auto classes = nlohmann::json::array();
  for (const auto& c : g.classes) {
    auto parts = nlohmann::json::array();
    for (const auto& p : c.region.parts()) parts.push_back(format_interval(p));
    classes.push_back({{"word", format_word(c.word.word(), g.alphabet)},
                       {"probability", format_rational(c.probability)},
                       {"intervals", parts},
                       {"settle_steps", c.settle_steps}});
  }
  j = {{"lambda", format_rational(g.lambda)},
       {"l", g.l},
       {"classes", classes},
       {"total_probability", format_rational(g.total_probability())},
       {"k_bar_exact", g.k_bar_exact}};
}

}  // namespace lcv
