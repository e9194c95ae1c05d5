#include <doctest.h>

#include <map>
#include <sstream>

#include "helpers.hpp"
#include "lcv/hybrid_oracle.hpp"
#include "lcv/systems.hpp"

using namespace lcv;

namespace {

std::map<std::string, Rational> table(const HybridGeometry& g) {
  std::map<std::string, Rational> out;
  for (const auto& c : g.classes) out[format_word(c.word.word(), g.alphabet)] = c.probability;
  return out;
}

}  // namespace

TEST_SUITE("hybrid_oracle") {
  TEST_CASE("rationals parse exactly") {
    CHECK(parse_rational("1/100") == Rational(1, 100));
    CHECK(parse_rational("0.01") == Rational(1, 100));
    CHECK(parse_rational("3") == Rational(3));
    CHECK(parse_rational("-2/4") == Rational(-1, 2));
    CHECK(format_rational(Rational(21, 400)) == "21/400");
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("abc"), Error);
    CHECK_THROWS_AS(parse_rational("1."), Error);
  }

  TEST_CASE("interval sets merge and intersect with open ends") {
    const IntervalSet a({{0, 1, true, false}, {1, 2, true, true}});
    REQUIRE(a.parts().size() == 1);
    CHECK(a.measure() == 2);
    const IntervalSet gap({{0, 1, true, false}, {1, 2, false, true}});
    CHECK(gap.parts().size() == 2);
    CHECK_FALSE(gap.contains(1));
    const auto meet = IntervalSet({{0, 1, true, true}}).intersect(IntervalSet({{1, 2, true, true}}));
    REQUIRE(meet.parts().size() == 1);
    CHECK(meet.measure() == 0);
    CHECK(meet.contains(1));
    CHECK(IntervalSet({{0, 1, true, false}}).intersect(IntervalSet({{1, 2, true, true}})).empty());
  }

  TEST_CASE("two-step classes at lambda = 1/100") {
    const auto g = hybrid_pre_analysis(Rational(1, 100), 2);
    const auto t = table(g);
    CHECK(t.at("y1y2") == Rational(1, 2));
    CHECK(t.at("y2y3") == Rational(1, 4));
    CHECK(t.at("y3y4") == Rational(1, 8));
    CHECK(t.at("y4y5") == Rational(1, 16));
    CHECK(t.at("y5y5") == Rational(1, 16) - Rational(1, 100));
    CHECK(t.at("y5y1") == Rational(1, 100));
    // x = 0 maps to 1/2: a null class.
    CHECK(t.at("y5y2") == 0);
    CHECK(t.size() == 7);
    CHECK(g.total_probability() == 1);
    CHECK(g.k_bar_exact == 7);
  }

  TEST_CASE("one-step classes") {
    const auto g = hybrid_pre_analysis(Rational(1, 100), 1);
    const auto t = table(g);
    CHECK(t.at("y1") == Rational(1, 2));
    CHECK(t.at("y2") == Rational(1, 4));
    CHECK(t.at("y3") == Rational(1, 8));
    CHECK(t.at("y4") == Rational(1, 16));
    CHECK(t.at("y5") == Rational(1, 16));
    CHECK(g.total_probability() == 1);
  }

  TEST_CASE("class regions agree with exact simulation") {
    const Rational lambda(1, 100);
    const auto g = hybrid_pre_analysis(lambda, 2);
    const auto p = make_dyadic_partition();
    const auto sys = make_hybrid1d(0.01);
    for (int i = 0; i <= 400; ++i) {
      const Rational x(i, 400);
      State s(1);
      s[0] = x.convert_to<double>();
      const auto w = simulate(sys, p, s, 2);
      std::size_t owners = 0;
      for (const auto& c : g.classes) {
        if (!c.region.contains(x)) continue;
        ++owners;
        CHECK(std::equal(w.begin(), w.end(), c.word.word().begin(), c.word.word().end()));
      }
      CHECK(owners == 1);
    }
  }

  TEST_CASE("probabilities sum to one for other lambdas") {
    for (const auto& l : {Rational(1, 17), Rational(1, 1000), Rational(3, 64)}) {
      CHECK(hybrid_pre_analysis(l, 2).total_probability() == 1);
      CHECK(hybrid_pre_analysis(l, 1).total_probability() == 1);
    }
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(hybrid_pre_analysis(Rational(1, 100), 3), Error);
    CHECK_THROWS_AS(hybrid_pre_analysis(Rational(1, 16), 2), Error);
    CHECK_THROWS_AS(hybrid_pre_analysis(Rational(0), 2), Error);
  }

  TEST_CASE("CSV export uses numerator and denominator columns") {
    std::ostringstream out;
    write_intervals_csv(out, hybrid_pre_analysis(Rational(1, 100), 2));
    const auto s = out.str();
    CHECK(s.rfind("word,part,lo_num,lo_den,lo_closed,hi_num,hi_den,hi_closed\n", 0) == 0);
    CHECK(s.find("y5y1,0,0,1,0,1,100,1\n") != std::string::npos);
  }

  TEST_CASE("monte carlo frequencies match the oracle") {
    const auto g = hybrid_pre_analysis(Rational(1, 100), 2);
    const auto sys = make_hybrid1d(0.01);
    const auto p = make_dyadic_partition();
    const std::size_t n = 100000;
    const auto t = sample_traces(sys, p, UniformBox{sys.domain, {}}, n, 2, 77);
    std::map<std::vector<SymbolId>, std::size_t> counts;
    for (const auto& tr : t.traces()) ++counts[std::vector<SymbolId>(tr.symbols().begin(), tr.symbols().end())];
    for (const auto& c : g.classes) {
      const double pr = c.probability.convert_to<double>();
      const std::vector<SymbolId> w(c.word.word().begin(), c.word.word().end());
      const double f = static_cast<double>(counts[w]) / n;
      const double sigma = std::sqrt(pr * (1 - pr) / n);
      CHECK(std::abs(f - pr) <= 3 * sigma + 1e-12);
    }
  }
}
