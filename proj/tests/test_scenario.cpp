#include <doctest.h>

#include <bit>
#include <cmath>
#include <set>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "lcv/scenario.hpp"
#include "lcv/systems.hpp"

using namespace lcv;

namespace {

// Independent evaluation of the wait-and-judge equation without
// log-factorials: with r_m = C(m,k) t^(m-k) / (C(N,k) t^(N-k)), r_N = 1 and
// r_(m-1) = r_m (m-k) / (m t), the root solves beta/(N+1) sum r_m = 1.
long double oracle_epsilon(std::size_t k, std::size_t n, long double beta) {
  auto excess = [&](long double t) {
    long double r = 1.0L, sum = 1.0L;
    for (std::size_t m = n; m > k; --m) {
      r *= static_cast<long double>(m - k) / (static_cast<long double>(m) * t);
      sum += r;
    }
    return beta / static_cast<long double>(n + 1) * sum - 1.0L;
  };
  long double lo = 0.5L, hi = 1.0L;  // excess(lo) > 0 > excess(hi) here
  for (int i = 0; i < 200; ++i) {
    const long double mid = (lo + hi) / 2;
    (excess(mid) > 0 ? lo : hi) = mid;
  }
  return 1.0L - (lo + hi) / 2;
}

// Exhaustive minimum cover, written independently of the library.
std::size_t oracle_min_cover(const TraceSet& t, std::size_t l) {
  std::vector<std::set<std::vector<SymbolId>>> sets;
  std::set<std::vector<SymbolId>> universe;
  for (const auto& tr : t.traces()) {
    std::set<std::vector<SymbolId>> s;
    for (std::size_t i = 0; i + l <= tr.horizon(); ++i) {
      std::vector<SymbolId> w(tr.symbols().begin() + static_cast<long>(i),
                              tr.symbols().begin() + static_cast<long>(i + l));
      s.insert(w);
      universe.insert(w);
    }
    sets.push_back(s);
  }
  std::size_t best = sets.size();
  for (std::uint32_t mask = 1; mask < (1u << sets.size()); ++mask) {
    std::set<std::vector<SymbolId>> u;
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (mask & (1u << i)) u.insert(sets[i].begin(), sets[i].end());
    if (u.size() == universe.size()) best = std::min<std::size_t>(best, std::popcount(mask));
  }
  return best;
}

TraceSet random_traces(std::mt19937_64& rng, std::size_t n, std::size_t h, std::uint32_t symbols) {
  const auto a = test::ys(static_cast<int>(symbols));
  std::vector<Trace> ts;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<SymbolId> w(h);
    for (auto& x : w) x = SymbolId(static_cast<std::uint32_t>(rng() % symbols));
    ts.emplace_back(w, a);
  }
  return TraceSet(a, h, ts);
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("epsilon boundary and errors") {
    CHECK(epsilon(10, 10, 1e-6) == 1.0);
    CHECK(epsilon(1, 1, 1e-12) == 1.0);
    CHECK_THROWS_AS(epsilon(11, 10, 1e-6), Error);
    CHECK_THROWS_AS(epsilon(1, 10, 0.0), Error);
    CHECK_THROWS_AS(epsilon(1, 10, 1.0), Error);
  }

  TEST_CASE("epsilon matches the reported benchmark values") {
    // s* = 1 in the hybrid run and s* = 3 in the path planning run.
    CHECK(epsilon(1, 10000, 1e-12) == doctest::Approx(3.47e-3).epsilon(0.01));
    CHECK(epsilon(3, 10000, 1e-12) == doctest::Approx(4.06e-3).epsilon(0.01));
    // The other reported value, 4.80e-3, corresponds to k = 6.
    CHECK(epsilon(6, 10000, 1e-12) == doctest::Approx(4.80e-3).epsilon(0.01));
  }

  TEST_CASE("epsilon agrees with an independent long-double solver") {
    for (std::size_t k : {0u, 1u, 3u, 6u, 27u, 122u}) {
      for (std::size_t n : {1000u, 10000u}) {
        for (double beta : {1e-12, 1e-6, 0.05}) {
          const double mine = epsilon(k, n, beta);
          const auto ref = static_cast<double>(oracle_epsilon(k, n, beta));
          CHECK_MESSAGE(mine == doctest::Approx(ref).epsilon(1e-9), "k=" << k << " N=" << n << " beta=" << beta);
        }
      }
    }
  }

  TEST_CASE("solver reports its settings and brackets the root") {
    const auto r = solve_epsilon(3, 10000, 1e-12);
    CHECK(r.strategy == EpsilonStrategy::WaitAndJudge);
    CHECK(r.tolerance == kEpsilonTolerance);
    CHECK(r.iterations > 10);
    CHECK(r.epsilon == solve_epsilon(3, 10000, 1e-12).epsilon);
    const double alt = epsilon(3, 10000, 1e-12, EpsilonStrategy::NonConvexGeneral);
    CHECK(alt == doctest::Approx(r.epsilon).epsilon(1e-3));
    CHECK(parse_epsilon_strategy(to_string(EpsilonStrategy::NonConvexGeneral)) == EpsilonStrategy::NonConvexGeneral);
  }

  TEST_CASE("epsilon is monotone in k, N and beta") {
    const std::vector<std::size_t> ks{0, 1, 3, 10, 30};
    const std::vector<std::size_t> ns{100, 300, 1000, 3000, 10000};
    const std::vector<double> betas{1e-12, 1e-6};
    for (double b : betas)
      for (std::size_t n : ns)
        for (std::size_t i = 0; i + 1 < ks.size(); ++i) CHECK(epsilon(ks[i], n, b) <= epsilon(ks[i + 1], n, b));
    for (double b : betas)
      for (std::size_t k : ks)
        for (std::size_t i = 0; i + 1 < ns.size(); ++i) CHECK(epsilon(k, ns[i], b) >= epsilon(k, ns[i + 1], b));
    for (std::size_t n : ns)
      for (std::size_t k : ks) {
        const double e = epsilon(k, n, betas[0]);
        CHECK(e >= epsilon(k, n, betas[1]));
        CHECK((e > 0.0 && e <= 1.0));
      }
  }

  TEST_CASE("log factorials") {
    const LogFactorialTable t(50);
    CHECK(t.log_factorial(0) == 0.0);
    CHECK(t.log_factorial(5) == doctest::Approx(std::log(120.0)));
    CHECK(std::exp(t.log_binomial(10, 3)) == doctest::Approx(120.0));
  }

  TEST_CASE("greedy complexity") {
    const auto a = test::ys(3);
    CHECK(greedy_complexity(test::traces(a, {"y1 y2 y3", "y1 y2 y3", "y1 y2 y3"}), 2) == 1);
    const auto t = test::traces(a, {"y1 y1 y1", "y2 y2 y2", "y1 y1 y2", "y1 y2 y2"});
    // Ties go to the lowest index: trace 2 and 3 cover two windows each.
    CHECK(greedy_set_cover(t, 2) == std::vector<std::size_t>{2, 1});
    CHECK_THROWS_AS(greedy_complexity(TraceSet(a, 3, {}), 2), Error);
    CHECK_THROWS_AS(greedy_complexity(t, 4), Error);
  }

  TEST_CASE("greedy cover is bounded and agrees with the exhaustive minimum") {
    std::mt19937_64 rng(21);
    std::size_t agree = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t n = 1 + rng() % 12, h = 2 + rng() % 5, l = 1 + rng() % h;
      const auto t = random_traces(rng, n, h, 2 + rng() % 2);
      const auto g = greedy_complexity(t, l);
      CHECK(g <= n);
      CHECK(g <= distinct_lseqs(t, l).size());
      CHECK(g >= oracle_min_cover(t, l));
      agree += g == oracle_min_cover(t, l);
    }
    CHECK(agree == 100);
  }

  TEST_CASE("library brute-force cover matches the test oracle") {
    CHECK(minimum_set_cover({{1, 2, 3}, {1, 4}, {2, 5}, {3, 6}, {4, 5, 6}}) == 2);
    CHECK(minimum_set_cover({{1}}) == 1);
  }

  TEST_CASE("certify") {
    const auto a = test::ys(2);
    const auto single = certify(test::traces(a, {"y1 y2"}), 2, 1e-12);
    CHECK(single.s_star == 1);
    CHECK(single.epsilon == 1.0);
    CHECK_FALSE(single.gamma_bar);

    std::mt19937_64 rng(4);
    auto c = certify(random_traces(rng, 500, 6, 3), 3, 1e-6);
    CHECK(c.epsilon == epsilon(c.s_star, 500, 1e-6));
    c.attach_phi(0.5);
    CHECK(*c.gamma_bar == c.epsilon / 0.5);
    CHECK_THROWS_AS(c.attach_phi(0.0), Error);
    const nlohmann::json j = c;
    CHECK(j.contains("solver"));
    CHECK(j["phi"] == 0.5);
    const auto back = j.get<Certificate>();
    CHECK(back.epsilon == c.epsilon);
    CHECK(back.s_star == c.s_star);
    CHECK(*back.gamma_bar == *c.gamma_bar);
    CHECK(back.solver.iterations == c.solver.iterations);
  }

  TEST_CASE("certificate reproduces from serialized traces") {
    const auto s = make_hybrid1d(0.01);
    const auto p = make_dyadic_partition();
    const auto t = sample_traces(s, p, UniformBox{s.domain, {}}, 2000, 9, 5);
    std::stringstream io;
    write_traces_csv(io, t);
    const auto back = read_traces_csv(io);
    const auto a = certify(t, 2, 1e-12), b = certify(back, 2, 1e-12);
    CHECK(a.s_star == b.s_star);
    CHECK(a.epsilon == b.epsilon);
  }

  TEST_CASE("hybrid sample sees all six sequences at any seed") {
    const auto s = make_hybrid1d(0.01);
    const auto p = make_dyadic_partition();
    for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
      const auto t = sample_traces(s, p, UniformBox{s.domain, {}}, 10000, 9, seed);
      CHECK(distinct_lseqs(t, 2).size() == 6);
      CHECK(greedy_complexity(t, 2) == 1);
    }
  }

  TEST_CASE("empirical violation") {
    const auto s = make_hybrid1d(0.01);
    const auto p = make_dyadic_partition();
    const auto t = sample_traces(s, p, UniformBox{s.domain, {}}, 3000, 4, 6);
    CHECK(empirical_violation(distinct_lseqs(t, 2), t, 2) == 0.0);
    const auto fresh = sample_traces(s, p, UniformBox{s.domain, {}}, 20000, 2, 7);
    CHECK(empirical_violation(distinct_lseqs(t, 2), fresh, 2) == 0.0);
    CHECK(empirical_violation(std::vector<LSeq>{}, fresh, 2) == 1.0);
  }
}
