#include "lcv/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <json.hpp>

#include "lcv/systems.hpp"

namespace lcv {

namespace {

// Window ids per trace, deduplicated, plus the universe size.
struct CoverInstance {
  std::vector<std::vector<std::size_t>> sets;
  std::size_t universe = 0;
};

CoverInstance cover_instance(const TraceSet& traces, std::size_t l) {
  if (traces.empty()) throw Error("greedy complexity of an empty trace set");
  if (l == 0 || l > traces.horizon()) throw Error("window length must lie in [1, H]");
  CoverInstance inst;
  std::unordered_map<LSeq, std::size_t, LSeqHash> ids;
  inst.sets.reserve(traces.size());
  for (const auto& trace : traces.traces()) {
    std::vector<std::size_t> set;
    for (auto& w : window(trace, l)) {
      auto [it, fresh] = ids.try_emplace(std::move(w), ids.size());
      set.push_back(it->second);
    }
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    inst.sets.push_back(std::move(set));
  }
  inst.universe = ids.size();
  return inst;
}

}  // namespace

std::vector<std::size_t> greedy_set_cover(const TraceSet& traces, std::size_t l) {
  const auto inst = cover_instance(traces, l);
  std::vector<std::vector<std::size_t>> holders(inst.universe);
  std::vector<std::size_t> uncovered(inst.sets.size());
  for (std::size_t i = 0; i < inst.sets.size(); ++i) {
    uncovered[i] = inst.sets[i].size();
    for (auto e : inst.sets[i]) holders[e].push_back(i);
  }
  std::vector<bool> covered(inst.universe, false);
  std::size_t remaining = inst.universe;
  std::vector<std::size_t> chosen;
  while (remaining > 0) {
    // max_element returns the first maximum, i.e. the lowest index.
    const auto best = static_cast<std::size_t>(
        std::max_element(uncovered.begin(), uncovered.end()) - uncovered.begin());
    chosen.push_back(best);
    for (auto e : inst.sets[best]) {
      if (covered[e]) continue;
      covered[e] = true;
      --remaining;
      for (auto t : holders[e]) --uncovered[t];
    }
  }
  return chosen;
}

std::size_t greedy_complexity(const TraceSet& traces, std::size_t l) {
  return greedy_set_cover(traces, l).size();
}

std::size_t minimum_set_cover(const std::vector<std::vector<std::size_t>>& sets) {
  if (sets.empty()) throw Error("set cover of no sets");
  if (sets.size() > 20) throw Error("brute-force set cover limited to 20 sets");
  std::vector<std::size_t> universe;
  for (const auto& s : sets) universe.insert(universe.end(), s.begin(), s.end());
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  if (universe.size() > 64) throw Error("brute-force set cover limited to 64 elements");
  std::vector<std::uint64_t> masks;
  for (const auto& s : sets) {
    std::uint64_t m = 0;
    for (auto e : s)
      m |= std::uint64_t{1} << (std::lower_bound(universe.begin(), universe.end(), e) - universe.begin());
    masks.push_back(m);
  }
  const std::uint64_t full = universe.size() == 64 ? ~std::uint64_t{0}
                                                   : (std::uint64_t{1} << universe.size()) - 1;
  std::size_t best = sets.size();
  for (std::uint32_t subset = 1; subset < (1u << sets.size()); ++subset) {
    const auto size = static_cast<std::size_t>(std::popcount(subset));
    if (size >= best) continue;
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (subset & (1u << i)) m |= masks[i];
    if (m == full) best = size;
  }
  return best;
}

std::string to_string(EpsilonStrategy s) {
  switch (s) {
    case EpsilonStrategy::WaitAndJudge: return "wait-and-judge";
    case EpsilonStrategy::NonConvexGeneral: return "non-convex-general";
  }
  return "unknown";
}

EpsilonStrategy parse_epsilon_strategy(std::string_view name) {
  if (name == "wait-and-judge") return EpsilonStrategy::WaitAndJudge;
  if (name == "non-convex-general") return EpsilonStrategy::NonConvexGeneral;
  throw Error("unknown epsilon strategy '" + std::string(name) + "'");
}

LogFactorialTable::LogFactorialTable(std::size_t size) : table_(size) {
  for (std::size_t n = 0; n < size; ++n) table_[n] = std::lgamma(static_cast<double>(n) + 1.0);
}

double LogFactorialTable::log_binomial(std::size_t n, std::size_t k) const {
  if (k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

namespace {

// log sum exp(x_i) with compensated summation of the scaled terms.
double log_sum_exp(std::span<const double> xs) {
  const double top = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(top)) return top;
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double v = std::exp(x - top);
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return top + std::log(sum + comp);
}

}  // namespace

EpsilonResult solve_epsilon(std::size_t k, std::size_t n, double beta, EpsilonStrategy strategy,
                            double rel_tol) {
  if (!(beta > 0.0 && beta < 1.0)) throw Error("beta must lie in (0, 1)");
  if (k > n) throw Error("complexity exceeds the sample count");
  if (!(rel_tol > 0.0)) throw Error("solver tolerance must be positive");
  EpsilonResult result{1.0, 0, rel_tol, strategy};
  if (k == n) return result;

  const LogFactorialTable lf(n + 2);
  const bool wj = strategy == EpsilonStrategy::WaitAndJudge;
  const double log_scale = std::log(beta) - std::log(static_cast<double>(wj ? n + 1 : n));
  const std::size_t last = wj ? n : n - 1;
  std::vector<double> log_binom(last - k + 1);
  for (std::size_t m = k; m <= last; ++m) log_binom[m - k] = lf.log_binomial(m, k);
  const double log_cnk = lf.log_binomial(n, k);

  std::vector<double> terms(log_binom.size());
  // g(e) < 0 below the root and > 0 above it, with t = 1 - e.
  auto g = [&](double e) {
    const double log_t = std::log1p(-e);
    for (std::size_t i = 0; i < terms.size(); ++i)
      terms[i] = log_binom[i] + (i == 0 ? 0.0 : static_cast<double>(i) * log_t);
    return log_scale + log_sum_exp(terms) - (log_cnk + static_cast<double>(n - k) * log_t);
  };

  double lo = 0.0, hi = 1.0;
  if (!(g(lo) < 0.0)) throw Error("epsilon root not bracketed at t = 1");
  // At t -> 0 the right-hand side vanishes while the m = k term stays 1.
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    ++result.iterations;
  }
  result.epsilon = 0.5 * (lo + hi);
  return result;
}

void Certificate::attach_phi(double phi) {
  if (!(phi > 0.0 && phi <= 1.0)) throw Error("phi must lie in (0, 1]");
  phi_value = phi;
  gamma_bar = epsilon / phi;
}

Certificate certify(const TraceSet& traces, std::size_t l, double beta, EpsilonStrategy strategy) {
  Certificate c;
  c.n = traces.size();
  c.horizon = traces.horizon();
  c.l = l;
  c.beta = beta;
  c.s_star = greedy_complexity(traces, l);
  const auto eps = solve_epsilon(c.s_star, c.n, beta, strategy);
  c.epsilon = eps.epsilon;
  c.solver = {eps.strategy, eps.tolerance, eps.iterations};
  return c;
}

void to_json(nlohmann::json& j, const Certificate& c) {
  j = nlohmann::json{{"N", c.n},          {"H", c.horizon},       {"l", c.l},
                     {"beta", c.beta},    {"s_star", c.s_star},   {"epsilon", c.epsilon}};
  if (c.gamma_bar) j["gamma_bar"] = *c.gamma_bar;
  if (c.phi_value) j["phi"] = *c.phi_value;
  j["solver"] = {{"strategy", to_string(c.solver.strategy)},
                 {"tolerance", c.solver.tolerance},
                 {"iterations", c.solver.iterations}};
}

void from_json(const nlohmann::json& j, Certificate& c) {
  c.n = j.at("N").get<std::size_t>();
  c.horizon = j.at("H").get<std::size_t>();
  c.l = j.at("l").get<std::size_t>();
  c.beta = j.at("beta").get<double>();
  c.s_star = j.at("s_star").get<std::size_t>();
  c.epsilon = j.at("epsilon").get<double>();
  c.gamma_bar.reset();
  c.phi_value.reset();
  if (j.contains("gamma_bar")) c.gamma_bar = j["gamma_bar"].get<double>();
  if (j.contains("phi")) c.phi_value = j["phi"].get<double>();
  const auto& s = j.at("solver");
  c.solver.strategy = parse_epsilon_strategy(s.at("strategy").get<std::string>());
  c.solver.tolerance = s.at("tolerance").get<double>();
  c.solver.iterations = s.at("iterations").get<std::size_t>();
}

double empirical_violation(const WindowSet& witnessed, const TraceSet& fresh, std::size_t l,
                           unsigned threads) {
  if (fresh.empty()) return 0.0;
  if (l == 0 || l > fresh.horizon()) throw Error("window length must lie in [1, H]");
  std::vector<char> violated(fresh.size(), 0);
  parallel_for(fresh.size(), threads, [&](std::size_t i) {
    const auto word = fresh[i].symbols();
    for (std::size_t s = 0; s + l <= word.size(); ++s) {
      if (!witnessed.contains(LSeq(word.subspan(s, l)))) {
        violated[i] = 1;
        return;
      }
    }
  });
  const auto count = std::count(violated.begin(), violated.end(), 1);
  return static_cast<double>(count) / static_cast<double>(fresh.size());
}

double empirical_violation(std::span<const LSeq> witnessed, const TraceSet& fresh, std::size_t l,
                           unsigned threads) {
  return empirical_violation(WindowSet(witnessed.begin(), witnessed.end()), fresh, l, threads);
}

}  // namespace lcv
