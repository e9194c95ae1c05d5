#pragma once

// Scenario certificates: complexity by greedy set cover, the risk bound
// epsilon(k, N, beta), and Monte-Carlo validation of the violation rate.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "lcv/core.hpp"

namespace lcv {

/// Greedy cover of the distinct windows by per-trace window sets. Returns the
/// selected trace indices in selection order; ties go to the lowest index.
std::vector<std::size_t> greedy_set_cover(const TraceSet& traces, std::size_t l);
std::size_t greedy_complexity(const TraceSet& traces, std::size_t l);

/// Exact minimum cover size by subset enumeration; for small instances only.
std::size_t minimum_set_cover(const std::vector<std::vector<std::size_t>>& sets);

enum class EpsilonStrategy {
  /// (beta/(N+1)) sum_{m=k}^{N} C(m,k) t^{m-k} = C(N,k) t^{N-k}
  WaitAndJudge,
  /// (beta/N) sum_{m=k}^{N-1} C(m,k) t^{m-k} = C(N,k) t^{N-k}
  NonConvexGeneral,
};

std::string to_string(EpsilonStrategy s);
EpsilonStrategy parse_epsilon_strategy(std::string_view name);

/// log n! for n in [0, size), by cumulative sums of log i.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(std::size_t size);
  double log_factorial(std::size_t n) const { return table_.at(n); }
  double log_binomial(std::size_t n, std::size_t k) const;

 private:
  std::vector<double> table_;
};

struct EpsilonResult {
  double epsilon = 1.0;
  std::size_t iterations = 0;
  double tolerance = 1e-12;
  EpsilonStrategy strategy = EpsilonStrategy::WaitAndJudge;
};

inline constexpr double kEpsilonTolerance = 1e-12;

EpsilonResult solve_epsilon(std::size_t k, std::size_t n, double beta,
                            EpsilonStrategy strategy = EpsilonStrategy::WaitAndJudge,
                            double rel_tol = kEpsilonTolerance);
inline double epsilon(std::size_t k, std::size_t n, double beta,
                      EpsilonStrategy strategy = EpsilonStrategy::WaitAndJudge) {
  return solve_epsilon(k, n, beta, strategy).epsilon;
}

struct SolverInfo {
  EpsilonStrategy strategy = EpsilonStrategy::WaitAndJudge;
  double tolerance = kEpsilonTolerance;
  std::size_t iterations = 0;
};

struct Certificate {
  std::size_t n = 0;
  std::size_t horizon = 0;
  std::size_t l = 0;
  double beta = 0.0;
  std::size_t s_star = 0;
  double epsilon = 1.0;
  std::optional<double> gamma_bar;
  std::optional<double> phi_value;
  SolverInfo solver;

  /// Sets phi_value and gamma_bar = epsilon / phi.
  void attach_phi(double phi);
};

Certificate certify(const TraceSet& traces, std::size_t l, double beta,
                    EpsilonStrategy strategy = EpsilonStrategy::WaitAndJudge);

void to_json(nlohmann::json& j, const Certificate& c);
void from_json(const nlohmann::json& j, Certificate& c);

using WindowSet = std::unordered_set<LSeq, LSeqHash>;

/// Fraction of fresh traces with at least one window outside `witnessed`.
double empirical_violation(const WindowSet& witnessed, const TraceSet& fresh, std::size_t l,
                           unsigned threads = 0);
double empirical_violation(std::span<const LSeq> witnessed, const TraceSet& fresh, std::size_t l,
                           unsigned threads = 0);

}  // namespace lcv
