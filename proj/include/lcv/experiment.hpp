#pragma once

// End-to-end experiment runner: sample, abstract, certify, extend to the
// infinite horizon, verify and report.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcv/abstraction.hpp"
#include "lcv/gridworld.hpp"
#include "lcv/guarantees.hpp"
#include "lcv/scenario.hpp"
#include "lcv/systems.hpp"

namespace lcv {

struct PropertyQuery {
  enum class Kind { Invariance, ReachStay };
  Kind kind = Kind::Invariance;
  std::vector<std::string> target;  // reach-stay only
  std::vector<std::string> bad;
  std::string text;
};

/// "invariance:R,DAGGER" or "reach-stay:G/R,DAGGER" (the bad part may be
/// empty, as in "reach-stay:G").
PropertyQuery parse_property(std::string_view text);

/// Symbols unknown to the automaton's alphabet cannot occur and are ignored.
VerificationVerdict verify(const Slca& slca, const PropertyQuery& query);

nlohmann::json verdict_json(const Slca& slca, const PropertyQuery& query,
                            const VerificationVerdict& verdict);

enum class HorizonStrategy { None, AffinePhi, Bisimulation, Oracle1d };
std::string to_string(HorizonStrategy s);

/// Sections: experiment, system, partition, distribution, training,
/// sampling, certificate, verification, infinite_horizon, validation, output.
struct ExperimentConfig {
  std::string name = "experiment";

  std::string system_type;  // affine | hybrid1d | gridworld
  Eigen::MatrixXd a;
  Eigen::VectorXd equilibrium;
  Box domain;
  std::string lambda_text = "1/100";
  int grid_size = 10;
  std::vector<Cell> obstacles;
  std::vector<Cell> targets;

  std::string partition_type;  // uniform_grid | dyadic | regions
  std::vector<std::size_t> cells_per_axis;

  std::optional<Box> initial_box;  // default: domain, or the free cells

  QLearningParams training;
  std::uint64_t training_seed = 0;
  std::size_t success_rollouts = 10000;

  std::size_t n = 0;
  std::size_t horizon = 0;
  std::size_t l = 0;
  std::uint64_t seed = 0;

  double beta = 1e-12;
  EpsilonStrategy solver = EpsilonStrategy::WaitAndJudge;

  std::vector<PropertyQuery> properties;

  HorizonStrategy strategy = HorizonStrategy::None;
  // affine_phi: explicit bounds override the values derived from A and the grid.
  std::optional<double> alpha;
  std::optional<double> rho;
  std::optional<double> d_min;
  std::optional<double> d_max;
  std::string d_max_norm = "euclidean";  // or chebyshev

  std::size_t fresh_n = 0;  // 0 disables the validation block
  std::uint64_t fresh_seed = 0;

  std::string report_path;
  std::string dot_path;
  std::string slca_path;
  std::string traces_path;
  std::string intervals_path;

  /// Effective key/value pairs per section, echoed into the report.
  nlohmann::json echo;
};

/// Parses INI text. `seed_override` replaces the sampling seed (LCV_SEED).
ExperimentConfig parse_config(std::istream& in, std::optional<std::uint64_t> seed_override = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = {});

struct BuiltSystem {
  SystemSpec system;
  Partition partition;
  UniformBox initial;
  std::optional<double> policy_success;
};

/// Trains the grid-world policy when needed.
BuiltSystem build_system(const ExperimentConfig& config);

struct RunOptions {
  unsigned threads = 0;
  std::filesystem::path output_dir;  // base for relative output paths
  bool write_outputs = true;
};

struct RunResult {
  nlohmann::json report;
  TraceSet traces;
  Slca witnessed;
  Slca completed;
  bool all_hold = true;
};

RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

/// Report JSON as written to disk (two-space indent, trailing newline).
std::string dump_report(const nlohmann::json& report);

/// Serialized automaton exactly as `run` and the abstract stage write it.
std::string slca_text(const Slca& slca);

}  // namespace lcv
