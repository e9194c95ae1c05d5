#pragma once

// Black-box dynamical systems, output partitions and trajectory sampling.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "lcv/core.hpp"
#include "lcv/gridworld.hpp"

namespace lcv {

using State = Eigen::VectorXd;

/// Axis-aligned box [lower, upper] in R^n.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  std::size_t dim() const { return static_cast<std::size_t>(lower.size()); }
  bool contains(const State& x) const;
  bool contains(const Box& other) const;
};

/// x+ = A (x - x_eq)
struct AffineSystem {
  Eigen::MatrixXd a;
  Eigen::VectorXd equilibrium;
};

/// x+ = x/2 on (lambda, 1], x/2 + 1/2 on [0, lambda].
struct Hybrid1d {
  double lambda = 0.01;
};

/// Agent on the continuous square driven by a trained grid policy.
struct GridworldSystem {
  GridWorld world;
  Policy policy;
};

struct SystemSpec {
  std::variant<AffineSystem, Hybrid1d, GridworldSystem> dynamics;
  Box domain;

  std::string name() const;
  std::size_t dim() const { return domain.dim(); }
};

SystemSpec make_affine(Eigen::MatrixXd a, Eigen::VectorXd equilibrium, Box domain);
SystemSpec make_hybrid1d(double lambda);
SystemSpec make_gridworld(GridWorld world, Policy policy);

State step(const SystemSpec& system, const State& x);

/// Uniform grid over a box. Cells are half-open [lo, hi) per axis, except
/// the last cell of each axis which also owns the upper face.
struct UniformGrid {
  Box box;
  std::vector<std::size_t> cells_per_axis;
};

/// Ordered breakpoints b0 < b1 < ... < bm on the line. Interval 0 is
/// [b0, b1]; interval i > 0 is (bi, bi+1]. `labels[i]` names interval i.
struct Thresholds1d {
  std::vector<double> breakpoints;
  std::vector<std::string> labels;
};

/// One label per unit cell of a grid world (row-major, y-major index).
struct RegionLabels {
  int size = 0;
  std::vector<std::string> cell_labels;
};

class Partition {
 public:
  using Spec = std::variant<UniformGrid, Thresholds1d, RegionLabels>;

  /// `symbol_order` fixes the alphabet order; when empty the labels are
  /// interned in order of first appearance.
  explicit Partition(Spec spec, std::vector<std::string> symbol_order = {});

  const Spec& spec() const { return spec_; }
  std::span<const std::string> symbols() const { return symbols_; }
  /// Id reported for states outside the covered region; one past the last
  /// regular symbol.
  SymbolId dagger_id() const { return SymbolId(static_cast<std::uint32_t>(symbols_.size())); }
  Alphabet alphabet(bool with_dagger) const;

  SymbolId output(const State& x) const;

 private:
  Spec spec_;
  std::vector<std::string> symbols_;
  std::vector<SymbolId> cell_symbol_;
};

/// Grid labels "c<i>_<j>..." for every cell of a uniform grid.
Partition make_uniform_grid_partition(Box box, std::vector<std::size_t> cells_per_axis);
/// The five-region partition P_i = (2^-i, 2^-i+1], P_5 = [0, 2^-4] with
/// symbols y1..y5.
Partition make_dyadic_partition();
/// W (free), R (obstacle), G (target) labels of a grid world.
Partition make_region_partition(const GridWorld& world);

inline SymbolId output(const Partition& partition, const State& x) { return partition.output(x); }

/// Uniform on `box` minus the `excluded` boxes (by rejection).
struct UniformBox {
  Box box;
  std::vector<Box> excluded;
};

/// Uniform on the free (white) cells of a grid world.
UniformBox free_cell_distribution(const GridWorld& world);

/// Deterministic per-trajectory random stream keyed by (seed, index).
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t index);
  /// Uniform double in [0, 1) built from the top 53 bits of one draw.
  double uniform01();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

State draw_initial_state(const UniformBox& dist, StreamRng& rng);

/// Output word of length H from x0. After the first dagger the remaining
/// symbols are dagger and the dynamics are no longer evaluated. Ids are the
/// partition's (dagger = partition.dagger_id()).
std::vector<SymbolId> simulate(const SystemSpec& system, const Partition& partition,
                               const State& x0, std::size_t horizon);

/// N traces from i.i.d. initial states. Trajectory i uses StreamRng(seed, i),
/// so the result does not depend on `threads` (0 = hardware concurrency).
/// The alphabet includes the dagger only if some trace left the domain.
TraceSet sample_traces(const SystemSpec& system, const Partition& partition,
                       const UniformBox& dist, std::size_t n, std::size_t horizon,
                       std::uint64_t seed, unsigned threads = 0);

/// Runs fn(i) for i in [0, n) across worker threads.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace lcv
