#pragma once

// Grid-world path planning benchmark: tabular Q-learning on the discrete
// grid, then a continuous controller interpolating the greedy actions.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace lcv {

struct Cell {
  int x = 0;
  int y = 0;
  friend constexpr auto operator<=>(Cell, Cell) = default;
};

enum class Action : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3 };
inline constexpr std::size_t kActionCount = 4;

Cell move(Cell c, Action a);
Eigen::Vector2d action_vector(Action a);

enum class CellKind { Free, Obstacle, Target };

/// Square grid of unit cells covering [0, size]^2.
class GridWorld {
 public:
  GridWorld(int size, std::vector<Cell> obstacles, std::vector<Cell> targets);

  int size() const { return size_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(size_) * size_; }
  bool inside(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < size_ && c.y < size_; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * size_ + c.x; }
  Cell cell(std::size_t index) const {
    return {static_cast<int>(index % size_), static_cast<int>(index / size_)};
  }
  CellKind kind(Cell c) const { return kinds_[index(c)]; }
  /// Cell containing a continuous position; the top and right borders belong
  /// to the last row/column.
  Cell locate(const Eigen::Vector2d& x) const;

  const std::vector<Cell>& obstacles() const { return obstacles_; }
  const std::vector<Cell>& targets() const { return targets_; }
  std::vector<Cell> free_cells() const;

 private:
  int size_;
  std::vector<Cell> obstacles_;
  std::vector<Cell> targets_;
  std::vector<CellKind> kinds_;
};

struct QLearningParams {
  std::size_t episodes = 100000;
  std::size_t max_steps = 40;
  double learning_rate = 0.1;
  double discount = 0.95;
  double exploration = 0.1;
};

/// Tabular action values, one row of four entries per cell.
class Policy {
 public:
  Policy() = default;
  explicit Policy(std::size_t cells) : q_(cells * kActionCount, 0.0) {}

  std::size_t cell_count() const { return q_.size() / kActionCount; }
  double& q(std::size_t cell, Action a) { return q_[cell * kActionCount + static_cast<std::size_t>(a)]; }
  double q(std::size_t cell, Action a) const {
    return q_[cell * kActionCount + static_cast<std::size_t>(a)];
  }
  /// Highest-valued action; ties go to the lowest action index.
  Action greedy(std::size_t cell) const;
  const std::vector<double>& table() const { return q_; }

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  std::vector<double> q_;
};

/// Epsilon-greedy Q-learning. Reward +1 on entering a target (episode ends),
/// -1 on entering an obstacle or bumping into the border (the agent stays
/// put), 0 otherwise. Episodes start in a uniformly drawn non-target cell.
Policy train_gridworld_policy(const GridWorld& world, const QLearningParams& params,
                              std::uint64_t seed);

/// Fraction of greedy rollouts on the discrete grid, started from uniformly
/// drawn free cells, that reach a target within `horizon` steps without
/// touching an obstacle.
double policy_success_rate(const GridWorld& world, const Policy& policy, std::size_t rollouts,
                           std::size_t horizon, std::uint64_t seed);

/// Weighted average of the greedy grid actions at the cell centres g with
/// |x - g| < 1, weights proportional to 1 - |x - g|. Target cells contribute
/// the zero action.
Eigen::Vector2d continuous_action(const GridWorld& world, const Policy& policy,
                                  const Eigen::Vector2d& x);

}  // namespace lcv
