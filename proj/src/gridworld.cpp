#include "lcv/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lcv/core.hpp"

namespace lcv {

Cell move(Cell c, Action a) {
  switch (a) {
    case Action::Up: return {c.x, c.y + 1};
    case Action::Down: return {c.x, c.y - 1};
    case Action::Left: return {c.x - 1, c.y};
    case Action::Right: return {c.x + 1, c.y};
  }
  return c;
}

Eigen::Vector2d action_vector(Action a) {
  switch (a) {
    case Action::Up: return {0.0, 1.0};
    case Action::Down: return {0.0, -1.0};
    case Action::Left: return {-1.0, 0.0};
    case Action::Right: return {1.0, 0.0};
  }
  return Eigen::Vector2d::Zero();
}

GridWorld::GridWorld(int size, std::vector<Cell> obstacles, std::vector<Cell> targets)
    : size_(size), obstacles_(std::move(obstacles)), targets_(std::move(targets)) {
  if (size_ <= 0) throw Error("grid size must be positive");
  if (targets_.empty()) throw Error("grid world needs at least one target cell");
  kinds_.assign(cell_count(), CellKind::Free);
  for (auto c : obstacles_) {
    if (!inside(c)) throw Error("obstacle cell outside the grid");
    kinds_[index(c)] = CellKind::Obstacle;
  }
  for (auto c : targets_) {
    if (!inside(c)) throw Error("target cell outside the grid");
    if (kinds_[index(c)] == CellKind::Obstacle) throw Error("a cell cannot be both obstacle and target");
    kinds_[index(c)] = CellKind::Target;
  }
  std::sort(obstacles_.begin(), obstacles_.end());
  std::sort(targets_.begin(), targets_.end());
}

Cell GridWorld::locate(const Eigen::Vector2d& x) const {
  auto clamp = [&](double v) {
    return std::clamp(static_cast<int>(std::floor(v)), 0, size_ - 1);
  };
  return {clamp(x[0]), clamp(x[1])};
}

std::vector<Cell> GridWorld::free_cells() const {
  std::vector<Cell> out;
  for (std::size_t i = 0; i < cell_count(); ++i)
    if (kinds_[i] == CellKind::Free) out.push_back(cell(i));
  return out;
}

Action Policy::greedy(std::size_t cell) const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < kActionCount; ++a)
    if (q_[cell * kActionCount + a] > q_[cell * kActionCount + best]) best = a;
  return static_cast<Action>(best);
}

namespace {

struct Transition {
  Cell next;
  double reward;
  bool done;
};

Transition transition(const GridWorld& world, Cell c, Action a) {
  const Cell n = move(c, a);
  if (!world.inside(n)) return {c, -1.0, false};
  switch (world.kind(n)) {
    case CellKind::Target: return {n, 1.0, true};
    case CellKind::Obstacle: return {n, -1.0, false};
    case CellKind::Free: break;
  }
  return {n, 0.0, false};
}

}  // namespace

Policy train_gridworld_policy(const GridWorld& world, const QLearningParams& params,
                              std::uint64_t seed) {
  Policy policy(world.cell_count());
  std::vector<Cell> starts;
  for (std::size_t i = 0; i < world.cell_count(); ++i)
    if (world.kind(world.cell(i)) != CellKind::Target) starts.push_back(world.cell(i));
  if (starts.empty()) return policy;

  std::mt19937_64 rng(seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); };

  for (std::size_t ep = 0; ep < params.episodes; ++ep) {
    Cell c = starts[pick(starts.size())];
    for (std::size_t t = 0; t < params.max_steps; ++t) {
      const auto s = world.index(c);
      const Action a = uniform() < params.exploration ? static_cast<Action>(pick(kActionCount))
                                                      : policy.greedy(s);
      const auto tr = transition(world, c, a);
      double target = tr.reward;
      if (!tr.done) {
        const auto ns = world.index(tr.next);
        target += params.discount * policy.q(ns, policy.greedy(ns));
      }
      policy.q(s, a) += params.learning_rate * (target - policy.q(s, a));
      if (tr.done) break;
      c = tr.next;
    }
  }
  return policy;
}

double policy_success_rate(const GridWorld& world, const Policy& policy, std::size_t rollouts,
                           std::size_t horizon, std::uint64_t seed) {
  const auto starts = world.free_cells();
  if (starts.empty() || rollouts == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::size_t successes = 0;
  for (std::size_t r = 0; r < rollouts; ++r) {
    Cell c = starts[static_cast<std::size_t>(static_cast<double>(rng() >> 11) * 0x1.0p-53 *
                                             static_cast<double>(starts.size()))];
    for (std::size_t t = 0; t < horizon; ++t) {
      const Cell n = move(c, policy.greedy(world.index(c)));
      if (!world.inside(n)) continue;
      c = n;
      if (world.kind(c) == CellKind::Obstacle) break;
      if (world.kind(c) == CellKind::Target) {
        ++successes;
        break;
      }
    }
  }
  return static_cast<double>(successes) / static_cast<double>(rollouts);
}

Eigen::Vector2d continuous_action(const GridWorld& world, const Policy& policy,
                                  const Eigen::Vector2d& x) {
  const Cell home = world.locate(x);
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  double total = 0.0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const Cell g{home.x + dx, home.y + dy};
      if (!world.inside(g)) continue;
      const Eigen::Vector2d centre(g.x + 0.5, g.y + 0.5);
      const double d = (x - centre).norm();
      if (d >= 1.0) continue;
      const double w = 1.0 - d;
      total += w;
      if (world.kind(g) != CellKind::Target) sum += w * action_vector(policy.greedy(world.index(g)));
    }
  }
  if (total <= 0.0) throw Error("no grid point within unit distance of the state");
  return sum / total;
}

}  // namespace lcv
