#include "lcv/systems.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/LU>

namespace lcv {

bool Box::contains(const State& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  return true;
}

bool Box::contains(const Box& other) const {
  if (other.dim() != dim()) return false;
  return (other.lower.array() >= lower.array()).all() &&
         (other.upper.array() <= upper.array()).all();
}

namespace {

void check_box(const Box& b) {
  if (b.lower.size() != b.upper.size() || b.lower.size() == 0)
    throw Error("box bounds must be non-empty and of equal dimension");
  if (!(b.lower.array() < b.upper.array()).all()) throw Error("box lower bound must be below upper bound");
}

Box unit_box(Eigen::Index n, double lo, double hi) {
  return {Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi)};
}

}  // namespace

std::string SystemSpec::name() const {
  struct Visitor {
    std::string operator()(const AffineSystem&) const { return "affine"; }
    std::string operator()(const Hybrid1d&) const { return "hybrid1d"; }
    std::string operator()(const GridworldSystem&) const { return "gridworld"; }
  };
  return std::visit(Visitor{}, dynamics);
}

SystemSpec make_affine(Eigen::MatrixXd a, Eigen::VectorXd equilibrium, Box domain) {
  check_box(domain);
  const auto n = static_cast<Eigen::Index>(domain.dim());
  if (a.rows() != n || a.cols() != n || equilibrium.size() != n)
    throw Error("affine system: matrix, equilibrium and domain dimensions disagree");
  if (a.fullPivLu().rank() != n) throw Error("affine system: A must be full rank");
  return {AffineSystem{std::move(a), std::move(equilibrium)}, std::move(domain)};
}

SystemSpec make_hybrid1d(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0 / 16.0)) throw Error("hybrid1d: lambda must lie in (0, 2^-4)");
  return {Hybrid1d{lambda}, unit_box(1, 0.0, 1.0)};
}

SystemSpec make_gridworld(GridWorld world, Policy policy) {
  if (policy.cell_count() != world.cell_count())
    throw Error("gridworld: policy table does not match the grid");
  Box domain = unit_box(2, 0.0, world.size());
  return {GridworldSystem{std::move(world), std::move(policy)}, std::move(domain)};
}

State step(const SystemSpec& system, const State& x) {
  if (static_cast<std::size_t>(x.size()) != system.dim())
    throw Error("state dimension " + std::to_string(x.size()) + " does not match system dimension " +
                std::to_string(system.dim()));
  struct Visitor {
    const State& x;
    State operator()(const AffineSystem& s) const { return s.a * (x - s.equilibrium); }
    State operator()(const Hybrid1d& s) const {
      State out(1);
      out[0] = x[0] <= s.lambda && x[0] >= 0.0 ? 0.5 * x[0] + 0.5 : 0.5 * x[0];
      return out;
    }
    State operator()(const GridworldSystem& s) const {
      Eigen::Vector2d p(x[0], x[1]);
      p += continuous_action(s.world, s.policy, p);
      p = p.cwiseMax(0.0).cwiseMin(static_cast<double>(s.world.size()));
      return State(p);
    }
  };
  return std::visit(Visitor{x}, system.dynamics);
}

// ---------------------------------------------------------------------------
// Partitions

Partition::Partition(Spec spec, std::vector<std::string> symbol_order) : spec_(std::move(spec)) {
  std::vector<std::string> cell_labels;
  if (auto* g = std::get_if<UniformGrid>(&spec_)) {
    check_box(g->box);
    if (g->cells_per_axis.size() != g->box.dim()) throw Error("uniform grid: one cell count per axis");
    std::size_t total = 1;
    for (auto c : g->cells_per_axis) {
      if (c == 0) throw Error("uniform grid: cell counts must be positive");
      total *= c;
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::string name = "c";
      std::size_t rem = idx;
      std::vector<std::size_t> digits(g->cells_per_axis.size());
      for (std::size_t a = g->cells_per_axis.size(); a-- > 0;) {
        digits[a] = rem % g->cells_per_axis[a];
        rem /= g->cells_per_axis[a];
      }
      for (std::size_t a = 0; a < digits.size(); ++a) name += (a ? "_" : "") + std::to_string(digits[a]);
      cell_labels.push_back(std::move(name));
    }
  } else if (auto* t = std::get_if<Thresholds1d>(&spec_)) {
    if (t->breakpoints.size() < 2) throw Error("thresholds: need at least two breakpoints");
    if (!std::is_sorted(t->breakpoints.begin(), t->breakpoints.end()) ||
        std::adjacent_find(t->breakpoints.begin(), t->breakpoints.end()) != t->breakpoints.end())
      throw Error("thresholds: breakpoints must be strictly increasing");
    if (t->labels.size() + 1 != t->breakpoints.size())
      throw Error("thresholds: need exactly one label per interval");
    cell_labels = t->labels;
  } else {
    const auto& r = std::get<RegionLabels>(spec_);
    if (r.size <= 0 || r.cell_labels.size() != static_cast<std::size_t>(r.size) * r.size)
      throw Error("region labels: need size*size cell labels");
    cell_labels = r.cell_labels;
  }

  Alphabet order(symbol_order);
  for (const auto& l : cell_labels) {
    if (l == Alphabet::kDaggerName) throw Error("partition labels cannot use the dagger name");
    if (symbol_order.empty()) order.intern(l);
    else if (!order.find(l)) throw Error("label '" + l + "' missing from the symbol order");
  }
  symbols_.assign(order.names().begin(), order.names().end());
  for (const auto& l : cell_labels) cell_symbol_.push_back(order.at(l));
}

Alphabet Partition::alphabet(bool with_dagger) const {
  Alphabet a(symbols_);
  if (with_dagger) a.intern(Alphabet::kDaggerName);
  return a;
}

SymbolId Partition::output(const State& x) const {
  if (auto* g = std::get_if<UniformGrid>(&spec_)) {
    if (!g->box.contains(x)) return dagger_id();
    std::size_t idx = 0;
    for (std::size_t a = 0; a < g->box.dim(); ++a) {
      const auto n = g->cells_per_axis[a];
      const double rel = (x[a] - g->box.lower[a]) / (g->box.upper[a] - g->box.lower[a]);
      auto i = static_cast<std::size_t>(std::floor(rel * static_cast<double>(n)));
      idx = idx * n + std::min(i, n - 1);
    }
    return cell_symbol_[idx];
  }
  if (auto* t = std::get_if<Thresholds1d>(&spec_)) {
    if (x.size() != 1) return dagger_id();
    const double v = x[0];
    const auto& b = t->breakpoints;
    if (!(v >= b.front() && v <= b.back())) return dagger_id();
    auto it = std::lower_bound(b.begin(), b.end(), v);
    std::size_t interval = it == b.begin() ? 0 : static_cast<std::size_t>(it - b.begin()) - 1;
    return cell_symbol_[interval];
  }
  const auto& r = std::get<RegionLabels>(spec_);
  if (x.size() != 2) return dagger_id();
  if (!(x[0] >= 0.0 && x[1] >= 0.0 && x[0] <= r.size && x[1] <= r.size)) return dagger_id();
  const int cx = std::min(static_cast<int>(std::floor(x[0])), r.size - 1);
  const int cy = std::min(static_cast<int>(std::floor(x[1])), r.size - 1);
  return cell_symbol_[static_cast<std::size_t>(cy) * r.size + cx];
}

Partition make_uniform_grid_partition(Box box, std::vector<std::size_t> cells_per_axis) {
  return Partition(UniformGrid{std::move(box), std::move(cells_per_axis)});
}

Partition make_dyadic_partition() {
  Thresholds1d t{{0.0, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0}, {"y5", "y4", "y3", "y2", "y1"}};
  return Partition(std::move(t), {"y1", "y2", "y3", "y4", "y5"});
}

Partition make_region_partition(const GridWorld& world) {
  RegionLabels r{world.size(), {}};
  r.cell_labels.resize(world.cell_count());
  for (std::size_t i = 0; i < world.cell_count(); ++i) {
    switch (world.kind(world.cell(i))) {
      case CellKind::Free: r.cell_labels[i] = "W"; break;
      case CellKind::Obstacle: r.cell_labels[i] = "R"; break;
      case CellKind::Target: r.cell_labels[i] = "G"; break;
    }
  }
  return Partition(std::move(r), {"W", "R", "G"});
}

// ---------------------------------------------------------------------------
// Sampling

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  engine_.seed(seq);
}

double StreamRng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

State draw_initial_state(const UniformBox& dist, StreamRng& rng) {
  constexpr int kMaxDraws = 1'000'000;
  State x(static_cast<Eigen::Index>(dist.box.dim()));
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = dist.box.lower[i] + (dist.box.upper[i] - dist.box.lower[i]) * rng.uniform01();
    if (std::none_of(dist.excluded.begin(), dist.excluded.end(),
                     [&](const Box& b) { return b.contains(x); }))
      return x;
  }
  throw Error("initial distribution rejects almost every draw");
}

UniformBox free_cell_distribution(const GridWorld& world) {
  const double n = world.size();
  UniformBox dist{Box{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(n, n)}, {}};
  for (std::size_t i = 0; i < world.cell_count(); ++i) {
    const Cell c = world.cell(i);
    if (world.kind(c) == CellKind::Free) continue;
    dist.excluded.push_back(Box{Eigen::Vector2d(c.x, c.y), Eigen::Vector2d(c.x + 1.0, c.y + 1.0)});
  }
  return dist;
}

std::vector<SymbolId> simulate(const SystemSpec& system, const Partition& partition,
                               const State& x0, std::size_t horizon) {
  if (horizon == 0) throw Error("horizon must be at least 1");
  std::vector<SymbolId> out;
  out.reserve(horizon);
  State x = x0;
  for (std::size_t k = 0; k < horizon; ++k) {
    const auto y = partition.output(x);
    out.push_back(y);
    if (y == partition.dagger_id()) {
      out.resize(horizon, y);
      break;
    }
    if (k + 1 < horizon) x = step(system, x);
  }
  return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n / 256, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  constexpr std::size_t kChunk = 256;
  auto worker = [&] {
    for (;;) {
      const auto begin = next.fetch_add(kChunk);
      if (begin >= n) return;
      const auto end = std::min(n, begin + kChunk);
      try {
        for (auto i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

TraceSet sample_traces(const SystemSpec& system, const Partition& partition,
                       const UniformBox& dist, std::size_t n, std::size_t horizon,
                       std::uint64_t seed, unsigned threads) {
  if (n == 0) throw Error("need at least one trajectory");
  if (horizon == 0) throw Error("horizon must be at least 1");
  if (!system.domain.contains(dist.box)) throw Error("initial box must lie inside the domain");
  std::vector<std::vector<SymbolId>> words(n);
  parallel_for(n, threads, [&](std::size_t i) {
    StreamRng rng(seed, i);
    words[i] = simulate(system, partition, draw_initial_state(dist, rng), horizon);
  });
  const auto dagger = partition.dagger_id();
  const bool exited = std::any_of(words.begin(), words.end(), [&](const auto& w) {
    return std::find(w.begin(), w.end(), dagger) != w.end();
  });
  Alphabet alphabet = partition.alphabet(exited);
  std::vector<Trace> traces;
  traces.reserve(n);
  for (auto& w : words) traces.emplace_back(std::move(w), alphabet);
  return TraceSet(std::move(alphabet), horizon, std::move(traces), Provenance{seed, system.name()});
}

}  // namespace lcv
