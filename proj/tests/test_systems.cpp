#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "lcv/systems.hpp"

using namespace lcv;

namespace {

State vec(std::initializer_list<double> v) {
  State x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

SystemSpec linear_system() {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 2.0, -1.0, 1.0;
  a /= 3.0;
  return make_affine(a, Eigen::VectorXd::Zero(2), Box{vec({-1, -1}), vec({1, 1})});
}

std::string name(const Partition& p, SymbolId id) {
  return id == p.dagger_id() ? "DAGGER" : p.symbols()[id.value];
}

}  // namespace

TEST_SUITE("systems") {
  TEST_CASE("hybrid step follows both branches") {
    const auto s = make_hybrid1d(0.01);
    CHECK(step(s, vec({1.0}))[0] == doctest::Approx(0.5));
    CHECK(step(s, vec({0.005}))[0] == doctest::Approx(0.5025));
    CHECK_THROWS_AS(step(s, vec({0.1, 0.2})), Error);
    CHECK_THROWS_AS(make_hybrid1d(0.07), Error);
    CHECK_THROWS_AS(make_hybrid1d(0.0), Error);
  }

  TEST_CASE("hybrid map keeps [0, 1] invariant") {
    const auto s = make_hybrid1d(0.01);
    for (int i = 0; i <= 1000; ++i) {
      const double x = i / 1000.0;
      const double y = step(s, vec({x}))[0];
      CHECK((y >= 0.0 && y <= 1.0));
    }
  }

  TEST_CASE("affine step") {
    const auto s = linear_system();
    const auto y = step(s, vec({1, 1}));
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(0.0));
    Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(make_affine(singular, Eigen::VectorXd::Zero(2), Box{vec({-1, -1}), vec({1, 1})}), Error);
  }

  TEST_CASE("dyadic partition uses the half-open convention") {
    const auto p = make_dyadic_partition();
    CHECK(name(p, p.output(vec({0.6}))) == "y1");
    CHECK(name(p, p.output(vec({0.05}))) == "y5");
    CHECK(name(p, p.output(vec({0.5}))) == "y2");
    CHECK(name(p, p.output(vec({1.0}))) == "y1");
    CHECK(name(p, p.output(vec({0.0}))) == "y5");
    CHECK(name(p, p.output(vec({0.0625}))) == "y5");
    CHECK(name(p, p.output(vec({1.5}))) == "DAGGER");
    CHECK(name(p, p.output(vec({-0.1}))) == "DAGGER");
  }

  TEST_CASE("uniform grid cells are closed on the lower face") {
    const auto p = make_uniform_grid_partition(Box{vec({-1, -1}), vec({1, 1})}, {2, 2});
    CHECK(p.symbols().size() == 4);
    CHECK(p.output(vec({5, 5})) == p.dagger_id());
    CHECK(p.output(vec({0, 0})) == p.output(vec({0.5, 0.5})));
    CHECK(p.output(vec({-0.1, -0.1})) != p.output(vec({0.0, 0.0})));
    CHECK(p.output(vec({1, 1})) == p.output(vec({0.9, 0.9})));
    CHECK(p.output(vec({-1, -1})) == p.output(vec({-0.5, -0.5})));
  }

  TEST_CASE("simulate") {
    const auto s = make_hybrid1d(0.01);
    const auto p = make_dyadic_partition();
    const auto a = p.alphabet(false);
    CHECK(simulate(s, p, vec({1.0}), 5) == test::word(a, "y1 y2 y3 y4 y5"));
    CHECK(simulate(s, p, vec({0.005}), 2) == test::word(a, "y5 y1"));
    CHECK(simulate(s, p, vec({0.3}), 1) == test::word(a, "y2"));
    // Prefix property.
    const auto full = simulate(s, p, vec({0.77}), 12);
    for (std::size_t h = 1; h <= 12; ++h) {
      const auto part = simulate(s, p, vec({0.77}), h);
      CHECK(std::equal(part.begin(), part.end(), full.begin()));
    }
  }

  TEST_CASE("dagger is absorbing in simulation") {
    Eigen::MatrixXd a(1, 1);
    a << 2.0;
    const auto s = make_affine(a, Eigen::VectorXd::Zero(1), Box{vec({-1}), vec({1})});
    const auto p = make_uniform_grid_partition(Box{vec({-1}), vec({1})}, {4});
    const auto w = simulate(s, p, vec({0.3}), 5);
    CHECK(w[0] != p.dagger_id());
    CHECK(w[1] != p.dagger_id());
    CHECK(w[2] == p.dagger_id());
    CHECK(w[4] == p.dagger_id());
    const auto set = sample_traces(s, p, UniformBox{Box{vec({-1}), vec({1})}, {}}, 200, 4, 9);
    CHECK(set.alphabet().dagger().has_value());
    CHECK(set.alphabet().dagger()->value == p.dagger_id().value);
  }

  TEST_CASE("sampling is reproducible and independent of the thread count") {
    const auto s = make_hybrid1d(0.01);
    const auto p = make_dyadic_partition();
    const UniformBox d{s.domain, {}};
    const auto a = sample_traces(s, p, d, 3000, 6, 17, 1);
    const auto b = sample_traces(s, p, d, 3000, 6, 17, 4);
    const auto c = sample_traces(s, p, d, 3000, 6, 18, 4);
    REQUIRE(a.size() == b.size());
    bool same = true, differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      same = same && a[i] == b[i];
      differs = differs || !(a[i] == c[i]);
    }
    CHECK(same);
    CHECK(differs);
    CHECK_FALSE(a.alphabet().dagger().has_value());
    CHECK(sample_traces(s, p, d, 1, 3, 0).size() == 1);
  }

  TEST_CASE("hybrid 2-sequence frequencies match the exact probabilities") {
    const auto s = make_hybrid1d(0.01);
    const auto p = make_dyadic_partition();
    const auto set = sample_traces(s, p, UniformBox{s.domain, {}}, 10000, 2, 4);
    std::map<std::string, double> freq;
    for (const auto& t : set.traces()) freq[format_word(t.symbols(), set.alphabet())] += 1.0 / 10000;
    const std::map<std::string, double> exact{{"y1y2", 0.5},    {"y2y3", 0.25},   {"y3y4", 0.125},
                                              {"y4y5", 0.0625}, {"y5y5", 0.0525}, {"y5y1", 0.01}};
    CHECK(freq.size() == exact.size());
    for (const auto& [w, pr] : exact) {
      const double sigma = std::sqrt(pr * (1 - pr) / 10000);
      CHECK_MESSAGE(std::abs(freq[w] - pr) <= 3 * sigma, w);
    }
  }

  TEST_CASE("stream RNG draws lie in [0, 1)") {
    StreamRng r(1, 2);
    for (int i = 0; i < 10000; ++i) {
      const double u = r.uniform01();
      CHECK((u >= 0.0 && u < 1.0));
    }
  }

  TEST_CASE("free-cell distribution avoids obstacles and targets") {
    GridWorld w(4, {{1, 1}}, {{3, 3}});
    const auto d = free_cell_distribution(w);
    StreamRng r(3, 0);
    for (int i = 0; i < 2000; ++i) {
      const auto x = draw_initial_state(d, r);
      CHECK(w.kind(w.locate(Eigen::Vector2d(x[0], x[1]))) == CellKind::Free);
    }
  }
}
