#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "lcv/guarantees.hpp"

using namespace lcv;

TEST_SUITE("guarantees") {
  TEST_CASE("k_bar") {
    CHECK(kbar({0.5, 2.0, 1.0, 1.0}) == 0);
    CHECK(kbar({0.7676, 3.0, 1.0 / 9, 1.0}) == 9);
    CHECK(kbar({0.7676, 3.0, 1.0 / 9, std::sqrt(2.0)}) == 10);
    CHECK_THROWS_AS(kbar({1.2, 3.0, 0.1, 1.0}), Error);
    CHECK_THROWS_AS(kbar({0.5, 0.9, 0.1, 1.0}), Error);
    CHECK_THROWS_AS(kbar({0.5, 3.0, 2.0, 1.0}), Error);
  }

  TEST_CASE("phi") {
    // Branches at k = 2: (1-3)/(1-3^7) = 9.149e-4 and 3^-7 = 4.572e-4.
    CHECK(phi_affine(3.0, 9, 2) == doctest::Approx(std::pow(3.0, -7)));
    CHECK(phi_affine(3.0, 9, 2) == doctest::Approx(4.57e-4).epsilon(1e-3));
    CHECK(phi_affine(3.0, 9, 9) == 1.0);
    CHECK(phi_affine(3.0, 9, 20) == 1.0);
    CHECK(phi_affine(3.0, 9, 8) == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("phi is non-decreasing with both branches in (0, 1)") {
    for (double rho : {1.01, 1.5, 3.0, 10.0}) {
      for (std::size_t kb : {1u, 4u, 9u, 15u}) {
        double prev = 0.0;
        for (std::size_t k = 0; k <= kb + 2; ++k) {
          const double p = phi_affine(rho, kb, k);
          CHECK(p >= prev);
          CHECK((p > 0.0 && p <= 1.0));
          if (k < kb) {
            const double gap = static_cast<double>(kb - k);
            const double geo = (1 - rho) / (1 - std::pow(rho, gap));
            CHECK((geo > 0.0 && geo <= 1.0));
            CHECK((std::pow(rho, -gap) > 0.0 && std::pow(rho, -gap) < 1.0));
          }
          prev = p;
        }
        CHECK(phi_affine(rho, kb, kb) == 1.0);
      }
    }
  }

  TEST_CASE("gamma_bar") {
    CHECK(gamma_bar(7.45e-9, 4.572e-4) == doctest::Approx(1.63e-5).epsilon(0.01));
    CHECK(gamma_bar(0.01, 1.0) == 0.01);
    CHECK(gamma_bar(0.0, 0.3) == 0.0);
    CHECK_THROWS_AS(gamma_bar(0.1, 0.0), Error);
    double prev = 1e300;
    for (std::size_t k = 0; k < 12; ++k) {
      const double g = gamma_bar(0.01, phi_affine(3.0, 9, k));
      CHECK(g <= prev);
      prev = g;
    }
  }

  TEST_CASE("bisimulation horizon check") {
    const auto a = test::ys(2);
    const Slca chain(a, 2, {test::seq(a, "y1 y2"), test::seq(a, "y2 y2")});
    CHECK(bisim_horizon_bound(2, 2) == 3);
    CHECK(check_bisim_extension(chain, 3, 2, 2) == BisimExtension::ExtendsByHorizon);
    CHECK(check_bisim_extension(chain, 2, 2, 2) == BisimExtension::ExtendsByDeterminism);
    const Slca branching(a, 2, {test::seq(a, "y1 y1"), test::seq(a, "y1 y2"), test::seq(a, "y2 y1")});
    CHECK(check_bisim_extension(branching, 2, 2, 2) == BisimExtension::NotEstablished);
    // 3^26 + 26 fits; a huge exponent saturates.
    CHECK(bisim_horizon_bound(3, 27) == 2541865828329ull + 26);
    CHECK(bisim_horizon_bound(3, 200) == std::numeric_limits<std::size_t>::max());
  }

  TEST_CASE("affine helpers") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 2.0, -1.0, 1.0;
    a /= 3.0;
    CHECK(spectral_norm(a) == doctest::Approx(0.7676).epsilon(1e-4));
    CHECK(inverse_det_abs(a) == doctest::Approx(3.0));
    Eigen::VectorXd lo(2), hi(2), c = Eigen::VectorXd::Zero(2);
    lo << -1, -1;
    hi << 1, 1;
    const Box d{lo, hi};
    CHECK(circumscribed_radius(d, c) == doctest::Approx(std::sqrt(2.0)));
    CHECK(circumscribed_radius_chebyshev(d, c) == doctest::Approx(1.0));
    const auto cell = grid_cell(UniformGrid{d, {9, 9}}, c);
    CHECK(cell.lower[0] == doctest::Approx(-1.0 / 9));
    CHECK(cell.upper[0] == doctest::Approx(1.0 / 9));
    CHECK(inscribed_radius(cell, c) == doctest::Approx(1.0 / 9));
    CHECK(inscribed_radius(cell, hi) == 0.0);
  }
}
