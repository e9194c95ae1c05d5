#pragma once

// Infinite-horizon extension: the measure-contraction profile phi(k) of
// stable affine systems, gamma_bar, and the bisimulation horizon check.

#include <cstddef>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "lcv/abstraction.hpp"
#include "lcv/systems.hpp"

namespace lcv {

struct AffineBoundParams {
  double alpha = 0.5;  // >= ||A||_2, in (0, 1)
  double rho = 2.0;    // >= |det A^-1|, > 1
  double d_min = 1.0;  // inscribed radius of the equilibrium cell
  double d_max = 1.0;  // circumscribed radius of the domain

  /// Throws on violated invariants.
  void validate() const;
};

/// ceil(log_alpha(d_min / d_max)).
std::size_t kbar(const AffineBoundParams& params);

struct PhiProfile {
  AffineBoundParams params;
  std::size_t k_bar = 0;
};

PhiProfile make_phi_profile(const AffineBoundParams& params);

/// min((1 - rho)/(1 - rho^(kbar - k)), rho^(k - kbar)) below kbar, 1 from kbar on.
double phi_affine(double rho, std::size_t k_bar, std::size_t k);
inline double phi_affine(const PhiProfile& p, std::size_t k) {
  return phi_affine(p.params.rho, p.k_bar, k);
}

double gamma_bar(double epsilon, double phi_value);

enum class BisimExtension { ExtendsByHorizon, ExtendsByDeterminism, NotEstablished };

std::string to_string(BisimExtension e);

/// |Y|^(l-1) + l - 1, saturating at SIZE_MAX.
std::size_t bisim_horizon_bound(std::size_t alphabet_size, std::size_t l);

/// Conditional on the true system admitting a deterministic abstraction of
/// window length l, which data cannot confirm.
BisimExtension check_bisim_extension(const Slca& slca, std::size_t horizon, std::size_t l,
                                     std::size_t alphabet_size);

/// Spectral norm of A.
double spectral_norm(const Eigen::MatrixXd& a);
/// |det A^-1|; throws for singular A.
double inverse_det_abs(const Eigen::MatrixXd& a);

/// Distance from `center` to the nearest face of `box` (largest inscribed
/// 2-norm ball); zero if the center lies outside.
double inscribed_radius(const Box& box, const Eigen::VectorXd& center);
/// Largest distance from `center` to a corner of `box` (2-norm).
double circumscribed_radius(const Box& box, const Eigen::VectorXd& center);
/// Largest per-axis distance to a face of `box` (infinity norm).
double circumscribed_radius_chebyshev(const Box& box, const Eigen::VectorXd& center);

/// Cell of a uniform grid containing `x`.
Box grid_cell(const UniformGrid& grid, const Eigen::VectorXd& x);

void to_json(nlohmann::json& j, const AffineBoundParams& p);
void to_json(nlohmann::json& j, const PhiProfile& p);

}  // namespace lcv
