#include "lcv/guarantees.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace lcv {

void AffineBoundParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  if (!(rho > 1.0)) throw Error("rho must exceed 1");
  if (!(d_min > 0.0 && d_min <= d_max)) throw Error("need 0 < d_min <= d_max");
}

std::size_t kbar(const AffineBoundParams& params) {
  params.validate();
  const double k = std::ceil(std::log(params.d_min / params.d_max) / std::log(params.alpha));
  return k <= 0.0 ? 0 : static_cast<std::size_t>(k);
}

PhiProfile make_phi_profile(const AffineBoundParams& params) { return {params, kbar(params)}; }

double phi_affine(double rho, std::size_t k_bar, std::size_t k) {
  if (!(rho > 1.0)) throw Error("rho must exceed 1");
  if (k >= k_bar) return 1.0;
  const double gap = static_cast<double>(k_bar - k);
  const double geometric = (1.0 - rho) / (1.0 - std::pow(rho, gap));
  return std::min(geometric, std::pow(rho, -gap));
}

double gamma_bar(double epsilon, double phi_value) {
  if (!(phi_value > 0.0)) throw Error("phi must be positive");
  return epsilon / phi_value;
}

std::string to_string(BisimExtension e) {
  switch (e) {
    case BisimExtension::ExtendsByHorizon: return "extends-by-horizon";
    case BisimExtension::ExtendsByDeterminism: return "extends-by-determinism";
    case BisimExtension::NotEstablished: return "not-established";
  }
  return "unknown";
}

std::size_t bisim_horizon_bound(std::size_t alphabet_size, std::size_t l) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  if (l == 0) throw Error("window length must be positive");
  std::size_t power = 1;
  for (std::size_t i = 0; i + 1 < l; ++i) {
    if (alphabet_size != 0 && power > kMax / alphabet_size) return kMax;
    power *= alphabet_size;
  }
  return power > kMax - (l - 1) ? kMax : power + (l - 1);
}

BisimExtension check_bisim_extension(const Slca& slca, std::size_t horizon, std::size_t l,
                                     std::size_t alphabet_size) {
  const auto bound = bisim_horizon_bound(alphabet_size, l);
  if (horizon >= bound) return BisimExtension::ExtendsByHorizon;
  if (horizon >= l && is_deterministic(slca) && is_non_blocking(slca))
    return BisimExtension::ExtendsByDeterminism;
  return BisimExtension::NotEstablished;
}

double spectral_norm(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

double inverse_det_abs(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error("determinant of a non-square matrix");
  const double det = a.determinant();
  if (det == 0.0) throw Error("matrix is singular");
  return 1.0 / std::abs(det);
}

double inscribed_radius(const Box& box, const Eigen::VectorXd& center) {
  if (!box.contains(center)) return 0.0;
  return std::min((center - box.lower).minCoeff(), (box.upper - center).minCoeff());
}

double circumscribed_radius(const Box& box, const Eigen::VectorXd& center) {
  const Eigen::VectorXd far = (center - box.lower).cwiseAbs().cwiseMax((box.upper - center).cwiseAbs());
  return far.norm();
}

double circumscribed_radius_chebyshev(const Box& box, const Eigen::VectorXd& center) {
  const Eigen::VectorXd far = (center - box.lower).cwiseAbs().cwiseMax((box.upper - center).cwiseAbs());
  return far.maxCoeff();
}

Box grid_cell(const UniformGrid& grid, const Eigen::VectorXd& x) {
  if (!grid.box.contains(x)) throw Error("point outside the grid");
  Box cell{grid.box.lower, grid.box.upper};
  for (std::size_t a = 0; a < grid.box.dim(); ++a) {
    const auto n = grid.cells_per_axis.at(a);
    const double width = (grid.box.upper[a] - grid.box.lower[a]) / static_cast<double>(n);
    auto i = static_cast<std::size_t>(std::floor((x[a] - grid.box.lower[a]) / width));
    i = std::min(i, n - 1);
    cell.lower[a] = grid.box.lower[a] + width * static_cast<double>(i);
    cell.upper[a] = grid.box.lower[a] + width * static_cast<double>(i + 1);
  }
  return cell;
}

void to_json(nlohmann::json& j, const AffineBoundParams& p) {
  j = {{"alpha", p.alpha}, {"rho", p.rho}, {"d_min", p.d_min}, {"d_max", p.d_max}};
}

void to_json(nlohmann::json& j, const PhiProfile& p) {
  j = {{"params", p.params}, {"k_bar", p.k_bar}};
}

}  // namespace lcv
