#pragma once

// Probability measures on the circle as densities on the cell-centred grid,
// their images under diffeomorphisms, Radon-Nikodym cocycles and Hellinger
// geometry.

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "amencert/circle.hpp"
#include "amencert/grid.hpp"

namespace amencert {

/// Density w.r.t. Lebesgue measure, normalised to unit midpoint-rule mass.
class GridMeasure {
 public:
  static GridMeasure lebesgue(Index n = kDefaultGridSize);
  /// Throws InputError on negative/non-finite values or zero mass.
  static GridMeasure from_density(GridFunction density);

  Index grid_size() const { return density_.size(); }
  const GridFunction& density() const { return density_; }
  /// Mass of the density handed to the constructor, before normalisation.
  double raw_mass() const { return raw_mass_; }
  bool strictly_positive() const { return (density_.array() > 0.0).all(); }
  bool is_lebesgue() const { return (density_.array() == 1.0).all(); }

 private:
  GridFunction density_;
  double raw_mass_ = 1.0;
};

/// Throws UnsupportedMeasureError unless the density is strictly positive.
void require_positive(const GridMeasure& nu, const char* role);

/// Midpoint-rule value of the integral of f against nu.
double integrate(const GridFunction& f, const GridMeasure& nu);

/// Image measure: density_out(y) = p(phi^-1 y) * D(phi^-1)(y).
GridMeasure pushforward(const GridMeasure& nu, const CircleDiffeo& phi);

/// rho_g = d(g_* nu)/d nu, given Phi_{g^-1}:
///   rho_g(x) = p(Phi_{g^-1} x) * DPhi_{g^-1}(x) / p(x).
GridFunction radon_nikodym(const CircleDiffeo& inverse_map, const GridMeasure& nu);
GridFunction radon_nikodym(const ActionSpec& action, const GridMeasure& nu, const Word& g);

/// Phi_g and rho_g for every g in a ball. `maps[i]` is Phi of ball[i].
struct BallCocycle {
  CayleyBall ball;
  std::vector<CircleDiffeo> maps;
  std::vector<GridFunction> rho;

  const CircleDiffeo& map_of(const Word& g) const;
  const GridFunction& rho_of(const Word& g) const;
};

BallCocycle rho_on_ball(const ActionSpec& action, const GridMeasure& nu, int radius,
                        std::size_t cap = kDefaultBallCap);

/// Fixed battery of smooth test functions (constant, three trig pairs, a bump).
using TestFunction = std::function<double(double)>;
const std::array<TestFunction, 8>& test_battery();

/// max over the battery of | int g*f rho_g dnu - int f dnu |, g*f(x) = f(Phi_{g^-1} x).
double defining_identity_defect(const ActionSpec& action, const GridMeasure& nu, const Word& g);

/// max_x | rho_{gh}(x) - rho_g(x) rho_h(Phi_{g^-1} x) |
double cocycle_check(const ActionSpec& action, const GridMeasure& nu, const Word& g, const Word& h);

/// Hellinger affinity of densities r1, r2 taken w.r.t. a reference measure
/// with weights w (midpoint rule): sum sqrt(r1 r2) w / N.
template <typename D1, typename D2, typename D3>
double hellinger_affinity_kernel(const Eigen::MatrixBase<D1>& r1, const Eigen::MatrixBase<D2>& r2,
                                 const Eigen::MatrixBase<D3>& w) {
  return ((r1.array() * r2.array()).sqrt() * w.array()).sum() / static_cast<double>(w.size());
}

double hellinger(const GridMeasure& mu1, const GridMeasure& mu2, const GridMeasure& nu);
double affinity(const GridMeasure& mu1, const GridMeasure& mu2, const GridMeasure& nu);
double l1_distance(const GridMeasure& mu1, const GridMeasure& mu2, const GridMeasure& nu);
inline double total_variation(const GridMeasure& mu1, const GridMeasure& mu2, const GridMeasure& nu) {
  return 0.5 * l1_distance(mu1, mu2, nu);
}

/// 1 - (1/#S) sum_s int sqrt(rho_s) dnu  (= average squared Hellinger distance
/// between nu and its generator translates).
double avg_hellinger_sq(const ActionSpec& action, const GridMeasure& nu);
/// Same quantity through hellinger(nu, pushforward(nu, Phi_s)).
double avg_hellinger_sq_via_pushforward(const ActionSpec& action, const GridMeasure& nu);

/// |Q_N - Q_{N/2}| for the beta integral, where Q_{N/2} uses every other
/// grid point; a computable estimate of the quadrature error.
double avg_hellinger_sq_quadrature_error(const ActionSpec& action, const GridMeasure& nu);

}  // namespace amencert
