#pragma once

#include <functional>
#include <string>
#include <vector>

#include "amencert/grid.hpp"
#include "amencert/group.hpp"

namespace amencert {

enum class DiffeoKind { Rotation, SinePerturbed, Composite, UserSampled };

std::string to_string(DiffeoKind kind);

struct Jet {
  double value;
  double deriv;
};

inline constexpr Index kDefaultGridSize = 4096;

/// Orientation-preserving circle diffeomorphism stored as samples of a
/// degree-one lift F (F(x+1) = F(x) + 1) and of DF on the cell-centred grid.
///
/// Built-in maps (rotations, sine-perturbed rotations, their inverses and
/// compositions) additionally carry an exact evaluator, so composing a
/// built-in on the outside introduces no interpolation error.
class CircleDiffeo {
 public:
  /// Validates: deriv > 0, lift strictly increasing with lift[N-1] < lift[0] + 1,
  /// and secant slopes consistent with deriv to within `consistency_tol`.
  static CircleDiffeo from_samples(GridFunction lift, GridFunction deriv,
                                   double consistency_tol = -1.0);

  Index grid_size() const { return lift_.size(); }
  const GridFunction& lift() const { return lift_; }
  const GridFunction& deriv() const { return deriv_; }
  DiffeoKind kind() const { return kind_; }
  double theta() const { return theta_; }
  double amplitude() const { return amplitude_; }
  bool builtin() const { return static_cast<bool>(exact_); }

  /// Lift value and derivative at an arbitrary point.
  Jet eval(double x) const;

 private:
  friend CircleDiffeo identity_diffeo(Index);
  friend CircleDiffeo make_rotation(double, Index);
  friend CircleDiffeo make_sine_perturbed(double, double, Index);
  friend CircleDiffeo compose(const CircleDiffeo&, const CircleDiffeo&);
  friend CircleDiffeo invert(const CircleDiffeo&);

  static CircleDiffeo sample_exact(std::function<Jet(double)> exact, Index n, DiffeoKind kind);
  Jet interpolate(double x) const;

  GridFunction lift_;
  GridFunction deriv_;
  DiffeoKind kind_ = DiffeoKind::UserSampled;
  double theta_ = 0.0;
  double amplitude_ = 0.0;
  std::function<Jet(double)> exact_;
};

CircleDiffeo identity_diffeo(Index n = kDefaultGridSize);
CircleDiffeo make_rotation(double theta, Index n = kDefaultGridSize);
/// x -> x + theta + (a / 2pi) sin(2 pi x); requires |a| < 1.
CircleDiffeo make_sine_perturbed(double theta, double a, Index n = kDefaultGridSize);

/// (f o g)(x) = f(g(x)); derivative by the chain rule.
CircleDiffeo compose(const CircleDiffeo& f, const CircleDiffeo& g);
/// Monotone root-finding on the lift (Newton-polished for built-ins).
CircleDiffeo invert(const CircleDiffeo& f);

/// sup_x d(f(x), g(x)) + sup_x |Df(x) - Dg(x)| over the grid.
double c1_distance(const CircleDiffeo& f, const CircleDiffeo& g);
/// Both terms restricted to the grid point with index i.
double c1_distance_at(Index i, const CircleDiffeo& f, const CircleDiffeo& g);

/// Tolerance used for identity and commutation checks.
inline double diffeo_tolerance(Index n) { return 10.0 / static_cast<double>(n); }

/// A homomorphism G -> Diff^1_+(S^1) given on generators.
class ActionSpec {
 public:
  /// `generator_maps[i]` is the image of generator i (letter 2i); inverses are
  /// computed. Violations of the inverse/commutation checks throw for
  /// built-in maps and are recorded as warnings for sampled data.
  ActionSpec(GroupSpec group, std::vector<CircleDiffeo> generator_maps);

  const GroupSpec& group() const { return group_; }
  Index grid_size() const { return letters_.front().grid_size(); }
  const CircleDiffeo& letter(Letter s) const { return letters_.at(static_cast<std::size_t>(s)); }
  const std::vector<std::string>& warnings() const { return warnings_; }
  bool by_rotations() const;

 private:
  GroupSpec group_;
  std::vector<CircleDiffeo> letters_;
  std::vector<std::string> warnings_;
};

/// Phi_g = Phi_{s_1} o ... o Phi_{s_m} for g = s_1 ... s_m.
CircleDiffeo act(const ActionSpec& action, const Word& g);

/// Phi_g for every element of the ball, reusing Phi_{tail} for each word.
std::vector<CircleDiffeo> act_ball(const ActionSpec& action, const CayleyBall& ball);

}  // namespace amencert
