#pragma once

// Finitely supported fields xi : G -> C(X) over the circle grid, the
// representations L_g and pi_g = rho_g^{1/2} L_g, amenability witnesses and
// coboundary cocycles built from families of witnesses.

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "amencert/circle.hpp"
#include "amencert/group.hpp"
#include "amencert/measures.hpp"

namespace amencert {

class ModuleVector {
 public:
  ModuleVector(GroupSpec spec, Index grid_size) : spec_(spec), grid_size_(grid_size) {}

  const GroupSpec& spec() const { return spec_; }
  Index grid_size() const { return grid_size_; }
  const std::map<Word, GridFunction>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  std::set<Word> support() const;
  /// max |g| over the support; -1 when empty.
  int support_radius() const;

  void set(const Word& g, GridFunction f);
  /// nullptr when g is outside the support.
  const GridFunction* find(const Word& g) const;

  ModuleVector& operator+=(const ModuleVector& other);
  ModuleVector& operator-=(const ModuleVector& other);

 private:
  GroupSpec spec_;
  Index grid_size_;
  std::map<Word, GridFunction> entries_;
};

ModuleVector operator+(ModuleVector a, const ModuleVector& b);
ModuleVector operator-(ModuleVector a, const ModuleVector& b);
/// Pointwise multiplication of every entry by a grid function.
ModuleVector multiply(const GridFunction& weight, ModuleVector xi);
/// sup over support union and grid of |a_g(x) - b_g(x)|.
double max_abs_difference(const ModuleVector& a, const ModuleVector& b);

/// <xi, eta>_{C(X)}(x) = sum_g xi_g(x) eta_g(x)
GridFunction module_inner(const ModuleVector& xi, const ModuleVector& eta);
/// int <xi, eta>_{C(X)} dnu
double scalar_inner(const ModuleVector& xi, const ModuleVector& eta, const GridMeasure& nu);

/// (L_g xi)_h(x) = xi_{g^-1 h}(Phi_{g^-1} x), with Phi_{g^-1} supplied.
ModuleVector apply_L(const CircleDiffeo& phi_ginv, const Word& g, const ModuleVector& xi);
ModuleVector apply_L(const ActionSpec& action, const Word& g, const ModuleVector& xi);
/// pi_g = rho_g^{1/2} L_g
ModuleVector apply_pi(const ActionSpec& action, const GridMeasure& nu, const Word& g,
                      const ModuleVector& xi);

/// Divides each entry pointwise by <xi,xi>^{1/2}, enforcing <xi,xi> = 1_X.
ModuleVector normalize_pointwise(ModuleVector xi);

struct WitnessReport {
  bool nonnegative = false;    // (a)
  bool unit_norm = false;      // (b), within unit_norm_tol
  bool within_epsilon = false; // (c)
  double min_value = 0.0;
  double unit_norm_defect = 0.0;  // sup_x |<xi,xi>(x) - 1|
  double defect = 0.0;            // sup_x (1 - (1/#S) sum_s <xi, L_s xi>(x))
  double epsilon = 0.0;
  double unit_norm_tol = 1e-6;

  bool valid() const { return nonnegative && unit_norm && within_epsilon; }
};

/// sup_x (1 - (1/#S) sum_s <xi, L_s xi>_{C(X)}(x))
double witness_defect(const ModuleVector& xi, const ActionSpec& action);
WitnessReport verify_witness(const ModuleVector& xi, const ActionSpec& action, double epsilon);

/// Defect of the constant-profile witness |F|^{-1/2} 1_F (x) 1_X computed by
/// integer overlap counts: (#S |F| - sum_s |F cap sF|) / (#S |F|), reduced.
std::pair<long long, long long> overlap_defect_exact(const std::set<Word>& support);

/// |F|^{-1/2} 1_F (x) 1_X for the box F = {0..n-1}^d in Z^d; defect exactly 1/n.
ModuleVector build_folner_witness(const GroupSpec& spec, int n, Index grid_size);

/// Positive witness supported on the ball of the given radius, with smooth
/// x-dependent profiles decaying like 2^-|g|; `phase` varies the profile.
ModuleVector build_ball_witness(const GroupSpec& spec, int radius, Index grid_size, double phase);

/// Pointwise max / min of rho_g over the ball of radius R.
struct RhoBounds {
  int radius = 0;
  GridFunction sup;
  GridFunction inf;
};

RhoBounds truncated_rho_bounds(const ActionSpec& action, const GridMeasure& nu, int radius);
RhoBounds rho_bounds_from(const BallCocycle& bc);

struct LemmaDefect {
  double sup_defect = 0.0;  // rho_g (max_{B_R} rho)(Phi_{g^-1} x) vs max_{g B_R} rho
  double inf_defect = 0.0;
};

LemmaDefect lemma_rho_identity_check(const ActionSpec& action, const GridMeasure& nu,
                                     const Word& g, int radius);

struct CocycleLevel {
  ModuleVector witness;
  int overlap_radius = 0;  // <xi, L_g xi> = 0 whenever |g| >= overlap_radius
  double defect = 0.0;     // witness defect of this level
  double generator_bound = 0.0;  // max_s sup_x <L_s xi - xi, L_s xi - xi>(x)
};

/// Levels xi_n of the coboundary construction b_g = (+)_n (L_g xi_n - xi_n).
class CocycleFamily {
 public:
  /// Checks conditions (a) and (b) for each witness and measures R_n and the
  /// per-level generator bounds against the given action.
  CocycleFamily(const ActionSpec& action, std::vector<ModuleVector> witnesses,
                double unit_norm_tol = 1e-6);

  const std::vector<CocycleLevel>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  const GroupSpec& spec() const { return spec_; }
  Index grid_size() const { return grid_size_; }
  /// Upper constant: sum of the per-level generator bounds.
  double K() const { return K_; }
  /// #{n : |g| >= R_n}
  int phi(std::size_t word_length) const;

 private:
  GroupSpec spec_;
  Index grid_size_;
  std::vector<CocycleLevel> levels_;
  double K_ = 0.0;
};

inline constexpr int kDefaultCocycleLevels = 8;

/// Z^d: Folner boxes of side n^2 (defect 1/n^2). F_k: ball witnesses of
/// radius (n-1)/2 with level-dependent profiles.
CocycleFamily default_cocycle_family(const ActionSpec& action, int levels = kDefaultCocycleLevels);

/// Per-level L_g xi_n - xi_n.
std::vector<ModuleVector> build_coboundary_cocycle(const CocycleFamily& family,
                                                   const ActionSpec& action, const Word& g);

/// max over levels of sup |b_{gh} - (T_g b_h + b_g)|.
double check_cocycle(const CocycleFamily& family, const ActionSpec& action, const Word& g,
                     const Word& h);

struct CocycleBounds {
  GridFunction norm_sq;  // <b_g, b_g>_{C(X)} summed over levels
  int phi = 0;
  double lower = 0.0;  // 2 phi(|g|)
  double upper = 0.0;  // K |g|^2
};

CocycleBounds cocycle_bounds(const CocycleFamily& family, const ActionSpec& action, const Word& g);

enum class WeightMode { Inf, Sup };

struct WeightedNorm {
  double value = 0.0;            // int w <b_g,b_g> dnu, w = truncated rho inf/sup
  double weight_integral = 0.0;  // int w dnu
  double lower = 0.0;            // 2 phi(|g|) * weight_integral
  double upper = 0.0;            // K |g|^2 * weight_integral
};

WeightedNorm weight_cocycle(const CocycleFamily& family, const ActionSpec& action,
                            const GridMeasure& nu, const RhoBounds& bounds, WeightMode mode,
                            const Word& g);
WeightedNorm weight_cocycle(const CocycleFamily& family, const ActionSpec& action,
                            const GridMeasure& nu, int radius, WeightMode mode, const Word& g);

/// Cocycle law for the weighted cocycle under U_g = (+) pi_g, in the form that
/// is exact over shifted index sets:
///   U_g (w_{B_R}^{1/2} b_h) + w_{g B_R}^{1/2} b_g = w_{g B_R}^{1/2} b_{gh},
/// where w_A = min (or max) of rho_k over k in A. Returns the sup defect.
double weighted_cocycle_defect(const CocycleFamily& family, const ActionSpec& action,
                               const GridMeasure& nu, int radius, WeightMode mode, const Word& g,
                               const Word& h);

}  // namespace amencert
