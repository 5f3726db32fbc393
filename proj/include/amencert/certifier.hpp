#pragma once

// Verdicts and evidence: the Hellinger/spectral-gap non-amenability
// certificate, its generator-derivative specialisation on Lebesgue measure,
// truncated integrability evidence, the near-isometry criterion, and a replay
// of the certificate's inequality chain on a concrete witness.

#include <string>
#include <vector>

#include "amencert/circle.hpp"
#include "amencert/measures.hpp"
#include "amencert/module.hpp"
#include "amencert/spectral.hpp"

namespace amencert {

enum class Verdict { CertifiedNotAmenable, Inconclusive };

std::string to_string(Verdict v);

inline constexpr double kCertificateSlack = 1e-6;

struct CertificateReport {
  Verdict verdict = Verdict::Inconclusive;
  std::string route;          // "hellinger" or "generator_derivative"
  double avg_h_sq = 0.0;      // (1/#S) sum_s H(nu, s*nu)^2
  double beta = 1.0;          // 1 - avg_h_sq
  Lambda1Value lambda1;
  double margin = 0.0;        // lambda1/2 - avg_h_sq
  double slack = 0.0;         // delta_cert = 1e-6 + quadrature error estimate
  double quadrature_error = 0.0;
  double cross_check = 0.0;   // |this route - the other route|
  Index grid_size = 0;
  GroupSpec group;
  std::string reason;
};

/// Throws PolicyError when lambda1 is an estimate from above.
CertificateReport certify_hellinger(const ActionSpec& action, const GridMeasure& nu,
                                    const Lambda1Value& lambda1);

/// 1 - (1/#S) sum_s int sqrt(D phi_s) dx < lambda1 / 2, on Lebesgue measure.
CertificateReport certify_generator_derivative(const ActionSpec& action, const Lambda1Value& lambda1);

struct EvidenceReport {
  std::vector<int> radii;
  std::vector<double> sup_integrals;  // int rho_bar_R dnu
  std::vector<double> inf_integrals;  // int rho_underbar_R dnu
  bool sup_bounded_hint = false;
  bool inf_positive_hint = false;
  Index grid_size = 0;
};

EvidenceReport evidence_theorem2(const ActionSpec& action, const GridMeasure& nu, int max_radius);

/// Arc [start, start + length) on the circle, length in (0, 1].
struct Arc {
  double start = 0.0;
  double length = 1.0;
  bool contains(double x) const;
};

struct NearIsometryReport {
  int radius = 0;
  double c_r = 0.0;             // max over B_R and grid points in U of d_x(phi_g, iota_g)
  Word worst_word;
  bool criterion_met = false;   // c_r < 1
  double implied_deriv_lower = 0.0;  // 1 - c_r when met
  double measured_deriv_inf = 0.0;   // inf over B_R, U of D phi_g
  double arc_measure = 0.0;          // Lebesgue measure of U cap grid
  double implied_inf_integral = 0.0; // (1 - c_r) |U| lower bound for int_U rho_underbar_R
  double measured_inf_integral = 0.0;
  std::size_t grid_points_in_arc = 0;
};

/// `comparison` must act by rotations on the same group and grid.
NearIsometryReport near_isometry_check(const ActionSpec& action, const ActionSpec& comparison,
                                       const Arc& arc, int radius);

struct ReplayOptions {
  double psd_tol = 1e-8;
  double witness_norm_tol = 1e-6;
};

struct ReplayReport {
  int radius = 0;          // window B_R for the convolution matrix
  int psi_support_radius = 0;
  std::size_t window_size = 0;
  std::vector<std::pair<Word, double>> psi;  // nonzero psi_g, g in B_R
  double psi_min_eigenvalue = 0.0;
  double eta_norm = 0.0;
  std::vector<double> psi_generators;        // psi_s for s in S
  std::vector<double> eta_translate_inner;   // <eta, s.eta>
  double tau_trunc = 0.0;                    // bound on |<eta,s.eta> - psi_s|
  double beta = 1.0;
  double witness_defect = 0.0;               // epsilon, recomputed
  double chain_lower = 0.0;                  // beta (1 - epsilon)
  double avg_psi = 0.0;                      // (1/#S) sum_s psi_s
  double rayleigh = 0.0;                     // (2/#S) sum_s (1 - <eta, s.eta>)
  Lambda1Value lambda1;
  double avg_h_sq = 0.0;
  bool rayleigh_dominates = false;           // rayleigh >= lambda1 - 1e-9
};

/// max |k h^-1| over pairs in the support of xi: psi_g = 0 beyond this length.
int psi_support_radius(const ModuleVector& xi);

/// Throws InputError when xi fails (a)/(b) or R is below the support radius
/// of psi, NumericError when the psi-matrix is not PSD within tolerance.
ReplayReport replay_theorem3(const ModuleVector& xi, const ActionSpec& action,
                             const GridMeasure& nu, int radius, const ReplayOptions& opts = {});

}  // namespace amencert
